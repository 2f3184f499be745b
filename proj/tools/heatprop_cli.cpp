// Command line front end: generate | propagate | selftrain | refine | bench | stats.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"

#include "heatprop/chebyshev.hpp"
#include "heatprop/refine.hpp"
#include "heatprop/report.hpp"
#include "heatprop/rng.hpp"

namespace hp = heatprop;

namespace {

struct GraphArgs {
    std::string edges_path;
    std::string labels_path;
    std::string laplacian = "combinatorial";
    int labels_per_class = 0;
    int labels_total = 0;
    std::uint64_t split_seed = 1;
};

void add_graph_args(CLI::App* cmd, GraphArgs& args) {
    cmd->add_option("--edges", args.edges_path, "edge list file: 'i j [w]' per line")
        ->required();
    cmd->add_option("--labels", args.labels_path, "label file: 'node label' per line")
        ->required();
    cmd->add_option("--laplacian", args.laplacian,
                    "combinatorial|sym|sym-selfloops|randomwalk")
        ->capture_default_str();
    cmd->add_option("--labels-per-class", args.labels_per_class,
                    "class-balanced labeled nodes per class");
    cmd->add_option("--labels-total", args.labels_total,
                    "total labeled budget ignoring class balance");
    cmd->add_option("--split-seed", args.split_seed, "seed for the labeled/test split")
        ->capture_default_str();
}

struct LoadedProblem {
    hp::Graph graph;
    std::vector<int> labels;
    int n_classes = 0;
    hp::Split split;
};

std::vector<int> read_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw hp::DataError("cannot open label file '" + path + "'");
    std::vector<std::pair<int, int>> pairs;
    std::string line;
    int lineno = 0;
    int max_node = -1;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        int node, label;
        if (!(ls >> node >> label))
            throw hp::DataError(path + ":" + std::to_string(lineno) + ": expected 'node label'");
        pairs.emplace_back(node, label);
        max_node = std::max(max_node, node);
    }
    std::vector<int> labels(max_node + 1, -1);
    for (const auto& [node, label] : pairs) {
        if (node < 0) throw hp::DataError("negative node id in '" + path + "'");
        labels[node] = label;
    }
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] < 0)
            throw hp::DataError("node " + std::to_string(i) + " missing from '" + path + "'");
    return labels;
}

LoadedProblem load_problem(const GraphArgs& args) {
    LoadedProblem prob;
    prob.labels = read_labels(args.labels_path);
    prob.graph = hp::load_edge_list(args.edges_path, static_cast<int>(prob.labels.size()));
    for (const int y : prob.labels) prob.n_classes = std::max(prob.n_classes, y + 1);
    if (prob.n_classes < 2) throw hp::DataError("need at least two classes");
    if (args.labels_total > 0)
        prob.split = hp::sample_split_total(prob.labels, args.labels_total, args.split_seed);
    else if (args.labels_per_class > 0)
        prob.split = hp::sample_split(prob.labels, args.labels_per_class, args.split_seed);
    else
        throw hp::UsageError("pass --labels-per-class or --labels-total");
    return prob;
}

struct OperatorArgs {
    std::string strategy = "spectral";  // spectral|chebyshev|subordination
    int cheb_degree = 0;
    double cheb_auto_tol = 0.0;
    int quad_nodes = 64;
    std::string dump_eigenvalues;
};

void add_operator_args(CLI::App* cmd, OperatorArgs& args) {
    cmd->add_option("--strategy", args.strategy, "spectral|chebyshev|subordination")
        ->capture_default_str();
    cmd->add_option("--cheb-degree", args.cheb_degree,
                    "series degree (0 = default by smoothness)");
    cmd->add_option("--cheb-auto-degree", args.cheb_auto_tol,
                    "pick the degree from this error-estimate tolerance");
    cmd->add_option("--quad-nodes", args.quad_nodes, "subordination quadrature nodes")
        ->capture_default_str();
    cmd->add_option("--dump-eigenvalues", args.dump_eigenvalues,
                    "write the spectrum to a text file (spectral strategy only)");
}

std::unique_ptr<hp::KernelOperator> make_operator(const hp::Graph& g, hp::LaplacianKind kind,
                                                  double s, double t, const OperatorArgs& args) {
    const hp::Sparse L = hp::laplacian(g, kind);
    if (args.strategy == "spectral" || args.strategy == "subordination") {
        hp::SpectralDecomposition spec = hp::eigendecompose(L);
        if (!args.dump_eigenvalues.empty()) {
            std::ofstream out(args.dump_eigenvalues);
            if (!out)
                throw hp::DataError("cannot write '" + args.dump_eigenvalues + "'");
            char buf[32];
            for (int k = 0; k < spec.n(); ++k) {
                std::snprintf(buf, sizeof buf, "%.17g\n", spec.eigenvalues[k]);
                out << buf;
            }
        }
        if (args.strategy == "spectral")
            return std::make_unique<hp::SpectralOperator>(std::move(spec), s);
        if (s != 0.5)
            throw hp::UsageError("the subordination strategy implements s = 1/2 only");
        auto base = std::make_shared<hp::SpectralOperator>(std::move(spec), 1.0);
        return std::make_unique<hp::SubordinationOperator>(std::move(base), args.quad_nodes);
    }
    if (args.strategy == "chebyshev") {
        const double bound = hp::cheb_lambda_bound(L);
        int degree = args.cheb_degree;
        if (args.cheb_auto_tol > 0.0)
            degree = hp::cheb_auto_degree(hp::ChebTarget::heat(s, t), bound,
                                          args.cheb_auto_tol);
        return std::make_unique<hp::ChebyshevOperator>(L, s, bound, degree);
    }
    throw hp::UsageError("unknown strategy '" + args.strategy + "'");
}

void write_predictions(const hp::Matrix& U, const std::string& out_path) {
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw hp::DataError("cannot write '" + out_path + "'");
        out = &file;
    }
    const std::vector<int> pred = hp::predict(U);
    (*out) << "node,label,score\n";
    char buf[64];
    for (std::size_t i = 0; i < pred.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%d,%.17g\n", i, pred[i],
                      U(static_cast<int>(i), pred[i]));
        (*out) << buf;
    }
}

void report_accuracy(const hp::Matrix& U, const LoadedProblem& prob) {
    const std::vector<int> pred = hp::predict(U);
    std::cerr << "test accuracy: " << hp::accuracy(pred, prob.labels, prob.split.test)
              << " over " << prob.split.test.size() << " nodes\n";
}

int run_generate(int n, double noise, std::uint64_t seed, int k, double bw,
                 const std::string& prefix) {
    hp::TwoMoonConfig cfg;
    cfg.n = n;
    cfg.noise = noise;
    cfg.seed = seed;
    cfg.k = k;
    cfg.bandwidth_scale = bw;
    const hp::TwoMoonData data = hp::two_moon(cfg);

    char buf[96];
    std::ofstream points(prefix + "_points.csv");
    std::ofstream labels(prefix + "_labels.txt");
    std::ofstream edges(prefix + "_edges.txt");
    if (!points || !labels || !edges)
        throw hp::DataError("cannot write outputs with prefix '" + prefix + "'");
    for (int i = 0; i < cfg.n; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", data.points(i, 0), data.points(i, 1));
        points << buf;
        labels << i << " " << data.labels[i] << "\n";
    }
    for (int i = 0; i < data.graph.n; ++i)
        for (hp::Sparse::InnerIterator it(data.graph.weights, i); it; ++it)
            if (it.col() > i) {
                std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i,
                              static_cast<int>(it.col()), it.value());
                edges << buf;
            }
    std::cerr << "wrote " << prefix << "_{points.csv,labels.txt,edges.txt}, "
              << (hp::is_connected(data.graph) ? "connected" : "disconnected") << " graph\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractional heat-kernel diffusion for graph semi-supervised learning"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "write a two-moon dataset to files");
    int gen_n = 1000;
    double gen_noise = 0.15, gen_bw = 1.0;
    std::uint64_t gen_seed = 1;
    int gen_k = 10;
    std::string gen_prefix = "twomoon";
    gen->add_option("--n", gen_n, "point count (even)")->capture_default_str();
    gen->add_option("--noise", gen_noise, "gaussian noise std")->capture_default_str();
    gen->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
    gen->add_option("--knn", gen_k, "kNN neighbor count")->capture_default_str();
    gen->add_option("--bandwidth-scale", gen_bw, "sigma = scale * mean kNN distance")
        ->capture_default_str();
    gen->add_option("--out-prefix", gen_prefix, "output file prefix")->capture_default_str();

    // propagate
    auto* prop = app.add_subcommand("propagate", "one diffusion run with a chosen scheme");
    GraphArgs prop_graph;
    OperatorArgs prop_op;
    add_graph_args(prop, prop_graph);
    add_operator_args(prop, prop_op);
    double prop_s = 1.0, prop_t = 1.0, prop_dt = 0.0;
    int prop_scheme = 3;
    std::string prop_stepper = "closed", prop_out;
    bool prop_allow_unstable = false, prop_acc = false;
    prop->add_option("--s", prop_s, "fractional order in (0,1]")->capture_default_str();
    prop->add_option("--t", prop_t, "diffusion time")->capture_default_str();
    prop->add_option("--scheme", prop_scheme, "1|2|3")->capture_default_str();
    prop->add_option("--stepper", prop_stepper, "closed|fe|be|exp|rk4")->capture_default_str();
    prop->add_option("--dt", prop_dt, "step size for the steppers");
    prop->add_flag("--allow-unstable", prop_allow_unstable,
                   "run forward Euler beyond its stability bound");
    prop->add_option("--out", prop_out, "predictions CSV path (default stdout)");
    prop->add_flag("--print-accuracy", prop_acc, "print test accuracy to stderr");

    // selftrain
    auto* st = app.add_subcommand("selftrain", "iterative pseudo-labeling run");
    GraphArgs st_graph;
    OperatorArgs st_op;
    add_graph_args(st, st_graph);
    add_operator_args(st, st_op);
    double st_s = 1.0, st_theta = 0.4, st_dt = 1.0;
    int st_tmax = 20;
    std::string st_conf = "base", st_schedule = "constant", st_out, st_log;
    bool st_acc = false;
    st->add_option("--s", st_s, "fractional order in (0,1]")->capture_default_str();
    st->add_option("--theta", st_theta, "confidence threshold in (0,1)")->capture_default_str();
    st->add_option("--tmax", st_tmax, "iteration budget")->capture_default_str();
    st->add_option("--dt", st_dt, "exponential step size")->capture_default_str();
    st->add_option("--confidence", st_conf, "base|entropy")->capture_default_str();
    st->add_option("--theta-schedule", st_schedule, "constant|linear")->capture_default_str();
    st->add_option("--out", st_out, "predictions CSV path (default stdout)");
    st->add_option("--log", st_log, "per-iteration JSON lines path (default stderr)");
    st->add_flag("--print-accuracy", st_acc, "print test accuracy to stderr");

    // refine
    auto* ref = app.add_subcommand("refine", "embedding-driven graph refinement + diffusion");
    GraphArgs ref_graph;
    add_graph_args(ref, ref_graph);
    std::string ref_emb, ref_att, ref_alpha = "0.4,0.3,0.3", ref_combine = "similarity";
    std::string ref_out, ref_anomaly_out;
    double ref_tau = 0.0, ref_s = 1.0, ref_t = 1.0, ref_sigma = 0.0, ref_theta = 0.4;
    int ref_tmax = 1, ref_anomaly_k = 0;
    bool ref_acc = false;
    ref->add_option("--embeddings", ref_emb, "CSV embedding rows")->required();
    ref->add_option("--attention", ref_att, "edge-list attention weights 'i j w'");
    ref->add_option("--alpha", ref_alpha, "three combination weights, must sum to 1")
        ->capture_default_str();
    ref->add_option("--combine", ref_combine, "gat|similarity")->capture_default_str();
    ref->add_option("--tau", ref_tau, "sparsification threshold")->capture_default_str();
    ref->add_option("--s", ref_s, "fractional order in (0,1]")->capture_default_str();
    ref->add_option("--t", ref_t, "diffusion time")->capture_default_str();
    ref->add_option("--sigma", ref_sigma, "gaussian bandwidth (<= 0: median heuristic)");
    ref->add_option("--theta", ref_theta, "self-training threshold")->capture_default_str();
    ref->add_option("--tmax", ref_tmax, "self-training iterations after refinement")
        ->capture_default_str();
    ref->add_option("--anomaly-k", ref_anomaly_k, "also score neighborhoods of this size");
    ref->add_option("--anomaly-out", ref_anomaly_out, "anomaly score output path");
    ref->add_option("--out", ref_out, "predictions CSV path (default stdout)");
    ref->add_flag("--print-accuracy", ref_acc, "print test accuracy to stderr");

    // bench
    auto* bench = app.add_subcommand("bench", "trial grid with aggregated statistics");
    std::string bench_preset, bench_out;
    int bench_trials = 0, bench_threads = -1;
    std::uint64_t bench_seed = 0;
    bool bench_seed_set = false, bench_table = false, bench_stats = false;
    bench->add_option("--preset", bench_preset, "JSON experiment config")->required();
    bench->add_option("--trials", bench_trials, "override trial count");
    bench->add_option("--threads", bench_threads, "override worker count");
    bench->add_option("--seed", bench_seed, "override master seed")
        ->each([&](const std::string&) { bench_seed_set = true; });
    bench->add_option("--out", bench_out, "report JSON path");
    bench->add_flag("--table", bench_table, "print the aligned accuracy table");
    bench->add_flag("--stats", bench_stats, "print ANOVA and pairwise comparisons");

    // stats
    auto* stats = app.add_subcommand("stats", "recompute significance tests from a report");
    std::string stats_report;
    stats->add_option("--report", stats_report, "report JSON written by bench")->required();

    try {
        app.parse(argc, argv);

        if (gen->parsed())
            return run_generate(gen_n, gen_noise, gen_seed, gen_k, gen_bw, gen_prefix);

        if (prop->parsed()) {
            const LoadedProblem prob = load_problem(prop_graph);
            const auto kind = hp::parse_laplacian_kind(prop_graph.laplacian);
            const auto op = make_operator(prob.graph, kind, prop_s, prop_t, prop_op);
            hp::Matrix U;
            if (prop_stepper == "closed") {
                U = hp::run_scheme(*op, prop_scheme,
                                   hp::one_hot_initial(prob.labels, prob.split.labeled,
                                                       prob.graph.n, prob.n_classes),
                                   prob.split.labeled, prob.graph.degrees, prop_t);
            } else {
                if (prop_scheme == 2)
                    throw hp::UsageError("scheme 2 is a closed-form kernel map; steppers "
                                         "integrate the source ODE of schemes 1 and 3");
                if (!(prop_dt > 0.0)) throw hp::UsageError("steppers need --dt > 0");
                hp::LabelState state;
                state.U = hp::one_hot_initial(prob.labels, prob.split.labeled, prob.graph.n,
                                              prob.n_classes);
                state.c = prob.n_classes;
                state.labeled = prob.split.labeled;
                state.F = prop_scheme == 1
                              ? hp::Matrix::Zero(prob.graph.n, prob.n_classes)
                              : hp::build_source(state.U, state.labeled,
                                                 hp::SourceVariant::DegreeScaled,
                                                 &prob.graph.degrees);
                hp::StepOptions opts;
                opts.allow_unstable = prop_allow_unstable;
                U = hp::integrate(*op, state, hp::parse_stepper_kind(prop_stepper), prop_dt,
                                  prop_t, opts);
            }
            write_predictions(U, prop_out);
            if (prop_acc) report_accuracy(U, prob);
            return 0;
        }

        if (st->parsed()) {
            const LoadedProblem prob = load_problem(st_graph);
            const auto kind = hp::parse_laplacian_kind(st_graph.laplacian);
            const auto op = make_operator(prob.graph, kind, st_s, st_dt, st_op);
            hp::SelfTrainOptions opts;
            opts.theta0 = st_theta;
            opts.t_max = st_tmax;
            opts.dt = st_dt;
            if (st_schedule == "linear")
                opts.schedule = hp::ThetaSchedule::LinearDecay;
            else if (st_schedule != "constant")
                throw hp::UsageError("unknown theta schedule '" + st_schedule + "'");
            if (st_conf == "entropy")
                opts.variant = hp::ConfidenceVariant::Entropy;
            else if (st_conf != "base")
                throw hp::UsageError("unknown confidence variant '" + st_conf + "'");

            const hp::Matrix U0 = hp::one_hot_initial(prob.labels, prob.split.labeled,
                                                      prob.graph.n, prob.n_classes);
            const hp::Matrix F0 = hp::build_source(U0, prob.split.labeled,
                                                   hp::SourceVariant::Plain);
            const hp::SelfTrainResult res =
                hp::self_train(*op, U0, F0, prob.split.labeled, opts);

            std::ostream* log = &std::cerr;
            std::ofstream log_file;
            if (!st_log.empty()) {
                log_file.open(st_log);
                if (!log_file) throw hp::DataError("cannot write '" + st_log + "'");
                log = &log_file;
            }
            for (const hp::SelfTrainIteration& it : res.history) {
                hp::Json j;
                j["k"] = it.k;
                j["n_labeled"] = it.n_labeled;
                j["n_selected"] = it.n_selected;
                j["frobenius_delta"] = it.frobenius_delta;
                (*log) << j.dump() << "\n";
            }
            if (!res.converged)
                std::cerr << "did not converge within " << st_tmax << " iterations\n";
            write_predictions(res.U, st_out);
            if (st_acc) report_accuracy(res.U, prob);
            return 0;
        }

        if (ref->parsed()) {
            const LoadedProblem prob = load_problem(ref_graph);
            hp::RefineOptions opts;
            opts.kind = hp::parse_laplacian_kind(ref_graph.laplacian);
            if (std::sscanf(ref_alpha.c_str(), "%lf,%lf,%lf", &opts.alpha1, &opts.alpha2,
                            &opts.alpha3) != 3)
                throw hp::UsageError("--alpha needs three comma-separated numbers");
            opts.tau = ref_tau;
            opts.s = ref_s;
            opts.t = ref_t;
            opts.sigma = ref_sigma;
            opts.theta0 = ref_theta;
            opts.t_max = ref_tmax;
            if (ref_combine == "gat")
                opts.mode = hp::CombineMode::Gat;
            else if (ref_combine != "similarity")
                throw hp::UsageError("unknown combine mode '" + ref_combine + "'");

            const hp::EmbeddingSet emb = hp::load_embeddings(ref_emb, ref_att, prob.graph.n);
            if (ref_anomaly_k > 0) {
                const std::vector<int> scores =
                    hp::anomaly_scores(prob.graph, emb.Z, ref_anomaly_k);
                std::ostream* out = &std::cerr;
                std::ofstream file;
                if (!ref_anomaly_out.empty()) {
                    file.open(ref_anomaly_out);
                    if (!file) throw hp::DataError("cannot write '" + ref_anomaly_out + "'");
                    out = &file;
                }
                for (std::size_t i = 0; i < scores.size(); ++i)
                    (*out) << i << " " << scores[i] << "\n";
            }
            const hp::RefineResult res =
                hp::refine_and_diffuse(prob.graph, emb, prob.labels, prob.split.labeled, opts);
            for (const std::string& w : res.warnings) std::cerr << "warning: " << w << "\n";

            hp::Matrix U(prob.graph.n, prob.n_classes);
            U.setZero();
            for (int i = 0; i < prob.graph.n; ++i) U(i, res.predictions[i]) = 1.0;
            write_predictions(U, ref_out);
            if (ref_acc)
                std::cerr << "test accuracy: "
                          << hp::accuracy(res.predictions, prob.labels, prob.split.test)
                          << " over " << prob.split.test.size() << " nodes\n";
            return 0;
        }

        if (bench->parsed()) {
            hp::ExperimentConfig cfg = hp::config_from_json(hp::read_json_file(bench_preset));
            if (bench_trials > 0) cfg.trials = bench_trials;
            if (bench_threads >= 0) cfg.threads = bench_threads;
            if (bench_seed_set) cfg.seed = bench_seed;
            const hp::BenchResult result = hp::run_bench(cfg);
            const hp::Json doc = hp::report_document(result);
            if (!bench_out.empty()) hp::write_report(doc, bench_out);
            if (bench_table || bench_out.empty()) std::cout << hp::render_table(result);
            if (bench_stats) std::cout << hp::render_stats(result);
            return 0;
        }

        if (stats->parsed()) {
            const hp::Json doc = hp::read_report(stats_report);
            // Group rows by (s, labels) and compare schemes.
            std::map<std::pair<double, int>, std::vector<std::pair<int, std::vector<double>>>>
                cells;
            for (const auto& row : doc["rows"]) {
                cells[{row["s"].get<double>(), row["labels"].get<int>()}].emplace_back(
                    row["scheme"].get<int>(), row["accuracies"].get<std::vector<double>>());
            }
            for (const auto& [key, rows] : cells) {
                if (rows.size() < 2) continue;
                std::vector<std::vector<double>> groups;
                for (const auto& [scheme, accs] : rows) groups.push_back(accs);
                const hp::AnovaResult anova = hp::anova_oneway(groups);
                std::printf("s=%-6.3g labels=%-4d ANOVA F(%d,%d)=%.4f p=%.4f\n", key.first,
                            key.second, anova.df_between, anova.df_within, anova.F, anova.p);
                for (const hp::PairwiseComparison& cmp : hp::bonferroni_pairwise(groups))
                    std::printf("    scheme %d vs %d: mean diff %+0.4f, t=%+0.3f, p=%.4f "
                                "(adjusted %.4f)\n",
                                rows[cmp.i].first, rows[cmp.j].first, cmp.mean_diff, cmp.t,
                                cmp.p_raw, cmp.p_adjusted);
                std::printf("    %s\n", hp::kPosthocNote);
            }
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const hp::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const hp::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const hp::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
