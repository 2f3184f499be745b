#include "heatprop/trials.hpp"

#include <atomic>
#include <mutex>
#include <thread>

#include "heatprop/rng.hpp"

namespace heatprop {

namespace {

// Stream tags for per-trial seed derivation.
constexpr std::uint64_t kDataStream = 0;
constexpr std::uint64_t kSplitStreamBase = 1000;
constexpr std::uint64_t kTotalSplitStreamBase = 1 << 20;

struct TrialContext {
    SpectralDecomposition spec;
    std::vector<int> labels;
    Vector degrees;
};

Split make_split(const ExperimentConfig& cfg, const std::vector<int>& labels, int budget,
                 std::uint64_t master, int trial) {
    if (cfg.labels_total > 0) {
        const auto seed = derive_seed(master, trial, kTotalSplitStreamBase + budget);
        return sample_split_total(labels, budget, seed);
    }
    const auto seed = derive_seed(master, trial, kSplitStreamBase + budget);
    return sample_split(labels, budget, seed, cfg.val_size, cfg.test_size);
}

} // namespace

Matrix run_scheme(const KernelOperator& op, int scheme, const Matrix& U0,
                  const std::vector<int>& labeled, const Vector& degrees, double t) {
    switch (scheme) {
        case 1:
            return op.heat(t, U0);
        case 2: {
            const Matrix F = build_source(U0, labeled, SourceVariant::DegreeScaled, &degrees);
            return op.heat(t, F);
        }
        case 3: {
            const Matrix F = build_source(U0, labeled, SourceVariant::DegreeScaled, &degrees);
            return op.heat(t, U0) + op.phi(t, F);
        }
        default:
            throw UsageError("scheme must be 1, 2 or 3");
    }
}

BenchResult run_bench(const ExperimentConfig& config) {
    if (config.trials < 1) throw UsageError("need at least one trial");
    for (const double s : config.s_values)
        if (config.t_by_s.find(s) == config.t_by_s.end() || config.t_by_s.at(s).empty())
            throw UsageError("no diffusion time configured for s=" + std::to_string(s));

    const std::vector<int> budgets =
        config.labels_total > 0 ? std::vector<int>{config.labels_total} : config.labels_per_class;
    if (budgets.empty()) throw UsageError("no label budgets configured");
    if (config.schemes.empty()) throw UsageError("no schemes configured");

    for (const auto& [s, ts] : config.t_by_s)
        if (ts.size() > 1 && config.val_size == 0)
            throw UsageError("multiple diffusion times need a validation split to choose from");

    BenchResult result;
    result.config = config;
    for (const double s : config.s_values)
        for (const int budget : budgets)
            for (const int scheme : config.schemes) {
                CellResult cell;
                cell.s = s;
                cell.labels = budget;
                cell.scheme = scheme;
                cell.t_candidates = config.t_by_s.at(s);
                cell.accuracies.resize(config.trials, 0.0);
                cell.t_chosen.resize(config.trials, 0.0);
                result.cells.push_back(std::move(cell));
            }

    // The citation graph is fixed, so its decomposition is shared by every
    // trial; the synthetic dataset is regenerated per trial instead.
    TrialContext shared;
    if (config.dataset == "cora") {
        const CoraData cora = load_cora(config.cora_edges, config.cora_labels);
        shared.spec = eigendecompose(laplacian(cora.graph, config.kind));
        shared.labels = cora.labels;
        shared.degrees = cora.graph.degrees;
    } else if (config.dataset != "twomoon") {
        throw UsageError("unknown dataset '" + config.dataset + "'");
    }

    const auto run_trial = [&](int trial) {
        TrialContext local;
        const TrialContext* ctx = &shared;
        if (config.dataset == "twomoon") {
            TwoMoonConfig tm = config.twomoon;
            tm.seed = derive_seed(config.seed, trial, kDataStream);
            const TwoMoonData data = two_moon(tm);
            local.spec = eigendecompose(laplacian(data.graph, config.kind));
            local.labels = data.labels;
            local.degrees = data.graph.degrees;
            ctx = &local;
        }
        int n_classes = 0;
        for (const int y : ctx->labels) n_classes = std::max(n_classes, y + 1);

        for (const int budget : budgets) {
            const Split split = make_split(config, ctx->labels, budget, config.seed, trial);
            const Matrix U0 = one_hot_initial(ctx->labels, split.labeled, ctx->spec.n(),
                                              n_classes);
            for (std::size_t ci = 0; ci < result.cells.size(); ++ci) {
                CellResult& cell = result.cells[ci];
                if (cell.labels != budget) continue;
                const SpectralOperator op(ctx->spec, cell.s);
                double best_val = -1.0, best_acc = 0.0, best_t = cell.t_candidates.front();
                for (const double t : cell.t_candidates) {
                    const Matrix U =
                        run_scheme(op, cell.scheme, U0, split.labeled, ctx->degrees, t);
                    const std::vector<int> pred = predict(U);
                    const double val_acc = split.val.empty()
                                               ? 0.0
                                               : accuracy(pred, ctx->labels, split.val);
                    const double test_acc = accuracy(pred, ctx->labels, split.test);
                    if (cell.t_candidates.size() == 1 || val_acc > best_val) {
                        best_val = val_acc;
                        best_acc = test_acc;
                        best_t = t;
                    }
                }
                cell.accuracies[trial] = best_acc;
                cell.t_chosen[trial] = best_t;
            }
        }
    };

    int n_threads = config.threads > 0 ? config.threads
                                       : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    n_threads = std::min(n_threads, config.trials);

    if (n_threads == 1) {
        for (int trial = 0; trial < config.trials; ++trial) run_trial(trial);
    } else {
        std::atomic<int> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        for (int w = 0; w < n_threads; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const int trial = next.fetch_add(1);
                    if (trial >= config.trials) return;
                    try {
                        run_trial(trial);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (!first_error) first_error = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    for (CellResult& cell : result.cells) cell.stats = aggregate_trials(cell.accuracies);

    // ANOVA across schemes per (s, labels) when at least two schemes ran
    // with enough trials.
    if (config.schemes.size() >= 2 && config.trials >= 2) {
        for (const double s : config.s_values) {
            for (const int budget : budgets) {
                CellStats cs;
                cs.s = s;
                cs.labels = budget;
                std::vector<std::vector<double>> groups;
                for (const CellResult& cell : result.cells)
                    if (cell.s == s && cell.labels == budget)
                        groups.push_back(cell.accuracies);
                cs.anova = anova_oneway(groups);
                cs.pairwise = bonferroni_pairwise(groups);
                result.stats.push_back(std::move(cs));
            }
        }
    }
    return result;
}

TrialStats run_trials(const ExperimentConfig& config, double s, int labels, int scheme,
                      double t) {
    ExperimentConfig single = config;
    single.s_values = {s};
    if (config.labels_total > 0)
        single.labels_total = labels;
    else
        single.labels_per_class = {labels};
    single.schemes = {scheme};
    single.t_by_s = {{s, {t}}};
    const BenchResult bench = run_bench(single);
    return bench.cells.front().stats;
}

} // namespace heatprop
