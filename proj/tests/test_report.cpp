// Propagation schemes, the benchmark grid runner, and the JSON report
// document with its text renderings.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "heatprop/report.hpp"
#include "heatprop/rng.hpp"
#include "test_support.hpp"

using namespace heatprop;
using namespace hptest;

namespace {

// Dense spectral filter built independently of the library's operator path.
Matrix dense_heat(const Graph& g, LaplacianKind kind, double s, double t, const Matrix& M) {
    const Matrix L = dense(laplacian(g, kind));
    Eigen::SelfAdjointEigenSolver<Matrix> es(L);
    Vector lam = es.eigenvalues();
    Matrix P = es.eigenvectors().transpose() * M;
    for (int k = 0; k < lam.size(); ++k) {
        const double l = std::abs(lam[k]) < 1e-10 ? 0.0 : lam[k];
        P.row(k) *= std::exp(-t * std::pow(l, s));
    }
    return es.eigenvectors() * P;
}

struct SchemeFixture {
    Graph g;
    SpectralDecomposition spec;
    std::vector<int> labels;
    std::vector<int> labeled;
    Matrix U0;
};

SchemeFixture make_fixture(Rng& rng, int n) {
    SchemeFixture fx;
    fx.g = random_connected_graph(rng, n, 0.2);
    fx.spec = eigendecompose(laplacian(fx.g, LaplacianKind::Combinatorial));
    fx.labels.resize(n);
    for (int i = 0; i < n; ++i) fx.labels[i] = i % 3;
    fx.labeled = {0, 1, 2, 5, 7, 8};
    fx.U0 = one_hot_initial(fx.labels, fx.labeled, n, 3);
    return fx;
}

} // namespace

TEST_CASE("scheme 1 is plain heat diffusion of the one-hot rows") {
    Rng rng(701);
    const SchemeFixture fx = make_fixture(rng, 16);
    const SpectralOperator op(fx.spec, 1.0);
    const Matrix got = run_scheme(op, 1, fx.U0, fx.labeled, fx.g.degrees, 1.7);
    const Matrix want = dense_heat(fx.g, LaplacianKind::Combinatorial, 1.0, 1.7, fx.U0);
    CHECK(rel_frobenius(got, want) <= 1e-9);
}

TEST_CASE("scheme 2 diffuses only the degree-scaled source") {
    Rng rng(702);
    const SchemeFixture fx = make_fixture(rng, 14);
    const SpectralOperator op(fx.spec, 0.5);
    const Matrix got = run_scheme(op, 2, fx.U0, fx.labeled, fx.g.degrees, 2.0);

    Matrix F = build_source(fx.U0, fx.labeled, SourceVariant::Plain);
    for (const int i : fx.labeled) F.row(i) /= fx.g.degrees[i];
    const Matrix want = dense_heat(fx.g, LaplacianKind::Combinatorial, 0.5, 2.0, F);
    CHECK(rel_frobenius(got, want) <= 1e-9);
}

TEST_CASE("scheme 3 adds the source response to scheme 1") {
    Rng rng(703);
    const SchemeFixture fx = make_fixture(rng, 16);
    const SpectralOperator op(fx.spec, 1.0);
    const double t = 2.5;
    const Matrix s1 = run_scheme(op, 1, fx.U0, fx.labeled, fx.g.degrees, t);
    const Matrix s3 = run_scheme(op, 3, fx.U0, fx.labeled, fx.g.degrees, t);
    const Matrix F =
        build_source(fx.U0, fx.labeled, SourceVariant::DegreeScaled, &fx.g.degrees);
    CHECK(rel_frobenius(s3 - s1, op.phi(t, F)) <= 1e-12);

    CHECK_THROWS_AS((void)run_scheme(op, 4, fx.U0, fx.labeled, fx.g.degrees, t),
                    UsageError);
    CHECK_THROWS_AS((void)run_scheme(op, 0, fx.U0, fx.labeled, fx.g.degrees, t),
                    UsageError);
}

TEST_CASE("schemes 1 and 3 coincide when a single node is labeled") {
    Rng rng(704);
    SchemeFixture fx = make_fixture(rng, 12);
    fx.labeled = {4};
    fx.U0 = one_hot_initial(fx.labels, fx.labeled, 12, 3);
    const SpectralOperator op(fx.spec, 1.0);
    const Matrix s1 = run_scheme(op, 1, fx.U0, fx.labeled, fx.g.degrees, 3.0);
    const Matrix s3 = run_scheme(op, 3, fx.U0, fx.labeled, fx.g.degrees, 3.0);
    // The mean-centered source of one labeled row is exactly zero.
    CHECK((s1 - s3).cwiseAbs().maxCoeff() == 0.0);
}

namespace {

ExperimentConfig small_bench_config() {
    ExperimentConfig cfg;
    cfg.dataset = "twomoon";
    cfg.twomoon.n = 60;
    cfg.twomoon.k = 8;
    cfg.twomoon.bandwidth_scale = 0.5;
    cfg.kind = LaplacianKind::SymNormalized;
    cfg.trials = 3;
    cfg.seed = 4242;
    cfg.threads = 1;
    cfg.s_values = {1.0};
    cfg.labels_per_class = {2};
    cfg.schemes = {1, 2, 3};
    cfg.t_by_s = {{1.0, {5.0}}};
    return cfg;
}

} // namespace

TEST_CASE("the benchmark grid fills every cell with per-trial accuracies") {
    const BenchResult res = run_bench(small_bench_config());
    REQUIRE(res.cells.size() == 3);
    for (const CellResult& cell : res.cells) {
        CHECK(cell.s == 1.0);
        CHECK(cell.labels == 2);
        REQUIRE(cell.accuracies.size() == 3);
        REQUIRE(cell.t_chosen.size() == 3);
        for (const double a : cell.accuracies) {
            CHECK(a >= 0.0);
            CHECK(a <= 1.0);
        }
        for (const double t : cell.t_chosen) CHECK(t == 5.0);
        CHECK(cell.stats.n_trials == 3);
        CHECK(!cell.stats.se_degenerate);
    }
    REQUIRE(res.stats.size() == 1);
    CHECK(res.stats[0].anova.df_between == 2);
    CHECK(res.stats[0].anova.df_within == 6);
    CHECK(res.stats[0].pairwise.size() == 3);
}

TEST_CASE("benchmark results do not depend on the worker count") {
    ExperimentConfig cfg = small_bench_config();
    const BenchResult serial = run_bench(cfg);
    cfg.threads = 4;
    const BenchResult parallel = run_bench(cfg);
    REQUIRE(serial.cells.size() == parallel.cells.size());
    for (std::size_t i = 0; i < serial.cells.size(); ++i)
        CHECK(serial.cells[i].accuracies == parallel.cells[i].accuracies);
}

TEST_CASE("a single trial degenerates the standard error and skips ANOVA") {
    ExperimentConfig cfg = small_bench_config();
    cfg.trials = 1;
    const BenchResult res = run_bench(cfg);
    for (const CellResult& cell : res.cells) {
        CHECK(cell.stats.se == 0.0);
        CHECK(cell.stats.se_degenerate);
    }
    CHECK(res.stats.empty());
}

TEST_CASE("multiple diffusion times require and use a validation split") {
    ExperimentConfig cfg = small_bench_config();
    cfg.t_by_s = {{1.0, {0.5, 5.0}}};
    CHECK_THROWS_WITH_AS((void)run_bench(cfg), doctest::Contains("validation"),
                         UsageError);

    cfg.val_size = 15;
    cfg.test_size = 20;
    const BenchResult res = run_bench(cfg);
    for (const CellResult& cell : res.cells) {
        CHECK(cell.t_candidates == std::vector<double>{0.5, 5.0});
        for (const double t : cell.t_chosen)
            CHECK((t == 0.5 || t == 5.0));
    }
}

TEST_CASE("misconfigured grids are rejected") {
    ExperimentConfig cfg = small_bench_config();
    cfg.trials = 0;
    CHECK_THROWS_AS((void)run_bench(cfg), UsageError);

    cfg = small_bench_config();
    cfg.t_by_s.clear();
    CHECK_THROWS_AS((void)run_bench(cfg), UsageError);

    cfg = small_bench_config();
    cfg.schemes.clear();
    CHECK_THROWS_AS((void)run_bench(cfg), UsageError);

    cfg = small_bench_config();
    cfg.labels_per_class.clear();
    CHECK_THROWS_AS((void)run_bench(cfg), UsageError);

    cfg = small_bench_config();
    cfg.dataset = "imagenet";
    CHECK_THROWS_AS((void)run_bench(cfg), UsageError);
}

TEST_CASE("a total budget of one makes schemes 1 and 3 identical per trial") {
    ExperimentConfig cfg = small_bench_config();
    cfg.labels_total = 1;
    cfg.schemes = {1, 3};
    const BenchResult res = run_bench(cfg);
    REQUIRE(res.cells.size() == 2);
    CHECK(res.cells[0].accuracies == res.cells[1].accuracies);
}

TEST_CASE("the single-cell runner matches the corresponding grid cell") {
    ExperimentConfig cfg = small_bench_config();
    cfg.labels_per_class = {2, 3};
    cfg.schemes = {1, 3};
    const BenchResult bench = run_bench(cfg);
    const TrialStats one = run_trials(cfg, 1.0, 3, 3, 5.0);
    bool found = false;
    for (const CellResult& cell : bench.cells) {
        if (cell.labels != 3 || cell.scheme != 3) continue;
        found = true;
        CHECK(cell.accuracies == one.accuracies);
        CHECK(cell.stats.mean == one.mean);
    }
    CHECK(found);
}

TEST_CASE("report documents round-trip through disk bit-exactly") {
    const BenchResult res = run_bench(small_bench_config());
    const Json doc = report_document(res);
    CHECK(doc["schema_version"] == kReportSchemaVersion);
    CHECK(doc["kind"] == "bench");
    CHECK(doc["metadata"]["labels_interpretation"] == "per class");
    REQUIRE(doc["rows"].size() == 3);
    CHECK(doc["rows"][0]["trials"] == 3);
    REQUIRE(doc["stats"].size() == 1);
    CHECK(doc["stats"][0]["pairwise"].size() == 3);
    CHECK(doc["stats"][0]["pairwise"][0]["scheme_a"] == 1);

    const std::string path = "test_report_roundtrip.tmp";
    write_report(doc, path);
    const Json parsed = read_report(path);
    CHECK(parsed == doc);
    std::remove(path.c_str());
}

TEST_CASE("report files are validated on read") {
    const std::string path = "test_report_bad.tmp";
    {
        std::ofstream out(path);
        out << "{\"schema_version\": 99}\n";
    }
    CHECK_THROWS_WITH_AS((void)read_report(path), doctest::Contains("schema"), DataError);
    {
        std::ofstream out(path);
        out << "{\"kind\": \"bench\"}\n";
    }
    CHECK_THROWS_AS((void)read_report(path), DataError);
    {
        std::ofstream out(path);
        out << "{not json\n";
    }
    CHECK_THROWS_WITH_AS((void)read_json_file(path), doctest::Contains("parse"),
                         DataError);
    std::remove(path.c_str());
    CHECK_THROWS_WITH_AS((void)read_json_file(path), doctest::Contains("cannot open"),
                         DataError);
}

TEST_CASE("configs round-trip through the report config block") {
    ExperimentConfig cfg = small_bench_config();
    cfg.labels_per_class = {2, 5};
    cfg.t_by_s = {{0.2, {0.1}}, {1.0, {5.0, 24.0}}};
    cfg.s_values = {0.2, 1.0};
    cfg.val_size = 10;
    cfg.test_size = 30;
    BenchResult res;
    res.config = cfg;
    const Json doc = report_document(res);

    const ExperimentConfig back = config_from_json(doc["config"]);
    CHECK(back.dataset == cfg.dataset);
    CHECK(back.kind == cfg.kind);
    CHECK(back.trials == cfg.trials);
    CHECK(back.seed == cfg.seed);
    CHECK(back.val_size == cfg.val_size);
    CHECK(back.test_size == cfg.test_size);
    CHECK(back.twomoon.n == cfg.twomoon.n);
    CHECK(back.twomoon.k == cfg.twomoon.k);
    CHECK(back.twomoon.bandwidth_scale == cfg.twomoon.bandwidth_scale);
    CHECK(back.s_values == cfg.s_values);
    CHECK(back.labels_per_class == cfg.labels_per_class);
    CHECK(back.schemes == cfg.schemes);
    CHECK(back.t_by_s == cfg.t_by_s);
}

TEST_CASE("citation configs keep their file paths in the config block") {
    ExperimentConfig cfg;
    cfg.dataset = "cora";
    cfg.cora_edges = "data/edges.txt";
    cfg.cora_labels = "data/labels.txt";
    cfg.labels_total = 20;
    BenchResult res;
    res.config = cfg;
    const Json doc = report_document(res);
    CHECK(doc["metadata"]["labels_interpretation"] == "total budget");

    const ExperimentConfig back = config_from_json(doc["config"]);
    CHECK(back.dataset == "cora");
    CHECK(back.cora_edges == cfg.cora_edges);
    CHECK(back.cora_labels == cfg.cora_labels);
    CHECK(back.labels_total == 20);
}

TEST_CASE("config parsing defaults missing fields and rejects bad types") {
    const ExperimentConfig cfg = config_from_json(Json::object());
    CHECK(cfg.dataset == "twomoon");
    CHECK(cfg.trials == 50);
    CHECK(cfg.kind == LaplacianKind::SymNormalized);
    CHECK(cfg.schemes == std::vector<int>{1, 2, 3});

    Json bad;
    bad["trials"] = "many";
    CHECK_THROWS_WITH_AS((void)config_from_json(bad), doctest::Contains("config field"),
                         DataError);
    Json bad_key;
    bad_key["t_by_s"]["abc"] = std::vector<double>{1.0};
    CHECK_THROWS_AS((void)config_from_json(bad_key), DataError);
}

TEST_CASE("text renderings carry the grid values and the post-hoc note") {
    BenchResult res;
    res.config.schemes = {1, 2};
    CellResult c1;
    c1.s = 0.5;
    c1.labels = 3;
    c1.scheme = 1;
    c1.stats = aggregate_trials({0.81, 0.83});
    CellResult c2 = c1;
    c2.scheme = 2;
    c2.stats = aggregate_trials({0.74, 0.76});
    res.cells = {c1, c2};

    CellStats cs;
    cs.s = 0.5;
    cs.labels = 3;
    cs.anova = anova_oneway({c1.stats.accuracies, c2.stats.accuracies});
    cs.pairwise = bonferroni_pairwise({c1.stats.accuracies, c2.stats.accuracies});
    res.stats = {cs};

    const std::string table = render_table(res);
    CHECK(table.find("scheme 1") != std::string::npos);
    CHECK(table.find("scheme 2") != std::string::npos);
    CHECK(table.find("0.8200") != std::string::npos);
    CHECK(table.find("0.7500") != std::string::npos);
    CHECK(table.find("labels") != std::string::npos);

    const std::string stats = render_stats(res);
    CHECK(stats.find("ANOVA F(1,2)") != std::string::npos);
    CHECK(stats.find("scheme 1 vs 2") != std::string::npos);
    CHECK(stats.find("Bonferroni") != std::string::npos);

    // An empty result renders the header line without crashing.
    BenchResult empty;
    CHECK(render_table(empty).find("labels") != std::string::npos);
    CHECK(render_stats(empty).empty());
}
