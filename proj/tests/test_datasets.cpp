// Synthetic two-moon generation, citation-network loading, class-balanced
// splits, and the accuracy metric.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "doctest.h"
#include "heatprop/datasets.hpp"
#include "test_support.hpp"

using namespace heatprop;
using namespace hptest;

TEST_CASE("noise-free two-moon arcs land on the analytic points") {
    TwoMoonConfig cfg;
    cfg.n = 4;
    cfg.noise = 0.0;
    cfg.k = 2;
    const TwoMoonData data = two_moon(cfg);

    // Upper arc samples theta = 0 and pi; the second moon mirrors and shifts.
    CHECK(data.points(0, 0) == doctest::Approx(1.0));
    CHECK(data.points(0, 1) == doctest::Approx(0.0));
    CHECK(data.points(1, 0) == doctest::Approx(-1.0));
    CHECK(data.points(1, 1) == doctest::Approx(0.0));
    CHECK(data.points(2, 0) == doctest::Approx(0.0));
    CHECK(data.points(2, 1) == doctest::Approx(0.5));
    CHECK(data.points(3, 0) == doctest::Approx(2.0));
    CHECK(data.points(3, 1) == doctest::Approx(0.5));
    CHECK(data.labels == std::vector<int>{0, 0, 1, 1});
}

TEST_CASE("two-moon labels split evenly and weights stay in (0, 1]") {
    TwoMoonConfig cfg;
    cfg.n = 60;
    cfg.seed = 9;
    cfg.k = 5;
    const TwoMoonData data = two_moon(cfg);
    REQUIRE(data.graph.n == 60);

    int zeros = 0;
    for (const int y : data.labels) zeros += y == 0 ? 1 : 0;
    CHECK(zeros == 30);

    for (int i = 0; i < data.graph.n; ++i) {
        int neighbors = 0;
        for (Sparse::InnerIterator it(data.graph.weights, i); it; ++it) {
            CHECK(it.value() > 0.0);
            CHECK(it.value() <= 1.0);
            ++neighbors;
        }
        // Union symmetrization keeps at least each node's own k picks.
        CHECK(neighbors >= cfg.k);
    }
    const Matrix W = dense(data.graph.weights);
    CHECK((W - W.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("two-moon generation is deterministic in the seed") {
    TwoMoonConfig cfg;
    cfg.n = 40;
    cfg.seed = 31;
    cfg.k = 4;
    const TwoMoonData a = two_moon(cfg);
    const TwoMoonData b = two_moon(cfg);
    CHECK((a.points - b.points).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.graph.weights.nonZeros() == b.graph.weights.nonZeros());
    CHECK((dense(a.graph.weights) - dense(b.graph.weights)).cwiseAbs().maxCoeff() == 0.0);

    cfg.seed = 32;
    const TwoMoonData c = two_moon(cfg);
    CHECK((a.points - c.points).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("two-moon rejects malformed configurations") {
    TwoMoonConfig cfg;
    cfg.n = 5;
    CHECK_THROWS_AS((void)two_moon(cfg), UsageError);
    cfg.n = 2;
    CHECK_THROWS_AS((void)two_moon(cfg), UsageError);
    cfg.n = 40;
    cfg.noise = -0.1;
    CHECK_THROWS_AS((void)two_moon(cfg), UsageError);
    cfg.noise = 0.15;
    cfg.k = 0;
    CHECK_THROWS_AS((void)two_moon(cfg), UsageError);
    cfg.k = 40;
    CHECK_THROWS_AS((void)two_moon(cfg), UsageError);
}

TEST_CASE("two-moon connectivity rate is reported for the default graph") {
    // Disconnected draws are legitimate at this size; the rate is informative
    // only, so a low value warns without failing.
    int connected = 0;
    const int seeds = 100;
    for (int seed = 0; seed < seeds; ++seed) {
        TwoMoonConfig cfg;
        cfg.n = 100;
        cfg.seed = static_cast<std::uint64_t>(seed) + 1;
        connected += is_connected(two_moon(cfg).graph) ? 1 : 0;
    }
    MESSAGE("two-moon graphs connected for ", connected, " of ", seeds, " seeds");
    WARN(connected > seeds / 2);
}

TEST_CASE("citation files load with duplicate collapse and self-loop skips") {
    const std::string edges = "test_datasets_edges.tmp";
    const std::string labels = "test_datasets_labels.tmp";
    {
        std::ofstream out(labels);
        out << "# node label\n";
        out << "0 0\n1 0\n2 1\n3 1\n";
    }
    {
        std::ofstream out(edges);
        out << "0 1\n";
        out << "1 0\n";  // reverse duplicate collapses
        out << "1 2\n";
        out << "2 2\n";  // self-citation skipped
        out << "2 3\n";
    }
    const CoraData data = load_cora(edges, labels);
    CHECK(data.graph.n == 4);
    CHECK(data.n_classes == 2);
    CHECK(data.labels == std::vector<int>{0, 0, 1, 1});
    CHECK(data.graph.weights.nonZeros() == 6);  // 3 undirected edges
    CHECK(dense(data.graph.weights)(0, 1) == 1.0);
    CHECK(dense(data.graph.weights)(2, 2) == 0.0);

    // One self-loop warning plus three reference-count mismatches.
    REQUIRE(data.warnings.size() == 4);
    CHECK(data.warnings[0].find("self-citation") != std::string::npos);
    CHECK(data.warnings[1].find("2708") != std::string::npos);
    CHECK(data.warnings[2].find("5278") != std::string::npos);
    CHECK(data.warnings[3].find("class count") != std::string::npos);

    std::remove(edges.c_str());
    std::remove(labels.c_str());
}

TEST_CASE("citation parse errors carry file and line positions") {
    const std::string edges = "test_datasets_bad_edges.tmp";
    const std::string labels = "test_datasets_bad_labels.tmp";

    {
        std::ofstream out(labels);
        out << "0 0\n0 1\n";
    }
    CHECK_THROWS_WITH_AS((void)load_cora(edges, labels), doctest::Contains("duplicate"),
                         DataError);

    {
        std::ofstream out(labels);
        out << "0 0\n2 1\n";  // id 1 missing
    }
    CHECK_THROWS_WITH_AS((void)load_cora(edges, labels), doctest::Contains("covers"),
                         DataError);

    {
        std::ofstream out(labels);
        out << "0 0\n1 1\n";
    }
    {
        std::ofstream out(edges);
        out << "0 7\n";
    }
    CHECK_THROWS_WITH_AS((void)load_cora(edges, labels),
                         doctest::Contains("out of range"), DataError);
    {
        std::ofstream out(edges);
        out << "0\n";
    }
    CHECK_THROWS_WITH_AS((void)load_cora(edges, labels), doctest::Contains(":1:"),
                         DataError);

    std::remove(edges.c_str());
    CHECK_THROWS_AS((void)load_cora(edges, labels), DataError);
    std::remove(labels.c_str());
    CHECK_THROWS_AS((void)load_cora(edges, labels), DataError);
}

namespace {

// 21 nodes, 7 classes, 3 nodes each, interleaved so class id != node block.
std::vector<int> seven_class_labels() {
    std::vector<int> labels(21);
    for (int i = 0; i < 21; ++i) labels[i] = i % 7;
    return labels;
}

} // namespace

TEST_CASE("class-balanced splits draw the requested budget from every class") {
    const std::vector<int> labels = seven_class_labels();
    const Split split = sample_split(labels, 1, 77);
    REQUIRE(split.labeled.size() == 7);
    CHECK(std::is_sorted(split.labeled.begin(), split.labeled.end()));

    std::set<int> classes;
    for (const int i : split.labeled) classes.insert(labels[i]);
    CHECK(classes.size() == 7);

    // val_size = test_size = 0 sends the whole remainder to the test set.
    CHECK(split.val.empty());
    CHECK(split.test.size() == 14);
    std::set<int> all(split.labeled.begin(), split.labeled.end());
    for (const int i : split.test) CHECK(all.insert(i).second);
    CHECK(all.size() == 21);
}

TEST_CASE("splits are deterministic in the seed") {
    const std::vector<int> labels = seven_class_labels();
    const Split a = sample_split(labels, 2, 123);
    const Split b = sample_split(labels, 2, 123);
    CHECK(a.labeled == b.labeled);
    CHECK(a.test == b.test);
    const Split c = sample_split(labels, 2, 124);
    CHECK(a.labeled != c.labeled);
}

TEST_CASE("splits separate validation and test pools") {
    const std::vector<int> labels = seven_class_labels();
    const Split split = sample_split(labels, 1, 5, 6, 8);
    CHECK(split.labeled.size() == 7);
    CHECK(split.val.size() == 6);
    CHECK(split.test.size() == 8);
    std::set<int> all;
    for (const int i : split.labeled) CHECK(all.insert(i).second);
    for (const int i : split.val) CHECK(all.insert(i).second);
    for (const int i : split.test) CHECK(all.insert(i).second);

    CHECK_THROWS_AS((void)sample_split(labels, 1, 5, 10, 5), DataError);
}

TEST_CASE("infeasible split budgets are rejected") {
    const std::vector<int> labels = seven_class_labels();
    CHECK_THROWS_AS((void)sample_split(labels, 4, 1), DataError);
    CHECK_THROWS_AS((void)sample_split(labels, 0, 1), UsageError);
    CHECK_THROWS_AS((void)sample_split({0, -1, 1}, 1, 1), DataError);

    const Split full = sample_split(labels, 3, 1);
    CHECK(full.labeled.size() == 21);
    CHECK(full.test.empty());
}

TEST_CASE("total-budget splits ignore class balance") {
    const std::vector<int> labels = seven_class_labels();
    const Split one = sample_split_total(labels, 1, 42);
    CHECK(one.labeled.size() == 1);
    CHECK(one.test.size() == 20);

    const Split again = sample_split_total(labels, 1, 42);
    CHECK(one.labeled == again.labeled);

    CHECK_THROWS_AS((void)sample_split_total(labels, 0, 1), UsageError);
    CHECK_THROWS_AS((void)sample_split_total(labels, 22, 1), DataError);
}

TEST_CASE("accuracy counts exact matches over the mask") {
    const std::vector<int> truth{0, 1, 1, 0};
    CHECK(accuracy({0, 1, 1, 0}, truth, {0, 1, 2, 3}) == 1.0);
    CHECK(accuracy({1, 0, 0, 1}, truth, {0, 1, 2, 3}) == 0.0);
    CHECK(accuracy({0, 1, 0, 1}, truth, {0, 1, 2, 3}) == 0.5);
    // The mask restricts scoring to its own entries.
    CHECK(accuracy({0, 0, 0, 0}, truth, {0, 3}) == 1.0);

    CHECK_THROWS_AS((void)accuracy({0, 1}, {0, 1}, {}), UsageError);
    CHECK_THROWS_AS((void)accuracy({0, 1}, {0, 1}, {5}), UsageError);
}
