// Benchmark data: the synthetic two-moon generator with its kNN graph, the
// citation-network loader, class-balanced splits, and accuracy.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "heatprop/graph.hpp"

namespace heatprop {

struct TwoMoonConfig {
    int n = 1000;           // split evenly between the two moons
    double noise = 0.15;    // Gaussian std on both coordinates
    std::uint64_t seed = 1;
    int k = 10;             // kNN neighbor count (union symmetrization)
    double bandwidth_scale = 1.0;  // sigma = scale * mean kNN distance
};

struct TwoMoonData {
    Matrix points;            // n x 2
    std::vector<int> labels;  // 0 for the first moon, 1 for the second
    Graph graph;
};

TwoMoonData two_moon(const TwoMoonConfig& config);

struct CoraData {
    Graph graph;
    std::vector<int> labels;
    int n_classes = 0;
    std::vector<std::string> warnings;  // count mismatches are warnings, not errors
};

// Edge file: "i j" per line (undirected, duplicates collapse to one edge);
// label file: "node label" per line covering every node. Counts are checked
// against 2708 nodes / 5278 edges / 7 classes and mismatches only warn.
CoraData load_cora(const std::string& edges_path, const std::string& labels_path);

struct Split {
    std::vector<int> labeled;  // class-balanced, ascending
    std::vector<int> val;
    std::vector<int> test;
};

// per_class labeled nodes from every class, then val_size + test_size drawn
// from the remainder; val_size = test_size = 0 sends the whole remainder to
// the test set.
Split sample_split(const std::vector<int>& labels, int per_class, std::uint64_t seed,
                   int val_size = 0, int test_size = 0);

// Single labeled node in total, ignoring class balance (the one-label
// degenerate case where the mean-centered source vanishes).
Split sample_split_total(const std::vector<int>& labels, int total, std::uint64_t seed);

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth,
                const std::vector<int>& mask);

} // namespace heatprop
