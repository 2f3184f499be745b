// Trial orchestration: seeded dataset/split generation, the three
// propagation schemes, and the benchmark grid with per-trial work pooling.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "heatprop/datasets.hpp"
#include "heatprop/solver.hpp"
#include "heatprop/stats.hpp"

namespace heatprop {

struct ExperimentConfig {
    std::string dataset = "twomoon";  // twomoon | cora
    TwoMoonConfig twomoon;            // per-trial seed is derived, the field is ignored
    std::string cora_edges;
    std::string cora_labels;
    LaplacianKind kind = LaplacianKind::SymNormalized;
    int trials = 50;
    std::uint64_t seed = 99;
    int threads = 0;  // 0 = hardware concurrency
    int val_size = 0;
    int test_size = 0;  // 0/0 = all unlabeled nodes are test nodes

    std::vector<double> s_values{0.2, 1.0};
    std::vector<int> labels_per_class{2, 3, 5};
    int labels_total = 0;  // > 0 replaces labels_per_class with one total budget
    std::vector<int> schemes{1, 2, 3};
    // Candidate diffusion times per s. More than one candidate means each
    // trial picks the best by validation accuracy (needs a validation set).
    std::map<double, std::vector<double>> t_by_s;
};

// scheme 1: e^{-tL^s} U0 (pure diffusion of the one-hot rows)
// scheme 2: e^{-tL^s} D^{-1} F (diffused source only, no U0 term)
// scheme 3: e^{-tL^s} U0 + t h(tL^s) D^{-1} F (closed form with source)
Matrix run_scheme(const KernelOperator& op, int scheme, const Matrix& U0,
                  const std::vector<int>& labeled, const Vector& degrees, double t);

struct CellResult {
    double s = 0.0;
    int labels = 0;  // per class, or total when the config says so
    int scheme = 0;
    std::vector<double> t_candidates;
    std::vector<double> accuracies;  // one per trial
    std::vector<double> t_chosen;    // one per trial
    TrialStats stats;
};

struct CellStats {
    double s = 0.0;
    int labels = 0;
    AnovaResult anova;
    std::vector<PairwiseComparison> pairwise;
};

struct BenchResult {
    ExperimentConfig config;
    std::vector<CellResult> cells;
    std::vector<CellStats> stats;  // ANOVA across schemes per (s, labels)
};

// Full grid. Per-trial data/split seeds derive from (master seed, trial),
// so results do not depend on the worker count.
BenchResult run_bench(const ExperimentConfig& config);

// Single-cell convenience used by tests and the propagate subcommand.
TrialStats run_trials(const ExperimentConfig& config, double s, int labels, int scheme,
                      double t);

} // namespace heatprop
