// Trial aggregation and the significance tests used by the benchmark
// reports: one-way ANOVA and pooled two-sided t-tests, with p-values from
// the regularized incomplete beta function.
#pragma once

#include <string>
#include <vector>

#include "heatprop/errors.hpp"

namespace heatprop {

struct TrialStats {
    std::vector<double> accuracies;
    int n_trials = 0;
    double mean = 0.0;
    double se = 0.0;            // sample std / sqrt(n)
    bool se_degenerate = false;  // true when n_trials < 2 (SE reported as 0)
};

TrialStats aggregate_trials(const std::vector<double>& accuracies);

// Continued-fraction evaluation (works for all a,b > 0, x in [0,1]).
double regularized_incomplete_beta(double a, double b, double x);

struct AnovaResult {
    double F = 0.0;
    double p = 1.0;
    int df_between = 0;
    int df_within = 0;
};

// Classical between/within decomposition. Zero within- and between-group
// variance gives F=0, p=1; zero within with separated means caps F.
AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    int df = 0;
};

// Pooled-variance two-sided independent t-test.
TTestResult t_test(const std::vector<double>& a, const std::vector<double>& b);

struct PairwiseComparison {
    int i = 0;
    int j = 0;
    double mean_diff = 0.0;
    double t = 0.0;
    double p_raw = 1.0;
    double p_adjusted = 1.0;  // Bonferroni: min(1, p_raw * comparisons)
};

// All-pairs t-tests with Bonferroni correction. This replaces the Tukey HSD
// post-hoc procedure; reports carrying these values must say so.
std::vector<PairwiseComparison> bonferroni_pairwise(
    const std::vector<std::vector<double>>& groups);

inline const char* kPosthocNote = "post-hoc: Bonferroni-corrected pairwise t-tests "
                                  "(substituted for Tukey HSD)";

} // namespace heatprop
