// Iterative self-training: diffuse, score confidence, absorb confident nodes
// into the labeled set, and rebuild the source around the new mean.
#pragma once

#include <set>
#include <vector>

#include "heatprop/solver.hpp"

namespace heatprop {

enum class ConfidenceVariant { Base, Entropy };
enum class ThetaSchedule { Constant, LinearDecay };

// Row-wise max minus row mean, evaluated on the rows as given.
Vector confidence(const Matrix& U, int c);

// Base confidence plus s times the Shannon entropy of the row, computed
// after projecting the row onto the simplex (shift by the row minimum when
// negative entries appear, then divide by the sum; 0 log 0 = 0).
Vector fractional_confidence(const Matrix& U, int c, double s);

// Shift-clip renormalization used before entropy and confidence bounds.
Matrix normalize_rows_simplex(const Matrix& U);

// { i not in labeled : conf_i > theta }, ascending.
std::vector<int> select_confident(const Vector& conf, double theta,
                                  const std::set<int>& labeled);

// Three cases: rows already labeled keep their old source, newly confident
// rows get U_next row minus the mean over the grown labeled set, the rest
// stay zero.
Matrix update_source(const Matrix& F_prev, const Matrix& U_next,
                     const std::vector<int>& newly_confident,
                     const std::set<int>& labeled_next);

struct SelfTrainOptions {
    double theta0 = 0.4;
    int t_max = 20;
    double dt = 1.0;
    ThetaSchedule schedule = ThetaSchedule::Constant;
    ConfidenceVariant variant = ConfidenceVariant::Base;
    double convergence_tol = 1e-6;
};

struct SelfTrainIteration {
    int k = 0;
    int n_labeled = 0;
    int n_selected = 0;
    double frobenius_delta = 0.0;
};

struct SelfTrainResult {
    Matrix U;
    Matrix F;
    std::vector<int> labeled;  // ascending
    std::vector<SelfTrainIteration> history;
    bool converged = false;
};

// Exponential-integrator steps with dynamic source updates. Stops when the
// iterate settles and no node clears the threshold, else runs to t_max.
SelfTrainResult self_train(const KernelOperator& op, const Matrix& U0, const Matrix& F0,
                           const std::vector<int>& labeled0, const SelfTrainOptions& opts);

} // namespace heatprop
