#include "heatprop/selftrain.hpp"

#include <cmath>

namespace heatprop {

Vector confidence(const Matrix& U, int c) {
    if (c < 1 || U.cols() != c) throw UsageError("class count does not match score matrix");
    Vector conf(U.rows());
    for (int i = 0; i < U.rows(); ++i)
        conf[i] = U.row(i).maxCoeff() - U.row(i).mean();
    return conf;
}

Matrix normalize_rows_simplex(const Matrix& U) {
    Matrix P = U;
    const int c = static_cast<int>(U.cols());
    for (int i = 0; i < P.rows(); ++i) {
        const double lo = P.row(i).minCoeff();
        if (lo < 0.0) P.row(i).array() -= lo;
        const double sum = P.row(i).sum();
        if (sum > 0.0)
            P.row(i) /= sum;
        else
            P.row(i).setConstant(1.0 / c);  // degenerate all-equal row
    }
    return P;
}

Vector fractional_confidence(const Matrix& U, int c, double s) {
    if (!(s >= 0.0)) throw UsageError("entropy weight must be non-negative");
    Vector conf = confidence(U, c);
    const Matrix P = normalize_rows_simplex(U);
    for (int i = 0; i < P.rows(); ++i) {
        double h = 0.0;
        for (int j = 0; j < c; ++j) {
            const double p = P(i, j);
            if (p > 0.0) h -= p * std::log(p);
        }
        conf[i] += s * h;
    }
    return conf;
}

std::vector<int> select_confident(const Vector& conf, double theta,
                                  const std::set<int>& labeled) {
    std::vector<int> selected;
    for (int i = 0; i < conf.size(); ++i)
        if (conf[i] > theta && !labeled.count(i)) selected.push_back(i);
    return selected;
}

Matrix update_source(const Matrix& F_prev, const Matrix& U_next,
                     const std::vector<int>& newly_confident,
                     const std::set<int>& labeled_next) {
    if (labeled_next.empty()) throw UsageError("source update needs a nonempty labeled set");
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(U_next.cols());
    for (const int i : labeled_next) mean += U_next.row(i);
    mean /= static_cast<double>(labeled_next.size());

    Matrix F = F_prev;
    for (const int i : newly_confident) F.row(i) = U_next.row(i) - mean;
    return F;
}

SelfTrainResult self_train(const KernelOperator& op, const Matrix& U0, const Matrix& F0,
                           const std::vector<int>& labeled0, const SelfTrainOptions& opts) {
    if (!(opts.dt > 0.0)) throw UsageError("step size must be positive");
    if (!(opts.theta0 > 0.0 && opts.theta0 < 1.0))
        throw UsageError("confidence threshold must be in (0, 1)");
    if (opts.t_max < 1) throw UsageError("iteration budget must be at least 1");

    const int c = static_cast<int>(U0.cols());
    SelfTrainResult res;
    res.U = U0;
    res.F = F0;
    std::set<int> labeled(labeled0.begin(), labeled0.end());

    for (int k = 0; k < opts.t_max; ++k) {
        const double theta = opts.schedule == ThetaSchedule::LinearDecay
                                 ? opts.theta0 * (1.0 - static_cast<double>(k) / opts.t_max)
                                 : opts.theta0;

        const Matrix U_next = op.heat(opts.dt, res.U) + op.phi(opts.dt, res.F);
        const double delta = (U_next - res.U).norm();

        Vector conf;
        switch (opts.variant) {
            case ConfidenceVariant::Base:
                conf = confidence(normalize_rows_simplex(U_next), c);
                break;
            case ConfidenceVariant::Entropy:
                conf = fractional_confidence(normalize_rows_simplex(U_next), c, op.s());
                break;
        }
        const std::vector<int> selected = select_confident(conf, theta, labeled);
        labeled.insert(selected.begin(), selected.end());
        res.F = update_source(res.F, U_next, selected, labeled);
        res.U = U_next;

        res.history.push_back({k, static_cast<int>(labeled.size()),
                               static_cast<int>(selected.size()), delta});
        if (delta < opts.convergence_tol && selected.empty()) {
            res.converged = true;
            break;
        }
    }

    res.labeled.assign(labeled.begin(), labeled.end());
    return res;
}

} // namespace heatprop
