#include "heatprop/solver.hpp"

#include <cmath>

namespace heatprop {

StepperKind parse_stepper_kind(const std::string& name) {
    if (name == "fe") return StepperKind::ForwardEuler;
    if (name == "be") return StepperKind::BackwardEuler;
    if (name == "exp") return StepperKind::ExponentialPhi;
    if (name == "rk4") return StepperKind::RK4;
    throw UsageError("unknown stepper '" + name + "' (expected fe|be|exp|rk4)");
}

Matrix one_hot_initial(const std::vector<int>& labels, const std::vector<int>& labeled, int n,
                       int c) {
    Matrix U0 = Matrix::Zero(n, c);
    for (const int i : labeled) {
        if (i < 0 || i >= n) throw UsageError("labeled index out of range");
        const int y = labels[i];
        if (y < 0 || y >= c) throw DataError("label " + std::to_string(y) + " out of range");
        U0(i, y) = 1.0;
    }
    return U0;
}

Matrix build_source(const Matrix& U0, const std::vector<int>& labeled, SourceVariant variant,
                    const Vector* degrees) {
    if (labeled.empty()) throw UsageError("source construction needs a nonempty labeled set");
    const int n = static_cast<int>(U0.rows());
    const int c = static_cast<int>(U0.cols());

    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(c);
    for (const int i : labeled) {
        if (i < 0 || i >= n) throw UsageError("labeled index out of range");
        mean += U0.row(i);
    }
    mean /= static_cast<double>(labeled.size());

    Matrix F = Matrix::Zero(n, c);
    for (const int i : labeled) F.row(i) = U0.row(i) - mean;

    if (variant == SourceVariant::DegreeScaled) {
        if (!degrees) throw UsageError("degree-scaled source needs the graph degrees");
        for (const int i : labeled) {
            if ((*degrees)[i] <= 0.0)
                throw DataError("labeled node " + std::to_string(i) +
                                " has zero degree; cannot scale its source row");
            F.row(i) /= (*degrees)[i];
        }
    }
    return F;
}

Matrix solve_closed_form(const KernelOperator& op, const LabelState& state, double t) {
    if (!(t >= 0.0)) throw UsageError("diffusion time t must be non-negative");
    return op.heat(t, state.U) + op.phi(t, state.F);
}

double stability_max_dt(double lambda_max, double s) {
    if (!(lambda_max > 0.0)) throw UsageError("lambda_max must be positive");
    if (!(s > 0.0 && s <= 1.0)) throw UsageError("fractional order s must be in (0, 1]");
    return 2.0 / std::pow(lambda_max, s);
}

Matrix step(const KernelOperator& op, const Matrix& U, const Matrix& F, StepperKind kind,
            double dt, const StepOptions& opts) {
    if (!(dt > 0.0)) throw UsageError("step size must be positive");
    switch (kind) {
        case StepperKind::ForwardEuler: {
            const double bound = stability_max_dt(op.lambda_max_hint(), op.s());
            if (dt >= bound && !opts.allow_unstable)
                throw NumericalError("forward Euler step " + std::to_string(dt) +
                                     " exceeds the stability bound " + std::to_string(bound) +
                                     "; pass allow_unstable to run anyway");
            return U - dt * op.power(U) + dt * F;
        }
        case StepperKind::BackwardEuler:
            return op.backward_solve(dt, U + dt * F);
        case StepperKind::ExponentialPhi:
            return op.heat(dt, U) + op.phi(dt, F);
        case StepperKind::RK4: {
            const auto rhs = [&](const Matrix& V) { return Matrix(F - op.power(V)); };
            const Matrix k1 = rhs(U);
            const Matrix k2 = rhs(U + (0.5 * dt) * k1);
            const Matrix k3 = rhs(U + (0.5 * dt) * k2);
            const Matrix k4 = rhs(U + dt * k3);
            return U + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    throw UsageError("unhandled stepper kind");
}

Matrix integrate(const KernelOperator& op, const LabelState& state, StepperKind kind, double dt,
                 double T, const StepOptions& opts) {
    if (!(dt > 0.0)) throw UsageError("step size must be positive");
    if (!(T >= 0.0)) throw UsageError("horizon must be non-negative");
    Matrix U = state.U;
    double elapsed = 0.0;
    while (elapsed < T) {
        const double h = std::min(dt, T - elapsed);
        U = step(op, U, state.F, kind, h, opts);
        elapsed += h;
    }
    return U;
}

std::vector<int> predict(const Matrix& U) {
    if (U.cols() < 2) throw UsageError("prediction needs at least two classes");
    std::vector<int> labels(U.rows());
    for (int i = 0; i < U.rows(); ++i) {
        int best = 0;
        for (int j = 1; j < U.cols(); ++j)
            if (U(i, j) > U(i, best)) best = j;  // strict: ties keep the lowest index
        labels[i] = best;
    }
    return labels;
}

} // namespace heatprop
