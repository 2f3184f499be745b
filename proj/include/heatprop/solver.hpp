// Diffusion ODE dU/dt = -L^s U + F: source construction, closed-form
// solution, four time steppers, stability bound, label prediction.
#pragma once

#include <optional>
#include <vector>

#include "heatprop/spectral.hpp"

namespace heatprop {

enum class StepperKind { ForwardEuler, BackwardEuler, ExponentialPhi, RK4 };

StepperKind parse_stepper_kind(const std::string& name);

enum class SourceVariant { Plain, DegreeScaled };

struct LabelState {
    Matrix U;                  // n x c scores; unlabeled rows of U0 are zero
    Matrix F;                  // n x c source
    std::vector<int> labeled;  // ascending node indices
    int c = 0;
};

// One-hot U0 rows for labeled nodes, zero elsewhere.
Matrix one_hot_initial(const std::vector<int>& labels, const std::vector<int>& labeled, int n,
                       int c);

// Labeled rows get U0_i minus the labeled-row mean, unlabeled rows zero;
// every column then sums to zero. The degree-scaled variant divides row i by
// d_i of the original graph and requires `degrees`.
Matrix build_source(const Matrix& U0, const std::vector<int>& labeled, SourceVariant variant,
                    const Vector* degrees = nullptr);

// U(t) = e^{-t L^s} U0 + t h(t L^s) F; exact for constant F.
Matrix solve_closed_form(const KernelOperator& op, const LabelState& state, double t);

// Forward Euler stability threshold 2 / lambda_max^s.
double stability_max_dt(double lambda_max, double s);

struct StepOptions {
    // Lets the forward Euler guard be bypassed for divergence demos.
    bool allow_unstable = false;
};

// One step of the chosen scheme. F is frozen within the step.
Matrix step(const KernelOperator& op, const Matrix& U, const Matrix& F, StepperKind kind,
            double dt, const StepOptions& opts = {});

// Integrates to time T with fixed dt (last step shortened to land on T).
Matrix integrate(const KernelOperator& op, const LabelState& state, StepperKind kind, double dt,
                 double T, const StepOptions& opts = {});

// Row-wise argmax; ties resolve to the lowest class index.
std::vector<int> predict(const Matrix& U);

} // namespace heatprop
