// Matrix-free approximation of f(L^s)M for the heat and phi targets via
// shifted Chebyshev series; no eigendecomposition and L^s is never formed.
#pragma once

#include <string>
#include <vector>

#include "heatprop/spectral.hpp"

namespace heatprop {

enum class ChebTargetKind { Heat, Phi };

// Scalar target evaluated on the spectrum: heat is e^{-t x^s}, phi is
// t*(1 - e^{-t x^s})/(t x^s) (the constant-source integrator weight).
struct ChebTarget {
    ChebTargetKind kind = ChebTargetKind::Heat;
    double s = 1.0;
    double t = 0.0;

    double operator()(double x) const;
    static ChebTarget heat(double s, double t) { return {ChebTargetKind::Heat, s, t}; }
    static ChebTarget phi(double s, double t) { return {ChebTargetKind::Phi, s, t}; }
};

struct ChebSeries {
    std::vector<double> coeffs;  // c_0 .. c_m, c_0 already halved
    double lambda_max = 0.0;
    int degree = 0;
    ChebTarget target;
};

// Gauss-Chebyshev quadrature with N = max(2m+2, 64) nodes, then a rank-one
// correction that pins the series value at x = 0 to f(0) exactly. The
// correction is the Chebyshev expansion of ((1-xi)/2)^m, the polynomial of
// degree m that is 1 at xi = -1 and smallest in the interior, so the pinned
// endpoint costs at most |f(0) - p(0)| across the rest of the interval.
ChebSeries cheb_coefficients(const ChebTarget& target, double lambda_max, int m);

// Scalar evaluation of the series (Clenshaw), for the grid oracles.
double cheb_eval(const ChebSeries& series, double x);

// Three-term recurrence in the shifted variable; exactly series.degree
// sparse products, three n-by-c work matrices.
Matrix cheb_apply(const Sparse& L, const ChebSeries& series, const Matrix& M,
                  int* sparse_products = nullptr);

// Heuristic truncation-error proxy max(|c_{m-1}|, |c_m|).
double cheb_error_estimate(const ChebSeries& series);

// Smallest degree (doubling then bisection) whose error estimate falls
// below tol; capped at m_max.
int cheb_auto_degree(const ChebTarget& target, double lambda_max, double tol, int m_max = 400);

// KernelOperator backed by Chebyshev series on the sparse Laplacian.
// backward_solve falls back to the base-class conjugate gradient, with
// power() itself approximated by a series for x^s when s < 1.
class ChebyshevOperator final : public KernelOperator {
public:
    // lambda_bound must dominate the spectrum (see cheb_lambda_bound).
    ChebyshevOperator(Sparse L, double s, double lambda_bound, int degree = 0);

    Matrix heat(double t, const Matrix& M) const override;
    Matrix phi(double t, const Matrix& M) const override;
    Matrix power(const Matrix& M) const override;
    double lambda_max_hint() const override { return lambda_bound_; }

    int degree() const { return degree_; }

private:
    Sparse L_;
    double lambda_bound_;
    int degree_;
};

} // namespace heatprop
