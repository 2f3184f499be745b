// Dense eigendecomposition and exact spectral application of fractional heat
// kernels, phi-functions, truncation, pseudoinverse, subordination, and
// diffusion-map embeddings.
#pragma once

#include <functional>
#include <memory>
#include <utility>

#include "heatprop/graph.hpp"

namespace heatprop {

struct SpectralDecomposition {
    Vector eigenvalues;   // ascending, tiny values clamped to exact 0
    Matrix eigenvectors;  // orthonormal columns, same order

    int n() const { return static_cast<int>(eigenvalues.size()); }
};

// Fails on non-symmetric input and on matrices above the dense limit; the
// random-walk Laplacian and large graphs must go through Chebyshev instead.
SpectralDecomposition eigendecompose(const Sparse& L, int dense_limit = 4000);
SpectralDecomposition eigendecompose(const Matrix& L, int dense_limit = 4000);

// x^s with the convention 0^s = 0 so the kernel mode survives every filter.
double fractional_power(double x, double s);

// h(x) = (1 - e^{-x})/x with h(0) = 1, stable for small x.
double phi_h(double x);

// e^{-t L^s} M
Matrix apply_heat(const SpectralDecomposition& spec, double s, double t, const Matrix& M);

struct TruncatedResult {
    Vector result;
    double error_bound;  // e^{-t lambda_{m+1}^s} ||u||_2, 0 when m = n
};

// First m eigenmodes only.
TruncatedResult apply_truncated(const SpectralDecomposition& spec, int m, double s, double t,
                                const Vector& u);

// t*h(t L^s) F where h(x) = (1 - e^{-x})/x, h(0) = 1.
Matrix apply_phi(const SpectralDecomposition& spec, double s, double t, const Matrix& F);

// Moore-Penrose pseudoinverse action of L^s: kernel modes map to zero.
Matrix pseudoinverse_apply(const SpectralDecomposition& spec, double s, const Matrix& F);

// Pi U0 + (L^s)^+ F. Rejects sources with a kernel component (unbounded).
Matrix steady_state(const SpectralDecomposition& spec, double s, const Matrix& U0,
                    const Matrix& F);

// One evaluation point of the half-line subordination rule: e^{-t sqrt(L)}
// is the weighted sum of e^{-tau L} over these nodes.
struct SubordinationNode {
    double tau;
    double weight;
};

std::vector<SubordinationNode> subordination_rule(double t, int quad_nodes);

// e^{-t sqrt(L)} u from heat applications only; `matvec` must evaluate
// u -> e^{-tau L} u. Gauss-Legendre after mapping the half-line integral to
// [0,1] with quadratic node clustering at the tau -> infinity end.
Vector subordination_apply(const std::function<Vector(double, const Vector&)>& matvec, double t,
                           const Vector& u, int quad_nodes = 64);

// Row i = (e^{-t lambda_2} phi_2(i), ..., e^{-t lambda_m} phi_m(i)).
Matrix diffusion_map(const SpectralDecomposition& spec, double t, int m);

// E_s(u) = <u, L^s u> = sum lambda_k^s <u, phi_k>^2.
double dirichlet_energy(const SpectralDecomposition& spec, double s, const Vector& u);

// Gauss-Legendre nodes and weights on [-1, 1], Newton iteration on the
// recurrence. Deterministic; exposed for the quadrature tests.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Strategy object applying functions of L^s to matrices. heat and phi are
// what the diffusion solver consumes; power (L^s M) and backward_solve
// ((I + dt L^s)^{-1} B) serve the explicit and implicit steppers.
class KernelOperator {
public:
    explicit KernelOperator(double s) : s_(s) {
        if (!(s > 0.0 && s <= 1.0)) throw UsageError("fractional order s must be in (0, 1]");
    }
    virtual ~KernelOperator() = default;

    virtual Matrix heat(double t, const Matrix& M) const = 0;
    virtual Matrix phi(double t, const Matrix& M) const = 0;
    virtual Matrix power(const Matrix& M) const = 0;
    // Default: conjugate gradient on v -> v + dt * power(v), relative
    // residual 1e-10. Spectral subclass replaces it with an eigen-filter.
    virtual Matrix backward_solve(double dt, const Matrix& B) const;
    // Upper bound on the spectrum, used by the forward Euler stability guard.
    virtual double lambda_max_hint() const = 0;

    double s() const { return s_; }

protected:
    double s_;
};

class SpectralOperator final : public KernelOperator {
public:
    SpectralOperator(SpectralDecomposition spec, double s)
        : KernelOperator(s), spec_(std::move(spec)) {}

    Matrix heat(double t, const Matrix& M) const override { return apply_heat(spec_, s_, t, M); }
    Matrix phi(double t, const Matrix& M) const override { return apply_phi(spec_, s_, t, M); }
    Matrix power(const Matrix& M) const override;
    Matrix backward_solve(double dt, const Matrix& B) const override;
    double lambda_max_hint() const override {
        return spec_.n() == 0 ? 0.0 : spec_.eigenvalues[spec_.n() - 1];
    }

    const SpectralDecomposition& decomposition() const { return spec_; }

private:
    SpectralDecomposition spec_;
};

// s = 1/2 realized through quadrature over a base s = 1 operator. Only heat
// and phi are available (phi integrates the subordinated semigroup over
// [0, t]); the explicit and implicit steppers have no half-power matvec.
class SubordinationOperator final : public KernelOperator {
public:
    explicit SubordinationOperator(std::shared_ptr<const KernelOperator> base,
                                   int quad_nodes = 64);

    Matrix heat(double t, const Matrix& M) const override;
    Matrix phi(double t, const Matrix& M) const override;
    Matrix power(const Matrix& M) const override;
    Matrix backward_solve(double dt, const Matrix& B) const override;
    double lambda_max_hint() const override;

private:
    std::shared_ptr<const KernelOperator> base_;
    int quad_nodes_;
};

// First-m-eigenmodes variant; inherits the spectral filters restricted to
// the leading invariant subspace.
class TruncatedSpectralOperator final : public KernelOperator {
public:
    TruncatedSpectralOperator(SpectralDecomposition spec, double s, int m);

    Matrix heat(double t, const Matrix& M) const override;
    Matrix phi(double t, const Matrix& M) const override;
    Matrix power(const Matrix& M) const override;
    Matrix backward_solve(double dt, const Matrix& B) const override;
    double lambda_max_hint() const override;

private:
    Matrix filtered(const Matrix& M, const std::function<double(double)>& f) const;
    SpectralDecomposition spec_;
    int m_;
};

} // namespace heatprop
