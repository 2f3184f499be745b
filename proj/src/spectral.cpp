#include "heatprop/spectral.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace heatprop {

namespace {

constexpr double kZeroClamp = 1e-10;

void check_s(double s) {
    if (!(s > 0.0 && s <= 1.0)) throw UsageError("fractional order s must be in (0, 1]");
}

void check_t(double t) {
    if (!(t >= 0.0)) throw UsageError("diffusion time t must be non-negative");
}

Matrix filter_apply(const SpectralDecomposition& spec, const Matrix& M,
                    const std::function<double(double)>& f) {
    Matrix P = spec.eigenvectors.transpose() * M;
    for (int k = 0; k < spec.n(); ++k) P.row(k) *= f(spec.eigenvalues[k]);
    return spec.eigenvectors * P;
}

} // namespace

double fractional_power(double x, double s) {
    if (x <= 0.0) return 0.0;
    return std::pow(x, s);
}

// expm1 keeps the small-x regime exact to rounding.
double phi_h(double x) {
    if (x == 0.0) return 1.0;
    return -std::expm1(-x) / x;
}

SpectralDecomposition eigendecompose(const Matrix& L, int dense_limit) {
    const int n = static_cast<int>(L.rows());
    if (L.cols() != n) throw UsageError("eigendecompose needs a square matrix");
    if (n > dense_limit)
        throw NumericalError("matrix of size " + std::to_string(n) +
                             " exceeds the dense eigendecomposition limit " +
                             std::to_string(dense_limit) + "; use the Chebyshev strategy");
    const double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
    if ((L - L.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw NumericalError("matrix is not symmetric; spectral operations support the "
                             "symmetric laplacian kinds only");

    Eigen::SelfAdjointEigenSolver<Matrix> solver(L);
    if (solver.info() != Eigen::Success)
        throw NumericalError("dense eigendecomposition failed to converge");

    SpectralDecomposition spec;
    spec.eigenvalues = solver.eigenvalues();
    spec.eigenvectors = solver.eigenvectors();
    for (int k = 0; k < n; ++k) {
        double& lam = spec.eigenvalues[k];
        if (lam < -kZeroClamp)
            throw NumericalError("matrix is not positive semi-definite (eigenvalue " +
                                 std::to_string(lam) + ")");
        if (std::abs(lam) < kZeroClamp) lam = 0.0;
    }
    return spec;
}

SpectralDecomposition eigendecompose(const Sparse& L, int dense_limit) {
    return eigendecompose(Matrix(L), dense_limit);
}

Matrix apply_heat(const SpectralDecomposition& spec, double s, double t, const Matrix& M) {
    check_s(s);
    check_t(t);
    if (t == 0.0) return M;
    return filter_apply(spec, M,
                        [s, t](double lam) { return std::exp(-t * fractional_power(lam, s)); });
}

TruncatedResult apply_truncated(const SpectralDecomposition& spec, int m, double s, double t,
                                const Vector& u) {
    check_s(s);
    check_t(t);
    const int n = spec.n();
    if (m < 1 || m > n) throw UsageError("truncation order m must be in [1, n]");
    const auto U = spec.eigenvectors.leftCols(m);
    Vector p = U.transpose() * u;
    for (int k = 0; k < m; ++k) p[k] *= std::exp(-t * fractional_power(spec.eigenvalues[k], s));
    TruncatedResult res;
    res.result = U * p;
    res.error_bound =
        m == n ? 0.0 : std::exp(-t * fractional_power(spec.eigenvalues[m], s)) * u.norm();
    return res;
}

Matrix apply_phi(const SpectralDecomposition& spec, double s, double t, const Matrix& F) {
    check_s(s);
    check_t(t);
    if (t == 0.0) return Matrix::Zero(F.rows(), F.cols());
    return filter_apply(
        spec, F, [s, t](double lam) { return t * phi_h(t * fractional_power(lam, s)); });
}

Matrix pseudoinverse_apply(const SpectralDecomposition& spec, double s, const Matrix& F) {
    check_s(s);
    return filter_apply(spec, F, [s](double lam) {
        return lam > 0.0 ? std::pow(lam, -s) : 0.0;
    });
}

Matrix steady_state(const SpectralDecomposition& spec, double s, const Matrix& U0,
                    const Matrix& F) {
    check_s(s);
    // Pi projects onto all zero modes; connected graphs have exactly one.
    Matrix PU0 = Matrix::Zero(U0.rows(), U0.cols());
    Matrix PF = Matrix::Zero(F.rows(), F.cols());
    for (int k = 0; k < spec.n(); ++k) {
        if (spec.eigenvalues[k] != 0.0) continue;
        const Vector phi = spec.eigenvectors.col(k);
        PU0 += phi * (phi.transpose() * U0);
        PF += phi * (phi.transpose() * F);
    }
    if (PF.norm() > 1e-8)
        throw NumericalError("unbounded: source has nonzero kernel component (||Pi F|| = " +
                             std::to_string(PF.norm()) + ")");
    return PU0 + pseudoinverse_apply(spec, s, F);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw UsageError("quadrature needs at least one node");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-based initial guess, then Newton on the Legendre recurrence.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

std::vector<SubordinationNode> subordination_rule(double t, int quad_nodes) {
    if (!(t > 0.0)) throw UsageError("subordination rule needs t > 0");
    if (quad_nodes < 2) throw UsageError("subordination needs at least two quadrature nodes");

    // e^{-t sqrt(L)} u = (2/sqrt(pi)) Int_0^inf e^{-v^2} e^{-(t^2/(4v^2)) L} u dv.
    // Substituting v = V q^2 on q in [0,1] clusters nodes at the v -> 0 end,
    // where the heat time t^2/(4v^2) blows up and the integrand varies fastest.
    constexpr double kCutoff = 7.0;  // e^{-49} tail is below double precision
    std::vector<double> x, w;
    gauss_legendre(quad_nodes, x, w);

    std::vector<SubordinationNode> rule;
    rule.reserve(quad_nodes);
    for (int j = 0; j < quad_nodes; ++j) {
        const double q = 0.5 * (x[j] + 1.0);  // map to [0,1]
        const double v = kCutoff * q * q;
        if (v == 0.0) continue;
        SubordinationNode node;
        node.tau = t * t / (4.0 * v * v);
        node.weight =
            0.5 * w[j] * (2.0 / std::sqrt(M_PI)) * std::exp(-v * v) * 2.0 * kCutoff * q;
        rule.push_back(node);
    }
    return rule;
}

Vector subordination_apply(const std::function<Vector(double, const Vector&)>& matvec, double t,
                           const Vector& u, int quad_nodes) {
    if (!(t >= 0.0)) throw UsageError("diffusion time t must be non-negative");
    if (t == 0.0) return u;
    Vector acc = Vector::Zero(u.size());
    for (const SubordinationNode& node : subordination_rule(t, quad_nodes))
        acc += node.weight * matvec(node.tau, u);
    return acc;
}

SubordinationOperator::SubordinationOperator(std::shared_ptr<const KernelOperator> base,
                                             int quad_nodes)
    : KernelOperator(0.5), base_(std::move(base)), quad_nodes_(quad_nodes) {
    if (!base_) throw UsageError("subordination needs a base operator");
    if (base_->s() != 1.0)
        throw UsageError("subordination composes over a base operator with s = 1");
}

Matrix SubordinationOperator::heat(double t, const Matrix& M) const {
    if (!(t >= 0.0)) throw UsageError("diffusion time t must be non-negative");
    if (t == 0.0) return M;
    Matrix acc = Matrix::Zero(M.rows(), M.cols());
    for (const SubordinationNode& node : subordination_rule(t, quad_nodes_))
        acc += node.weight * base_->heat(node.tau, M);
    return acc;
}

Matrix SubordinationOperator::phi(double t, const Matrix& M) const {
    if (!(t >= 0.0)) throw UsageError("diffusion time t must be non-negative");
    if (t == 0.0) return Matrix::Zero(M.rows(), M.cols());
    // t h(t sqrt(L)) M = Int_0^t e^{-tau sqrt(L)} M dtau, by Gauss-Legendre
    // in tau with the subordinated semigroup at each node.
    const int n_outer = 32;
    std::vector<double> x, w;
    gauss_legendre(n_outer, x, w);
    Matrix acc = Matrix::Zero(M.rows(), M.cols());
    for (int j = 0; j < n_outer; ++j) {
        const double tau = 0.5 * t * (x[j] + 1.0);
        const double weight = 0.5 * t * w[j];
        acc += weight * heat(tau, M);
    }
    return acc;
}

Matrix SubordinationOperator::power(const Matrix&) const {
    throw NumericalError("the subordination strategy supports heat and phi applications only");
}

Matrix SubordinationOperator::backward_solve(double, const Matrix&) const {
    throw NumericalError("the subordination strategy supports heat and phi applications only");
}

double SubordinationOperator::lambda_max_hint() const {
    return std::sqrt(base_->lambda_max_hint());
}

Matrix diffusion_map(const SpectralDecomposition& spec, double t, int m) {
    check_t(t);
    const int n = spec.n();
    if (m < 2 || m > n) throw UsageError("embedding order m must be in [2, n]");
    Matrix coords(n, m - 1);
    for (int k = 1; k < m; ++k)
        coords.col(k - 1) = std::exp(-t * spec.eigenvalues[k]) * spec.eigenvectors.col(k);
    return coords;
}

double dirichlet_energy(const SpectralDecomposition& spec, double s, const Vector& u) {
    check_s(s);
    double e = 0.0;
    for (int k = 0; k < spec.n(); ++k) {
        const double c = spec.eigenvectors.col(k).dot(u);
        e += fractional_power(spec.eigenvalues[k], s) * c * c;
    }
    return e;
}

Matrix KernelOperator::backward_solve(double dt, const Matrix& B) const {
    // Conjugate gradient on (I + dt L^s) x = b, column by column. The
    // operator is SPD for every dt >= 0, so plain CG applies.
    if (!(dt >= 0.0)) throw UsageError("step size must be non-negative");
    const double tol = 1e-10;
    const int max_iters = static_cast<int>(B.rows()) * 10 + 100;
    Matrix X(B.rows(), B.cols());
    for (int c = 0; c < B.cols(); ++c) {
        const Vector b = B.col(c);
        const double bnorm = b.norm();
        if (bnorm == 0.0) {
            X.col(c).setZero();
            continue;
        }
        Vector x = Vector::Zero(b.size());
        Vector r = b;
        Vector p = r;
        double rs = r.squaredNorm();
        int it = 0;
        for (; it < max_iters; ++it) {
            if (std::sqrt(rs) <= tol * bnorm) break;
            const Vector Ap = p + dt * power(p);
            const double alpha = rs / p.dot(Ap);
            x += alpha * p;
            r -= alpha * Ap;
            const double rs_next = r.squaredNorm();
            p = r + (rs_next / rs) * p;
            rs = rs_next;
        }
        if (std::sqrt(rs) > tol * bnorm)
            throw NumericalError("conjugate gradient stalled after " + std::to_string(it) +
                                 " iterations, relative residual " +
                                 std::to_string(std::sqrt(rs) / bnorm));
        X.col(c) = x;
    }
    return X;
}

Matrix SpectralOperator::power(const Matrix& M) const {
    return filter_apply(spec_, M, [this](double lam) { return fractional_power(lam, s_); });
}

Matrix SpectralOperator::backward_solve(double dt, const Matrix& B) const {
    if (!(dt >= 0.0)) throw UsageError("step size must be non-negative");
    return filter_apply(spec_, B, [this, dt](double lam) {
        return 1.0 / (1.0 + dt * fractional_power(lam, s_));
    });
}

TruncatedSpectralOperator::TruncatedSpectralOperator(SpectralDecomposition spec, double s, int m)
    : KernelOperator(s), spec_(std::move(spec)), m_(m) {
    if (m_ < 1 || m_ > spec_.n()) throw UsageError("truncation order m must be in [1, n]");
}

Matrix TruncatedSpectralOperator::filtered(const Matrix& M,
                                           const std::function<double(double)>& f) const {
    const auto U = spec_.eigenvectors.leftCols(m_);
    Matrix P = U.transpose() * M;
    for (int k = 0; k < m_; ++k) P.row(k) *= f(spec_.eigenvalues[k]);
    return U * P;
}

Matrix TruncatedSpectralOperator::heat(double t, const Matrix& M) const {
    check_t(t);
    return filtered(M, [this, t](double lam) {
        return std::exp(-t * fractional_power(lam, s_));
    });
}

Matrix TruncatedSpectralOperator::phi(double t, const Matrix& M) const {
    check_t(t);
    if (t == 0.0) return Matrix::Zero(M.rows(), M.cols());
    return filtered(M, [this, t](double lam) {
        return t * phi_h(t * fractional_power(lam, s_));
    });
}

Matrix TruncatedSpectralOperator::power(const Matrix& M) const {
    return filtered(M, [this](double lam) { return fractional_power(lam, s_); });
}

Matrix TruncatedSpectralOperator::backward_solve(double dt, const Matrix& B) const {
    if (!(dt >= 0.0)) throw UsageError("step size must be non-negative");
    return filtered(B, [this, dt](double lam) {
        return 1.0 / (1.0 + dt * fractional_power(lam, s_));
    });
}

double TruncatedSpectralOperator::lambda_max_hint() const {
    return spec_.eigenvalues[m_ - 1];
}

} // namespace heatprop
