#include "heatprop/chebyshev.hpp"

#include <cmath>

namespace heatprop {

namespace {

// Chebyshev coefficients of ((1-xi)/2)^m on [-1,1]: with xi = cos(theta)
// this is sin^{2m}(theta/2), whose cosine expansion is binomial. Evaluated
// through lgamma so large m stays finite.
std::vector<double> endpoint_bump(int m) {
    std::vector<double> b(m + 1);
    const double log4m = m * std::log(4.0);
    for (int k = 0; k <= m; ++k) {
        const double lc = std::lgamma(2.0 * m + 1.0) - std::lgamma(m - k + 1.0) -
                          std::lgamma(m + k + 1.0);
        b[k] = 2.0 * (k % 2 == 0 ? 1.0 : -1.0) * std::exp(lc - log4m);
    }
    b[0] *= 0.5;
    return b;
}

std::vector<double> fit_coeffs(const std::function<double(double)>& f, double lambda_max, int m) {
    const int N = std::max(2 * m + 2, 64);
    std::vector<double> fx(N), theta(N);
    for (int j = 0; j < N; ++j) {
        theta[j] = M_PI * (j + 0.5) / N;
        fx[j] = f(lambda_max * (std::cos(theta[j]) + 1.0) / 2.0);
    }
    std::vector<double> c(m + 1, 0.0);
    for (int k = 0; k <= m; ++k) {
        double acc = 0.0;
        for (int j = 0; j < N; ++j) acc += fx[j] * std::cos(k * theta[j]);
        c[k] = 2.0 * acc / N;
    }
    c[0] *= 0.5;

    // Pin the series at x = 0 (xi = -1). The quadrature alone misses f(0) by
    // the full truncation error there, which breaks kernel-mode exactness;
    // the bump moves the residual into the interior where it is already paid.
    double p0 = 0.0;
    for (int k = 0; k <= m; ++k) p0 += (k % 2 == 0 ? c[k] : -c[k]);
    const double delta = f(0.0) - p0;
    const std::vector<double> bump = endpoint_bump(m);
    for (int k = 0; k <= m; ++k) c[k] += delta * bump[k];
    return c;
}

} // namespace

double ChebTarget::operator()(double x) const {
    const double xs = fractional_power(x, s);
    switch (kind) {
        case ChebTargetKind::Heat: return std::exp(-t * xs);
        case ChebTargetKind::Phi: return t * phi_h(t * xs);
    }
    return 0.0;
}

ChebSeries cheb_coefficients(const ChebTarget& target, double lambda_max, int m) {
    if (!(lambda_max > 0.0)) throw UsageError("lambda_max must be positive");
    if (m < 1) throw UsageError("series degree must be at least 1");
    if (!(target.s > 0.0 && target.s <= 1.0))
        throw UsageError("fractional order s must be in (0, 1]");
    if (!(target.t >= 0.0)) throw UsageError("diffusion time t must be non-negative");
    ChebSeries series;
    series.coeffs = fit_coeffs([&target](double x) { return target(x); }, lambda_max, m);
    series.lambda_max = lambda_max;
    series.degree = m;
    series.target = target;
    return series;
}

double cheb_eval(const ChebSeries& series, double x) {
    const double xi = 2.0 * x / series.lambda_max - 1.0;
    double b1 = 0.0, b2 = 0.0;
    for (int k = series.degree; k >= 1; --k) {
        const double next = 2.0 * xi * b1 - b2 + series.coeffs[k];
        b2 = b1;
        b1 = next;
    }
    return xi * b1 - b2 + series.coeffs[0];
}

Matrix cheb_apply(const Sparse& L, const ChebSeries& series, const Matrix& M,
                  int* sparse_products) {
    int count = 0;
    const double scale = 2.0 / series.lambda_max;
    // A = (2/lambda_max) L - I; A*X costs one sparse product.
    const auto shifted = [&](const Matrix& X) {
        ++count;
        return Matrix(scale * (L * X) - X);
    };

    Matrix t_prev = M;
    Matrix acc = series.coeffs[0] * t_prev;
    if (series.degree >= 1) {
        Matrix t_cur = shifted(M);
        acc += series.coeffs[1] * t_cur;
        for (int k = 2; k <= series.degree; ++k) {
            Matrix t_next = 2.0 * shifted(t_cur) - t_prev;
            t_prev = std::move(t_cur);
            t_cur = std::move(t_next);
            acc += series.coeffs[k] * t_cur;
        }
    }
    if (sparse_products) *sparse_products = count;
    return acc;
}

double cheb_error_estimate(const ChebSeries& series) {
    const int m = series.degree;
    if (m == 0) return std::abs(series.coeffs[0]);
    return std::max(std::abs(series.coeffs[m - 1]), std::abs(series.coeffs[m]));
}

int cheb_auto_degree(const ChebTarget& target, double lambda_max, double tol, int m_max) {
    if (!(tol > 0.0)) throw UsageError("auto-degree tolerance must be positive");
    int lo = 1, hi = 8;
    while (cheb_error_estimate(cheb_coefficients(target, lambda_max, hi)) > tol) {
        lo = hi;
        hi *= 2;
        if (hi > m_max) {
            if (cheb_error_estimate(cheb_coefficients(target, lambda_max, m_max)) <= tol)
                return m_max;
            throw NumericalError("auto degree: estimate still above tolerance at degree " +
                                 std::to_string(m_max));
        }
    }
    // Smallest degree in (lo, hi] whose estimate passes; the estimate decays
    // essentially monotonically above the floating-point floor.
    while (lo + 1 < hi) {
        const int mid = (lo + hi) / 2;
        if (cheb_error_estimate(cheb_coefficients(target, lambda_max, mid)) <= tol)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

ChebyshevOperator::ChebyshevOperator(Sparse L, double s, double lambda_bound, int degree)
    : KernelOperator(s), L_(std::move(L)), lambda_bound_(lambda_bound), degree_(degree) {
    if (!(lambda_bound_ > 0.0)) throw UsageError("lambda bound must be positive");
    if (degree_ <= 0) degree_ = s_ < 1.0 ? 80 : 30;  // default degrees by smoothness
}

Matrix ChebyshevOperator::heat(double t, const Matrix& M) const {
    if (!(t >= 0.0)) throw UsageError("diffusion time t must be non-negative");
    if (t == 0.0) return M;
    const ChebSeries series = cheb_coefficients(ChebTarget::heat(s_, t), lambda_bound_, degree_);
    return cheb_apply(L_, series, M);
}

Matrix ChebyshevOperator::phi(double t, const Matrix& M) const {
    if (!(t >= 0.0)) throw UsageError("diffusion time t must be non-negative");
    if (t == 0.0) return Matrix::Zero(M.rows(), M.cols());
    const ChebSeries series = cheb_coefficients(ChebTarget::phi(s_, t), lambda_bound_, degree_);
    return cheb_apply(L_, series, M);
}

Matrix ChebyshevOperator::power(const Matrix& M) const {
    if (s_ == 1.0) return L_ * M;
    // x^s fitted like the public targets; f(0) = 0 is pinned by the same
    // endpoint correction, so kernel vectors stay in the kernel.
    ChebSeries series;
    series.coeffs = fit_coeffs([this](double x) { return fractional_power(x, s_); },
                               lambda_bound_, degree_);
    series.lambda_max = lambda_bound_;
    series.degree = degree_;
    return cheb_apply(L_, series, M);
}

} // namespace heatprop
