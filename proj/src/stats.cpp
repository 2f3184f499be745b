#include "heatprop/stats.hpp"

#include <cmath>

namespace heatprop {

namespace {

constexpr double kFCap = 1e300;  // stand-in for an infinite F statistic

double sample_mean(const std::vector<double>& xs) {
    double acc = 0.0;
    for (const double x : xs) acc += x;
    return acc / static_cast<double>(xs.size());
}

double sum_sq_dev(const std::vector<double>& xs, double mean) {
    double acc = 0.0;
    for (const double x : xs) acc += (x - mean) * (x - mean);
    return acc;
}

// Lentz's continued fraction for the incomplete beta; standard form with
// even/odd coefficient alternation.
double betacf(double a, double b, double x) {
    constexpr int max_iter = 500;
    constexpr double eps = 1e-15;
    constexpr double tiny = 1e-300;

    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h;
    }
    throw NumericalError("incomplete beta continued fraction did not converge");
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw UsageError("beta parameters must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw UsageError("beta argument must lie in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                  a * std::log(x) + b * std::log1p(-x));
    // The continued fraction converges fast only below the distribution
    // mean; reflect otherwise.
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

TrialStats aggregate_trials(const std::vector<double>& accuracies) {
    if (accuracies.empty()) throw UsageError("cannot aggregate zero trials");
    TrialStats stats;
    stats.accuracies = accuracies;
    stats.n_trials = static_cast<int>(accuracies.size());
    stats.mean = sample_mean(accuracies);
    if (stats.n_trials < 2) {
        stats.se = 0.0;
        stats.se_degenerate = true;
    } else {
        const double var = sum_sq_dev(accuracies, stats.mean) / (stats.n_trials - 1);
        stats.se = std::sqrt(var / stats.n_trials);
    }
    return stats;
}

AnovaResult anova_oneway(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw UsageError("ANOVA needs at least two groups");
    int total_n = 0;
    double grand_sum = 0.0;
    for (const auto& g : groups) {
        if (g.size() < 2) throw UsageError("every ANOVA group needs at least two samples");
        total_n += static_cast<int>(g.size());
        for (const double x : g) grand_sum += x;
    }
    const double grand_mean = grand_sum / total_n;

    double ss_between = 0.0, ss_within = 0.0;
    for (const auto& g : groups) {
        const double mean = sample_mean(g);
        ss_between += g.size() * (mean - grand_mean) * (mean - grand_mean);
        ss_within += sum_sq_dev(g, mean);
    }

    AnovaResult res;
    res.df_between = static_cast<int>(groups.size()) - 1;
    res.df_within = total_n - static_cast<int>(groups.size());

    if (ss_within == 0.0) {
        if (ss_between == 0.0) {
            res.F = 0.0;
            res.p = 1.0;
        } else {
            res.F = kFCap;
            res.p = 0.0;
        }
        return res;
    }
    res.F = (ss_between / res.df_between) / (ss_within / res.df_within);
    // Survival function of the F distribution via the incomplete beta.
    const double d1 = res.df_between, d2 = res.df_within;
    res.p = regularized_incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * res.F));
    return res;
}

TTestResult t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2)
        throw UsageError("t-test needs at least two samples per group");
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double ma = sample_mean(a), mb = sample_mean(b);
    const double pooled_var =
        (sum_sq_dev(a, ma) + sum_sq_dev(b, mb)) / (na + nb - 2.0);

    TTestResult res;
    res.df = static_cast<int>(na + nb) - 2;
    if (pooled_var == 0.0) {
        if (ma == mb) {
            res.t = 0.0;
            res.p = 1.0;
        } else {
            res.t = ma > mb ? kFCap : -kFCap;
            res.p = 0.0;
        }
        return res;
    }
    res.t = (ma - mb) / std::sqrt(pooled_var * (1.0 / na + 1.0 / nb));
    // Two-sided p via the t survival function.
    const double df = res.df;
    res.p = regularized_incomplete_beta(df / 2.0, 0.5, df / (df + res.t * res.t));
    return res;
}

std::vector<PairwiseComparison> bonferroni_pairwise(
    const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw UsageError("pairwise comparison needs at least two groups");
    const int k = static_cast<int>(groups.size());
    const int comparisons = k * (k - 1) / 2;
    std::vector<PairwiseComparison> out;
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            const TTestResult tt = t_test(groups[i], groups[j]);
            PairwiseComparison cmp;
            cmp.i = i;
            cmp.j = j;
            cmp.mean_diff = sample_mean(groups[i]) - sample_mean(groups[j]);
            cmp.t = tt.t;
            cmp.p_raw = tt.p;
            cmp.p_adjusted = std::min(1.0, tt.p * comparisons);
            out.push_back(cmp);
        }
    }
    return out;
}

} // namespace heatprop
