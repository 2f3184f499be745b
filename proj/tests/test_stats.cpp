// Trial aggregation, the regularized incomplete beta, one-way ANOVA, pooled
// t-tests, and Bonferroni-corrected pairwise comparisons.
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "heatprop/stats.hpp"
#include "heatprop/rng.hpp"
#include "test_support.hpp"

using namespace heatprop;

TEST_CASE("trial aggregation reports mean and standard error") {
    const TrialStats st = aggregate_trials({0.8, 0.9, 1.0});
    CHECK(st.n_trials == 3);
    CHECK(st.mean == doctest::Approx(0.9));
    // Sample std 0.1 over sqrt(3).
    CHECK(st.se == doctest::Approx(0.1 / std::sqrt(3.0)));
    CHECK(!st.se_degenerate);
    CHECK(st.accuracies.size() == 3);
}

TEST_CASE("single-trial aggregation flags the degenerate standard error") {
    const TrialStats st = aggregate_trials({0.75});
    CHECK(st.n_trials == 1);
    CHECK(st.mean == 0.75);
    CHECK(st.se == 0.0);
    CHECK(st.se_degenerate);
    CHECK_THROWS_AS((void)aggregate_trials({}), UsageError);
}

TEST_CASE("incomplete beta matches closed forms") {
    // I_x(1, 1) is the identity.
    for (const double x : {0.1, 0.25, 0.5, 0.9})
        CHECK(regularized_incomplete_beta(1.0, 1.0, x) == doctest::Approx(x));

    // Symmetric parameters put the median at one half.
    for (const double a : {0.5, 2.0, 7.0})
        CHECK(regularized_incomplete_beta(a, a, 0.5) == doctest::Approx(0.5));

    // Integer parameters reduce to a binomial tail:
    // I_0.3(2, 3) = sum_{k=2}^{4} C(4,k) 0.3^k 0.7^(4-k).
    const double expected = 6.0 * 0.09 * 0.49 + 4.0 * 0.027 * 0.7 + 0.0081;
    CHECK(regularized_incomplete_beta(2.0, 3.0, 0.3) == doctest::Approx(expected));

    // I_x(a, 1) = x^a exercises the continued fraction directly.
    CHECK(regularized_incomplete_beta(4.5, 1.0, 0.44) ==
          doctest::Approx(std::pow(0.44, 4.5)));

    CHECK(regularized_incomplete_beta(3.0, 2.0, 0.0) == 0.0);
    CHECK(regularized_incomplete_beta(3.0, 2.0, 1.0) == 1.0);
}

TEST_CASE("incomplete beta satisfies the reflection identity") {
    for (const double a : {0.7, 2.0, 5.5}) {
        for (const double b : {1.3, 4.0}) {
            for (const double x : {0.2, 0.5, 0.8}) {
                const double lhs = regularized_incomplete_beta(a, b, x);
                const double rhs = 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
            }
        }
    }
    CHECK_THROWS_AS((void)regularized_incomplete_beta(0.0, 1.0, 0.5), UsageError);
    CHECK_THROWS_AS((void)regularized_incomplete_beta(1.0, -1.0, 0.5), UsageError);
    CHECK_THROWS_AS((void)regularized_incomplete_beta(1.0, 1.0, 1.5), UsageError);
}

TEST_CASE("one-way ANOVA matches a hand-computed fixture") {
    const std::vector<std::vector<double>> groups{
        {1.0, 2.0, 3.0, 4.0}, {2.0, 3.0, 4.0, 5.0}, {4.0, 5.0, 6.0, 7.0}};
    const AnovaResult res = anova_oneway(groups);
    CHECK(res.df_between == 2);
    CHECK(res.df_within == 9);
    // ss_between = 18.6667, ss_within = 15 gives F = 5.6.
    CHECK(res.F == doctest::Approx(5.6).epsilon(1e-12));
    // Survival function with d1=2 reduces to (d2 / (d2 + d1 F))^(d2/2).
    CHECK(res.p == doctest::Approx(std::pow(9.0 / (9.0 + 2.0 * 5.6), 4.5)));
}

TEST_CASE("ANOVA handles degenerate variance splits") {
    const AnovaResult same =
        anova_oneway({{1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}});
    CHECK(same.F < 1e-10);
    CHECK(same.p > 0.999);

    const AnovaResult flat = anova_oneway({{1.0, 1.0}, {1.0, 1.0}});
    CHECK(flat.F == 0.0);
    CHECK(flat.p == 1.0);

    const AnovaResult separated = anova_oneway({{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}});
    CHECK(separated.F > 1e299);
    CHECK(separated.p == 0.0);

    CHECK_THROWS_AS((void)anova_oneway({{1.0, 2.0}}), UsageError);
    CHECK_THROWS_AS((void)anova_oneway({{1.0, 2.0}, {1.0}}), UsageError);
}

TEST_CASE("ANOVA separates close means at benchmark-sized samples") {
    // Three 50-trial groups whose means differ by about half a within-group
    // standard deviation. The population F is about 3.9 but the noncentral
    // sampling spread at this effect size is wide, so the band only rules
    // out gross miscomputation (this seeded draw lands at F=2.38, p=0.096).
    Rng rng(606);
    const std::vector<double> means{0.952, 0.952, 0.958};
    const double sd = 0.0124;
    std::vector<std::vector<double>> groups;
    for (const double mu : means) {
        std::vector<double> g;
        for (int i = 0; i < 50; ++i) g.push_back(mu + sd * normal01(rng));
        groups.push_back(std::move(g));
    }
    const AnovaResult res = anova_oneway(groups);
    CHECK(res.df_between == 2);
    CHECK(res.df_within == 147);
    MESSAGE("fixture ANOVA F=", res.F, " p=", res.p);
    CHECK(res.F > 1.5);
    CHECK(res.F < 9.0);
    CHECK(res.p < 0.25);
    CHECK(res.p > 1e-5);
}

TEST_CASE("pooled t-test matches a hand-computed fixture") {
    const std::vector<double> a{1.0, 2.0, 3.0, 4.0, 5.0};
    const std::vector<double> b{2.0, 3.0, 4.0, 5.0, 6.0};
    const TTestResult res = t_test(a, b);
    CHECK(res.df == 8);
    // pooled var 2.5, standard error 1, mean difference -1.
    CHECK(res.t == doctest::Approx(-1.0).epsilon(1e-12));
    // Two-sided p of |t|=1 at 8 degrees of freedom.
    CHECK(res.p == doctest::Approx(0.34659).epsilon(1e-4));
}

TEST_CASE("t-test handles identical and zero-variance groups") {
    const TTestResult same = t_test({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0});
    CHECK(same.t == 0.0);
    CHECK(same.p == 1.0);

    const TTestResult separated = t_test({1.0, 1.0}, {2.0, 2.0});
    CHECK(separated.p == 0.0);
    CHECK(separated.t < 0.0);

    CHECK_THROWS_AS((void)t_test({1.0}, {1.0, 2.0}), UsageError);
}

TEST_CASE("two-group ANOVA equals the squared t statistic") {
    Rng rng(607);
    std::vector<double> a, b;
    for (int i = 0; i < 12; ++i) a.push_back(uniform(rng, 0.0, 1.0));
    for (int i = 0; i < 15; ++i) b.push_back(uniform(rng, 0.0, 1.0));
    const TTestResult tt = t_test(a, b);
    const AnovaResult an = anova_oneway({a, b});
    CHECK(an.F == doctest::Approx(tt.t * tt.t).epsilon(1e-9));
    CHECK(an.p == doctest::Approx(tt.p).epsilon(1e-9));
    CHECK(an.df_within == tt.df);
}

TEST_CASE("well-separated benchmark groups give a vanishing p-value") {
    // Accuracy-style samples around 52.9 and 60.7 with the spread implied by
    // standard errors of 0.75 and 0.65 at 50 trials.
    Rng rng(608);
    std::vector<double> a, b;
    for (int i = 0; i < 50; ++i) a.push_back(52.9 + 0.75 * std::sqrt(50.0) * normal01(rng));
    for (int i = 0; i < 50; ++i) b.push_back(60.7 + 0.65 * std::sqrt(50.0) * normal01(rng));
    const TTestResult res = t_test(a, b);
    CHECK(res.df == 98);
    CHECK(res.t < 0.0);
    MESSAGE("separation fixture t=", res.t, " p=", res.p);
    CHECK(res.p < 0.001);
}

TEST_CASE("pairwise comparisons apply the Bonferroni correction") {
    const std::vector<std::vector<double>> groups{
        {1.0, 2.0, 3.0, 4.0, 5.0}, {2.0, 3.0, 4.0, 5.0, 6.0}, {8.0, 9.0, 10.0, 11.0, 12.0}};
    const auto cmps = bonferroni_pairwise(groups);
    REQUIRE(cmps.size() == 3);
    CHECK(cmps[0].i == 0);
    CHECK(cmps[0].j == 1);
    CHECK(cmps[1].i == 0);
    CHECK(cmps[1].j == 2);
    CHECK(cmps[2].i == 1);
    CHECK(cmps[2].j == 2);

    for (const auto& cmp : cmps) {
        const TTestResult tt = t_test(groups[cmp.i], groups[cmp.j]);
        CHECK(cmp.t == doctest::Approx(tt.t));
        CHECK(cmp.p_raw == doctest::Approx(tt.p));
        CHECK(cmp.p_adjusted == doctest::Approx(std::min(1.0, tt.p * 3.0)));
        CHECK(cmp.p_adjusted <= 1.0);
    }
    CHECK(cmps[0].mean_diff == doctest::Approx(-1.0));
    CHECK(cmps[1].mean_diff == doctest::Approx(-7.0));

    // Two groups: a single comparison with no correction factor.
    const auto single = bonferroni_pairwise({groups[0], groups[1]});
    REQUIRE(single.size() == 1);
    CHECK(single[0].p_adjusted == doctest::Approx(single[0].p_raw));

    CHECK_THROWS_AS((void)bonferroni_pairwise({groups[0]}), UsageError);
}

TEST_CASE("identical groups saturate the adjusted p-value") {
    const std::vector<double> g{0.5, 0.6, 0.7};
    const auto cmps = bonferroni_pairwise({g, g, g});
    for (const auto& cmp : cmps) {
        CHECK(cmp.p_raw == 1.0);
        CHECK(cmp.p_adjusted == 1.0);
        CHECK(cmp.mean_diff == 0.0);
    }
}

TEST_CASE("the post-hoc note names the substituted procedure") {
    const std::string note = kPosthocNote;
    CHECK(note.find("Bonferroni") != std::string::npos);
    CHECK(note.find("Tukey") != std::string::npos);
}
