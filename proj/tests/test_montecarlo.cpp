#include <fracheat/montecarlo.hpp>
#include <fracheat/solver.hpp>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include <cmath>

namespace {

using namespace fracheat;
using namespace fracheat::montecarlo;
using specfun::pi;

constexpr std::size_t big_n = 1000000;

// Mean of x^p with its standard error.
MomentEstimate signed_moment(const std::vector<double>& v, int p) {
    double s = 0.0, s2 = 0.0;
    for (double x : v) {
        const double y = std::pow(x, p);
        s += y;
        s2 += y * y;
    }
    const double N = static_cast<double>(v.size());
    const double mean = s / N;
    return {mean, std::sqrt((s2 / N - mean * mean) / (N - 1.0))};
}

double gj_cdf(const timechange::GjLaw& g, double w) {
    if (w <= 0) return 0.0;
    const double cm = std::pow(std::pow(double(g.m), g.m) * g.t, 1.0 / (g.m - 1));
    return boost::math::gamma_p(double(g.j) / g.m, std::pow(w, g.m) / cm);
}

TEST(Rng, BatchesAreReproducibleAcrossThreadCounts) {
    const RngStream rng{42, 3};
    const auto a = sample_time_product(3, 1.0, rng, 100000, 1);
    const auto b = sample_time_product(3, 1.0, rng, 100000, 4);
    const auto c = sample_time_product(3, 1.0, rng, 100000, 1);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.values, c.values);
    EXPECT_EQ(a.count, 100000u);
    EXPECT_EQ(a.seed, 42u);
    EXPECT_EQ(a.stream_id, 3u);
}

TEST(Rng, PrefixDoesNotDependOnCount) {
    const RngStream rng{7, 0};
    const auto a = sample_reflecting_bm(1.0, rng, 1000);
    const auto b = sample_reflecting_bm(1.0, rng, 70000, 3);
    EXPECT_TRUE(std::equal(a.values.begin(), a.values.end(), b.values.begin()));
}

TEST(Rng, StreamsAreIndependent) {
    const auto a = sample_reflecting_bm(1.0, {11, 0}, 100000);
    const auto b = sample_reflecting_bm(1.0, {11, 1}, 100000);
    EXPECT_NE(a.values, b.values);
    EXPECT_TRUE(two_sample_ks(a.values, b.values).pass);
    // Lag-free correlation between the paired draws.
    double sab = 0, sa = 0, sb = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        sa += a.values[i];
        sb += b.values[i];
        sab += a.values[i] * b.values[i];
        saa += a.values[i] * a.values[i];
        sbb += b.values[i] * b.values[i];
    }
    const double N = static_cast<double>(a.values.size());
    const double corr = (sab / N - sa * sb / (N * N)) /
                        std::sqrt((saa / N - sa * sa / (N * N)) * (sbb / N - sb * sb / (N * N)));
    EXPECT_LT(std::fabs(corr), 3.0 / std::sqrt(N));
}

TEST(SampleGj, HalfOrderMean) {
    const auto s = sample_gj({2, 1, 1.0}, {1, 0}, big_n);
    const auto m = empirical_moment(s.values, 1.0);
    EXPECT_LT(std::fabs(m.mean - 2.0 / std::sqrt(pi)), 3.0 * m.standard_error);
}

TEST(SampleGj, KolmogorovSmirnovAgainstIncompleteGamma) {
    for (int j : {1, 2}) {
        const timechange::GjLaw g{3, j, 1.0};
        const auto s = sample_gj(g, {2, static_cast<std::uint64_t>(j)}, big_n, 4);
        const auto ks = ks_test(s.values, [&](double w) { return gj_cdf(g, w); });
        EXPECT_TRUE(ks.pass) << j << " D=" << ks.statistic << " crit=" << ks.critical;
        EXPECT_NEAR(ks.critical, 1.3581 / 1000.0, 1e-12);
    }
}

TEST(SampleGj, KolmogorovSmirnovAgainstTabulatedDensity) {
    const timechange::GjLaw g{3, 1, 1.0};
    const TabulatedCdf cdf([&](double w) { return w > 0 ? timechange::gj_density(g, w) : 0.0; }, 0.0, 8.0);
    EXPECT_NEAR(cdf.total(), 1.0, 1e-10);
    const auto s = sample_gj(g, {3, 0}, big_n, 4);
    EXPECT_TRUE(ks_test(s.values, cdf).pass);
}

TEST(SampleGj, SingleDrawIsPositive) {
    const auto s = sample_gj({3, 1, 1.0}, {5, 0}, 1);
    ASSERT_EQ(s.values.size(), 1u);
    EXPECT_GT(s.values[0], 0.0);
    EXPECT_THROW(sample_gj({3, 1, 1.0}, {5, 0}, 0), DomainError);
    EXPECT_THROW(sample_gj({3, 3, 1.0}, {5, 0}, 10), DomainError);
}

TEST(SampleTimeProduct, TwoFactorLawIsG1) {
    const auto a = sample_time_product(2, 1.0, {9, 0}, 1000);
    const auto b = sample_gj({2, 1, 1.0}, {9, 0}, 1000);
    EXPECT_EQ(a.values, b.values);
}

TEST(SampleTimeProduct, MomentsWithinThreeStandardErrors) {
    struct Case { int m; double t; };
    for (const Case c : {Case{3, 1.0}, Case{4, 2.0}, Case{2, 1.5}}) {
        const auto s = sample_time_product(c.m, c.t, {21, static_cast<std::uint64_t>(c.m)}, big_n, 4);
        for (double d : {1.0, 2.0}) {
            const auto e = empirical_moment(s.values, d);
            const double exact = timechange::time_moment(1.0 / c.m, d, c.t);
            EXPECT_LT(std::fabs(e.mean - exact), 3.0 * e.standard_error) << c.m << " " << d;
        }
    }
    EXPECT_NEAR(timechange::time_moment(1.0 / 3.0, 1.0, 1.0), 1.1198, 1e-4);
}

TEST(SampleTimeProduct, PositiveSamples) {
    const auto s = sample_time_product(4, 1.0, {1, 1}, 50000);
    EXPECT_TRUE(std::all_of(s.values.begin(), s.values.end(), [](double v) { return v > 0.0; }));
}

TEST(SampleReflectingBm, ErfCdfAndSecondMoment) {
    const double t = 1.0;
    const auto s = sample_reflecting_bm(t, {4, 0}, big_n, 4);
    EXPECT_TRUE(std::all_of(s.values.begin(), s.values.end(), [](double v) { return v >= 0.0; }));
    const auto ks = ks_test(s.values, [&](double u) { return u <= 0 ? 0.0 : std::erf(u / (2 * std::sqrt(t))); });
    EXPECT_TRUE(ks.pass) << ks.statistic;
    const auto m = empirical_moment(s.values, 2.0);
    EXPECT_LT(std::fabs(m.mean - 2.0), 3.0 * m.standard_error);
}

TEST(SampleReflectingBm, MatchesTwoFactorProduct) {
    const auto a = sample_reflecting_bm(1.0, {8, 0}, 100000);
    const auto b = sample_time_product(2, 1.0, {8, 1}, 100000);
    EXPECT_GT(two_sample_ks(a.values, b.values).p_value, 0.05);
}

TEST(SampleComposedBm, HalfOrderSecondMoment) {
    const auto s = sample_composed_bm(0.5, 1.0, {12, 0}, big_n, 4);
    const auto m = empirical_moment(s.values, 2.0);
    EXPECT_NEAR(4.0 / std::sqrt(pi), 2.2568, 1e-4);
    EXPECT_LT(std::fabs(m.mean - 4.0 / std::sqrt(pi)), 3.0 * m.standard_error);
}

TEST(SampleComposedBm, OddMomentsVanish) {
    for (double a : {0.5, 1.0 / 3.0, 0.25}) {
        const auto s = sample_composed_bm(a, 1.0, {13, 0}, 200000, 4);
        for (int p : {1, 3}) {
            const auto m = signed_moment(s.values, p);
            EXPECT_LT(std::fabs(m.mean), 3.0 * m.standard_error) << a << " " << p;
        }
    }
}

TEST(SampleComposedBm, ChiSquareAgainstSolution) {
    const double a = 1.0 / 3.0;
    const auto s = sample_composed_bm(a, 1.0, {14, 0}, big_n, 4);
    const solver::SolutionEvaluator ev(kernel::make_equation_spec(2), a, solver::SolveRoute::subordination);
    auto dens = [&](double x) { return ev(x, 1.0).value; };
    std::vector<double> edges;
    for (int i = 0; i < 63; ++i) edges.push_back(-6.0 + 12.0 * i / 62.0);
    std::vector<double> probs;
    const quadrature::Options opt{1e-12, 1e-10};
    // Both tails by symmetry: P(X < -6) = 1/2 - ∫_{-6}^0.
    const double half_core = quadrature::integrate_adaptive(dens, -6.0, 0.0, opt).value;
    probs.push_back(0.5 - half_core);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        probs.push_back(quadrature::integrate_adaptive(dens, edges[i], edges[i + 1], opt).value);
    probs.push_back(0.5 - half_core);
    ASSERT_EQ(probs.size(), 64u);
    const auto r = chi_square_test(s.values, edges, probs);
    EXPECT_TRUE(r.pass) << r.statistic << " p=" << r.p_value;
}

TEST(SampleComposedBm, UnsupportedAlpha) {
    EXPECT_THROW(sample_composed_bm(0.4, 1.0, {1, 0}, 10), DomainError);
    EXPECT_THROW(sample_composed_bm(0.7, 1.0, {1, 0}, 10), DomainError);
}

TEST(Kolmogorov, TailProbability) {
    EXPECT_NEAR(kolmogorov_q(1.3581), 0.05, 2e-4);
    EXPECT_EQ(kolmogorov_q(0.0), 1.0);
}

TEST(ChiSquare, DetectsWrongModel) {
    const auto s = sample_reflecting_bm(1.0, {30, 0}, 100000);
    const std::vector<double> edges{0.5, 1.0, 1.5, 2.0, 3.0};
    std::vector<double> right, wrong;
    double prev = 0.0;
    for (double e : edges) {
        right.push_back(std::erf(e / 2.0) - std::erf(prev / 2.0));
        wrong.push_back(std::erf(e / 2.2) - std::erf(prev / 2.2));
        prev = e;
    }
    right.push_back(std::erfc(prev / 2.0));
    wrong.push_back(std::erfc(prev / 2.2));
    EXPECT_TRUE(chi_square_test(s.values, edges, right).pass);
    EXPECT_FALSE(chi_square_test(s.values, edges, wrong).pass);
}

} // namespace
