#include <fracheat/specfun.hpp>
#include <fracheat/quadrature.hpp>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <limits>

namespace {

using namespace fracheat;
using specfun::pi;
using big = boost::multiprecision::cpp_bin_float_50;

big big_rgamma(const big& y) {
    if (y <= 0 && y == floor(y)) return big(0);
    return 1 / boost::math::tgamma(y);
}

// Σ x^k / (k! Γ(ηk+β)) in 50 digits; cancellation is harmless at this precision
// for the arguments used below.
double wright_oracle(double x, double eta, double beta) {
    big sum = 0, xk = 1, fact = 1;
    for (int k = 0; k < 400; ++k) {
        if (k > 0) {
            xk *= big(x);
            fact *= k;
        }
        const big bound = abs(xk) / fact;
        sum += xk / fact * big_rgamma(big(eta) * k + big(beta));
        // 1/|Γ(ηk+β)| grows at most like Γ(1-ηk-β), which the bound's decay outpaces.
        if (k > 40 && bound * boost::math::tgamma(big(-eta) * k + 2) < big(1e-45) * abs(sum)) break;
    }
    return static_cast<double>(sum);
}

// Taylor series of E_{α,β} in 150 digits: at α = 0.3, |z| = 5 the terms peak near 1e91.
std::complex<double> ml_oracle(std::complex<double> z, double alpha, double beta) {
    using wide = boost::multiprecision::cpp_bin_float_100;
    using wider = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<150>>;
    static_assert(std::numeric_limits<wider>::digits10 > std::numeric_limits<wide>::digits10);
    wider re = 0, im = 0, pr = 1, pi_ = 0;
    const wider zr(z.real()), zi(z.imag());
    for (int k = 0; k < 4000; ++k) {
        const wider arg = wider(alpha) * k + wider(beta);
        const wider c = (arg <= 0 && arg == floor(arg)) ? wider(0) : 1 / boost::math::tgamma(arg);
        re += pr * c;
        im += pi_ * c;
        const wider nr = pr * zr - pi_ * zi;
        pi_ = pr * zi + pi_ * zr;
        pr = nr;
        if (k > 30 && (abs(pr) + abs(pi_)) * abs(c) < wider(1e-40)) break;
    }
    return {static_cast<double>(re), static_cast<double>(im)};
}

TEST(ReciprocalGamma, PolesAreExactZeros) {
    for (int k = 0; k <= 6; ++k) EXPECT_EQ(specfun::reciprocal_gamma(-k), 0.0);
}

TEST(ReciprocalGamma, MatchesStdGamma) {
    for (double y : {0.1, 0.5, 1.0, 2.5, 7.25, -0.5, -1.5, -3.3}) EXPECT_NEAR(specfun::reciprocal_gamma(y) * std::tgamma(y), 1.0, 1e-13) << y;
    EXPECT_NEAR(specfun::reciprocal_gamma(0.5), 1.0 / std::sqrt(pi), 1e-15);
}

TEST(WrightW, ZeroArgumentIsReciprocalGamma) {
    EXPECT_EQ(specfun::wright_w(0.0, {-0.3, 0.7}), specfun::reciprocal_gamma(0.7));
    EXPECT_EQ(specfun::wright_w(0.0, {-0.5, 0.5}), specfun::reciprocal_gamma(0.5));
}

TEST(WrightW, GaussianAtHalf) {
    for (double u : {0.0, 0.25, 1.0, 2.0, 4.0, 6.0}) {
        const double expect = std::exp(-u * u / 4.0) / std::sqrt(pi);
        EXPECT_NEAR(specfun::wright_w(-u, {-0.5, 0.5}), expect, 1e-12 * std::max(expect, 1e-3)) << u;
    }
}

TEST(WrightW, MatchesMultiprecisionSeries) {
    struct Case { double x, eta, beta; };
    for (const Case c : {Case{-1.0, -0.3, 0.7}, Case{-3.0, -0.25, 0.75}, Case{-2.0, -0.45, 0.55}, Case{-0.5, -0.8, 0.2},
                         Case{-1.5, -0.9, 0.1}, Case{-6.0, -0.2, 0.8}, Case{2.0, -0.4, 0.6}, Case{-4.0, -0.35, 0.825}, Case{2.0, 0.2, 1.0}}) {
        const double ref = wright_oracle(c.x, c.eta, c.beta);
        EXPECT_NEAR(specfun::wright_w(c.x, {c.eta, c.beta}), ref, 1e-10 * std::fabs(ref) + 1e-300)
            << c.x << " " << c.eta << " " << c.beta;
    }
}

TEST(WrightW, GuardRaisesOutOfRange) {
    const specfun::WrightParams p{-0.7, 0.3};
    const double g = specfun::wright_guard(p);
    EXPECT_GT(g, 1.0);
    EXPECT_NO_THROW(specfun::wright_w(-0.9 * g, p));
    try {
        specfun::wright_w(-2.0 * g, p);
        FAIL() << "expected OutOfRangeError";
    } catch (const OutOfRangeError& e) {
        EXPECT_DOUBLE_EQ(e.limit(), g);
    }
}

TEST(WrightW, RejectsInvalidEta) {
    EXPECT_THROW(specfun::wright_w(-1.0, {-1.0, 1.0}), DomainError);
    EXPECT_THROW(specfun::wright_w(-1.0, {-1.5, 1.0}), DomainError);
    EXPECT_THROW(specfun::wright_w(std::nan(""), {-0.5, 0.5}), DomainError);
}

TEST(MittagLeffler, AlphaOneIsExponential) {
    for (std::complex<double> z : {std::complex<double>(-3, 0), {2, 0}, {0.5, -1.5}, {-20, 4}, {0, 30}})
        EXPECT_LT(std::abs(specfun::mittag_leffler(z, {1.0, 1.0}) - std::exp(z)), 1e-10 * std::abs(std::exp(z)) + 1e-14) << z;
}

TEST(MittagLeffler, HalfIsScaledErfc) {
    for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 8.0, 15.0, 40.0}) {
        const double expect = static_cast<double>(exp(big(x) * big(x)) * boost::math::erfc(big(x)));
        const auto v = specfun::mittag_leffler({-x, 0.0}, {0.5, 1.0});
        EXPECT_NEAR(v.real(), expect, 1e-10 * expect) << x;
        EXPECT_NEAR(v.imag(), 0.0, 1e-12) << x;
    }
}

TEST(MittagLeffler, MatchesMultiprecisionSeries) {
    for (double a : {0.3, 0.5, 0.7, 0.9}) {
        for (std::complex<double> z : {std::complex<double>(-0.7, 0), {0.6, 0.3}, {-3.0, 0}, {-2.0, 2.0}, {0, -4.0}, {-5.0, 0.5}, {2.5, 0}}) {
            const auto ref = ml_oracle(z, a, 1.0);
            const auto v = specfun::mittag_leffler(z, {a, 1.0});
            EXPECT_LT(std::abs(v - ref), 1e-9 * std::max(1.0, std::abs(ref))) << a << " " << z;
        }
    }
}

TEST(MittagLeffler, LargeNegativeAlgebraicDecay) {
    // E_α(-x) ~ x^{-1}/Γ(1-α) - x^{-2}/Γ(1-2α) + ...
    const double a = 0.6, x = 400.0;
    const double lead = 1.0 / (x * std::tgamma(1 - a)) - 1.0 / (x * x * std::tgamma(1 - 2 * a));
    EXPECT_NEAR(specfun::mittag_leffler({-x, 0}, {a, 1.0}).real(), lead, 1e-7);
}

TEST(MittagLeffler, RejectsAlphaOutsideUnitInterval) {
    EXPECT_THROW(specfun::mittag_leffler({1, 0}, {1.5, 1.0}), DomainError);
    EXPECT_THROW(specfun::mittag_leffler({1, 0}, {0.0, 1.0}), DomainError);
}

TEST(StableOneSided, LevyClosedForm) {
    for (double u : {0.5, 1.0, 2.0})
        for (double w : {0.05, 0.3, 1.0, 4.0, 25.0}) {
            const double expect = u / (2.0 * std::sqrt(pi * w * w * w)) * std::exp(-u * u / (4.0 * w));
            EXPECT_NEAR(specfun::stable_one_sided_density(w, {0.5, u}), expect, 1e-10 * expect + 1e-300) << u << " " << w;
        }
}

TEST(StableOneSided, LaplaceTransformIsStretchedExponential) {
    // ∫ e^{-sw} f(w) dw = e^{-u s^α}
    for (double a : {0.3, 0.6, 0.85}) {
        const double u = 1.0, s = 1.0;
        auto f = [&](double w) { return w > 0 ? std::exp(-s * w) * specfun::stable_one_sided_density(w, {a, u}) : 0.0; };
        const auto r = quadrature::integrate_adaptive_points(f, {0.0, 0.01, 0.1, 1.0, 5.0, 60.0}, quadrature::Options{1e-10, 1e-9});
        EXPECT_NEAR(r.value, std::exp(-u * std::pow(s, a)), 1e-8) << a;
    }
}

TEST(StableSpectrallyNegative, IndexTwoIsNormal) {
    for (double t : {0.5, 1.0, 2.0})
        for (double u : {0.0, 0.5, 1.0, 3.0}) {
            const double expect = std::exp(-u * u / (4 * t)) / std::sqrt(4 * pi * t);
            EXPECT_NEAR(specfun::stable_spec_neg_density(u, {0.5, t}), expect, 1e-11) << t << " " << u;
        }
}

TEST(StableSpectrallyNegative, ParametersMetadata) {
    const auto p = specfun::stable_spec_neg_parameters({0.75, 1.0});
    EXPECT_EQ(p.skew, -1.0);
    EXPECT_EQ(p.location, 0.0);
    EXPECT_GT(p.sigma, 0.0);
}

TEST(StableSpectrallyNegative, GuardRaisesOutOfRange) {
    const double g = specfun::stable_spec_neg_guard(0.8);
    EXPECT_THROW(specfun::stable_spec_neg_density(3.0 * g, {0.8, 1.0}), OutOfRangeError);
}

} // namespace
