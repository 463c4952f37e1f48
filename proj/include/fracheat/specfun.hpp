#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "detail/series.hpp"
#include "errors.hpp"
#include "quadrature.hpp"

namespace fracheat::specfun {

inline constexpr double pi = 3.14159265358979323846;

// 1/Γ(x), exactly zero at the poles.
inline double reciprocal_gamma(double x) {
    if (!std::isfinite(x)) throw DomainError("reciprocal_gamma needs a finite argument");
    if (x > 0) {
        if (x > 171.0) return std::exp(-detail::RealMath<double>::lgamma(x));
        return 1.0 / std::tgamma(x);
    }
    if (x == std::floor(x)) return 0.0;
    const double s = detail::sinpi(x);
    if (1.0 - x < 170.0) return s * std::tgamma(1.0 - x) / pi;
    const double mag = std::exp(detail::RealMath<double>::lgamma(1.0 - x) - std::log(pi));
    return s * mag;
}

struct WrightParams {
    double eta;
    double beta;
};

// Largest term of a series that both the double path and the quad path must
// tolerate; beyond it the alternating sum loses more digits than quad precision holds.
inline constexpr double series_guard_term = 3e9;

namespace detail {

using fracheat::detail::LogValue;
using fracheat::detail::quad;
using fracheat::detail::RealMath;
using fracheat::detail::SeriesOutcome;
using fracheat::detail::SeriesTerm;

// Largest log-envelope over k of a term generator; used for the guards.
template <class EnvFn>
double max_log_envelope(EnvFn&& env) {
    double best = -std::numeric_limits<double>::infinity();
    double prev = best;
    for (std::size_t k = 0; k < 100000; ++k) {
        const double e = env(k);
        best = std::max(best, e);
        if (k > 4 && e < prev && e < best - 40.0) break;
        prev = e;
    }
    return best;
}

inline double wright_log_envelope_max(double ax, WrightParams p) {
    const double lx = std::log(ax);
    return max_log_envelope([&](std::size_t k) {
        const double kk = static_cast<double>(k);
        return kk * lx - std::lgamma(kk + 1.0) + fracheat::detail::log_rgamma_envelope(p.eta * kk + p.beta);
    });
}

inline double bingham_log_envelope_max(double z, double alpha) {
    const double lz = std::log(z);
    return max_log_envelope([&](std::size_t k) {
        const double n = static_cast<double>(k + 1);
        return static_cast<double>(k) * lz - std::lgamma(n + 1.0) + std::lgamma(1.0 + n * alpha);
    });
}

template <class Envelope>
double solve_guard(Envelope&& env_at) {
    const double target = std::log(series_guard_term);
    double lo = 0.0, hi = 1.0;
    while (env_at(hi) < target) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6) return hi;
    }
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (env_at(mid) < target ? lo : hi) = mid;
    }
    return lo;
}

// Per-thread cache of coefficient tables keyed by their parameters.
template <class Key, class Build>
std::shared_ptr<const fracheat::detail::PowerSeriesTable> cached_table(const Key& key, Build&& build) {
    thread_local std::vector<std::pair<Key, std::shared_ptr<const fracheat::detail::PowerSeriesTable>>> cache;
    for (const auto& e : cache)
        if (e.first == key) return e.second;
    auto t = std::make_shared<const fracheat::detail::PowerSeriesTable>(build());
    if (cache.size() >= 16) cache.erase(cache.begin());
    cache.emplace_back(key, t);
    return t;
}

inline std::shared_ptr<const fracheat::detail::PowerSeriesTable> wright_table(WrightParams p);
inline std::shared_ptr<const fracheat::detail::PowerSeriesTable> bingham_table(double alpha);

// Double sum first; quad when the measured cancellation exceeds 1e3.
inline double table_sum(const fracheat::detail::PowerSeriesTable& t, double y, bool alternate) {
    const SeriesOutcome<double> d = t.sum_double(y, alternate);
    const double mag = std::fabs(d.value);
    if (mag > 0 && std::exp(d.log_max_term) <= 1e3 * mag) return d.value;
    return static_cast<double>(t.sum_quad(y, alternate).value);
}

} // namespace detail

// X_max(η, β): |x| at which the largest Wright-series term reaches series_guard_term.
inline double wright_guard(WrightParams p) {
    return detail::solve_guard([&](double ax) { return detail::wright_log_envelope_max(ax, p); });
}

inline double wright_w(double x, WrightParams p) {
    if (!(p.eta > -1.0)) throw DomainError("Wright series needs eta > -1");
    if (!std::isfinite(x)) throw DomainError("Wright argument must be finite");
    if (x == 0.0) return reciprocal_gamma(p.beta);
    const auto table = detail::wright_table(p);
    if (table->envelope_max(std::fabs(x)) > std::log(series_guard_term))
        throw OutOfRangeError("Wright series argument beyond cancellation guard", wright_guard(p));
    return detail::table_sum(*table, std::fabs(x), x < 0);
}

namespace detail {

inline std::shared_ptr<const fracheat::detail::PowerSeriesTable> wright_table(WrightParams p) {
    return cached_table(std::make_pair(p.eta, p.beta), [p] {
        const double log_guard = std::log(wright_guard(p));
        return fracheat::detail::PowerSeriesTable(
            [p](std::size_t k) {
                const quad kk = static_cast<double>(k);
                const LogValue<quad> rg = fracheat::detail::log_rgamma(quad(p.eta) * kk + quad(p.beta));
                return LogValue<quad>{rg.log_abs - ::lgammaq(kk + 1), rg.sign};
            },
            [p](std::size_t k) {
                const double kk = static_cast<double>(k);
                return -std::lgamma(kk + 1.0) + fracheat::detail::log_rgamma_envelope(p.eta * kk + p.beta);
            },
            log_guard);
    });
}

// c_k = (-1)^k sin(π(k+1)α) Γ(1+(k+1)α) / (k+1)!.
inline std::shared_ptr<const fracheat::detail::PowerSeriesTable> bingham_table(double alpha) {
    return cached_table(alpha, [alpha] {
        const double log_guard = std::log(solve_guard([&](double z) { return bingham_log_envelope_max(z, alpha); }));
        return fracheat::detail::PowerSeriesTable(
            [alpha](std::size_t k) {
                const quad n = static_cast<double>(k + 1);
                const quad na = quad(alpha) * n;
                const quad sn = fracheat::detail::sinpi(na);
                if (sn == 0) return LogValue<quad>{-RealMath<quad>::inf(), 0};
                int sign = sn > 0 ? 1 : -1;
                if (k % 2 == 1) sign = -sign;
                return LogValue<quad>{::logq(::fabsq(sn)) + ::lgammaq(1 + na) - ::lgammaq(n + 1), sign};
            },
            [alpha](std::size_t k) {
                const double n = static_cast<double>(k + 1);
                return std::lgamma(1.0 + n * alpha) - std::lgamma(n + 1.0);
            },
            log_guard);
    });
}

} // namespace detail

struct StableOneSided {
    double alpha;
    double u = 1.0;
};

struct StableSpectrallyNegative {
    double alpha;
    double t = 1.0;
};

// Metadata only: the (σ, β, μ) triple of the spectrally negative law. The density
// itself is evaluated from the Bingham series, which needs no parameterisation choice.
struct StableTriple {
    double sigma;
    double skew;
    double location;
};

inline StableTriple stable_spec_neg_parameters(const StableSpectrallyNegative& s) {
    return {std::pow(s.t * std::fabs(std::cos(pi - pi / (2.0 * s.alpha))), s.alpha), -1.0, 0.0};
}

// Guard on z = u/t^α for the Bingham series.
inline double stable_spec_neg_guard(double alpha) {
    return detail::solve_guard([&](double z) { return detail::bingham_log_envelope_max(z, alpha); });
}

inline double stable_spec_neg_density(double u, StableSpectrallyNegative s) {
    if (!(s.alpha >= 0.5 && s.alpha < 1.0)) throw DomainError("spectrally negative stable density needs alpha in [1/2,1)");
    if (!(s.t > 0)) throw DomainError("t must be positive");
    if (!(u >= 0) || !std::isfinite(u)) throw DomainError("u must be nonnegative");
    const double scale = std::pow(s.t, -s.alpha);
    const double z = u * scale;
    const auto table = detail::bingham_table(s.alpha);
    if (z > 0 && table->envelope_max(z) > std::log(series_guard_term))
        throw OutOfRangeError("Bingham series argument beyond cancellation guard", stable_spec_neg_guard(s.alpha));
    return scale * detail::table_sum(*table, z, false) / pi;
}

namespace detail {

// Unit-scale one-sided stable density (Laplace transform exp(-s^α)).
inline double stable_unit_series(double x, double alpha, bool& ok) {
    const double lx = std::log(x);
    double log_fact = 0;
    auto term = [&](std::size_t k) {
        const double n = static_cast<double>(k + 1);
        log_fact += std::log(n);
        const double s = fracheat::detail::sinpi(alpha * n);
        const double base = std::lgamma(alpha * n + 1.0) - log_fact - (alpha * n + 1.0) * lx;
        int sign = s == 0 ? 0 : (s > 0 ? 1 : -1);
        if (k % 2 == 1) sign = -sign;
        const double la = s == 0 ? -std::numeric_limits<double>::infinity() : base + std::log(std::fabs(s));
        return SeriesTerm<double>{la, sign, base};
    };
    const SeriesOutcome<double> r = fracheat::detail::sum_log_series<double>(term, std::log(1e300));
    ok = r.value > 0 && std::exp(r.log_max_term) <= 1e2 * r.value;
    return r.value / pi;
}

// f(x) = ν/(1-ν) x^{-1/(1-ν)} (1/π) ∫_0^π A(φ) exp(-A(φ) x^{-ν/(1-ν)}) dφ.
inline double stable_unit_integral(double x, double nu) {
    const double p = 1.0 / (1.0 - nu);
    const double c = std::pow(x, -nu * p);
    auto A = [&](double phi) {
        const double v = std::pow(std::sin(nu * phi), nu) * std::pow(std::sin((1.0 - nu) * phi), 1.0 - nu) /
                         std::sin(phi);
        return std::pow(v, p);
    };
    const double a0 = std::pow(std::pow(nu, nu) * std::pow(1.0 - nu, 1.0 - nu), p);
    // The integrand is at most (1/(ce))·exp(0) scale; normalise by its value at φ=0.
    const double log_ref = std::log(a0) - a0 * c;
    auto g = [&](double phi) {
        const double a = A(phi);
        if (!std::isfinite(a)) return 0.0;
        return std::exp(std::log(a) - a * c - log_ref);
    };
    // A is increasing on (0,π), so g ≤ 1 once a0·c ≥ 1: the prefactor bounds the density.
    const double log_prefactor = std::log(nu * p) - p * std::log(x) + log_ref;
    if (a0 * c >= 1.0 && log_prefactor < -760.0) return 0.0;
    // g is a spike of width ~ (a0 c)^{-1/2} at φ = 0.
    std::vector<double> pts{0.0};
    for (double s = 1.0 / std::sqrt(a0 * c); s < pi; s *= 4.0) pts.push_back(s);
    pts.push_back(pi);
    quadrature::Options opt;
    opt.abs_tol = 1e-15;
    opt.rel_tol = 1e-13;
    const auto r = quadrature::integrate_adaptive_points(g, pts, opt);
    return std::exp(log_prefactor) * r.value / pi;
}

} // namespace detail

inline double stable_one_sided_density(double w, StableOneSided s) {
    if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw DomainError("one-sided stable density needs alpha in (0,1)");
    if (!(s.u > 0)) throw DomainError("stable scale u must be positive");
    if (!(w > 0) || !std::isfinite(w)) throw DomainError("one-sided stable density needs w > 0");
    const double scale = std::pow(s.u, -1.0 / s.alpha);
    const double x = w * scale;
    bool ok = false;
    const double series = detail::stable_unit_series(x, s.alpha, ok);
    if (ok) return scale * series;
    return scale * detail::stable_unit_integral(x, s.alpha);
}

struct MLParams {
    double alpha;
    double beta = 1.0;
};

struct MLResult {
    std::complex<double> value;
    double error_estimate = 0.0;
    bool degraded = false;
};

// E_{α,β}(z): Taylor for |z| <= 1, algebraic asymptotics plus the exponential
// residue for large |z| when that is unambiguous, and otherwise the Hankel
// integral over the parabola s = μ(1+iu)^2 plus the residue of any pole of
// s^{α-β} e^s/(s^α - z) lying to its right.
class MittagLeffler {
public:
    static constexpr double taylor_radius = 1.0;
    static constexpr double asymptotic_radius = 20.0;

    explicit MittagLeffler(MLParams p) : p_(p) {
        if (!(p.alpha > 0.0 && p.alpha <= 1.0)) throw DomainError("Mittag-Leffler alpha must lie in (0,1]");
        for (int k = 0;; ++k) {
            const double c = reciprocal_gamma(p.alpha * k + p.beta);
            taylor_.push_back(c);
            if (k > 8 && std::fabs(c) < 1e-18 && p.alpha * k + p.beta > 3.0) break;
        }
        for (int k = 1; k <= 80; ++k) asym_.push_back(reciprocal_gamma(p.beta - p.alpha * k));
    }

    const MLParams& params() const { return p_; }

    std::complex<double> operator()(std::complex<double> z) const { return evaluate(z).value; }

    MLResult evaluate(std::complex<double> z) const {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("Mittag-Leffler argument must be finite");
        if (p_.alpha == 1.0 && p_.beta == 1.0) return {std::exp(z), 0.0, false};
        const double r = std::abs(z);
        if (r <= taylor_radius) return taylor(z);
        if (r >= asymptotic_radius) {
            MLResult a;
            if (asymptotic(z, a)) return a;
        }
        return contour(z);
    }

private:
    MLParams p_;
    std::vector<double> taylor_;
    std::vector<double> asym_;

    MLResult taylor(std::complex<double> z) const {
        std::complex<double> sum = 0.0, carry = 0.0, pw = 1.0;
        double mag = 0.0;
        for (double c : taylor_) {
            const std::complex<double> y = c * pw - carry;
            const std::complex<double> s = sum + y;
            carry = (s - sum) - y;
            sum = s;
            mag += std::fabs(c) * std::abs(pw);
            pw *= z;
        }
        return {sum, 8.0 * std::numeric_limits<double>::epsilon() * mag, false};
    }

    bool pole(std::complex<double> z, std::complex<double>& s_star) const {
        const double arg = std::arg(z);
        if (!(std::fabs(arg) < p_.alpha * pi)) return false;
        s_star = std::polar(std::pow(std::abs(z), 1.0 / p_.alpha), arg / p_.alpha);
        return true;
    }

    std::complex<double> residue(std::complex<double> s_star) const {
        return std::pow(s_star, 1.0 - p_.beta) * std::exp(s_star) / p_.alpha;
    }

    bool asymptotic(std::complex<double> z, MLResult& out) const {
        const std::complex<double> w = 1.0 / z;
        std::complex<double> sum = 0.0, pw = 1.0;
        double last = std::numeric_limits<double>::infinity();
        double err = 0.0;
        for (double c : asym_) {
            pw *= w;
            if (c == 0.0) continue;
            const std::complex<double> term = -c * pw;
            const double mt = std::abs(term);
            if (mt > last) break;
            sum += term;
            last = mt;
            err = mt;
            if (mt < 1e-17 * std::abs(sum)) break;
        }
        std::complex<double> s_star;
        std::complex<double> res = 0.0;
        if (pole(z, s_star)) {
            res = residue(s_star);
            // Near the anti-Stokes boundary the exponential switches on smoothly;
            // the truncated expansion is only trusted when it is negligible or dominant.
            if (s_star.real() < 0.0 && std::abs(res) > 1e-17 * std::abs(sum)) return false;
        }
        out.value = sum + res;
        out.error_estimate = err + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(out.value);
        out.degraded = false;
        return out.error_estimate <= 1e-14 * std::abs(out.value);
    }

    MLResult contour(std::complex<double> z) const {
        std::complex<double> s_star;
        const bool has_pole = pole(z, s_star);
        double mu = 1.0;
        double best = has_pole ? -1.0 : 1.0;
        if (has_pole) {
            for (double cand : {1.0, 0.5, 2.0, 0.25, 4.0, 8.0, 16.0}) {
                const double d = distance_to_parabola(s_star, cand);
                if (d > best) {
                    best = d;
                    mu = cand;
                }
                if (d >= 0.5) break;
            }
        }
        const std::complex<double> I(0.0, 1.0);
        const double a = p_.alpha, b = p_.beta;
        auto f = [&](double u) {
            const std::complex<double> w(1.0, u);
            const std::complex<double> s = mu * w * w;
            const std::complex<double> ls = std::log(s);
            const std::complex<double> sa = std::exp(a * ls);
            const std::complex<double> num = std::exp(s + (a - b) * ls);
            return num / (sa - z) * (2.0 * I * mu * w) / (2.0 * pi * I);
        };
        const double U = std::sqrt(1.0 + 46.0 / mu + std::max(0.0, std::log(std::abs(z) + 1.0)) / mu);
        quadrature::Options opt;
        opt.abs_tol = 1e-300;
        opt.rel_tol = 2e-14;
        const auto r = quadrature::integrate_adaptive_points(f, {-U, -1.0, 0.0, 1.0, U}, opt);
        MLResult out{r.value, r.error_estimate, false};
        if (has_pole && s_star.real() > mu - s_star.imag() * s_star.imag() / (4.0 * mu)) out.value += residue(s_star);
        out.error_estimate += 4.0 * std::numeric_limits<double>::epsilon() * std::abs(out.value);
        if (has_pole && best < 0.05) {
            out.degraded = true;
            out.error_estimate = std::max(out.error_estimate, 1e-9 * std::abs(out.value));
        }
        if (out.error_estimate > 1e-9 * std::abs(out.value)) out.degraded = true;
        return out;
    }

    static double distance_to_parabola(std::complex<double> s, double mu) {
        // Closest point search on a coarse grid refined once around the minimum.
        double best = std::numeric_limits<double>::infinity(), ub = 0.0;
        const double span = std::sqrt(std::abs(s) / mu) + 2.0;
        for (int i = -200; i <= 200; ++i) {
            const double u = span * i / 200.0;
            const std::complex<double> w(1.0, u);
            const double d = std::abs(mu * w * w - s);
            if (d < best) {
                best = d;
                ub = u;
            }
        }
        const double h = span / 200.0;
        for (int i = -50; i <= 50; ++i) {
            const double u = ub + h * i / 50.0;
            const std::complex<double> w(1.0, u);
            best = std::min(best, std::abs(mu * w * w - s));
        }
        return best;
    }
};

inline std::complex<double> mittag_leffler(std::complex<double> z, MLParams p) { return MittagLeffler(p)(z); }

} // namespace fracheat::specfun
