#pragma once

// Log-magnitude series summation shared by the Wright and Bingham series.
// Terms are produced as (log|term|, sign) so that Gamma overflow never occurs,
// and summed with Neumaier compensation in double or in __float128.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>
#include <quadmath.h>

#include "../errors.hpp"

namespace fracheat::detail {

using quad = __float128;

template <class Real>
struct RealMath;

template <>
struct RealMath<double> {
    static double lgamma(double x) {
        int sign = 0;
        return ::lgamma_r(x, &sign);
    }
    static double exp(double x) { return std::exp(x); }
    static double log(double x) { return std::log(x); }
    static double sin(double x) { return std::sin(x); }
    static double fmod(double x, double y) { return std::fmod(x, y); }
    static double floor(double x) { return std::floor(x); }
    static double abs(double x) { return std::fabs(x); }
    static double pi() { return 3.14159265358979323846; }
    static double eps() { return std::numeric_limits<double>::epsilon(); }
    static double inf() { return std::numeric_limits<double>::infinity(); }
};

template <>
struct RealMath<quad> {
    static quad lgamma(quad x) { return ::lgammaq(x); }
    static quad exp(quad x) { return ::expq(x); }
    static quad log(quad x) { return ::logq(x); }
    static quad sin(quad x) { return ::sinq(x); }
    static quad fmod(quad x, quad y) { return ::fmodq(x, y); }
    static quad floor(quad x) { return ::floorq(x); }
    static quad abs(quad x) { return ::fabsq(x); }
    static quad pi() { return M_PIq; }
    static quad eps() { return FLT128_EPSILON; }
    static quad inf() { return HUGE_VALQ; }
};

// sin(pi*y) with exact zeros at integers and the reduction done before scaling by pi.
template <class Real>
Real sinpi(Real y) {
    using M = RealMath<Real>;
    Real r = M::fmod(y, Real(2));
    if (r < 0) r += Real(2);
    if (r == M::floor(r)) return Real(0);
    if (r < Real(0.5)) return M::sin(M::pi() * r);
    if (r < Real(1.5)) return -M::sin(M::pi() * (r - Real(1)));
    return M::sin(M::pi() * (r - Real(2)));
}

template <class Real>
struct LogValue {
    Real log_abs;
    int sign;  // 0 encodes an exact zero
};

// log|1/Gamma(y)| and its sign; exact zero at the poles.
template <class Real>
LogValue<Real> log_rgamma(Real y) {
    using M = RealMath<Real>;
    if (y > 0) return {-M::lgamma(y), 1};
    if (y == M::floor(y)) return {-M::inf(), 0};
    const Real s = sinpi(y);
    return {M::log(M::abs(s)) + M::lgamma(Real(1) - y) - M::log(M::pi()), s > 0 ? 1 : -1};
}

// Upper bound of log|1/Gamma(y)|: drops the sine factor of the reflection and
// caps 1/Gamma on (0, 1.4616) by its maximum there, so the bound never dips at a zero.
template <class Real>
Real log_rgamma_envelope(Real y) {
    using M = RealMath<Real>;
    constexpr double gamma_min_at = 1.4616321449683623;
    constexpr double log_rgamma_max = 0.12148629053585;  // -log Γ(1.4616...)
    if (y >= Real(gamma_min_at)) return -M::lgamma(y);
    if (y > 0) return Real(log_rgamma_max);
    return M::lgamma(Real(1) - y) - M::log(M::pi());
}

template <class Real>
struct NeumaierSum {
    Real sum{0};
    Real carry{0};

    void add(Real v) {
        const Real s = sum + v;
        const Real as = sum < 0 ? -sum : sum;
        const Real av = v < 0 ? -v : v;
        if (as >= av)
            carry += (sum - s) + v;
        else
            carry += (v - s) + sum;
        sum = s;
    }
    Real value() const { return sum + carry; }
};

template <class Real>
struct SeriesTerm {
    Real log_abs;
    int sign;
    Real log_envelope;  // bound on log|term| that is unimodal in k
};

template <class Real>
struct SeriesOutcome {
    Real value{0};
    Real log_max_term{-RealMath<Real>::inf()};
    std::size_t terms{0};
    bool guard_hit{false};
};

// Sums term(k) for k = 0, 1, ... until the envelope has passed its peak and
// dropped below eps*|sum|. Stops early with guard_hit once a term exceeds
// exp(log_guard).
template <class Real, class TermFn>
SeriesOutcome<Real> sum_log_series(TermFn&& term, Real log_guard, std::size_t max_terms = 40000) {
    using M = RealMath<Real>;
    const Real log_eps = M::log(M::eps()) - Real(3);
    SeriesOutcome<Real> out;
    NeumaierSum<Real> acc;
    Real prev_env = -M::inf();
    for (std::size_t k = 0; k < max_terms; ++k) {
        const SeriesTerm<Real> t = term(k);
        if (t.sign != 0) {
            if (t.log_abs > out.log_max_term) out.log_max_term = t.log_abs;
            if (out.log_max_term > log_guard) {
                out.guard_hit = true;
                out.terms = k + 1;
                return out;
            }
            acc.add(t.sign > 0 ? M::exp(t.log_abs) : -M::exp(t.log_abs));
        }
        const Real partial = acc.value();
        const Real scale = partial != 0 ? M::log(M::abs(partial)) : out.log_max_term;
        if (k > 0 && t.log_envelope < prev_env && t.log_envelope < scale + log_eps) {
            out.value = partial;
            out.terms = k + 1;
            return out;
        }
        prev_env = t.log_envelope;
    }
    throw ConvergenceError("series did not converge within the term budget");
}


// Coefficients of Σ c_k y^k tabulated once: log|c_k| and a unimodal log
// envelope in double, and c_k as a quad mantissa with a binary exponent so the
// quad path needs no transcendental calls per term.
class PowerSeriesTable {
public:
    // coef(k) returns {log|c_k| as quad, sign} and env(k) a bound on log|c_k|;
    // terms are tabulated until env(k) + k·log_y_max has passed its peak and
    // fallen below -745 (double underflow).
    template <class Coef, class Env>
    PowerSeriesTable(Coef&& coef, Env&& env, double log_y_max, std::size_t max_terms = 40000) {
        double prev = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < max_terms; ++k) {
            const LogValue<quad> c = coef(k);
            const double e = env(k);
            Entry en;
            en.sign = c.sign;
            en.log_abs = c.sign == 0 ? -std::numeric_limits<double>::infinity() : static_cast<double>(c.log_abs);
            en.log_env = e;
            if (c.sign != 0) {
                // log|c| = (e2 + f) ln 2 with f in [0,1): mantissa 2^f · sign.
                const quad l2 = c.log_abs / M_LN2q;
                const quad fl = ::floorq(l2);
                en.exp2 = static_cast<int>(fl);
                en.mant = ::expq((l2 - fl) * M_LN2q) * c.sign;
            }
            entries_.push_back(en);
            const double scaled = e + static_cast<double>(k) * log_y_max;
            if (k > 0 && scaled < prev && scaled < -745.0) return;
            prev = scaled;
        }
        throw ConvergenceError("series table exceeded its term budget");
    }

    std::size_t size() const { return entries_.size(); }

    // max_k log_env(k) + k log y.
    double envelope_max(double y) const {
        const double ly = std::log(y);
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < entries_.size(); ++k) {
            const double e = entries_[k].log_env + k * ly;
            best = std::max(best, e);
            if (k > 4 && e < best - 40.0) break;
        }
        return best;
    }

    // Σ c_k y^k (y ≥ 0; with alternate, Σ c_k (-y)^k) in double.
    SeriesOutcome<double> sum_double(double y, bool alternate) const {
        const double ly = y > 0 ? std::log(y) : 0.0;
        return run<double>(y, ly, alternate, [&](const Entry& en, std::size_t k, double) {
            return en.sign == 0 ? 0.0 : en.sign * std::exp(en.log_abs + (y > 0 ? k * ly : 0.0));
        });
    }

    SeriesOutcome<quad> sum_quad(double y, bool alternate) const {
        const double ly = y > 0 ? std::log(y) : 0.0;
        // y^k tracked as mantissa·2^exp, renormalised each step.
        int yexp = 0;
        const quad ym = y > 0 ? ::frexpq(quad(y), &yexp) : quad(0);
        quad pm = 1;
        long long pe = 0;
        std::size_t last = 0;
        return run<quad>(y, ly, alternate, [&](const Entry& en, std::size_t k, double) -> quad {
            if (y > 0) {
                while (last < k) {
                    int e = 0;
                    pm = ::frexpq(pm * ym, &e);
                    pe += e + yexp;
                    ++last;
                }
            } else if (k > 0) {
                return quad(0);
            }
            if (en.sign == 0) return quad(0);
            return ::ldexpq(en.mant * pm, static_cast<int>(en.exp2 + pe));
        });
    }

private:
    struct Entry {
        double log_abs = 0.0;
        double log_env = 0.0;
        int sign = 0;
        quad mant = 0;
        int exp2 = 0;
    };
    std::vector<Entry> entries_;

    template <class Real, class TermValue>
    SeriesOutcome<Real> run(double y, double ly, bool alternate, TermValue&& value) const {
        using M = RealMath<Real>;
        const double log_eps = static_cast<double>(M::log(M::eps())) - 3.0;
        SeriesOutcome<Real> out;
        NeumaierSum<Real> acc;
        double prev_env = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < entries_.size(); ++k) {
            const Entry& en = entries_[k];
            const double scale_k = y > 0 ? k * ly : (k == 0 ? 0.0 : -std::numeric_limits<double>::infinity());
            if (en.sign != 0) {
                const double la = en.log_abs + scale_k;
                if (la > static_cast<double>(out.log_max_term)) out.log_max_term = la;
                Real v = value(en, k, la);
                if (alternate && (k % 2 == 1)) v = -v;
                acc.add(v);
            }
            const Real partial = acc.value();
            const double env = en.log_env + scale_k;
            const double pd = std::fabs(static_cast<double>(partial));
            const double sc = pd > 0 ? std::log(pd) : static_cast<double>(out.log_max_term);
            if (k > 0 && env < prev_env && env < sc + log_eps) {
                out.value = partial;
                out.terms = k + 1;
                return out;
            }
            prev_env = env;
        }
        throw ConvergenceError("argument outside the tabulated series range");
    }
};

} // namespace fracheat::detail
