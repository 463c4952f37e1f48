#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <memory>
#include <optional>
#include <vector>

#include "detail/chebyshev.hpp"
#include "detail/parallel.hpp"
#include "errors.hpp"
#include "kernel.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"
#include "timechange.hpp"

namespace fracheat::solver {

using kernel::EquationSpec;
using kernel::SignedDensitySample;
using specfun::pi;
using timechange::TimeRoute;

enum class SolveRoute { automatic, subordination, fourier_ml };

inline const char* route_name(SolveRoute r) {
    switch (r) {
    case SolveRoute::automatic: return "auto";
    case SolveRoute::subordination: return "subordination";
    case SolveRoute::fourier_ml: return "fourier_ml";
    }
    return "unknown";
}

struct SolutionRequest {
    EquationSpec spec = kernel::make_equation_spec(2);
    double alpha = 0.5;
    double t = 1.0;
    std::vector<double> x_grid;
    SolveRoute route = SolveRoute::automatic;
    std::optional<TimeRoute> time_route;  // subordination only
    unsigned threads = 1;
};

struct SolutionField {
    SolutionRequest request;
    std::vector<SignedDensitySample> values;
    std::vector<SolveRoute> route_used;
};

inline void check_alpha_t(double alpha, double t) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0,1]");
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("t must be positive and finite");
}

inline void validate(const SolutionRequest& req) {
    check_alpha_t(req.alpha, req.t);
    if (req.x_grid.empty()) throw DomainError("x_grid must be nonempty");
    for (std::size_t i = 0; i < req.x_grid.size(); ++i) {
        if (!std::isfinite(req.x_grid[i])) throw DomainError("x_grid values must be finite");
        if (i > 0 && !(req.x_grid[i] > req.x_grid[i - 1])) throw DomainError("x_grid must be strictly increasing");
    }
}

// Fourier inversion for even n, subordination for odd n below α = 1/2.
inline SolveRoute auto_route(const EquationSpec& spec, double alpha) {
    if (spec.n % 2 == 1 && alpha < 0.5) return SolveRoute::subordination;
    return SolveRoute::fourier_ml;
}

inline TimeRoute default_time_route(double alpha) {
    if (alpha == 1.0) return TimeRoute::degenerate;
    return alpha >= 0.5 ? TimeRoute::stable : TimeRoute::wright;
}

// u(x,t) = ∫ p_n(x,u) v̄(u,t) du. Near u = 0 the density is replaced by
// g(u) = e^{-λu} Σ_{k<K} a_k u^k (λ = t^{-α}), which matches its Taylor series;
// ∫ p_n g du is closed-form through derivatives of Φ_n, leaving a smooth
// remainder for quadrature.
class SubordinationEvaluator {
public:
    static constexpr int subtract_terms = 4;

    SubordinationEvaluator(const EquationSpec& spec, double alpha, double t, std::optional<TimeRoute> route = {},
                           std::shared_ptr<const kernel::KernelProfile> profile = {})
        : spec_(spec), alpha_(alpha), t_(t), profile_(std::move(profile)) {
        check_alpha_t(alpha, t);
        if (!profile_) profile_ = std::make_shared<kernel::KernelProfile>(spec);
        if (alpha == 1.0) {
            route_ = TimeRoute::degenerate;
            return;
        }
        route_ = route.value_or(default_time_route(alpha));
        density_.emplace(timechange::make_time_change_law(alpha, route_, t));
        cutoff_ = density_->cutoff();
        lambda_ = std::pow(t, -alpha);
        const std::vector<double> c = timechange::time_density_taylor(alpha, t, subtract_terms);
        a_.assign(subtract_terms, 0.0);
        for (int k = 0; k < subtract_terms; ++k) {
            double lj = 1.0;
            for (int j = 0; j <= k; ++j) {
                if (j > 0) lj *= lambda_ / j;
                a_[k] += lj * c[k - j];
            }
        }
        double scale = std::fabs(density_->limit_at_zero());
        for (int i = 1; i <= 16; ++i) scale = std::max(scale, std::fabs((*density_)(cutoff_ * i / 17.0)));
        scale_ = scale;
        interp_tol_ = 2e-15 * scale;
        remainder_ = detail::PiecewiseChebyshev([this](double u) { return (*density_)(u) - g(u); }, 0.0, cutoff_,
                                                interp_tol_);
        interp_tol_ = std::max(interp_tol_, remainder_.noise());
    }

    TimeRoute time_route() const { return route_; }
    const kernel::KernelProfile& profile() const { return *profile_; }

    SignedDensitySample operator()(double x, double abs_tol = 1e-11) const {
        if (route_ == TimeRoute::degenerate) return {x, (*profile_)(x, t_), 1e-13 * std::pow(t_, -1.0 / spec_.n)};
        const int n = spec_.n;
        const double Y = profile_->half_width();
        auto p = [&](double u) { return (*profile_)(x, u); };

        double closed = 0.0;
        for (int k = 0; k < subtract_terms; ++k)
            closed += a_[k] * ((k % 2) ? -1.0 : 1.0) * kernel::kernel_laplace_derivative(spec_, x, lambda_, k);

        // Below u_lo the scaled argument leaves the profile range.
        const double u_lo = std::min(std::pow(std::fabs(x) / Y, n), 0.5 * cutoff_);
        std::vector<double> pts{u_lo};
        for (double u = cutoff_ / 128.0; u < cutoff_; u *= 2.0)
            if (u > u_lo) pts.push_back(u);
        pts.push_back(cutoff_);
        quadrature::Options opt{abs_tol, 1e-12};
        auto body = quadrature::integrate_adaptive_points([&](double u) { return u > 0 ? p(u) * remainder_(u) : 0.0; },
                                                          pts, opt);
        double err = body.error_estimate + interp_tol_ * 4.0 * std::pow(cutoff_, 1.0 - 1.0 / n);
        double value = closed + body.value;

        if (u_lo > 0) {
            auto head = [&](double u) {
                if (u <= 0) return 0.0;
                const double sc = std::pow(u, -1.0 / n);
                return sc * kernel::kernel_density(spec_, x * sc, 1.0, 1e-13).value * remainder_(u);
            };
            // The remainder is O(u^K) here, so a bound usually suffices.
            const double bound = std::fabs(remainder_(u_lo)) * u_lo * std::pow(u_lo, -1.0 / n);
            if (bound > abs_tol) {
                auto r = quadrature::integrate_adaptive(head, 0.0, u_lo, quadrature::Options{abs_tol, 1e-10});
                value += r.value;
                err += r.error_estimate;
            } else {
                err += bound;
            }
        }

        auto gtail = quadrature::integrate_semi_infinite([&](double u) { return p(u) * g(u); }, cutoff_,
                                                         quadrature::DecayHint::exponential(1.0 / lambda_), opt);
        value -= gtail.value;
        err += gtail.error_estimate;
        const double vtail = p(cutoff_) * density_->tail_moment(0.0);
        value += vtail;
        err += std::fabs(vtail);
        return {x, value, err};
    }

private:
    EquationSpec spec_;
    double alpha_, t_;
    std::shared_ptr<const kernel::KernelProfile> profile_;
    TimeRoute route_ = TimeRoute::wright;
    std::optional<timechange::TimeDensity> density_;
    double cutoff_ = 0.0, lambda_ = 1.0, scale_ = 1.0, interp_tol_ = 0.0;
    std::vector<double> a_;
    detail::PiecewiseChebyshev remainder_;

    double g(double u) const {
        double s = 0.0;
        for (int k = subtract_terms; k-- > 0;) s = s * u + a_[k];
        return std::exp(-lambda_ * u) * s;
    }
};

// U(X) = u(X,1) = (1/π)∫_0^∞ [cos(Xβ) Re φ(β) + sin(Xβ) Im φ(β)] dβ with
// φ(β) = E_α(c β^n), c = k_n (-i)^n, and u(x,t) = t^{-α/n} U(x t^{-α/n}).
// φ is tabulated on fixed Gauss-Kronrod panels over [0,B]; beyond B the
// algebraic expansion E_α(z) ~ -Σ z^{-k}/Γ(1-αk) is integrated along a
// rotated ray.
class FourierMLEvaluator {
public:
    static constexpr double default_max_frequency = 64.0;

    // Tabulated panels resolve |X| <= max_frequency; larger |X| falls back to
    // adaptive quadrature.
    FourierMLEvaluator(const EquationSpec& spec, double alpha, double max_frequency = default_max_frequency)
        : spec_(spec), alpha_(alpha), ml_({alpha, 1.0}), max_frequency_(max_frequency) {
        if (!(max_frequency > 0)) throw DomainError("max_frequency must be positive");
        check_alpha_t(alpha, 1.0);
        const int n = spec.n;
        if (alpha == 1.0 && n % 2 == 1) {
            profile_ = std::make_shared<kernel::KernelProfile>(spec);
            return;
        }
        static constexpr std::array<std::complex<double>, 4> minus_i_pow = {
            std::complex<double>(1, 0), std::complex<double>(0, -1), std::complex<double>(-1, 0),
            std::complex<double>(0, 1)};
        c_ = static_cast<double>(spec.k) * minus_i_pow[n % 4];
        double Z = 64.0;
        if (n % 2 == 1 && alpha > 0.5) Z = std::max(Z, std::pow(40.0 / std::fabs(std::cos(pi / (2.0 * alpha))), alpha));
        B_ = std::pow(Z, 1.0 / n);
        for (int k = 1; k <= 60; ++k) {
            const double rg = specfun::reciprocal_gamma(1.0 - alpha * k);
            const std::complex<double> d = -rg * std::pow(c_, -k);
            tail_coef_.push_back(d);
            // Two consecutive checks: coefficients vanish at poles of Γ(1-αk).
            const double prev = k > 1 ? std::abs(tail_coef_[k - 2]) * std::pow(Z, 1 - k) : 1.0;
            if (k > 2 && std::abs(d) * std::pow(Z, -k) < 1e-19 && prev < 1e-17) break;
        }
        const int panels = std::max(48, static_cast<int>(std::ceil(B_ * max_frequency / 2.5)));
        h_ = B_ / panels;
        nodes_.resize(static_cast<std::size_t>(panels) * 15);
        phi_.resize(nodes_.size());
        for (int p = 0; p < panels; ++p) {
            const double c = (p + 0.5) * h_, hh = 0.5 * h_;
            for (int i = 0; i < 15; ++i) {
                const double off = i < 7 ? -hh * quadrature::detail::gk15_x[i]
                                 : i == 7 ? 0.0
                                          : hh * quadrature::detail::gk15_x[14 - i];
                const double beta = c + off;
                const auto r = ml_.evaluate(c_ * std::pow(beta, n));
                nodes_[p * 15 + i] = beta;
                phi_[p * 15 + i] = r.value;
                ml_error_ = std::max(ml_error_, r.error_estimate);
                degraded_ = degraded_ || r.degraded;
            }
        }
    }

    const EquationSpec& spec() const { return spec_; }
    double alpha() const { return alpha_; }
    bool degraded() const { return degraded_; }

    SignedDensitySample unit(double X) const {
        if (profile_) return {X, profile_->unit(X), 1e-13};
        double value, err;
        if (std::fabs(X) <= max_frequency_) {
            table_sum(X, value, err);
        } else {
            adaptive_sum(X, value, err);
        }
        const std::complex<double> tail = tail_integral(X);
        value += tail.real() / pi;
        err += ml_error_ * B_ / pi + 1e-16 * std::abs(tail);
        return {X, value, err};
    }

    SignedDensitySample operator()(double x, double t) const {
        check_alpha_t(alpha_, t);
        const double sc = std::pow(t, -alpha_ / spec_.n);
        const auto r = unit(x * sc);
        return {x, sc * r.value, sc * r.error_estimate};
    }

private:
    EquationSpec spec_;
    double alpha_;
    specfun::MittagLeffler ml_;
    double max_frequency_;
    std::shared_ptr<kernel::KernelProfile> profile_;
    std::complex<double> c_;
    double B_ = 0.0, h_ = 0.0, ml_error_ = 0.0;
    bool degraded_ = false;
    std::vector<std::complex<double>> tail_coef_;
    std::vector<double> nodes_;
    std::vector<std::complex<double>> phi_;

    double integrand(double X, double beta, std::complex<double> phi) const {
        return std::cos(X * beta) * phi.real() + std::sin(X * beta) * phi.imag();
    }

    void table_sum(double X, double& value, double& err) const {
        using quadrature::detail::gk15_wg;
        using quadrature::detail::gk15_wk;
        const std::size_t panels = nodes_.size() / 15;
        double total = 0.0, total_err = 0.0;
        const double hh = 0.5 * h_;
        for (std::size_t p = 0; p < panels; ++p) {
            std::array<double, 15> f;
            for (int i = 0; i < 15; ++i) f[i] = integrand(X, nodes_[p * 15 + i], phi_[p * 15 + i]);
            double kron = f[7] * gk15_wk[7], gauss = f[7] * gk15_wg[3];
            for (int i = 0; i < 7; ++i) {
                kron += (f[i] + f[14 - i]) * gk15_wk[i];
                if (i % 2 == 1) gauss += (f[i] + f[14 - i]) * gk15_wg[i / 2];
            }
            const double mean = 0.5 * kron;
            double resasc = gk15_wk[7] * std::fabs(f[7] - mean);
            for (int i = 0; i < 7; ++i) resasc += gk15_wk[i] * (std::fabs(f[i] - mean) + std::fabs(f[14 - i] - mean));
            resasc *= hh;
            double e = std::fabs(kron - gauss) * hh;
            if (resasc != 0.0 && e != 0.0) e = resasc * std::min(1.0, std::pow(200.0 * e / resasc, 1.5));
            total += kron * hh;
            total_err += e;
        }
        value = total / pi;
        err = total_err / pi + 1e-15 * std::fabs(value);
    }

    void adaptive_sum(double X, double& value, double& err) const {
        const int n = spec_.n;
        auto f = [&](double beta) { return integrand(X, beta, ml_(c_ * std::pow(beta, n))); };
        std::vector<double> pts;
        const double step = 8.0 * pi / std::fabs(X);
        for (double b = 0.0; b < B_; b += step) pts.push_back(b);
        pts.push_back(B_);
        const auto r = quadrature::integrate_adaptive_points(f, pts, quadrature::Options{1e-13, 1e-12});
        value = r.value / pi;
        err = r.error_estimate / pi;
    }

    // ∫_B^∞ e^{-iXβ} Σ_k d_k β^{-nk} dβ.
    std::complex<double> tail_integral(double X) const {
        const int n = spec_.n;
        if (tail_coef_.empty()) return 0.0;
        auto series = [&](std::complex<double> w) {
            const std::complex<double> q = std::pow(w, -n);
            std::complex<double> s = 0.0;
            for (std::size_t k = tail_coef_.size(); k-- > 0;) s = (s + tail_coef_[k]) * q;
            return s;
        };
        if (X == 0.0) {
            std::complex<double> s = 0.0;
            for (std::size_t k = 0; k < tail_coef_.size(); ++k) {
                const double m = static_cast<double>(n) * (k + 1);
                s += tail_coef_[k] * std::pow(B_, 1.0 - m) / (m - 1.0);
            }
            return s;
        }
        // β = B - i sgn(X) y, integrated on graded fixed panels in s with y = L s/(1-s)
        // so the result varies smoothly with X.
        const double sg = X > 0 ? 1.0 : -1.0;
        const double ax = std::fabs(X);
        const double L = 1.0 / (ax + 1.0 / B_);
        std::complex<double> acc = 0.0;
        double lo = 0.0, hi = 0.5;
        const std::complex<double> mi(0.0, -sg);
        for (int panel = 0; panel < 48; ++panel) {
            const double c = 0.5 * (lo + hi), hh = 0.5 * (hi - lo);
            for (int i = 0; i < 15; ++i) {
                const double off = i < 7 ? -hh * quadrature::detail::gk15_x[i]
                                 : i == 7 ? 0.0
                                          : hh * quadrature::detail::gk15_x[14 - i];
                const double w = quadrature::detail::gk15_wk[i < 8 ? i : 14 - i];
                const double s = c + off;
                const double y = L * s / (1.0 - s);
                const double jac = L / ((1.0 - s) * (1.0 - s));
                acc += w * hh * jac * std::exp(-ax * y) * series(std::complex<double>(B_, 0.0) + mi * y);
            }
            lo = hi;
            hi = 1.0 - 0.5 * (1.0 - hi);
        }
        return mi * std::exp(std::complex<double>(0.0, -X * B_)) * acc;
    }
};

inline SolutionField solve_subordination(const SolutionRequest& req) {
    validate(req);
    if (req.alpha == 1.0 && req.time_route && *req.time_route != TimeRoute::degenerate)
        throw DomainError("alpha = 1 admits only the degenerate time change");
    const SubordinationEvaluator ev(req.spec, req.alpha, req.t, req.time_route);
    SolutionField out{req, std::vector<SignedDensitySample>(req.x_grid.size()),
                      std::vector<SolveRoute>(req.x_grid.size(), SolveRoute::subordination)};
    detail::parallel_for(req.x_grid.size(), req.threads, [&](std::size_t i) { out.values[i] = ev(req.x_grid[i]); });
    return out;
}

inline SolutionField solve_fourier_ml(const SolutionRequest& req) {
    validate(req);
    const FourierMLEvaluator ev(req.spec, req.alpha);
    SolutionField out{req, std::vector<SignedDensitySample>(req.x_grid.size()),
                      std::vector<SolveRoute>(req.x_grid.size(), SolveRoute::fourier_ml)};
    detail::parallel_for(req.x_grid.size(), req.threads,
                         [&](std::size_t i) { out.values[i] = ev(req.x_grid[i], req.t); });
    return out;
}

inline SolutionField solve(const SolutionRequest& req) {
    SolveRoute r = req.route;
    if (r == SolveRoute::automatic) r = req.time_route ? SolveRoute::subordination : auto_route(req.spec, req.alpha);
    return r == SolveRoute::subordination ? solve_subordination(req) : solve_fourier_ml(req);
}

// E_α(k_n (-iβ)^n t^α).
inline std::complex<double> solution_char_fn(const EquationSpec& spec, double alpha, double beta, double t) {
    check_alpha_t(alpha, t);
    static constexpr std::array<std::complex<double>, 4> minus_i_pow = {
        std::complex<double>(1, 0), std::complex<double>(0, -1), std::complex<double>(-1, 0),
        std::complex<double>(0, 1)};
    const std::complex<double> z =
        static_cast<double>(spec.k) * minus_i_pow[spec.n % 4] * std::pow(beta, spec.n) * std::pow(t, alpha);
    return specfun::mittag_leffler(z, {alpha, 1.0});
}

// (-1)^{nj} k_n^j t^{αj} Γ(nj+1)/Γ(αj+1) for r = nj, zero otherwise.
inline double solution_moment(const EquationSpec& spec, double alpha, int r, double t) {
    check_alpha_t(alpha, t);
    if (r < 0) throw DomainError("moment order must be nonnegative");
    if (r % spec.n != 0) return 0.0;
    const int j = r / spec.n;
    const double sign = ((r % 2 == 0) ? 1.0 : -1.0) * ((spec.k == -1 && j % 2 == 1) ? -1.0 : 1.0);
    return sign * std::exp(alpha * j * std::log(t) + std::lgamma(r + 1.0) - std::lgamma(alpha * j + 1.0));
}

// n = 2: u(x,t) = (1/2t^{α/2}) W(-|x|/t^{α/2}; -α/2, 1-α/2).
inline double wright_closed_form_n2(double alpha, double x, double t) {
    check_alpha_t(alpha, t);
    const double sc = std::pow(t, alpha / 2.0);
    return specfun::wright_w(-std::fabs(x) / sc, {-alpha / 2.0, 1.0 - alpha / 2.0}) / (2.0 * sc);
}


// Either route at t = 1; other times follow from u(x,t) = t^{-α/n} U(x t^{-α/n}).
class SolutionEvaluator {
public:
    SolutionEvaluator(const EquationSpec& spec, double alpha, SolveRoute route = SolveRoute::automatic,
                      std::optional<TimeRoute> time_route = {},
                      double max_frequency = FourierMLEvaluator::default_max_frequency)
        : spec_(spec), alpha_(alpha) {
        check_alpha_t(alpha, 1.0);
        route_ = route == SolveRoute::automatic ? (time_route ? SolveRoute::subordination : auto_route(spec, alpha)) : route;
        if (route_ == SolveRoute::subordination)
            sub_ = std::make_shared<SubordinationEvaluator>(spec, alpha, 1.0, time_route);
        else
            fourier_ = std::make_shared<FourierMLEvaluator>(spec, alpha, max_frequency);
    }

    SolveRoute route() const { return route_; }
    const EquationSpec& spec() const { return spec_; }
    double alpha() const { return alpha_; }

    SignedDensitySample unit(double X) const { return sub_ ? (*sub_)(X) : fourier_->unit(X); }

    SignedDensitySample operator()(double x, double t) const {
        check_alpha_t(alpha_, t);
        const double sc = std::pow(t, -alpha_ / spec_.n);
        const auto r = unit(x * sc);
        return {x, sc * r.value, sc * r.error_estimate};
    }

private:
    EquationSpec spec_;
    double alpha_;
    SolveRoute route_;
    std::shared_ptr<const SubordinationEvaluator> sub_;
    std::shared_ptr<const FourierMLEvaluator> fourier_;
};

struct SupportExtent {
    double half_width = 0.0;
    double edge_max = 0.0;  // max |U| over the last scanned window
};

// Scans X = side·(start, start+1, ...) in unit windows until two consecutive
// windows stay below `floor` (the roundoff level of U).
inline SupportExtent support_extent(const SolutionEvaluator& ev, double side, double floor = 1e-15, double start = 4.0) {
    SupportExtent out{start, 0.0};
    for (int quiet = 0; quiet < 2;) {
        double m = 0.0;
        for (int i = 0; i < 8; ++i) m = std::max(m, std::fabs(ev.unit(side * (out.half_width + i / 8.0)).value));
        quiet = m < floor ? quiet + 1 : 0;
        out.half_width += 1.0;
        out.edge_max = m;
        if (out.half_width > 1024.0) throw ConvergenceError("solution does not decay", out.half_width, m);
    }
    return out;
}

inline SupportExtent support_half_width(const SolutionEvaluator& ev, double floor = 1e-15) {
    const SupportExtent l = support_extent(ev, -1.0, floor), r = support_extent(ev, 1.0, floor);
    return {std::max(l.half_width, r.half_width), std::max(l.edge_max, r.edge_max)};
}

struct LaplaceCheck {
    double numeric = 0.0;
    double closed_form = 0.0;
    double discrepancy = 0.0;
    double error_estimate = 0.0;
};

// For odd n the kernel oscillates without decay on the side where k_n·x has
// this sign.
inline int oscillatory_side(const EquationSpec& spec) {
    if (spec.n % 2 == 0) return 0;
    return ((spec.n / 2) % 2 == 1 ? 1 : -1) * spec.k;
}

// ∫_0^∞ e^{-st} u(x,t) dt against s^{α-1} Φ_n(x, s^α).
inline LaplaceCheck laplace_relation_check(const SolutionEvaluator& ev, double x, double s) {
    if (!(s > 0) || !std::isfinite(s)) throw DomainError("laplace_relation_check needs s > 0");
    if (!std::isfinite(x)) throw DomainError("x must be finite");
    const EquationSpec& spec = ev.spec();
    const double alpha = ev.alpha();
    const double a = alpha / spec.n;
    if (alpha == 1.0 && x != 0.0 && oscillatory_side(spec) * x > 0)
        throw DomainError("at alpha = 1 the odd-order kernel oscillates without bound as t -> 0 on this side of x");
    LaplaceCheck out;
    out.closed_form = std::pow(s, alpha - 1.0) * kernel::kernel_laplace(spec, x, std::pow(s, alpha));

    // t = e^τ; beyond τ_hi the factor e^{-st} is below e^{-60}.
    const double tau_hi = std::log(60.0 / s);
    double tau_lo;
    double head = 0.0;
    if (x == 0.0) {
        tau_lo = std::min(tau_hi - 1.0, std::log(1e-16) / (1.0 - a));
        // u(0,t) = t^{-α/n} U(0) exactly; e^{-st} ≈ 1 below e^{τ_lo}.
        head = ev.unit(0.0).value * std::exp((1.0 - a) * tau_lo) / (1.0 - a);
    } else {
        const double X_cut = support_extent(ev, x > 0 ? 1.0 : -1.0).half_width;
        tau_lo = std::min(tau_hi - 1.0, (std::log(std::fabs(x)) - std::log(X_cut)) * (1.0 / a));
    }
    auto f = [&](double tau) {
        const double t = std::exp(tau);
        return std::exp(-s * t) * t * ev(x, t).value;
    };
    std::vector<double> pts;
    for (double tau = tau_lo; tau < tau_hi; tau += 0.5) pts.push_back(tau);
    pts.push_back(tau_hi);
    const auto r = quadrature::integrate_adaptive_points(f, pts, quadrature::Options{1e-13, 1e-11});
    out.numeric = r.value + head;
    out.error_estimate = r.error_estimate + 1e-3 * std::fabs(head);
    out.discrepancy = std::fabs(out.numeric - out.closed_form);
    return out;
}

// Validation helpers use the Fourier route: its cost does not grow with |x|.
// For odd n the oscillating side decays slowly as α -> 1, so the table is
// widened to cover it.
inline SolutionEvaluator validation_evaluator(const EquationSpec& spec, double alpha) {
    double f = 128.0;
    if (spec.n % 2 == 1 && alpha > 0.5 && alpha < 1.0) f = std::min(1200.0, 48.0 * spec.n / std::sqrt(1.0 - alpha));
    return SolutionEvaluator(spec, alpha, SolveRoute::fourier_ml, {}, f);
}

inline double laplace_relation_check(const EquationSpec& spec, double alpha, double x, double s) {
    return laplace_relation_check(validation_evaluator(spec, alpha), x, s).discrepancy;
}

struct UniformTimeGrid {
    double t_max = 1.0;
    int nodes = 128;  // t_j = j t_max / nodes, j = 1..nodes
};

// n-th derivative weights on the symmetric stencil offsets; n+1 points for
// even n, n+2 for odd n, second order in h.
inline std::vector<std::pair<int, double>> central_difference(int n) {
    const int half = n % 2 == 0 ? n / 2 : (n + 1) / 2;
    const int m = 2 * half + 1;
    // Solve Σ_j w_j j^q / q! = δ_{qn} for q = 0..m-1 (Vandermonde system).
    std::vector<std::vector<double>> A(m, std::vector<double>(m + 1, 0.0));
    for (int q = 0; q < m; ++q) {
        double fact = 1.0;
        for (int i = 2; i <= q; ++i) fact *= i;
        for (int j = -half; j <= half; ++j) A[q][j + half] = std::pow(double(j), q) / fact;
        A[q][m] = q == n ? 1.0 : 0.0;
    }
    for (int c = 0; c < m; ++c) {
        int piv = c;
        for (int r = c + 1; r < m; ++r)
            if (std::fabs(A[r][c]) > std::fabs(A[piv][c])) piv = r;
        std::swap(A[c], A[piv]);
        for (int r = 0; r < m; ++r) {
            if (r == c) continue;
            const double f = A[r][c] / A[c][c];
            for (int k = c; k <= m; ++k) A[r][k] -= f * A[c][k];
        }
    }
    std::vector<std::pair<int, double>> w;
    for (int j = -half; j <= half; ++j) {
        double v = A[j + half][m] / A[j + half][j + half];
        v = std::round(v * 1e9) / 1e9;  // weights are small rationals
        if (v != 0.0) w.push_back({j, v});
    }
    return w;
}

// max_j |D_t^α u(x,t_j) - k_n D_x^n u(x,t_j)| with the L1 scheme in t
// (u(x,0) = 0 for x ≠ 0) and central differences in x.
template <class U>
double caputo_residual(const EquationSpec& spec, double alpha, double x, const UniformTimeGrid& grid, double h_x,
                       U&& u) {
    check_alpha_t(alpha, 1.0);
    if (grid.nodes < 64) throw DomainError("caputo_residual needs at least 64 time nodes");
    if (!(grid.t_max > 0) || !(h_x > 0)) throw DomainError("caputo_residual needs t_max > 0 and h_x > 0");
    const auto stencil = central_difference(spec.n);
    const int half = stencil.back().first;
    if (std::fabs(x) <= half * h_x) throw DomainError("stencil must not reach x = 0, where u(·,0) is singular");
    double wsum = 0.0;
    for (const auto& [j, w] : stencil) wsum += std::fabs(w);
    if (std::numeric_limits<double>::epsilon() * wsum / std::pow(h_x, spec.n) > 1e-4)
        throw DomainError("stencil-underflow: h_x is too small for an accurate n-th difference");
    const int N = grid.nodes;
    const double dt = grid.t_max / N;
    std::vector<double> center(N + 1, 0.0), dxn(N + 1, 0.0);
    for (int j = 1; j <= N; ++j) {
        const double tj = j * dt;
        double acc = 0.0;
        bool have_center = false;
        for (const auto& [o, w] : stencil) {
            const double v = u(x + o * h_x, tj);
            acc += w * v;
            if (o == 0) {
                center[j] = v;
                have_center = true;
            }
        }
        if (!have_center) center[j] = u(x, tj);
        dxn[j] = acc / std::pow(h_x, spec.n);
    }
    std::vector<double> b(N);
    for (int k = 0; k < N; ++k) b[k] = k == 0 ? 1.0 : std::pow(k + 1.0, 1.0 - alpha) - std::pow(double(k), 1.0 - alpha);
    const double scale = std::pow(dt, -alpha) / std::tgamma(2.0 - alpha);
    double worst = 0.0;
    for (int j = 1; j <= N; ++j) {
        double d = 0.0;
        for (int k = 0; k < j; ++k) d += b[k] * (center[j - k] - center[j - k - 1]);
        worst = std::max(worst, std::fabs(scale * d - spec.k * dxn[j]));
    }
    return worst;
}

inline double caputo_residual(const EquationSpec& spec, double alpha, double x, const UniformTimeGrid& grid, double h_x) {
    const SolutionEvaluator ev = validation_evaluator(spec, alpha);
    return caputo_residual(spec, alpha, x, grid, h_x, [&](double xx, double tt) { return ev(xx, tt).value; });
}

struct TruncatedIntegral {
    double value = 0.0;
    double error_estimate = 0.0;
    double truncation_bound = 0.0;
    double half_width = 0.0;
};

// ∫ x^r u(x,t) dx over the scanned support. U decays faster than e^{-X}
// there, so L^r·|U(L)| times a few unit lengths bounds the rest.
inline TruncatedIntegral numeric_moment(const SolutionEvaluator& ev, int r, double t) {
    check_alpha_t(ev.alpha(), t);
    if (r < 0) throw DomainError("moment order must be nonnegative");
    const SupportExtent sup = support_half_width(ev);
    const double L = sup.half_width;
    auto f = [&](double X) { return std::pow(X, r) * ev.unit(X).value; };
    std::vector<double> pts;
    for (double X = -L; X < L; X += 1.0) pts.push_back(X);
    pts.push_back(L);
    // U carries ~1e-15 absolute roundoff, so x^r U has a floor near L^{r+1}·1e-15.
    const double floor = 1e-13 * std::pow(L, r + 1);
    const auto q = quadrature::integrate_adaptive_points(f, pts, quadrature::Options{1e-12 + floor, 1e-11});
    const double sc = std::pow(t, ev.alpha() * r / ev.spec().n);
    TruncatedIntegral out;
    out.value = sc * q.value;
    out.error_estimate = sc * q.error_estimate;
    out.truncation_bound = sc * 8.0 * std::pow(L, r) * std::max(sup.edge_max, 1e-16);
    out.half_width = L * std::pow(t, ev.alpha() / ev.spec().n);
    return out;
}

// ∫ e^{iβx} u(x,t) dx, to be compared with solution_char_fn.
inline std::complex<double> numeric_char_fn(const SolutionEvaluator& ev, double beta, double t) {
    check_alpha_t(ev.alpha(), t);
    const double L = support_half_width(ev).half_width;
    const double b = beta * std::pow(t, ev.alpha() / ev.spec().n);
    auto f = [&](double X) { return std::exp(std::complex<double>(0.0, b * X)) * ev.unit(X).value; };
    std::vector<double> pts;
    for (double X = -L; X < L; X += 1.0) pts.push_back(X);
    pts.push_back(L);
    return quadrature::integrate_adaptive_points(f, pts, quadrature::Options{1e-13, 1e-12}).value;
}

// ∫_0^∞ u^{-1/2} exp(-x²/4u - u y^α/t^α) du, computed with u = v².
inline quadrature::QuadResult subordination_identity_integral(double x, double y, double t, double alpha) {
    check_alpha_t(alpha, t);
    if (!(y > 0)) throw DomainError("y must be positive");
    const double lam = std::pow(y / t, alpha);
    const double x2 = x * x / 4.0;
    auto f = [&](double v) { return v == 0.0 ? 0.0 : 2.0 * std::exp(-x2 / (v * v) - lam * v * v); };
    const double v_peak = std::max(std::pow(x2 / lam, 0.25), 1e-3 / std::sqrt(lam));
    const double v_hi = v_peak + 12.0 / std::sqrt(lam);
    std::vector<double> pts{0.0};
    for (double v = v_peak / 16.0; v < v_hi; v *= 2.0) pts.push_back(v);
    pts.push_back(v_hi);
    std::sort(pts.begin(), pts.end());
    auto body = quadrature::integrate_adaptive_points(f, pts, quadrature::Options{1e-15, 1e-14});
    const auto tail = quadrature::integrate_semi_infinite(f, v_hi, quadrature::DecayHint::exponential(1.0 / std::sqrt(lam)),
                                                          quadrature::Options{1e-16, 1e-14});
    body.value += tail.value;
    body.error_estimate += tail.error_estimate;
    return body;
}

// √π t^{α/2} y^{-α/2} exp(-|x| y^{α/2} / t^{α/2}).
inline double subordination_identity_closed_form(double x, double y, double t, double alpha) {
    check_alpha_t(alpha, t);
    if (!(y > 0)) throw DomainError("y must be positive");
    const double r = std::pow(y / t, alpha / 2.0);
    return std::sqrt(pi) / r * std::exp(-std::fabs(x) * r);
}

} // namespace fracheat::solver
