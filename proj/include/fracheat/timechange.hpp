#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "errors.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"

namespace fracheat::timechange {

using specfun::pi;

enum class TimeRoute { wright, frac_integral, stable, product, degenerate };

inline const char* route_name(TimeRoute r) {
    switch (r) {
    case TimeRoute::wright: return "wright";
    case TimeRoute::frac_integral: return "frac_integral";
    case TimeRoute::stable: return "stable";
    case TimeRoute::product: return "product";
    case TimeRoute::degenerate: return "degenerate";
    }
    return "unknown";
}

// Law of the random time T_α(t), density v̄_{2α}(u,t) on u ≥ 0.
struct TimeChangeLaw {
    double alpha = 0.5;
    TimeRoute route = TimeRoute::wright;
    double t = 1.0;
    int m = 0;  // product route only: α = 1/m
};

inline bool is_reciprocal_integer(double alpha, int& m) {
    const double r = 1.0 / alpha;
    const double mr = std::round(r);
    if (mr >= 2.0 && std::fabs(r - mr) < 1e-12 * mr) {
        m = static_cast<int>(mr);
        return true;
    }
    return false;
}

inline TimeChangeLaw make_time_change_law(double alpha, TimeRoute route, double t) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0,1]");
    if (!(t > 0)) throw DomainError("t must be positive");
    TimeChangeLaw law{alpha, route, t, 0};
    if (alpha == 1.0) {
        if (route != TimeRoute::degenerate) throw DomainError("alpha = 1 is the degenerate route");
        return law;
    }
    switch (route) {
    case TimeRoute::degenerate: throw DomainError("the degenerate route requires alpha = 1");
    case TimeRoute::stable:
        if (!(alpha >= 0.5)) throw DomainError("the stable route requires alpha in [1/2,1)");
        break;
    case TimeRoute::product:
        if (!is_reciprocal_integer(alpha, law.m)) throw DomainError("the product route requires alpha = 1/m");
        break;
    default: break;
    }
    return law;
}

// Γ(1+δ) t^{αδ} / Γ(1+αδ).
inline double time_moment(double alpha, double delta, double t) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0,1]");
    if (!(delta >= 0)) throw DomainError("delta must be nonnegative");
    if (!(t > 0)) throw DomainError("t must be positive");
    if (alpha == 1.0) return std::pow(t, delta);
    return std::exp(std::lgamma(1.0 + delta) - std::lgamma(1.0 + alpha * delta) + alpha * delta * std::log(t));
}

// Large-z behaviour of M_ν(z) = W(-z; -ν, 1-ν): A z^a exp(-B z^q).
struct MWrightAsymptotic {
    double A, a, B, q;

    explicit MWrightAsymptotic(double nu)
        : A(std::pow(nu, (2.0 * nu - 1.0) / (2.0 * (1.0 - nu))) / std::sqrt(2.0 * pi * (1.0 - nu))),
          a((nu - 0.5) / (1.0 - nu)),
          B((1.0 - nu) * std::pow(nu, nu / (1.0 - nu))),
          q(1.0 / (1.0 - nu)) {}

    double operator()(double z) const { return A * std::pow(z, a) * std::exp(-B * std::pow(z, q)); }

    // ∫_Z^∞ z^δ M(z) dz, leading order.
    double tail(double Z, double delta) const {
        return A * std::pow(Z, a + delta) * std::exp(-B * std::pow(Z, q)) / (B * q * std::pow(Z, q - 1.0));
    }
};

inline double time_density_wright(double alpha, double u, double t) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("the Wright route requires alpha in (0,1)");
    if (!(t > 0)) throw DomainError("t must be positive");
    if (u < 0) return 0.0;
    const double scale = std::pow(t, -alpha);
    return scale * specfun::wright_w(-u * scale, {-alpha, 1.0 - alpha});
}

inline double time_density_stable(double alpha, double u, double t) {
    if (!(alpha >= 0.5 && alpha < 1.0)) throw DomainError("the stable route requires alpha in [1/2,1)");
    if (u < 0) return 0.0;
    return specfun::stable_spec_neg_density(u, {alpha, t}) / alpha;
}

// (1/Γ(1-α)) ∫_0^t (t-w)^{-α} f_α(w; u) dw with f_α the one-sided stable density.
inline double time_density_frac_integral(double alpha, double u, double t, double tol = 1e-13) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("the fractional-integral route requires alpha in (0,1)");
    if (!(t > 0)) throw DomainError("t must be positive");
    if (u < 0) return 0.0;
    const double rg = specfun::reciprocal_gamma(1.0 - alpha);
    if (u == 0) return std::pow(t, -alpha) * rg;
    const specfun::StableOneSided law{alpha, u};
    auto f = [&](double w) { return w > 0 ? specfun::stable_one_sided_density(w, law) : 0.0; };
    quadrature::Options opt;
    opt.abs_tol = tol * std::pow(t, -alpha);
    opt.rel_tol = tol;
    const auto r = quadrature::integrate_jacobi_singular(f, 0.0, t, {-alpha, quadrature::JacobiWeight::Endpoint::right}, opt);
    return rg * r.value;
}

struct GjLaw {
    int m = 2;
    int j = 1;
    double t = 1.0;
};

namespace detail {

inline void check_gj(const GjLaw& g) {
    if (g.m < 2) throw DomainError("G_j law needs m >= 2");
    if (g.j < 1 || g.j > g.m - 1) throw DomainError("G_j law needs 1 <= j <= m-1");
    if (!(g.t > 0)) throw DomainError("t must be positive");
}

// log c^m with c^m = (m^m t)^{1/(m-1)}
inline double gj_log_cm(int m, double t) { return (m * std::log(double(m)) + std::log(t)) / (m - 1.0); }

inline double gj_log_norm(const GjLaw& g) {
    const double m = g.m, j = g.j;
    return (1.0 - j / (m - 1.0)) * std::log(m) - j / (m * (m - 1.0)) * std::log(g.t) - std::lgamma(j / m);
}

// log of the density of log G_j at ℓ.
inline double gj_log_logdensity(const GjLaw& g, double log_cm, double log_norm, double ell) {
    return log_norm + g.j * ell - std::exp(g.m * ell - log_cm);
}

} // namespace detail

inline double gj_density(const GjLaw& law, double w) {
    detail::check_gj(law);
    if (!(w > 0) || !std::isfinite(w)) throw DomainError("G_j density needs w > 0");
    const double lw = std::log(w);
    return std::exp(detail::gj_log_logdensity(law, detail::gj_log_cm(law.m, law.t), detail::gj_log_norm(law), lw) - lw);
}

// Density of G = ∏_{j<m} G_j by convolution of the log-densities on a uniform
// ℓ-grid. The first m-2 factors are convolved on the grid; the last factor is
// applied exactly at the query point. A second grid with twice the nodes gives
// the error estimate.
class ProductTimeDensity {
public:
    ProductTimeDensity(int m, double t, int nodes = 512) : m_(m), t_(t) {
        if (m < 2) throw DomainError("product route needs m >= 2");
        if (!(t > 0)) throw DomainError("t must be positive");
        log_cm_ = detail::gj_log_cm(m, t);
        coarse_ = build(nodes);
        fine_ = build(2 * nodes);
    }

    int m() const { return m_; }
    double t() const { return t_; }

    double operator()(double u) const { return eval(fine_, u); }
    double error_estimate(double u) const { return std::fabs(eval(fine_, u) - eval(coarse_, u)); }

private:
    struct Grid {
        double lo = 0, h = 0;
        std::vector<double> H;  // density of log(G_1···G_{m-2})
    };
    int m_;
    double t_;
    double log_cm_;
    Grid coarse_, fine_;

    double log_c() const { return log_cm_ / m_; }

    Grid build(int N) const {
        Grid g;
        if (m_ == 2) return g;
        double lo = 0, hi = 0;
        for (int j = 1; j <= m_ - 2; ++j) {
            lo += log_c() - 40.0 / j;
            hi += log_c() + std::log(48.0) / m_;
        }
        g.lo = lo;
        g.h = (hi - lo) / (N - 1);
        g.H.assign(N, 0.0);
        const GjLaw first{m_, 1, t_};
        const double n1 = detail::gj_log_norm(first);
        for (int i = 0; i < N; ++i) g.H[i] = std::exp(detail::gj_log_logdensity(first, log_cm_, n1, lo + i * g.h));
        for (int j = 2; j <= m_ - 2; ++j) {
            const GjLaw gj{m_, j, t_};
            const double nj = detail::gj_log_norm(gj);
            std::vector<double> next(N, 0.0);
            for (int i = 0; i < N; ++i) {
                const double ell = lo + i * g.h;
                double s = 0.0;
                for (int k = 0; k < N; ++k) {
                    if (g.H[k] == 0.0) continue;
                    s += g.H[k] * std::exp(detail::gj_log_logdensity(gj, log_cm_, nj, ell - (lo + k * g.h)));
                }
                next[i] = s * g.h;
            }
            g.H.swap(next);
        }
        return g;
    }

    double eval(const Grid& g, double u) const {
        if (u < 0) return 0.0;
        const double alpha = 1.0 / m_;
        if (u == 0) return std::pow(t_, -alpha) * specfun::reciprocal_gamma(1.0 - alpha);
        if (m_ == 2) return gj_density({2, 1, t_}, u);
        const double ell = std::log(u);
        if (ell < g.lo + 5.0) return std::pow(t_, -alpha) * specfun::reciprocal_gamma(1.0 - alpha);
        const GjLaw last{m_, m_ - 1, t_};
        const double nl = detail::gj_log_norm(last);
        double s = 0.0;
        for (std::size_t k = 0; k < g.H.size(); ++k) {
            if (g.H[k] == 0.0) continue;
            s += g.H[k] * std::exp(detail::gj_log_logdensity(last, log_cm_, nl, ell - (g.lo + k * g.h)));
        }
        return s * g.h / u;
    }
};

inline double time_density_product(int m, double u, double t) { return ProductTimeDensity(m, t)(u); }

// Taylor coefficients of v̄ at u = 0: c_k = t^{-α(k+1)} (-1)^k / (k! Γ(1-α(k+1))).
inline std::vector<double> time_density_taylor(double alpha, double t, int count) {
    std::vector<double> c(count);
    double fact = 1.0;
    for (int k = 0; k < count; ++k) {
        if (k > 0) fact *= k;
        c[k] = std::pow(t, -alpha * (k + 1)) * ((k % 2) ? -1.0 : 1.0) *
               specfun::reciprocal_gamma(1.0 - alpha * (k + 1)) / fact;
    }
    return c;
}

// Prepared evaluator of v̄_{2α}(·,t) for one route, with the range [0, cutoff]
// on which the route is used and an asymptotic bound for what lies beyond.
class TimeDensity {
public:
    explicit TimeDensity(const TimeChangeLaw& law) : law_(law), asym_(law.alpha < 1.0 ? law.alpha : 0.5) {
        law_ = make_time_change_law(law.alpha, law.route, law.t);
        if (law_.route == TimeRoute::degenerate) return;
        const double ta = std::pow(law_.t, law_.alpha);
        // Where the density has fallen below ~1e-17 of its scale.
        double z = 1.0;
        while (asym_(z) > 1e-17 && z < 1e4) z *= 1.05;
        double zc = z;
        if (law_.route == TimeRoute::wright) zc = std::min(zc, 0.995 * specfun::wright_guard({-law_.alpha, 1.0 - law_.alpha}));
        if (law_.route == TimeRoute::stable) zc = std::min(zc, 0.995 * specfun::stable_spec_neg_guard(law_.alpha));
        cutoff_ = zc * ta;
        if (law_.route == TimeRoute::product) product_ = std::make_shared<ProductTimeDensity>(law_.m, law_.t);
    }

    const TimeChangeLaw& law() const { return law_; }
    double cutoff() const { return cutoff_; }

    double operator()(double u) const {
        switch (law_.route) {
        case TimeRoute::wright: return time_density_wright(law_.alpha, u, law_.t);
        case TimeRoute::stable: return u == 0 ? limit_at_zero() : time_density_stable(law_.alpha, u, law_.t);
        case TimeRoute::frac_integral: return time_density_frac_integral(law_.alpha, u, law_.t);
        case TimeRoute::product: return (*product_)(u);
        case TimeRoute::degenerate: break;
        }
        throw DomainError("the degenerate law (alpha = 1) is a point mass and has no density");
    }

    double limit_at_zero() const { return std::pow(law_.t, -law_.alpha) * specfun::reciprocal_gamma(1.0 - law_.alpha); }

    // ∫_{cutoff}^∞ u^δ v̄(u) du from the large-argument asymptotics.
    double tail_moment(double delta) const {
        if (law_.route == TimeRoute::degenerate) return 0.0;
        const double ta = std::pow(law_.t, law_.alpha);
        return std::pow(ta, delta) * asym_.tail(cutoff_ / ta, delta);
    }

    // Asymptotic value of v̄ beyond the cutoff.
    double asymptotic(double u) const {
        const double ta = std::pow(law_.t, law_.alpha);
        return asym_(u / ta) / ta;
    }

private:
    TimeChangeLaw law_;
    MWrightAsymptotic asym_;
    double cutoff_ = 0.0;
    std::shared_ptr<const ProductTimeDensity> product_;
};

inline double time_density(const TimeChangeLaw& law, double u) {
    switch (law.route) {
    case TimeRoute::wright: return time_density_wright(law.alpha, u, law.t);
    case TimeRoute::frac_integral: return time_density_frac_integral(law.alpha, u, law.t);
    case TimeRoute::stable: return time_density_stable(law.alpha, u, law.t);
    case TimeRoute::product: {
        int m = law.m;
        if (m == 0 && !is_reciprocal_integer(law.alpha, m)) throw DomainError("the product route requires alpha = 1/m");
        return time_density_product(m, u, law.t);
    }
    case TimeRoute::degenerate: break;
    }
    throw DomainError("the degenerate law (alpha = 1) is a point mass and has no density");
}

struct MomentResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

// ∫_0^∞ u^δ v̄(u) du by quadrature over [0, cutoff] plus the asymptotic tail.
inline MomentResult time_density_moment_quadrature(const TimeDensity& dens, double delta, double rel_tol = 1e-11) {
    const double c = dens.cutoff();
    const double ta = std::pow(dens.law().t, dens.law().alpha);
    auto f = [&](double u) { return (u == 0 && delta == 0) ? dens(u) : std::pow(u, delta) * dens(u); };
    quadrature::Options opt;
    opt.abs_tol = 1e-14 * std::pow(ta, delta);
    opt.rel_tol = rel_tol;
    std::vector<double> pts{0.0};
    for (double z : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0})
        if (z * ta < c) pts.push_back(z * ta);
    pts.push_back(c);
    const auto r = quadrature::integrate_adaptive_points(f, pts, opt);
    const double tail = dens.tail_moment(delta);
    return {r.value + tail, r.error_estimate + 0.1 * tail};
}

} // namespace fracheat::timechange
