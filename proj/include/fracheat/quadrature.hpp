#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace fracheat::quadrature {

inline constexpr double default_tolerance = 1e-9;
inline constexpr std::size_t default_budget = std::size_t{1} << 20;

template <class T>
struct BasicQuadResult {
    T value{};
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
    bool tail_dominated = false;
};

using QuadResult = BasicQuadResult<double>;
using ComplexQuadResult = BasicQuadResult<std::complex<double>>;

struct Options {
    double abs_tol = default_tolerance;
    double rel_tol = 0.0;
    std::size_t budget = default_budget;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (abscissae in decreasing order).
inline constexpr std::array<double, 8> gk15_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> gk15_wk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gk15_wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Panel {
    double a;
    double b;
    T value;
    double error;
    double roundoff;
};

template <class T, class F>
Panel<T> gk15(F& f, double a, double b) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    std::array<T, 15> fv;
    fv[7] = f(c);
    for (int i = 0; i < 7; ++i) {
        const double dx = h * gk15_x[i];
        fv[i] = f(c - dx);
        fv[14 - i] = f(c + dx);
    }
    T kron = fv[7] * gk15_wk[7];
    T gauss = fv[7] * gk15_wg[3];
    double resabs = std::abs(fv[7]) * gk15_wk[7];
    for (int i = 0; i < 7; ++i) {
        const T pair = fv[i] + fv[14 - i];
        kron += pair * gk15_wk[i];
        resabs += (std::abs(fv[i]) + std::abs(fv[14 - i])) * gk15_wk[i];
        if (i % 2 == 1) gauss += pair * gk15_wg[i / 2];
    }
    const T mean = kron * 0.5;
    double resasc = gk15_wk[7] * std::abs(fv[7] - mean);
    for (int i = 0; i < 7; ++i)
        resasc += gk15_wk[i] * (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));
    const double ah = std::fabs(h);
    kron *= h;
    resabs *= ah;
    resasc *= ah;
    double err = std::abs((kron - gauss * h));
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double floor = 50.0 * eps * resabs;
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(err, floor);
    return {a, b, kron, err, floor};
}

template <class T>
struct PanelOrder {
    bool operator()(const Panel<T>& l, const Panel<T>& r) const { return l.error < r.error; }
};

template <class F>
auto adaptive_core(F& f, const std::vector<double>& breaks, const Options& opt)
    -> BasicQuadResult<std::decay_t<std::invoke_result_t<F&, double>>> {
    using T = std::decay_t<std::invoke_result_t<F&, double>>;
    std::priority_queue<Panel<T>, std::vector<Panel<T>>, PanelOrder<T>> heap;
    std::vector<Panel<T>> frozen;
    std::size_t evals = 0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (breaks[i + 1] == breaks[i]) continue;
        heap.push(gk15<T>(f, breaks[i], breaks[i + 1]));
        evals += 15;
    }

    auto totals = [&]() {
        T sum{};
        double err = 0.0, round = 0.0;
        auto copy = heap;
        while (!copy.empty()) {
            sum += copy.top().value;
            err += copy.top().error;
            round += copy.top().roundoff;
            copy.pop();
        }
        for (const auto& p : frozen) {
            sum += p.value;
            err += p.error;
            round += p.roundoff;
        }
        return std::tuple<T, double, double>{sum, err, round};
    };

    // Running totals; re-synchronised from scratch every so often to limit drift.
    auto [total, total_err, total_round] = totals();
    std::size_t since_sync = 0;
    while (true) {
        const double target = std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
        if (total_err <= target || total_err <= 2.0 * total_round || heap.empty()) {
            std::tie(total, total_err, total_round) = totals();
            if (total_err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total)) ||
                total_err <= 2.0 * total_round || heap.empty())
                break;
        }
        if (evals + 30 > opt.budget)
            throw ConvergenceError("adaptive quadrature exceeded its evaluation budget",
                                   std::real(total), total_err);
        Panel<T> worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) ||
            (worst.b - worst.a) < 64.0 * std::numeric_limits<double>::epsilon() *
                                      std::max({std::fabs(worst.a), std::fabs(worst.b), 1e-300})) {
            frozen.push_back(worst);
            continue;
        }
        Panel<T> left = gk15<T>(f, worst.a, mid);
        Panel<T> right = gk15<T>(f, mid, worst.b);
        evals += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        total_round += left.roundoff + right.roundoff - worst.roundoff;
        heap.push(left);
        heap.push(right);
        if (++since_sync == 256) {
            since_sync = 0;
            std::tie(total, total_err, total_round) = totals();
        }
    }

    // Final sum in ascending-error order keeps small panels from being swamped.
    std::vector<Panel<T>> all(frozen);
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel<T>& l, const Panel<T>& r) { return l.a < r.a; });
    T sum{}, carry{};
    double err = 0.0;
    for (const auto& p : all) {
        const T y = p.value - carry;
        const T s = sum + y;
        carry = (s - sum) - y;
        sum = s;
        err += p.error;
    }
    return {sum, err, evals, false};
}

} // namespace detail

// Adaptive Gauss-Kronrod (7/15) with a global error heap. Works for real or complex integrands.
template <class F>
auto integrate_adaptive(F&& f, double a, double b, const Options& opt) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw DomainError("integrate_adaptive requires finite a < b");
    std::vector<double> br{a, b};
    return detail::adaptive_core(f, br, opt);
}

template <class F>
auto integrate_adaptive(F&& f, double a, double b, double tol = default_tolerance) {
    return integrate_adaptive(std::forward<F>(f), a, b, Options{tol});
}

// Same as integrate_adaptive but starting from a caller-chosen partition.
template <class F>
auto integrate_adaptive_points(F&& f, std::vector<double> points, const Options& opt) {
    if (points.size() < 2) throw DomainError("integrate_adaptive_points needs at least two points");
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        if (!(points[i] <= points[i + 1]) || !std::isfinite(points[i]) || !std::isfinite(points[i + 1]))
            throw DomainError("integration breakpoints must be finite and nondecreasing");
    return detail::adaptive_core(f, points, opt);
}

struct DecayHint {
    enum class Kind { exponential, algebraic };
    Kind kind = Kind::exponential;
    double power = 0.0;  // algebraic: f ~ x^{-power}
    double scale = 1.0;  // length scale of the variable map

    static DecayHint exponential(double scale = 1.0) { return {Kind::exponential, 0.0, scale}; }
    static DecayHint algebraic(double power, double scale = 1.0) { return {Kind::algebraic, power, scale}; }
};

// Integral over [a, inf). Exponential decay: x = a - L log(1-s). Algebraic decay
// x^{-p}: x = a + L s/(1-s) up to a large cutoff X, plus the tail f(X) X/(p-1).
template <class F>
auto integrate_semi_infinite(F&& f, double a, DecayHint hint, const Options& opt) {
    using T = std::decay_t<std::invoke_result_t<F&, double>>;
    const double L = hint.scale;
    if (!(L > 0) || !std::isfinite(a)) throw DomainError("integrate_semi_infinite: bad scale or start");
    if (hint.kind == DecayHint::Kind::exponential) {
        auto g = [&](double s) -> T {
            const double one_minus = 1.0 - s;
            const double x = a - L * std::log1p(-s);
            const T v = f(x);
            return v == T{} ? T{} : v * (L / one_minus);
        };
        return integrate_adaptive(g, 0.0, 1.0, opt);
    }
    if (!(hint.power > 1.0)) throw DomainError("algebraic decay needs power > 1 to be integrable");
    constexpr double s_max = 1.0 - 1e-12;
    auto g = [&](double s) -> T {
        const double one_minus = 1.0 - s;
        const double x = a + L * s / one_minus;
        const T v = f(x);
        return v == T{} ? T{} : v * (L / (one_minus * one_minus));
    };
    BasicQuadResult<T> r = integrate_adaptive(g, 0.0, s_max, opt);
    const double X = a + L * s_max / (1.0 - s_max);
    const T tail = f(X) * (X / (hint.power - 1.0));
    r.value += tail;
    r.evaluations += 1;
    r.error_estimate += 0.01 * std::abs(tail);
    r.tail_dominated = std::abs(tail) > opt.abs_tol;
    return r;
}

template <class F>
auto integrate_semi_infinite(F&& f, double a, DecayHint hint, double tol = default_tolerance) {
    return integrate_semi_infinite(std::forward<F>(f), a, hint, Options{tol});
}

struct GaussJacobiRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point rule for the weight (1-x)^a (1+x)^b on [-1,1] (Golub-Welsch).
inline GaussJacobiRule gauss_jacobi_rule(int n, double a, double b) {
    if (n < 1 || !(a > -1.0) || !(b > -1.0)) throw DomainError("gauss_jacobi_rule: invalid parameters");
    Eigen::VectorXd diag(n);
    Eigen::VectorXd off(std::max(n - 1, 1));
    for (int k = 0; k < n; ++k) {
        const double s = 2.0 * k + a + b;
        diag(k) = (k == 0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    }
    for (int k = 1; k < n; ++k) {
        const double s = 2.0 * k + a + b;
        const double num = 4.0 * k * (k + a) * (k + b) * (k + a + b);
        const double den = s * s * (s + 1.0) * (s - 1.0);
        off(k - 1) = std::sqrt(num / den);
    }
    GaussJacobiRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double mu0 = std::exp((a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                                std::lgamma(a + b + 2.0));
    if (n == 1) {
        rule.nodes[0] = diag(0);
        rule.weights[0] = mu0;
        return rule;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off.head(n - 1), Eigen::ComputeEigenvectors);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v0 * v0;
    }
    return rule;
}

namespace detail {

// Small per-thread cache; rules depend only on (n, a, b).
inline GaussJacobiRule cached_gauss_jacobi(int n, double a, double b) {
    struct Entry {
        int n;
        double a, b;
        GaussJacobiRule rule;
    };
    thread_local std::vector<Entry> cache;
    for (const auto& e : cache)
        if (e.n == n && e.a == a && e.b == b) return e.rule;
    if (cache.size() >= 64) cache.erase(cache.begin());
    cache.push_back({n, a, b, gauss_jacobi_rule(n, a, b)});
    return cache.back().rule;
}

} // namespace detail

struct JacobiWeight {
    enum class Endpoint { left, right };
    double exponent = -0.5;
    Endpoint endpoint = Endpoint::right;
};

// ∫_a^b f(w) d(w)^e dw where d is the distance to the weighted endpoint.
// A Gauss-Jacobi panel touches that endpoint; it is shrunk until the 24- and
// 48-node rules agree, and the rest of [a,b] is handled adaptively.
template <class F>
QuadResult integrate_jacobi_singular(F&& f, double a, double b, JacobiWeight w, const Options& opt) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw DomainError("integrate_jacobi_singular requires finite a < b");
    if (!(w.exponent > -1.0)) throw DomainError("Jacobi weight exponent must exceed -1");
    const double e = w.exponent;
    const bool right = w.endpoint == JacobiWeight::Endpoint::right;
    const GaussJacobiRule lo = detail::cached_gauss_jacobi(24, e, 0.0);
    const GaussJacobiRule hi = detail::cached_gauss_jacobi(48, e, 0.0);

    // Panel of length h attached to the singular end; xi = 1 maps onto that end.
    auto panel = [&](const GaussJacobiRule& rule, double h) {
        const double end = right ? b : a;
        const double dir = right ? 1.0 : -1.0;
        double s = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double x = end - dir * 0.5 * h * (1.0 - rule.nodes[i]);
            s += rule.weights[i] * f(x);
        }
        return std::pow(0.5 * h, e + 1.0) * s;
    };

    double h = b - a;
    std::size_t evals = 0;
    double sing = 0.0, sing_err = 0.0;
    bool ok = false;
    for (int iter = 0; iter < 80; ++iter) {
        const double r1 = panel(lo, h);
        const double r2 = panel(hi, h);
        evals += 72;
        sing = r2;
        sing_err = std::fabs(r2 - r1);
        if (sing_err <= 0.5 * opt.abs_tol || sing_err <= opt.rel_tol * std::fabs(r2) ||
            sing_err <= 64.0 * std::numeric_limits<double>::epsilon() * std::fabs(r2)) {
            ok = true;
            break;
        }
        h *= 0.5;
    }
    if (!ok) throw ConvergenceError("Gauss-Jacobi endpoint panel did not converge", sing, sing_err);

    QuadResult out{sing, sing_err, evals, false};
    if (h < b - a) {
        auto g = [&](double x) {
            const double d = right ? (b - x) : (x - a);
            return f(x) * std::pow(d, e);
        };
        Options sub = opt;
        sub.abs_tol = 0.5 * opt.abs_tol;
        sub.budget = opt.budget > evals ? opt.budget - evals : 1;
        const QuadResult reg = right ? integrate_adaptive(g, a, b - h, sub) : integrate_adaptive(g, a + h, b, sub);
        out.value += reg.value;
        out.error_estimate += reg.error_estimate;
        out.evaluations += reg.evaluations;
    }
    return out;
}

template <class F>
QuadResult integrate_jacobi_singular(F&& f, double a, double b, JacobiWeight w, double tol = default_tolerance) {
    return integrate_jacobi_singular(std::forward<F>(f), a, b, w, Options{tol});
}

// Kernel integral (1/2π)∫ exp(ixz + sign·t·(iz)^n) dz as a real value.
// Even n: (1/π)∫ e^{-t z^n} cos(xz) dz directly. Odd n: [0,R] on the real
// axis, then the ray z = R + ρ e^{iθ} with θ = σπ/(2n), σ = sign·(-1)^q.
inline QuadResult integrate_oscillatory_ray(int n, double x, double t, int sign, const Options& opt,
                                            double split_scale = 1.0) {
    constexpr double pi = 3.14159265358979323846;
    if (n < 2) throw DomainError("phase power must be at least 2");
    if (!(t > 0)) throw DomainError("oscillatory ray requires t > 0");
    if (sign != 1 && sign != -1) throw DomainError("sign must be +1 or -1");
    const int q = n / 2;
    const double scale = std::pow(t, -1.0 / n);
    if (n % 2 == 0) {
        const int decaying = (q % 2 == 1) ? 1 : -1;  // (-1)^{q+1}
        if (sign != decaying) throw DomainError("rotation-invalid: integrand grows along the real axis");
        const double zmax = std::pow(48.0 / t, 1.0 / n);
        auto g = [&](double z) { return std::exp(-t * std::pow(z, n)) * std::cos(x * z) / pi; };
        std::vector<double> pts{0.0};
        const int pieces = std::max(1, static_cast<int>(std::ceil(std::fabs(x) * zmax / (2.0 * pi))));
        for (int i = 1; i <= std::min(pieces, 512); ++i) pts.push_back(zmax * i / std::min(pieces, 512));
        return integrate_adaptive_points(g, pts, opt);
    }
    const int sigma = sign * ((q % 2 == 0) ? 1 : -1);
    const double theta = sigma * pi / (2.0 * n);
    const std::complex<double> ray = std::polar(1.0, theta);
    const std::complex<double> I(0.0, 1.0);
    if (std::real(I * static_cast<double>(sigma) * std::pow(ray, n)) >= 0.0)
        throw DomainError("rotation-invalid: ray is outside the decaying sector");

    // Along the ray, d/dρ Re(phase) at ρ = 0 is -|sin θ|(σx + n t R^{n-1}), so R must
    // lie past the stationary point (-σx/(n t))^{1/(n-1)} for the ray to start decaying.
    const double stationary = std::pow(std::max(0.0, -sigma * x) / (n * t), 1.0 / (n - 1));
    const double R = split_scale * std::max(scale, 1.25 * stationary);
    auto phase = [&](std::complex<double> z) { return I * (x * z + sigma * t * std::pow(z, n)); };

    auto real_part = [&](double z) { return std::cos(x * z + sigma * t * std::pow(z, n)) / pi; };
    std::vector<double> pts{0.0};
    const double phase_span = std::fabs(x) * R + t * std::pow(R, n);
    const int pieces = std::clamp(static_cast<int>(std::ceil(phase_span / pi)), 1, 512);
    for (int i = 1; i <= pieces; ++i) pts.push_back(R * i / pieces);
    Options half = opt;
    half.abs_tol = 0.5 * opt.abs_tol;
    QuadResult seg = integrate_adaptive_points(real_part, pts, half);

    double rho_max = scale;
    for (int i = 0; i < 400; ++i) {
        const double re = std::real(phase(R + rho_max * ray));
        const double re2 = std::real(phase(R + 1.1 * rho_max * ray));
        if (re < -48.0 && re2 < re) break;
        rho_max *= 1.25;
    }
    auto ray_part = [&](double rho) { return std::exp(phase(R + rho * ray)) * ray / pi; };
    std::vector<double> rpts;
    for (int i = 0; i <= 8; ++i) rpts.push_back(rho_max * i / 8.0);
    const ComplexQuadResult tail = integrate_adaptive_points(ray_part, rpts, half);
    seg.value += std::real(tail.value);
    seg.error_estimate += tail.error_estimate;
    seg.evaluations += tail.evaluations;
    return seg;
}

inline QuadResult integrate_oscillatory_ray(int n, double x, double t, int sign, double tol = default_tolerance) {
    return integrate_oscillatory_ray(n, x, t, sign, Options{tol});
}

} // namespace fracheat::quadrature
