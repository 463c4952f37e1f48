#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "errors.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"

namespace fracheat::kernel {

using specfun::pi;

// n-th order heat-type equation ∂u/∂t = k_n ∂^n u/∂x^n.
struct EquationSpec {
    int n = 2;
    int odd_sign = 1;  // recorded for every n, used only when n is odd
    int k = 1;         // k_n
};

inline EquationSpec make_equation_spec(int n, int odd_sign = 1) {
    if (n < 2) throw DomainError("equation order must be at least 2");
    if (odd_sign != 1 && odd_sign != -1) throw DomainError("odd_sign must be +1 or -1");
    EquationSpec s{n, odd_sign, odd_sign};
    if (n % 2 == 0) s.k = ((n / 2) % 2 == 1) ? 1 : -1;
    return s;
}

struct RootSystem {
    std::vector<std::complex<double>> roots;  // θ_k, k = 0..n-1
    std::vector<std::size_t> I;               // Re θ_k < 0
    std::vector<std::size_t> J;               // Re θ_k > 0
    std::vector<std::complex<double>> z;      // z_k = -θ_k / n
};

inline RootSystem root_system(const EquationSpec& spec) {
    RootSystem rs;
    const int n = spec.n;
    const double offset = spec.k == 1 ? 0.0 : 1.0;
    for (int j = 0; j < n; ++j) {
        const double ang = (2.0 * j + offset) * pi / n;
        // Exact zeros keep the I/J split free of rounding noise.
        double c = std::cos(ang), s = std::sin(ang);
        if (std::fabs(c) < 1e-15) c = 0.0;
        if (std::fabs(s) < 1e-15) s = 0.0;
        const std::complex<double> th(c, s);
        rs.roots.push_back(th);
        rs.z.push_back(-th / static_cast<double>(n));
        if (c < 0) rs.I.push_back(j);
        if (c > 0) rs.J.push_back(j);
    }
    return rs;
}

struct SignedDensitySample {
    double x = 0.0;
    double value = 0.0;
    double error_estimate = 0.0;
};

// p_n(x,t) = (1/2π)∫ exp(ixz + k_n t (iz)^n) dz.
inline SignedDensitySample kernel_density(const EquationSpec& spec, double x, double t,
                                          double tol = quadrature::default_tolerance) {
    if (!(t > 0)) throw DomainError("kernel_density needs t > 0");
    const auto r = quadrature::integrate_oscillatory_ray(spec.n, x, t, spec.k, tol);
    return {x, r.value, r.error_estimate};
}

// ∫ x^r p_n(x,t) dx = (-1)^r (k_n t)^{r/n} r!/(r/n)! when n | r, else 0.
inline double kernel_moment(const EquationSpec& spec, int r, double t) {
    if (r < 0) throw DomainError("moment order must be nonnegative");
    if (!(t > 0)) throw DomainError("kernel_moment needs t > 0");
    if (r % spec.n != 0) return 0.0;
    const int j = r / spec.n;
    const double sign = ((r % 2 == 0) ? 1.0 : -1.0) * ((spec.k == -1 && j % 2 == 1) ? -1.0 : 1.0);
    return sign * std::exp(j * std::log(t) + std::lgamma(r + 1.0) - std::lgamma(j + 1.0));
}

// d^m/ds^m Φ_n(x,s), where Φ_n(x,s) = ∓(1/n) s^{1/n-1} Σ θ_k e^{θ_k s^{1/n} x}
// (I-roots with minus for x > 0, J-roots with plus for x <= 0).
inline double kernel_laplace_derivative(const EquationSpec& spec, double x, double s, int m) {
    if (!(s > 0)) throw DomainError("kernel_laplace needs s > 0");
    if (m < 0) throw DomainError("derivative order must be nonnegative");
    const RootSystem rs = root_system(spec);
    const int n = spec.n;
    const double inv_n = 1.0 / n;
    const double p0 = inv_n - 1.0;
    const double root_s = std::pow(s, inv_n);
    const auto& set = x > 0 ? rs.I : rs.J;
    const double outer = (x > 0 ? -1.0 : 1.0) * inv_n;
    std::complex<double> total = 0.0;
    for (std::size_t idx : set) {
        const std::complex<double> th = rs.roots[idx];
        const std::complex<double> b = th * x;
        // coefficient a_j multiplies s^{p0 - step + j/n} e^{b s^{1/n}}
        std::vector<std::complex<double>> a{outer * th};
        for (int step = 0; step < m; ++step) {
            std::vector<std::complex<double>> next(a.size() + 1, 0.0);
            for (std::size_t j = 0; j < a.size(); ++j) {
                next[j] += a[j] * (p0 - step + static_cast<double>(j) * inv_n);
                next[j + 1] += a[j] * (b * inv_n);
            }
            a.swap(next);
        }
        const std::complex<double> ex = std::exp(b * root_s);
        for (std::size_t j = 0; j < a.size(); ++j)
            total += a[j] * std::pow(s, p0 - m + static_cast<double>(j) * inv_n) * ex;
    }
    return total.real();
}

inline double kernel_laplace(const EquationSpec& spec, double x, double s) {
    return kernel_laplace_derivative(spec, x, s, 0);
}

// p_n(x,t) = t^{-1/n} P(x t^{-1/n}) with P = p_n(·,1) held as a Chebyshev
// expansion on [-Y, Y]; arguments outside fall back to direct quadrature.
class KernelProfile {
public:
    explicit KernelProfile(const EquationSpec& spec, double half_width = 24.0, double tol = 1e-14)
        : spec_(spec), Y_(half_width) {
        for (int N = 64; N <= 2048; N *= 2) {
            build(N, tol);
            const double cmax = max_abs_coef();
            const std::size_t L = coef_.size();
            const double tail = std::fabs(coef_[L - 1]) + std::fabs(coef_[L - 2]) + std::fabs(coef_[L - 3]);
            if (tail < 1e-15 * std::max(cmax, 1.0)) break;
        }
        // Drop negligible trailing coefficients.
        while (coef_.size() > 8 && std::fabs(coef_.back()) < 1e-17) coef_.pop_back();
    }

    const EquationSpec& spec() const { return spec_; }
    double half_width() const { return Y_; }
    std::size_t degree() const { return coef_.size(); }

    // P(y) = p_n(y, 1).
    double unit(double y) const {
        if (std::fabs(y) > Y_) return kernel_density(spec_, y, 1.0, 1e-15).value;
        const double s = y / Y_;
        double b1 = 0.0, b2 = 0.0;
        for (std::size_t j = coef_.size(); j-- > 1;) {
            const double b0 = 2.0 * s * b1 - b2 + coef_[j];
            b2 = b1;
            b1 = b0;
        }
        return s * b1 - b2 + 0.5 * coef_[0];
    }

    double operator()(double x, double t) const {
        const double sc = std::pow(t, -1.0 / spec_.n);
        return sc * unit(x * sc);
    }

private:
    EquationSpec spec_;
    double Y_;
    std::vector<double> coef_;

    void build(int N, double tol) {
        std::vector<double> fv(N);
        for (int j = 0; j < N; ++j) {
            const double y = Y_ * std::cos(pi * (j + 0.5) / N);
            fv[j] = kernel_density(spec_, y, 1.0, tol).value;
        }
        coef_.assign(N, 0.0);
        for (int k = 0; k < N; ++k) {
            double c = 0.0;
            for (int j = 0; j < N; ++j) c += fv[j] * std::cos(pi * k * (j + 0.5) / N);
            coef_[k] = 2.0 * c / N;
        }
    }

    double max_abs_coef() const {
        double m = 0.0;
        for (double c : coef_) m = std::max(m, std::fabs(c));
        return m;
    }
};

} // namespace fracheat::kernel
