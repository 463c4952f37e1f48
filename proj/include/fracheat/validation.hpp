#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "detail/parallel.hpp"
#include "errors.hpp"
#include "kernel.hpp"
#include "montecarlo.hpp"
#include "quadrature.hpp"
#include "solver.hpp"
#include "specfun.hpp"
#include "timechange.hpp"

namespace fracheat::validation {

using specfun::pi;

struct ReportRow {
    std::string name;
    std::string anchor;
    double discrepancy = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
};

struct ValidationReport {
    std::vector<ReportRow> rows;

    std::size_t passed() const {
        std::size_t c = 0;
        for (const auto& r : rows) c += r.pass ? 1 : 0;
        return c;
    }
    std::size_t failed() const { return rows.size() - passed(); }
    bool pass() const { return failed() == 0; }
};

struct SuiteOptions {
    bool quick = false;
    unsigned threads = 1;
    std::uint64_t seed = 20240601;
    std::map<std::string, double> tolerance_overrides;  // by row name
};

class Suite {
public:
    explicit Suite(SuiteOptions opt) : opt_(std::move(opt)) {}

    const SuiteOptions& options() const { return opt_; }
    const ValidationReport& report() const { return report_; }

    void add(std::string name, std::string anchor, double discrepancy, double tolerance, std::string note = {}) {
        const auto it = opt_.tolerance_overrides.find(name);
        if (it != opt_.tolerance_overrides.end()) tolerance = it->second;
        const bool ok = std::isfinite(discrepancy) && discrepancy <= tolerance;
        report_.rows.push_back({std::move(name), std::move(anchor), discrepancy, tolerance, ok, std::move(note)});
    }

    // Runs `body`; an exception becomes a failing row under `name`.
    void guarded(const std::string& name, const std::string& anchor, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::exception& e) {
            add(name, anchor, std::numeric_limits<double>::infinity(), 0.0, e.what());
        }
    }

private:
    SuiteOptions opt_;
    ValidationReport report_;
};

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(3);
    os << v;
    return os.str();
}

inline void alpha_half_collapse(Suite& s) {
    s.guarded("alpha-half-collapse", "Gaussian form of the time density at alpha = 1/2", [&] {
        double worst = 0.0;
        for (double t : {0.5, 1.0, 2.0})
            for (double u : {0.1, 0.5, 1.0, 2.0, 3.0}) {
                const double ex = std::exp(-u * u / (4.0 * t)) / std::sqrt(pi * t);
                for (double v : {timechange::time_density_wright(0.5, u, t), timechange::time_density_frac_integral(0.5, u, t),
                                 timechange::time_density_stable(0.5, u, t), timechange::time_density_product(2, u, t)})
                    worst = std::max(worst, std::fabs(v - ex));
            }
        s.add("alpha-half-collapse", "Gaussian form of the time density at alpha = 1/2", worst, 1e-8,
              "4 routes x 15 (u,t) pairs");
    });
}

inline void time_moments(Suite& s) {
    const auto t0 = std::chrono::steady_clock::now();
    for (double a : {1.0 / 3.0, 0.4, 0.5, 0.6, 0.75, 0.9}) {
        const std::string name = "time-moments alpha=" + fmt(a);
        s.guarded(name, "moments of any order of the random time", [&] {
            const timechange::TimeDensity d(timechange::make_time_change_law(a, timechange::TimeRoute::wright, 1.0));
            double worst = 0.0;
            for (double delta : {0.5, 1.0, 2.0, 3.0}) {
                const double q = timechange::time_density_moment_quadrature(d, delta).value;
                worst = std::max(worst, std::fabs(q / timechange::time_moment(a, delta, 1.0) - 1.0));
            }
            s.add(name, "moments of any order of the random time", worst, 1e-5, "relative, delta in {0.5,1,2,3}");
        });
    }
    s.add("time-moments runtime", "moments of any order of the random time", seconds_since(t0), 60.0, "seconds");
}

inline void cross_route(Suite& s) {
    const int points = s.options().quick ? 17 : 81;
    const std::vector<double> alphas = s.options().quick ? std::vector<double>{0.4, 0.9}
                                                         : std::vector<double>{0.4, 0.5, 0.7, 0.9};
    for (int n : {2, 3, 4})
        for (double a : alphas) {
            const std::string name = "cross-route n=" + std::to_string(n) + " alpha=" + fmt(a);
            const std::string anchor = "subordination against Mittag-Leffler Fourier inversion";
            s.guarded(name, anchor, [&] {
                const auto spec = kernel::make_equation_spec(n);
                const solver::SubordinationEvaluator sub(spec, a, 1.0);
                const solver::FourierMLEvaluator four(spec, a);
                std::vector<double> diff(points);
                detail::parallel_for(points, s.options().threads, [&](std::size_t i) {
                    const double x = -4.0 + 8.0 * i / (points - 1);
                    diff[i] = std::fabs(sub(x).value - four(x, 1.0).value);
                });
                s.add(name, anchor, *std::max_element(diff.begin(), diff.end()), 1e-5,
                      std::to_string(points) + " points on [-4,4], t = 1");
            });
        }
}

inline void wright_closed_form(Suite& s) {
    const std::string anchor = "n = 2 solution as a Wright function";
    const std::vector<double> alphas = s.options().quick ? std::vector<double>{0.5} : std::vector<double>{0.3, 0.5, 0.7, 0.9};
    for (double a : alphas) {
        const std::string name = "wright-closed-form alpha=" + fmt(a);
        s.guarded(name, anchor, [&] {
            const auto spec = kernel::make_equation_spec(2);
            const solver::SubordinationEvaluator sub(spec, a, 1.0);
            const solver::FourierMLEvaluator four(spec, a);
            double worst = 0.0;
            for (int i = 0; i <= 60; ++i) {
                const double x = -3.0 + 0.1 * i;
                const double w = solver::wright_closed_form_n2(a, x, 1.0);
                worst = std::max({worst, std::fabs(sub(x).value - w), std::fabs(four(x, 1.0).value - w)});
            }
            s.add(name, anchor, worst, 1e-6, "both routes, 61 points on [-3,3], t = 1");
        });
    }
    s.guarded("wright-closed-form u(0,1)", anchor, [&] {
        const auto spec = kernel::make_equation_spec(2);
        const double exact = 1.0 / (2.0 * std::tgamma(0.75));
        const double a = solver::SubordinationEvaluator(spec, 0.5, 1.0)(0.0).value;
        const double b = solver::FourierMLEvaluator(spec, 0.5)(0.0, 1.0).value;
        s.add("wright-closed-form u(0,1)", anchor, std::max(std::fabs(a - exact), std::fabs(b - exact)), 1e-6,
              "alpha = 1/2 against 1/(2 Gamma(3/4))");
    });
}

struct LaplaceTuple {
    int n;
    double alpha, x, s;
};

inline const std::vector<LaplaceTuple>& laplace_tuples() {
    static const std::vector<LaplaceTuple> v = {
        {2, 1.0, 1.0, 1.0},  {2, 0.5, 0.5, 1.0}, {3, 0.7, 1.0, 2.0},  {3, 0.7, -1.0, 2.0},
        {4, 0.8, 0.5, 1.0},  {3, 1.0, -1.0, 1.0}, {4, 1.0, 0.7, 2.0},  {2, 0.3, 0.0, 1.0},
        {3, 0.4, 0.8, 0.5},  {4, 0.5, -1.5, 3.0}, {5, 0.6, 1.0, 1.0},  {3, 0.9, 2.0, 1.0},
    };
    return v;
}

inline void laplace_relation(Suite& s) {
    const auto& all = laplace_tuples();
    const std::size_t count = s.options().quick ? 6 : all.size();
    for (std::size_t i = 0; i < count; ++i) {
        const auto& c = all[i];
        const std::string name = "laplace n=" + std::to_string(c.n) + " alpha=" + fmt(c.alpha) + " x=" + fmt(c.x) +
                                 " s=" + fmt(c.s);
        const std::string anchor = "Laplace transform in t equals s^(alpha-1) Phi_n(x, s^alpha)";
        s.guarded(name, anchor, [&] {
            s.add(name, anchor, solver::laplace_relation_check(kernel::make_equation_spec(c.n), c.alpha, c.x, c.s), 1e-4);
        });
    }
}

inline void solution_moments(Suite& s) {
    const std::string anchor = "moments of the fundamental solution";
    const std::vector<double> alphas = s.options().quick ? std::vector<double>{0.5} : std::vector<double>{0.5, 0.8};
    const std::vector<int> orders = s.options().quick ? std::vector<int>{2, 4} : std::vector<int>{2, 3, 4};
    for (int n : orders)
        for (double a : alphas) {
            const std::string base = "solution-moments n=" + std::to_string(n) + " alpha=" + fmt(a);
            s.guarded(base, anchor, [&] {
                const auto ev = solver::validation_evaluator(kernel::make_equation_spec(n), a);
                double rel = 0.0, zero = 0.0;
                for (int r : {n, 2 * n}) {
                    const auto m = solver::numeric_moment(ev, r, 1.0);
                    rel = std::max(rel, std::fabs(m.value / solver::solution_moment(ev.spec(), a, r, 1.0) - 1.0));
                }
                for (int r : {1, n + 1}) zero = std::max(zero, std::fabs(solver::numeric_moment(ev, r, 1.0).value));
                s.add(base + " r=n,2n", anchor, rel, 1e-3, "relative");
                s.add(base + " r=1,n+1", anchor, zero, 1e-4, "absolute, vanishing orders");
            });
        }
}

inline void root_invariants(Suite& s) {
    const std::string anchor = "roots of k_n and the Vandermonde system";
    s.guarded("vandermonde", anchor, [&] {
        double worst = 0.0;
        for (int n = 2; n <= 8; ++n)
            for (int sign : {1, -1}) {
                const auto spec = kernel::make_equation_spec(n, sign);
                const auto rs = kernel::root_system(spec);
                for (const auto& th : rs.roots) {
                    worst = std::max(worst, std::fabs(std::abs(th) - 1.0));
                    worst = std::max(worst, std::abs(std::pow(th, n) - static_cast<double>(spec.k)));
                }
                for (int j = 0; j < n; ++j) {
                    std::complex<double> acc = 0.0;
                    for (int k = 0; k < n; ++k) acc += rs.z[k] * std::pow(rs.roots[k], j);
                    const double target = j == n - 1 ? -spec.k : 0.0;
                    worst = std::max(worst, std::abs(acc - target));
                }
                std::size_t nonzero = 0;
                for (const auto& th : rs.roots) nonzero += th.real() != 0.0 ? 1 : 0;
                if (nonzero != rs.I.size() + rs.J.size()) worst = std::numeric_limits<double>::infinity();
            }
        s.add("vandermonde", anchor, worst, 1e-12, "n = 2..8, both odd signs");
    });
}

inline void monte_carlo(Suite& s) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t N = s.options().quick ? 100000 : 1000000;
    const unsigned th = s.options().threads;
    const std::string anchor = "random time as a product of independent G_j";
    for (int m : {2, 3, 4}) {
        const std::string base = "monte-carlo m=" + std::to_string(m);
        s.guarded(base, anchor, [&] {
            const double a = 1.0 / m;
            const auto batch = montecarlo::sample_time_product(m, 1.0, {s.options().seed, static_cast<std::uint64_t>(m)}, N, th);
            const timechange::TimeDensity d(timechange::make_time_change_law(a, timechange::TimeRoute::wright, 1.0));
            const montecarlo::TabulatedCdf cdf([&](double u) { return d(u); }, 0.0, d.cutoff());
            const auto ks = montecarlo::ks_test(batch.values, cdf);
            s.add(base + " KS", anchor, ks.statistic, ks.critical, "5% level, p = " + fmt(ks.p_value));
            for (double delta : {1.0, 2.0}) {
                const auto e = montecarlo::empirical_moment(batch.values, delta);
                const double z = (e.mean - timechange::time_moment(a, delta, 1.0)) / e.standard_error;
                s.add(base + " moment delta=" + fmt(delta), anchor, std::fabs(z), 3.0, "standard errors");
            }
        });
    }
    s.add("monte-carlo runtime", anchor, seconds_since(t0), 120.0, "seconds");
}

struct CaputoCase {
    int n;
    double alpha, x;
};

// x sits where u(x,.) is negligible over the first coarse time cell, so the
// initial layer is resolved and the scheme is in its convergent regime.
inline const std::vector<CaputoCase>& caputo_cases() {
    static const std::vector<CaputoCase> v = {{2, 0.5, 3.0}, {2, 0.8, 3.0}, {4, 0.8, 8.0}};
    return v;
}

inline void caputo_convergence(Suite& s) {
    for (const auto& c : caputo_cases()) {
        const std::string name = "caputo n=" + std::to_string(c.n) + " alpha=" + fmt(c.alpha);
        const std::string anchor = "time-fractional equation in the Caputo sense";
        s.guarded(name, anchor, [&] {
            const auto spec = kernel::make_equation_spec(c.n);
            const auto ev = solver::validation_evaluator(spec, c.alpha);
            auto u = [&](double x, double t) { return ev(x, t).value; };
            double res[3];
            for (int l = 0; l < 3; ++l)
                res[l] = solver::caputo_residual(spec, c.alpha, c.x, {1.0, 64 << l}, 0.08 / (1 << l), u);
            const double ratio = std::max(res[1] / res[0], res[2] / res[1]);
            s.add(name, anchor, ratio, 1.0 - 1e-9,
                  "largest ratio over two joint doublings; residuals " + fmt(res[0]) + ", " + fmt(res[1]) + ", " +
                      fmt(res[2]));
        });
    }
}

inline void subordination_identity(Suite& s) {
    const std::string anchor = "Gaussian subordination integral used for the n = 2 closed form";
    s.guarded("subordination-identity", anchor, [&] {
        const double xs[8] = {0.0, 0.5, -1.0, 2.0, 0.3, -3.0, 1.5, 4.0};
        const double ys[8] = {1.0, 2.0, 0.5, 1.0, 3.0, 0.7, 1.2, 0.1};
        const double ts[8] = {1.0, 0.5, 2.0, 1.0, 1.5, 3.0, 0.2, 1.0};
        const double as[8] = {0.5, 0.3, 0.7, 0.9, 0.1, 0.6, 0.45, 0.99};
        double worst = 0.0;
        for (int i = 0; i < 8; ++i) {
            const double q = solver::subordination_identity_integral(xs[i], ys[i], ts[i], as[i]).value;
            worst = std::max(worst, std::fabs(q - solver::subordination_identity_closed_form(xs[i], ys[i], ts[i], as[i])));
        }
        s.add("subordination-identity", anchor, worst, 1e-8, "8 (x,y,t,alpha) tuples");
    });
}

// Printed values and closed forms attached to individual operations.
inline void reference_values(Suite& s) {
    const double gauss = std::exp(-0.25) / std::sqrt(pi);  // e^{-u²/4t}/√(πt) at u = t = 1
    auto spot = [&](const std::string& name, const std::string& anchor, const std::function<double()>& value,
                    double expected, double tol) {
        s.guarded(name, anchor, [&] { s.add(name, anchor, std::fabs(value() - expected), tol); });
    };

    spot("wright_w(-1; -1/2, 1/2)", "Gaussian form of the time density at alpha = 1/2",
         [] { return specfun::wright_w(-1.0, {-0.5, 0.5}); }, gauss, 1e-12);
    spot("stable one-sided alpha=1/2", "Levy law of the one-sided stable density",
         [] { return specfun::stable_one_sided_density(1.0, {0.5, 1.0}); }, gauss / 2.0, 1e-10);
    spot("stable spectrally negative u=0", "spectrally negative law of index 2 is N(0,2t)",
         [] { return specfun::stable_spec_neg_density(0.0, {0.5, 1.0}); }, 1.0 / std::sqrt(4.0 * pi), 1e-10);
    spot("stable spectrally negative u=2", "spectrally negative law of index 2 is N(0,2t)",
         [] { return specfun::stable_spec_neg_density(2.0, {0.5, 1.0}); }, std::exp(-1.0) / std::sqrt(4.0 * pi), 1e-10);

    spot("adaptive quadrature first moment", "moments of any order of the random time", [] {
        auto f = [](double u) { return u * timechange::time_density_wright(0.5, u, 1.0); };
        // Series guard at alpha = 1/2 sits near u = 10, where the tail is ~2e-11.
        const double top = 0.999 * specfun::wright_guard({-0.5, 0.5});
        return quadrature::integrate_adaptive(f, 0.0, top, quadrature::Options{1e-12, 1e-12}).value;
    }, 2.0 / std::sqrt(pi), 1e-9);
    spot("semi-infinite second moment", "moments of any order of the random time", [] {
        auto f = [](double u) { return u * u * std::exp(-u * u / 4.0) / std::sqrt(pi); };
        return quadrature::integrate_semi_infinite(f, 0.0, quadrature::DecayHint::exponential(2.0),
                                                   quadrature::Options{1e-12, 1e-12})
            .value;
    }, 2.0, 1e-8);
    spot("Gauss-Jacobi Beta(1/2,1/2)", "normalisation of the fractional-integral density", [] {
        auto f = [](double w) { return w > 0 ? std::pow(w, -0.5) : 0.0; };
        return quadrature::integrate_jacobi_singular(f, 0.0, 1.0, {-0.5, quadrature::JacobiWeight::Endpoint::right},
                                                     quadrature::Options{1e-10, 1e-10})
            .value;
    }, pi, 1e-6);
    spot("Gauss-Jacobi Levy integral", "fractional integral of the Levy density", [] {
        auto f = [](double w) { return w > 0 ? std::exp(-1.0 / (4.0 * w)) / (2.0 * std::sqrt(pi * w * w * w)) : 0.0; };
        return quadrature::integrate_jacobi_singular(f, 0.0, 1.0, {-0.5, quadrature::JacobiWeight::Endpoint::right},
                                                     quadrature::Options{1e-12, 1e-12})
                   .value /
               std::sqrt(pi);
    }, gauss, 1e-9);
    spot("oscillatory ray n=2 x=0", "Brownian motion with variance 2t",
         [] { return quadrature::integrate_oscillatory_ray(2, 0.0, 1.0, 1, 1e-12).value; }, 1.0 / std::sqrt(4.0 * pi),
         1e-10);

    s.guarded("k_n rule", "k_n = (-1)^(q+1) for n = 2q and +-1 for odd n", [&] {
        double bad = 0.0;
        bad += std::fabs(kernel::make_equation_spec(2).k - 1);
        bad += std::fabs(kernel::make_equation_spec(4).k + 1);
        bad += std::fabs(kernel::make_equation_spec(6).k - 1);
        bad += std::fabs(kernel::make_equation_spec(3, 1).k - 1);
        bad += std::fabs(kernel::make_equation_spec(3, -1).k + 1);
        s.add("k_n rule", "k_n = (-1)^(q+1) for n = 2q and +-1 for odd n", bad, 0.0);
    });
    s.guarded("root systems n=2,3,4", "n-th roots of k_n", [&] {
        double worst = 0.0;
        auto cis = [](double a) { return std::polar(1.0, a); };
        const auto r2 = kernel::root_system(kernel::make_equation_spec(2));
        worst = std::max({worst, std::abs(r2.roots[0] - 1.0), std::abs(r2.roots[1] + 1.0)});
        if (r2.I != std::vector<std::size_t>{1} || r2.J != std::vector<std::size_t>{0}) worst = 1.0;
        const auto r3 = kernel::root_system(kernel::make_equation_spec(3, 1));
        for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(r3.roots[k] - cis(2.0 * k * pi / 3.0)));
        if (r3.I != std::vector<std::size_t>{1, 2}) worst = 1.0;
        const auto r4 = kernel::root_system(kernel::make_equation_spec(4));
        for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(r4.roots[k] - cis((2.0 * k + 1.0) * pi / 4.0)));
        if (r4.I.size() != 2 || r4.J.size() != 2) worst = 1.0;
        s.add("root systems n=2,3,4", "n-th roots of k_n", worst, 1e-15);
    });
    spot("kernel n=2 x=0", "Brownian motion with variance 2t",
         [] { return kernel::kernel_density(kernel::make_equation_spec(2), 0.0, 1.0, 1e-12).value; },
         1.0 / std::sqrt(4.0 * pi), 1e-10);
    spot("kernel moment n=3 r=3", "moments of the pseudoprocess",
         [] { return kernel::kernel_moment(kernel::make_equation_spec(3, 1), 3, 1.0); }, -6.0, 1e-12);
    spot("kernel moment n=2 r=2 t=1.5", "moments of the pseudoprocess",
         [] { return kernel::kernel_moment(kernel::make_equation_spec(2), 2, 1.5); }, 3.0, 1e-12);
    spot("kernel moment n=3 r=2", "moments of the pseudoprocess",
         [] { return kernel::kernel_moment(kernel::make_equation_spec(3, 1), 2, 1.0); }, 0.0, 0.0);
    spot("kernel Laplace continuity n=3", "continuity of the Laplace transform at x = 0", [] {
        const auto spec = kernel::make_equation_spec(3, 1);
        return kernel::kernel_laplace(spec, 1e-300, 1.0) - kernel::kernel_laplace(spec, 0.0, 1.0);
    }, 0.0, 1e-12);

    spot("time density wright u=1", "Gaussian form of the time density at alpha = 1/2",
         [] { return timechange::time_density_wright(0.5, 1.0, 1.0); }, gauss, 1e-12);
    spot("time density wright u=0", "Gaussian form of the time density at alpha = 1/2",
         [] { return timechange::time_density_wright(0.5, 0.0, 1.0); }, 1.0 / std::sqrt(pi), 1e-12);
    for (double a : {0.3, 0.5, 0.7}) {
        spot("time density mass alpha=" + fmt(a), "the time density integrates to one", [a] {
            const timechange::TimeDensity d(timechange::make_time_change_law(a, timechange::TimeRoute::wright, 1.0));
            return timechange::time_density_moment_quadrature(d, 0.0).value;
        }, 1.0, 1e-8);
    }
    spot("frac-integral density u=1", "fractional-integral route at alpha = 1/2",
         [] { return timechange::time_density_frac_integral(0.5, 1.0, 1.0); }, gauss, 1e-9);
    spot("frac-integral mass alpha=0.4", "normalisation of the fractional-integral density", [] {
        auto f = [](double u) { return timechange::time_density_frac_integral(0.4, u, 1.0, 1e-12); };
        std::vector<double> pts{1e-9, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
        const double head = 1e-9 * timechange::time_density_wright(0.4, 0.0, 1.0);
        return head + quadrature::integrate_adaptive_points(f, pts, quadrature::Options{1e-10, 1e-10}).value;
    }, 1.0, 1e-6);
    spot("stable route u=1", "stable representation at alpha = 1/2",
         [] { return timechange::time_density_stable(0.5, 1.0, 1.0); }, gauss, 1e-10);
    spot("stable route first moment alpha=0.9 t=2", "moments of any order of the random time", [] {
        const timechange::TimeDensity d(timechange::make_time_change_law(0.9, timechange::TimeRoute::stable, 2.0));
        return timechange::time_density_moment_quadrature(d, 1.0).value;
    }, timechange::time_moment(0.9, 1.0, 2.0), 1e-6);
    spot("G_1 density m=2", "law of G_j", [] { return timechange::gj_density({2, 1, 1.0}, 1.0); }, gauss, 1e-12);
    spot("G_j joint density m=3", "joint law of the G_j by the Gamma multiplication formula", [] {
        return timechange::gj_density({3, 1, 1.0}, 1.0) * timechange::gj_density({3, 2, 1.0}, 1.0);
    }, 3.0 / (2.0 * pi) * std::exp(-2.0 / std::sqrt(27.0)), 1e-12);
    spot("product route m=2 u=1", "product of G_j at m = 2",
         [] { return timechange::time_density_product(2, 1.0, 1.0); }, gauss, 1e-9);
    spot("time moment delta=0", "moments of any order of the random time",
         [] { return timechange::time_moment(0.37, 0.0, 1.7); }, 1.0, 1e-15);
    spot("time moment alpha=1/2 delta=1", "moments of any order of the random time",
         [] { return timechange::time_moment(0.5, 1.0, 1.0); }, 2.0 / std::sqrt(pi), 1e-14);
    spot("time moment alpha=1/2 delta=2", "moments of any order of the random time",
         [] { return timechange::time_moment(0.5, 2.0, 1.0); }, 2.0, 1e-14);

    spot("alpha=1 subordination n=3", "alpha = 1 gives the pseudoprocess kernel", [] {
        const auto spec = kernel::make_equation_spec(3, 1);
        const solver::SubordinationEvaluator ev(spec, 1.0, 1.0);
        double w = 0.0;
        for (double x : {-1.0, 0.5, 2.0}) w = std::max(w, std::fabs(ev(x).value - kernel::kernel_density(spec, x, 1.0, 1e-13).value));
        return w;
    }, 0.0, 1e-10);
    spot("char fn n=2 alpha=1/2", "characteristic function of the solution for n = 2", [] {
        double w = 0.0;
        for (double b : {0.5, 1.0, 2.0}) {
            const double z = b * b;  // E_{1/2}(-z) = e^{z²} erfc(z)
            const auto c = solver::solution_char_fn(kernel::make_equation_spec(2), 0.5, b, 1.0);
            w = std::max({w, std::fabs(c.real() - std::exp(z * z) * std::erfc(z)), std::fabs(c.imag())});
        }
        return w;
    }, 0.0, 1e-9);
    spot("char fn alpha=1 n=3", "characteristic function at alpha = 1", [] {
        const auto spec = kernel::make_equation_spec(3, 1);
        double w = 0.0;
        for (double b : {0.5, 1.0, 1.3}) {
            const std::complex<double> mib(0.0, -b);
            w = std::max(w, std::abs(solver::solution_char_fn(spec, 1.0, b, 0.7) - std::exp(std::pow(mib, 3) * 0.7)));
        }
        return w;
    }, 0.0, 1e-9);
    spot("solution moment n=2 r=2 alpha=1 t=2", "variance 2t in the non-fractional case",
         [] { return solver::solution_moment(kernel::make_equation_spec(2), 1.0, 2, 2.0); }, 4.0, 1e-12);
    spot("solution moment n=4 r=4 alpha=1/2", "moments of the fundamental solution",
         [] { return solver::solution_moment(kernel::make_equation_spec(4), 0.5, 4, 1.0); }, -24.0 / std::tgamma(1.5),
         1e-12);
    spot("solution moment n=3 r=5", "moments vanish off multiples of n",
         [] { return solver::solution_moment(kernel::make_equation_spec(3, 1), 0.7, 5, 1.0); }, 0.0, 0.0);

    const std::size_t N = s.options().quick ? 100000 : 1000000;
    const unsigned th = s.options().threads;
    const std::uint64_t seed = s.options().seed;
    auto within_se = [&](const std::string& name, const std::string& anchor, const std::function<montecarlo::SampleBatch()>& draw,
                         double delta, double expected) {
        s.guarded(name, anchor, [&] {
            const auto e = montecarlo::empirical_moment(draw().values, delta);
            s.add(name, anchor, std::fabs(e.mean - expected) / e.standard_error, 3.0, "standard errors");
        });
    };
    within_se("G_1 sample mean m=2", "law of G_j",
              [&] { return montecarlo::sample_gj({2, 1, 1.0}, {seed, 101}, N, th); }, 1.0, 2.0 / std::sqrt(pi));
    within_se("product sample mean m=4 t=2", "random time as a product of independent G_j",
              [&] { return montecarlo::sample_time_product(4, 2.0, {seed, 102}, N, th); }, 1.0,
              timechange::time_moment(0.25, 1.0, 2.0));
    within_se("reflecting BM second moment", "reflecting Brownian motion as the time at alpha = 1/2",
              [&] { return montecarlo::sample_reflecting_bm(1.0, {seed, 103}, N, th); }, 2.0, 2.0);
    within_se("composed BM second moment", "solution moments for n = 2",
              [&] { return montecarlo::sample_composed_bm(0.5, 1.0, {seed, 104}, N, th); }, 2.0, 4.0 / std::sqrt(pi));
    s.guarded("two-sample KS m=2", "two representations of the time at alpha = 1/2", [&] {
        const auto a = montecarlo::sample_time_product(2, 1.0, {seed, 105}, 100000, th);
        const auto b = montecarlo::sample_reflecting_bm(1.0, {seed, 106}, 100000, th);
        const auto ks = montecarlo::two_sample_ks(a.values, b.values);
        s.add("two-sample KS m=2", "two representations of the time at alpha = 1/2", ks.statistic, ks.critical,
              "p = " + fmt(ks.p_value));
    });
    s.guarded("composed BM chi-square alpha=1/3", "Brownian motion at the random time", [&] {
        const auto batch = montecarlo::sample_composed_bm(1.0 / 3.0, 1.0, {seed, 107}, N, th);
        const solver::SubordinationEvaluator ev(kernel::make_equation_spec(2), 1.0 / 3.0, 1.0);
        std::vector<double> edges;
        for (int i = 0; i <= 62; ++i) edges.push_back(-6.0 + 12.0 * i / 62.0);
        std::vector<double> inner(62);
        detail::parallel_for(62, th, [&](std::size_t i) {
            inner[i] = quadrature::integrate_adaptive([&](double x) { return ev(x).value; }, edges[i], edges[i + 1],
                                                      quadrature::Options{1e-12, 1e-10})
                           .value;
        });
        double mass = 0.0;
        for (double v : inner) mass += v;
        std::vector<double> probs{(1.0 - mass) / 2.0};
        probs.insert(probs.end(), inner.begin(), inner.end());
        probs.push_back((1.0 - mass) / 2.0);
        const auto cs = montecarlo::chi_square_test(batch.values, edges, probs);
        const double crit = boost::math::quantile(boost::math::chi_squared(cs.dof), 0.95);
        s.add("composed BM chi-square alpha=1/3", "Brownian motion at the random time", cs.statistic, crit,
              "64 bins, p = " + fmt(cs.p_value));
    });
}

inline ValidationReport run_suite(const SuiteOptions& opt) {
    Suite s(opt);
    alpha_half_collapse(s);
    time_moments(s);
    cross_route(s);
    wright_closed_form(s);
    laplace_relation(s);
    solution_moments(s);
    root_invariants(s);
    monte_carlo(s);
    caputo_convergence(s);
    subordination_identity(s);
    reference_values(s);
    return s.report();
}

inline std::string csv_field(const std::string& v) {
    if (v.find_first_of(",\"\n") == std::string::npos) return v;
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline void write_csv(std::ostream& os, const ValidationReport& r) {
    std::ostringstream line;
    line.imbue(std::locale::classic());
    line.precision(9);
    line << "name,anchor,discrepancy,tolerance,pass,note\n";
    for (const auto& row : r.rows)
        line << csv_field(row.name) << ',' << csv_field(row.anchor) << ',' << row.discrepancy << ',' << row.tolerance
             << ',' << (row.pass ? "true" : "false") << ',' << csv_field(row.note) << '\n';
    os << line.str();
}

inline void write_summary(std::ostream& os, const ValidationReport& r) {
    std::ostringstream out;
    out.imbue(std::locale::classic());
    out.precision(3);
    for (const auto& row : r.rows)
        out << (row.pass ? "PASS " : "FAIL ") << row.name << "  discrepancy " << row.discrepancy << " (tol "
            << row.tolerance << ")" << (row.note.empty() ? "" : "  " + row.note) << '\n';
    out << r.passed() << " passed, " << r.failed() << " failed\n";
    os << out.str();
}

} // namespace fracheat::validation
