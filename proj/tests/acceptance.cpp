// Acceptance harness: one PASS/FAIL line per criterion, tolerances fixed here.
#include <fracheat/kernel.hpp>
#include <fracheat/montecarlo.hpp>
#include <fracheat/solver.hpp>
#include <fracheat/timechange.hpp>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace fracheat;
using specfun::pi;
using big = boost::multiprecision::cpp_bin_float_50;

struct Outcome {
    double measured;
    double tolerance;
    std::string detail;
};

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Γ(1+δ) t^{αδ} / Γ(1+αδ), computed here in 50 digits.
double moment_oracle(double alpha, double delta, double t) {
    return static_cast<double>(boost::math::tgamma(1 + big(delta)) * pow(big(t), big(alpha) * big(delta)) /
                               boost::math::tgamma(1 + big(alpha) * big(delta)));
}

// Series of (1/2t^{α/2}) W(-|x|/t^{α/2}; -α/2, 1-α/2) in 50 digits.
double n2_oracle(double alpha, double x, double t) {
    const big sc = pow(big(t), big(alpha) / 2);
    const big X = -abs(big(x)) / sc;
    big sum = 0, term = 1;
    for (int k = 0; k < 400; ++k) {
        if (k > 0) term *= X / k;
        const big arg = 1 - big(alpha) / 2 * (k + 1);
        if (!(arg <= 0 && arg == floor(arg))) sum += term / boost::math::tgamma(arg);
        if (k > 30 && abs(term) < big(1e-45)) break;
    }
    return static_cast<double>(sum / (2 * sc));
}

Outcome collapse() {
    double worst = 0.0;
    int pairs = 0;
    for (double t : {0.5, 1.0, 2.0})
        for (double u : {0.1, 0.5, 1.0, 2.0, 3.0}) {
            ++pairs;
            const double ex = std::exp(-u * u / (4.0 * t)) / std::sqrt(pi * t);
            for (double v : {timechange::time_density_wright(0.5, u, t), timechange::time_density_frac_integral(0.5, u, t),
                             timechange::time_density_stable(0.5, u, t), timechange::time_density_product(2, u, t)})
                worst = std::max(worst, std::fabs(v - ex));
        }
    return {worst, 1e-8, std::to_string(pairs) + " (u,t) pairs x 4 routes, max abs error"};
}

Outcome time_moments() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (double a : {1.0 / 3.0, 0.4, 0.5, 0.6, 0.75, 0.9}) {
        const timechange::TimeDensity d(timechange::make_time_change_law(a, timechange::TimeRoute::wright, 1.0));
        for (double delta : {0.5, 1.0, 2.0, 3.0})
            worst = std::max(worst, std::fabs(timechange::time_density_moment_quadrature(d, delta).value /
                                                  moment_oracle(a, delta, 1.0) - 1.0));
    }
    const double secs = elapsed(t0);
    if (secs >= 60.0) return {secs, 60.0, "runtime limit exceeded (seconds)"};
    return {worst, 1e-5, "max relative error, runtime " + sci(secs) + " s"};
}

Outcome cross_route() {
    std::vector<double> xs;
    for (int i = 0; i <= 80; ++i) xs.push_back(-4.0 + 0.1 * i);
    double worst = 0.0;
    for (int n : {2, 3, 4})
        for (double a : {0.4, 0.5, 0.7, 0.9}) {
            solver::SolutionRequest req;
            req.spec = kernel::make_equation_spec(n);
            req.alpha = a;
            req.x_grid = xs;
            req.threads = workers();
            req.route = solver::SolveRoute::subordination;
            const auto s = solver::solve(req);
            req.route = solver::SolveRoute::fourier_ml;
            const auto f = solver::solve(req);
            for (std::size_t i = 0; i < xs.size(); ++i)
                worst = std::max(worst, std::fabs(s.values[i].value - f.values[i].value));
        }
    return {worst, 1e-5, "81 points on [-4,4] x 12 (n,alpha), max abs difference"};
}

Outcome wright_n2() {
    std::vector<double> xs;
    for (int i = 0; i <= 60; ++i) xs.push_back(-3.0 + 0.1 * i);
    double worst = 0.0;
    for (double a : {0.3, 0.5, 0.7, 0.9})
        for (auto r : {solver::SolveRoute::subordination, solver::SolveRoute::fourier_ml}) {
            solver::SolutionRequest req;
            req.alpha = a;
            req.x_grid = xs;
            req.route = r;
            req.threads = workers();
            const auto f = solver::solve(req);
            for (std::size_t i = 0; i < xs.size(); ++i) worst = std::max(worst, std::fabs(f.values[i].value - n2_oracle(a, xs[i], 1.0)));
        }
    const double spot = static_cast<double>(1 / (2 * boost::math::tgamma(big(3) / 4)));
    for (auto r : {solver::SolveRoute::subordination, solver::SolveRoute::fourier_ml}) {
        solver::SolutionRequest req;
        req.x_grid = {0.0};
        req.route = r;
        worst = std::max(worst, std::fabs(solver::solve(req).values[0].value - spot));
    }
    return {worst, 1e-6, "both routes, 61 points on [-3,3], 4 alphas, plus u(0,1) = 1/(2 Gamma(3/4)) = 0.408024470"};
}

Outcome laplace() {
    struct Tuple { int n; double alpha, x, s; };
    const Tuple tuples[] = {
        {2, 1.0, 1.0, 1.0},  {2, 0.5, 0.5, 1.0}, {3, 0.7, 1.0, 2.0},  {3, 0.7, -1.0, 2.0},
        {4, 0.8, 0.5, 1.0},  {3, 1.0, -1.0, 1.0}, {4, 1.0, 0.7, 2.0},  {2, 0.3, 0.0, 1.0},
        {3, 0.4, 0.8, 0.5},  {4, 0.5, -1.5, 3.0}, {5, 0.6, 1.0, 1.0},  {3, 0.9, 2.0, 1.0},
    };
    std::vector<double> d(std::size(tuples));
    fracheat::detail::parallel_for(d.size(), workers(), [&](std::size_t i) {
        const auto& c = tuples[i];
        d[i] = solver::laplace_relation_check(kernel::make_equation_spec(c.n), c.alpha, c.x, c.s);
    });
    // At α = 1, n = 2 the transform is e^{-|x|√s}/(2√s); check the closed side independently.
    const double heat = std::exp(-1.0) / 2.0;
    const auto ev = solver::validation_evaluator(kernel::make_equation_spec(2), 1.0);
    const double closed = std::fabs(solver::laplace_relation_check(ev, 1.0, 1.0).closed_form - heat);
    return {std::max(*std::max_element(d.begin(), d.end()), closed), 1e-4, "12 (n,alpha,x,s) tuples, max abs discrepancy"};
}

Outcome solution_moments() {
    double rel = 0.0, zero = 0.0;
    for (int n : {2, 3, 4})
        for (double a : {0.5, 0.8}) {
            const auto spec = kernel::make_equation_spec(n);
            const auto ev = solver::validation_evaluator(spec, a);
            for (int r : {n, 2 * n}) {
                // (-1)^{nj} k_n^j Γ(nj+1)/Γ(αj+1) at t = 1.
                const int j = r / n;
                const double sign = ((r % 2) ? -1.0 : 1.0) * ((spec.k == -1 && j % 2) ? -1.0 : 1.0);
                const double exact = sign * std::tgamma(r + 1.0) / std::tgamma(a * j + 1.0);
                rel = std::max(rel, std::fabs(solver::numeric_moment(ev, r, 1.0).value / exact - 1.0));
            }
            for (int r : {1, n + 1}) zero = std::max(zero, std::fabs(solver::numeric_moment(ev, r, 1.0).value));
        }
    // Both parts must hold: report the worse of rel/1e-3 and zero/1e-4 on the 1e-3 scale.
    const double measured = std::max(rel, zero * 10.0);
    return {measured, 1e-3,
            "r in {n,2n}: max rel " + sci(rel) + " (tol 1e-3); r in {1,n+1}: max abs " + sci(zero) +
                " (tol 1e-4)"};
}

Outcome vandermonde() {
    double worst = 0.0;
    for (int n = 2; n <= 8; ++n)
        for (int sign : {1, -1}) {
            const auto spec = kernel::make_equation_spec(n, sign);
            const auto rs = kernel::root_system(spec);
            if (rs.roots.size() != static_cast<std::size_t>(n)) return {INFINITY, 1e-12, "wrong root count"};
            for (const auto& th : rs.roots) worst = std::max(worst, std::abs(std::pow(th, n) - double(spec.k)));
            for (int j = 0; j < n; ++j) {
                std::complex<double> acc = 0.0;
                for (int k = 0; k < n; ++k) acc += rs.z[k] * std::pow(rs.roots[k], j);
                worst = std::max(worst, std::abs(acc - (j == n - 1 ? -double(spec.k) : 0.0)));
            }
            // Distinct roots.
            for (int a = 0; a < n; ++a)
                for (int b = a + 1; b < n; ++b)
                    if (std::abs(rs.roots[a] - rs.roots[b]) < 1e-3) worst = INFINITY;
        }
    return {worst, 1e-12, "n = 2..8, both odd signs: theta^n = k_n and sum z_k theta_k^j"};
}

Outcome monte_carlo() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t N = 1000000;
    double worst_ks = 0.0, worst_z = 0.0;
    for (int m : {2, 3, 4}) {
        const double a = 1.0 / m;
        const auto b = montecarlo::sample_time_product(m, 1.0, {20240601, static_cast<std::uint64_t>(m)}, N, workers());
        // F(u) = 1 - W(-u; -α, 1), since d/dz W(z; -α, 1) = W(z; -α, 1-α).
        const double guard = 0.999 * specfun::wright_guard({-a, 1.0});
        auto cdf = [&](double u) { return u <= 0 ? 0.0 : u >= guard ? 1.0 : 1.0 - specfun::wright_w(-u, {-a, 1.0}); };
        const auto ks = montecarlo::ks_test(b.values, cdf);
        worst_ks = std::max(worst_ks, ks.statistic / ks.critical);
        for (double delta : {1.0, 2.0}) {
            const auto e = montecarlo::empirical_moment(b.values, delta);
            worst_z = std::max(worst_z, std::fabs(e.mean - moment_oracle(a, delta, 1.0)) / e.standard_error);
        }
    }
    const double secs = elapsed(t0);
    if (secs >= 120.0) return {secs, 120.0, "runtime limit exceeded (seconds)"};
    // KS ratio must stay below 1 and z below 3: normalise both to 1.
    return {std::max(worst_ks, worst_z / 3.0), 1.0,
            "N = 1e6, m = 2,3,4: max D/D_crit " + sci(worst_ks) + ", max |z| " + sci(worst_z) +
                ", runtime " + sci(secs) + " s"};
}

Outcome caputo() {
    struct Case { int n; double alpha, x; };
    double worst_ratio = 0.0;
    std::string detail;
    for (const Case c : {Case{2, 0.5, 3.0}, Case{2, 0.8, 3.0}, Case{4, 0.8, 8.0}}) {
        const auto spec = kernel::make_equation_spec(c.n);
        const auto ev = solver::validation_evaluator(spec, c.alpha);
        auto u = [&](double x, double t) { return ev(x, t).value; };
        double r[3];
        for (int l = 0; l < 3; ++l) r[l] = solver::caputo_residual(spec, c.alpha, c.x, {1.0, 64 << l}, 0.08 / (1 << l), u);
        worst_ratio = std::max({worst_ratio, r[1] / r[0], r[2] / r[1]});
        char buf[128];
        std::snprintf(buf, sizeof buf, " (%d,%.1f): %.2e %.2e %.2e;", c.n, c.alpha, r[0], r[1], r[2]);
        detail += buf;
    }
    return {worst_ratio, 1.0 - 1e-9, "largest residual ratio over two doublings;" + detail};
}

Outcome rem3() {
    const double xs[8] = {0.0, 0.5, -1.0, 2.0, 0.3, -3.0, 1.5, 4.0};
    const double ys[8] = {1.0, 2.0, 0.5, 1.0, 3.0, 0.7, 1.2, 0.1};
    const double ts[8] = {1.0, 0.5, 2.0, 1.0, 1.5, 3.0, 0.2, 1.0};
    const double as[8] = {0.5, 0.3, 0.7, 0.9, 0.1, 0.6, 0.45, 0.99};
    double worst = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double r = std::pow(ys[i] / ts[i], as[i] / 2.0);
        const double closed = std::sqrt(pi) / r * std::exp(-std::fabs(xs[i]) * r);
        worst = std::max(worst, std::fabs(solver::subordination_identity_integral(xs[i], ys[i], ts[i], as[i]).value - closed));
    }
    return {worst, 1e-8, "8 (x,y,t,alpha) tuples, max abs error"};
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {"1 alpha = 1/2 collapse of the time density", collapse},
        {"2 time-density moments", time_moments},
        {"3 subordination vs Mittag-Leffler Fourier inversion", cross_route},
        {"4 n = 2 Wright closed form", wright_n2},
        {"5 Laplace-domain relation", laplace},
        {"6 solution moments", solution_moments},
        {"7 root system and Vandermonde identities", vandermonde},
        {"8 Monte Carlo product law", monte_carlo},
        {"9 Caputo residual convergence", caputo},
        {"10 Gaussian subordination integral identity", rem3},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {INFINITY, 0.0, std::string("exception: ") + e.what()};
        }
        const bool ok = std::isfinite(o.measured) && o.measured <= o.tolerance;
        failed += ok ? 0 : 1;
        std::printf("%s  [%s] measured %.3e tol %.1e (%.1f s) %s\n", ok ? "PASS" : "FAIL", c.name, o.measured, o.tolerance,
                    elapsed(t0), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
    return failed == 0 ? 0 : 1;
}
