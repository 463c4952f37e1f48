#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "../errors.hpp"

namespace fracheat::detail {

// Piecewise Chebyshev interpolant built by bisection until each panel's
// trailing coefficients fall below abs_tol. A panel is also accepted when
// halving stopped shrinking those coefficients, which means f is at its noise
// floor there.
class PiecewiseChebyshev {
public:
    PiecewiseChebyshev() = default;

    template <class F>
    PiecewiseChebyshev(F&& f, double a, double b, double abs_tol, int degree = 32, int max_panels = 4096)
        : degree_(degree) {
        if (!(a < b)) throw DomainError("interpolation interval must be nonempty");
        struct Job {
            double lo, hi, parent_tail;
        };
        std::vector<Job> todo{{a, b, std::numeric_limits<double>::infinity()}};
        std::vector<std::pair<double, std::vector<double>>> done;
        while (!todo.empty()) {
            const Job job = todo.back();
            todo.pop_back();
            std::vector<double> c = fit(f, job.lo, job.hi);
            const double tail = std::fabs(c[degree_ - 1]) + std::fabs(c[degree_ - 2]) + std::fabs(c[degree_ - 3]);
            const bool stalled = tail > 0.25 * job.parent_tail;
            if (tail > abs_tol && !stalled && static_cast<int>(done.size() + todo.size()) < max_panels) {
                const double mid = 0.5 * (job.lo + job.hi);
                todo.push_back({mid, job.hi, tail});
                todo.push_back({job.lo, mid, tail});
                continue;
            }
            noise_ = std::max(noise_, tail);
            done.push_back({job.lo, std::move(c)});
        }
        std::sort(done.begin(), done.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
        for (auto& d : done) {
            breaks_.push_back(d.first);
            coef_.push_back(std::move(d.second));
        }
        breaks_.push_back(b);
    }

    double lower() const { return breaks_.front(); }
    double upper() const { return breaks_.back(); }
    std::size_t panels() const { return coef_.size(); }
    // Largest trailing-coefficient size among accepted panels.
    double noise() const { return noise_; }

    double operator()(double x) const {
        auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
        std::size_t i = it == breaks_.begin() ? 0 : static_cast<std::size_t>(it - breaks_.begin()) - 1;
        if (i >= coef_.size()) i = coef_.size() - 1;
        const double lo = breaks_[i], hi = breaks_[i + 1];
        const double s = (2.0 * x - lo - hi) / (hi - lo);
        const auto& c = coef_[i];
        double b1 = 0.0, b2 = 0.0;
        for (std::size_t j = c.size(); j-- > 1;) {
            const double b0 = 2.0 * s * b1 - b2 + c[j];
            b2 = b1;
            b1 = b0;
        }
        return s * b1 - b2 + 0.5 * c[0];
    }

private:
    int degree_ = 32;
    double noise_ = 0.0;
    std::vector<double> breaks_;
    std::vector<std::vector<double>> coef_;

    template <class F>
    std::vector<double> fit(F& f, double lo, double hi) const {
        constexpr double pi = 3.14159265358979323846;
        const int N = degree_;
        std::vector<double> fv(N);
        for (int j = 0; j < N; ++j) fv[j] = f(0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(pi * (j + 0.5) / N));
        std::vector<double> c(N);
        for (int k = 0; k < N; ++k) {
            double s = 0.0;
            for (int j = 0; j < N; ++j) s += fv[j] * std::cos(pi * k * (j + 0.5) / N);
            c[k] = 2.0 * s / N;
        }
        return c;
    }
};

} // namespace fracheat::detail
