#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "detail/parallel.hpp"
#include "errors.hpp"
#include "quadrature.hpp"
#include "timechange.hpp"

namespace fracheat::montecarlo {

// Samples are drawn in fixed blocks; each block owns an engine seeded from
// (seed, stream_id, block), so a batch depends only on those and the count.
struct RngStream {
    std::uint64_t seed = 1;
    std::uint64_t stream_id = 0;
};

inline constexpr std::size_t block_size = std::size_t{1} << 15;

inline std::mt19937_64 block_engine(const RngStream& rng, std::uint64_t block) {
    std::seed_seq seq{static_cast<std::uint32_t>(rng.seed), static_cast<std::uint32_t>(rng.seed >> 32),
                      static_cast<std::uint32_t>(rng.stream_id), static_cast<std::uint32_t>(rng.stream_id >> 32),
                      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32), 0x66686561u};
    return std::mt19937_64(seq);
}

struct SampleBatch {
    std::vector<double> values;
    std::string law;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

// draw(engine) produces one sample; blocks are filled independently.
template <class Draw>
SampleBatch sample_blocks(const RngStream& rng, std::size_t count, std::string law, unsigned threads, Draw&& draw) {
    if (count < 1) throw DomainError("sample count must be at least 1");
    SampleBatch b{std::vector<double>(count), std::move(law), count, rng.seed, rng.stream_id};
    const std::size_t blocks = (count + block_size - 1) / block_size;
    detail::parallel_for(blocks, threads, [&](std::size_t k) {
        std::mt19937_64 eng = block_engine(rng, k);
        const std::size_t end = std::min(count, (k + 1) * block_size);
        for (std::size_t i = k * block_size; i < end; ++i) b.values[i] = draw(eng);
    });
    return b;
}

// W = (m^m t)^{1/(m(m-1))} X^{1/m} with X ~ Gamma(j/m, 1).
inline double draw_gj(const timechange::GjLaw& law, std::mt19937_64& eng) {
    const int m = law.m;
    const double scale = std::pow(std::pow(double(m), m) * law.t, 1.0 / (m * (m - 1.0)));
    std::gamma_distribution<double> gamma(static_cast<double>(law.j) / m, 1.0);
    double x;
    do x = gamma(eng);
    while (x <= 0.0);
    return scale * std::pow(x, 1.0 / m);
}

inline std::string describe(const timechange::GjLaw& g) {
    return "G_" + std::to_string(g.j) + " (m=" + std::to_string(g.m) + ", t=" + std::to_string(g.t) + ")";
}

inline SampleBatch sample_gj(const timechange::GjLaw& law, const RngStream& rng, std::size_t count, unsigned threads = 1) {
    timechange::detail::check_gj(law);
    return sample_blocks(rng, count, describe(law), threads, [&](std::mt19937_64& e) { return draw_gj(law, e); });
}

inline double draw_time_product(int m, double t, std::mt19937_64& eng) {
    double p = 1.0;
    for (int j = 1; j < m; ++j) p *= draw_gj({m, j, t}, eng);
    return p;
}

inline SampleBatch sample_time_product(int m, double t, const RngStream& rng, std::size_t count, unsigned threads = 1) {
    if (m < 2) throw DomainError("product law needs m >= 2");
    if (!(t > 0)) throw DomainError("t must be positive");
    return sample_blocks(rng, count, "T_{1/" + std::to_string(m) + "} as a product of G_j", threads,
                         [&](std::mt19937_64& e) { return draw_time_product(m, t, e); });
}

inline SampleBatch sample_reflecting_bm(double t, const RngStream& rng, std::size_t count, unsigned threads = 1) {
    if (!(t > 0)) throw DomainError("t must be positive");
    const double sd = std::sqrt(2.0 * t);
    return sample_blocks(rng, count, "|N(0, 2t)|", threads, [&](std::mt19937_64& e) {
        std::normal_distribution<double> z;
        return std::fabs(sd * z(e));
    });
}

// α = 1/2 through the reflecting Brownian time, α = 1/m through the product.
inline int composed_index(double alpha) {
    if (alpha == 0.5) return 2;
    const double m = std::round(1.0 / alpha);
    if (m >= 2 && std::fabs(alpha * m - 1.0) < 1e-12) return static_cast<int>(m);
    throw DomainError("sample_composed_bm supports alpha = 1/m only");
}

inline SampleBatch sample_composed_bm(double alpha, double t, const RngStream& rng, std::size_t count,
                                      unsigned threads = 1) {
    const int m = composed_index(alpha);
    if (!(t > 0)) throw DomainError("t must be positive");
    return sample_blocks(rng, count, "B(T_{1/" + std::to_string(m) + "})", threads, [&](std::mt19937_64& e) {
        std::normal_distribution<double> z;
        const double u = m == 2 ? std::fabs(std::sqrt(2.0 * t) * z(e)) : draw_time_product(m, t, e);
        return std::sqrt(2.0 * u) * z(e);
    });
}

// CDF of a smooth density on [lo, hi]: cumulative GK15 values at the cell edges,
// cubic Hermite in between using the density as slope.
class TabulatedCdf {
public:
    TabulatedCdf(std::function<double(double)> density, double lo, double hi, int cells = 2048)
        : lo_(lo), hi_(hi), h_((hi - lo) / cells) {
        if (!(lo < hi) || cells < 2) throw DomainError("TabulatedCdf needs lo < hi and at least two cells");
        F_.assign(cells + 1, 0.0);
        f_.assign(cells + 1, 0.0);
        for (int i = 0; i <= cells; ++i) f_[i] = density(lo + i * h_);
        for (int i = 0; i < cells; ++i)
            F_[i + 1] = F_[i] + quadrature::detail::gk15<double>(density, lo + i * h_, lo + (i + 1) * h_).value;
    }

    double total() const { return F_.back(); }

    double operator()(double x) const {
        if (x <= lo_) return 0.0;
        if (x >= hi_) return F_.back();
        const double s = (x - lo_) / h_;
        std::size_t i = std::min(static_cast<std::size_t>(s), F_.size() - 2);
        const double u = s - i;
        const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
        const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
        return h00 * F_[i] + h10 * h_ * f_[i] + h01 * F_[i + 1] + h11 * h_ * f_[i + 1];
    }

private:
    double lo_, hi_, h_;
    std::vector<double> F_, f_;
};

// Q(λ) = 2 Σ (-1)^{k-1} exp(-2k²λ²), the Kolmogorov tail probability.
inline double kolmogorov_q(double lambda) {
    if (lambda < 0.2) return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

// Asymptotic 5% critical value for √N·D.
inline constexpr double ks_critical_5pct = 1.3581;

struct KsResult {
    double statistic = 0.0;  // sup |F_N - F|
    double critical = 0.0;   // 5% level, ks_critical_5pct / √N
    double p_value = 0.0;
    bool pass = false;
};

template <class Cdf>
KsResult ks_test(std::vector<double> values, Cdf&& cdf) {
    if (values.empty()) throw DomainError("ks_test needs samples");
    std::sort(values.begin(), values.end());
    const double N = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double F = cdf(values[i]);
        d = std::max({d, (i + 1) / N - F, F - i / N});
    }
    const double sn = std::sqrt(N);
    KsResult r{d, ks_critical_5pct / sn, kolmogorov_q((sn + 0.12 + 0.11 / sn) * d), false};
    r.pass = d < r.critical;
    return r;
}

inline KsResult two_sample_ks(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw DomainError("two_sample_ks needs samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(i / na - j / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    KsResult r{d, ks_critical_5pct / ne, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d), false};
    r.pass = r.p_value > 0.05;
    return r;
}

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 0.0;
    bool pass = false;
};

// Pearson test; probs are the model bin probabilities for the bin edges
// (-∞, e_0], (e_0, e_1], ..., (e_last, ∞).
inline ChiSquareResult chi_square_test(const std::vector<double>& values, const std::vector<double>& edges,
                                       const std::vector<double>& probs) {
    if (probs.size() != edges.size() + 1) throw DomainError("chi_square_test needs one more probability than edges");
    std::vector<double> counts(probs.size(), 0.0);
    for (double v : values) counts[std::lower_bound(edges.begin(), edges.end(), v) - edges.begin()] += 1.0;
    const double N = static_cast<double>(values.size());
    double stat = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double e = N * probs[i];
        if (!(e > 0)) throw DomainError("chi_square_test bins need positive probability");
        stat += (counts[i] - e) * (counts[i] - e) / e;
    }
    ChiSquareResult r{stat, static_cast<int>(probs.size()) - 1, 0.0, false};
    r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.dof), stat));
    r.pass = r.p_value > 0.05;
    return r;
}

struct MomentEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
};

// Sample mean of |x|^δ and its standard error.
inline MomentEstimate empirical_moment(const std::vector<double>& values, double delta) {
    if (values.size() < 2) throw DomainError("empirical_moment needs at least two samples");
    double mean = 0.0, m2 = 0.0;
    std::size_t k = 0;
    for (double v : values) {
        const double y = std::pow(std::fabs(v), delta);
        ++k;
        const double d = y - mean;
        mean += d / k;
        m2 += d * (y - mean);
    }
    const double N = static_cast<double>(values.size());
    return {mean, std::sqrt(m2 / (N - 1.0) / N)};
}

} // namespace fracheat::montecarlo
