#pragma once

// Monte Carlo estimators: moment summaries, percentile bootstrap,
// Kolmogorov-Smirnov tests, and log-log slope fits.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rng.hpp"

namespace lpplab {

inline double mean_of(const std::vector<double>& x) {
    if (x.empty()) throw std::invalid_argument("mean_of: empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Unbiased (n-1) sample variance.
inline double sample_variance(const std::vector<double>& x) {
    if (x.size() < 2) throw std::invalid_argument("sample_variance: needs at least two samples");
    const double m = mean_of(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

inline double standard_error(const std::vector<double>& x) {
    return std::sqrt(sample_variance(x) / static_cast<double>(x.size()));
}

// Binomial standard error of an empirical frequency.
inline double frequency_se(double p, std::size_t n) {
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

struct mc_summary_t {
    std::size_t count = 0;
    double mean = 0.0;
    std::vector<double> central_abs; // E|X - c|^p per requested power
    std::vector<double> central_pos; // E (X - c)_+^p per requested power
    std::vector<double> tail_freq;   // P{X >= t} per requested threshold
};

// One pass over the sample: mean, centered absolute and positive-part
// moments at the requested powers, and right-tail frequencies at the
// requested thresholds.  Left tails are obtained by negating samples,
// center, and thresholds.
inline mc_summary_t mc_summary(const std::vector<double>& x, double center,
                               const std::vector<int>& powers,
                               const std::vector<double>& thresholds = {}) {
    if (x.empty()) throw std::invalid_argument("mc_summary: empty sample");
    for (int p : powers)
        if (p < 1 || p > 6) throw std::domain_error("mc_summary: powers must lie in [1,6]");
    mc_summary_t s;
    s.count = x.size();
    s.central_abs.assign(powers.size(), 0.0);
    s.central_pos.assign(powers.size(), 0.0);
    s.tail_freq.assign(thresholds.size(), 0.0);
    double total = 0.0;
    for (double v : x) {
        total += v;
        const double d = v - center;
        for (std::size_t k = 0; k < powers.size(); ++k) {
            const double a = std::pow(std::fabs(d), powers[k]);
            s.central_abs[k] += a;
            if (d > 0.0) s.central_pos[k] += a;
        }
        for (std::size_t k = 0; k < thresholds.size(); ++k)
            if (v >= thresholds[k]) s.tail_freq[k] += 1.0;
    }
    const double n = static_cast<double>(s.count);
    s.mean = total / n;
    for (double& v : s.central_abs) v /= n;
    for (double& v : s.central_pos) v /= n;
    for (double& v : s.tail_freq) v /= n;
    return s;
}

struct bootstrap_ci_t {
    double point = 0.0; // statistic on the original sample
    double lo = 0.0, hi = 0.0;
    double se = 0.0; // spread of the bootstrap replicates
};

// Percentile bootstrap with counter-addressed resampling, so confidence
// intervals are reproducible and independent of worker count.
inline bootstrap_ci_t bootstrap_ci(const std::vector<double>& x,
                                   const std::function<double(const std::vector<double>&)>& statistic,
                                   const counter_stream& stream, int replicates = 1000,
                                   double level = 0.95) {
    const std::size_t n = x.size();
    if (n == 0) throw std::invalid_argument("bootstrap_ci: empty sample");
    if (replicates < 100) throw std::invalid_argument("bootstrap_ci: needs at least 100 replicates");
    if (!(level > 0.0) || !(level < 1.0)) throw std::invalid_argument("bootstrap_ci: bad level");

    bootstrap_ci_t out;
    out.point = statistic(x);

    std::vector<double> stats(static_cast<std::size_t>(replicates));
    std::vector<double> resample(n);
    for (int b = 0; b < replicates; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t site = static_cast<std::uint64_t>(b) * n + i;
            const double u = stream.uniform(rng_layer::boot, site);
            std::size_t idx = static_cast<std::size_t>(u * static_cast<double>(n));
            if (idx >= n) idx = n - 1; // u is strictly below 1, guard anyway
            resample[i] = x[idx];
        }
        stats[static_cast<std::size_t>(b)] = statistic(resample);
    }
    std::sort(stats.begin(), stats.end());
    const double alpha = (1.0 - level) / 2.0;
    const auto pick = [&](double q) {
        const double pos = q * static_cast<double>(replicates - 1);
        return stats[static_cast<std::size_t>(std::llround(pos))];
    };
    out.lo = pick(alpha);
    out.hi = pick(1.0 - alpha);
    double m = 0.0;
    for (double v : stats) m += v;
    m /= static_cast<double>(replicates);
    double s2 = 0.0;
    for (double v : stats) s2 += (v - m) * (v - m);
    out.se = std::sqrt(s2 / static_cast<double>(replicates - 1));
    return out;
}

namespace detail {

// Asymptotic Kolmogorov tail Q(t) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 t^2),
// evaluated through its theta-dual series for small t where the alternating
// form converges slowly.
inline double kolmogorov_tail(double t) {
    constexpr double pi = std::numbers::pi;
    if (t <= 0.0) return 1.0;
    if (t < 1.18) {
        const double v = std::exp(-pi * pi / (8.0 * t * t));
        const double sum = v + std::pow(v, 9.0) + std::pow(v, 25.0) + std::pow(v, 49.0);
        return std::max(0.0, std::min(1.0, 1.0 - std::sqrt(2.0 * pi) / t * sum));
    }
    const double e = std::exp(-2.0 * t * t);
    const double q = 2.0 * (e - std::pow(e, 4.0) + std::pow(e, 9.0) - std::pow(e, 16.0));
    return std::max(0.0, std::min(1.0, q));
}

} // namespace detail

struct ks_result_t {
    double d = 0.0;
    double p_value = 1.0;
};

// One-sample Kolmogorov-Smirnov statistic against a continuous CDF, with the
// asymptotic p-value.
inline ks_result_t ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
    const std::size_t n = samples.size();
    if (n == 0) throw std::invalid_argument("ks_test: empty sample");
    std::sort(samples.begin(), samples.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = cdf(samples[i]);
        if (!(f >= 0.0) || !(f <= 1.0)) throw std::domain_error("ks_test: cdf out of [0,1]");
        const double lo = static_cast<double>(i) / static_cast<double>(n);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
        d = std::max(d, std::max(f - lo, hi - f));
    }
    ks_result_t r;
    r.d = d;
    r.p_value = detail::kolmogorov_tail(std::sqrt(static_cast<double>(n)) * d);
    return r;
}

// Two-sample Kolmogorov-Smirnov, asymptotic p-value with the effective
// sample size n m / (n + m).
inline ks_result_t ks_test_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_test_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        // Advance past one pooled value on both sides before comparing the
        // empirical CDFs; stepping a single sample through a cross-sample tie
        // would read a spurious gap inside the tie.
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    ks_result_t r;
    r.d = d;
    r.p_value = detail::kolmogorov_tail(std::sqrt(na * nb / (na + nb)) * d);
    return r;
}

struct slope_fit_t {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 1.0;
    double slope_se = 0.0;
};

// Ordinary least squares of y on x.
inline slope_fit_t linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 3)
        throw std::invalid_argument("linear_fit: needs matching samples, at least three");
    const std::size_t n = xs.size();
    const double mx = mean_of(xs), my = mean_of(ys);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw std::domain_error("linear_fit: degenerate abscissae");
    slope_fit_t fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss_res += r * r;
    }
    fit.r2 = (syy > 0.0) ? 1.0 - ss_res / syy : 1.0;
    fit.slope_se = (n > 2) ? std::sqrt(ss_res / static_cast<double>(n - 2) / sxx) : 0.0;
    return fit;
}

// Ordinary least squares of log(y) on log(x).
inline slope_fit_t loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 3)
        throw std::invalid_argument("loglog_slope: needs matching samples, at least three");
    const std::size_t n = xs.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw std::domain_error("loglog_slope: points must be positive");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    return linear_fit(lx, ly);
}

} // namespace lpplab
