#pragma once

// Exponential change of measure: exact Radon-Nikodym weights for tilted sums,
// Chernoff bound evaluators with the exact optimized exponent, importance
// sampling for rare right tails of boundary passage times, an exact
// stay-below probability for exponential walks against a moving barrier, and
// a Doob-type maximal-inequality check.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "analytic.hpp"
#include "field.hpp"
#include "lpp.hpp"
#include "pool.hpp"
#include "stats.hpp"

namespace lpplab {

// dP/dQ for the sum tilt: Q reweights n-fold Exp(1) product law by
// exp(mu * S_n) / E[exp(mu * S_n)], so dP/dQ = (1-mu)^{-n} exp(-mu s_n) and
// E_Q[1_A dP/dQ] = P(A) exactly.
inline double rn_weight(double mu, std::int64_t n, double s_n) {
    if (!(mu < 1.0)) throw std::domain_error("rn_weight: tilt must satisfy mu < 1");
    return std::pow(1.0 - mu, static_cast<double>(-n)) * std::exp(-mu * s_n);
}

enum class tail_side { upper, lower };

// Optimized Chernoff bound for an n-fold Exp(1) sum at s standard deviations:
// P{S_n >= n + s sqrt(n)} <= exp(-n I(1 + s/sqrt(n))) and
// P{S_n <= n - s sqrt(n)} <= exp(-n I(1 - s/sqrt(n))), with I the Cramer
// rate; an infinite rate collapses the bound to zero.
inline double chernoff_sum_bound(std::int64_t n, double s, tail_side side) {
    if (n < 1) throw std::invalid_argument("chernoff_sum_bound: n must be positive");
    if (!(s >= 0.0)) throw std::invalid_argument("chernoff_sum_bound: s must be nonnegative");
    const double shift = s / std::sqrt(static_cast<double>(n));
    const double rate =
        (side == tail_side::upper) ? cramer_rate(1.0 + shift) : cramer_rate(1.0 - shift);
    if (rate == pos_inf) return 0.0;
    return std::exp(-static_cast<double>(n) * rate);
}

// ----- importance sampling for one-sided right tails -----------------------
//
// Event: {G^{w,hor}_{(m,n)} >= threshold}.  The proposal law draws the first
// tilt_sites horizontal boundary weights at the heavier rate w - theta and
// the rest at w; the interior is untouched.  The likelihood ratio of the
// target law against the proposal on the tilted sites is
//     (w/(w-theta))^k exp(-theta * S_k),
// S_k the realized sum of tilted boundary weights, so the weighted indicator
// is unbiased for the untilted tail probability.  theta = 0 is naive Monte
// Carlo, bitwise, from the same uniforms.

struct importance_tail_config {
    std::int64_t m = 0, n = 0;
    double w = 0.5;
    double theta = 0.0;
    double s = 0.0;              // tail offset in the |v|_1^{1/3} scale
    double threshold = std::numeric_limits<double>::quiet_NaN(); // overrides s when set
    std::int64_t tilt_sites = 0; // 0 -> ceil(sqrt(s) |v|_1^{2/3}), clamped to [1, m]
    std::uint64_t replicas = 0;
    seed_spec base;              // replica_index is overwritten per replica
    unsigned workers = 1;
};

struct importance_tail_result {
    double estimate = 0.0;
    double se = 0.0;
    double threshold = 0.0;
    double theta = 0.0;
    std::int64_t tilt_sites = 0;
    std::uint64_t replicas = 0;
};

inline importance_tail_result importance_tail(const importance_tail_config& c) {
    if (c.m < 1 || c.n < 1) throw std::domain_error("importance_tail: extents must be positive");
    if (!(c.w - c.theta > 0.0)) throw std::domain_error("importance_tail: tilted rate w-theta must be positive");
    if (!(c.s >= 0.0) && !std::isfinite(c.threshold) && c.threshold != neg_inf)
        throw std::domain_error("importance_tail: needs s >= 0 or an explicit threshold");
    if (c.replicas == 0) throw std::invalid_argument("importance_tail: needs replicas");

    const double l1 = static_cast<double>(c.m + c.n);
    importance_tail_result out;
    out.theta = c.theta;
    out.replicas = c.replicas;
    out.threshold = std::isnan(c.threshold)
                        ? shape_fn(static_cast<double>(c.m), static_cast<double>(c.n)) +
                              c.s * std::cbrt(l1)
                        : c.threshold;
    std::int64_t k = c.tilt_sites;
    if (k <= 0) k = static_cast<std::int64_t>(std::ceil(std::sqrt(std::max(c.s, 0.0)) *
                                                        std::pow(l1, 2.0 / 3.0)));
    k = std::max<std::int64_t>(1, std::min(k, c.m));
    out.tilt_sites = k;

    const double u = c.w - c.theta;
    const double log_ratio_per_site = std::log(c.w / u);

    std::vector<double> contrib(c.replicas, 0.0);
    parallel_replicas(c.replicas, c.workers, [&](std::uint64_t r) {
        seed_spec spec = c.base;
        spec.replica_index = r;
        const stream_field f(spec, c.m, c.n);
        const axis_decomposition d = decompose_to_target(f);

        double best = neg_inf, prefix = 0.0, tilted_sum = 0.0;
        for (std::int64_t i = 1; i <= c.m; ++i) {
            const double log_u = std::log(f.hor_uniform(i));
            const double rate = (i <= k) ? u : c.w;
            const double weight = -log_u / rate;
            if (i <= k) tilted_sum += weight;
            prefix += weight;
            best = std::max(best, prefix + d.to_row1[static_cast<std::size_t>(i - 1)]);
        }
        if (best >= out.threshold)
            contrib[r] = std::exp(static_cast<double>(k) * log_ratio_per_site - c.theta * tilted_sum);
    });

    double total = 0.0;
    for (double v : contrib) total += v;
    const double mean = total / static_cast<double>(c.replicas);
    double s2 = 0.0;
    for (double v : contrib) s2 += (v - mean) * (v - mean);
    out.estimate = mean;
    out.se = std::sqrt(s2 / static_cast<double>(c.replicas - 1) / static_cast<double>(c.replicas));
    return out;
}

// ----- walk below a moving barrier -----------------------------------------
//
// P{V_j <= b_j for all j}, with V_j the partial sums of iid Exp(rate) steps
// and b nondecreasing.  The partial sums are the points of a rate-`rate`
// Poisson process, so the event reads {Pi(b_j) >= j for all j} in the
// counting process Pi, and the count distribution propagates exactly through
// the barrier: convolve with Poisson(rate * (b_j - b_{j-1})), then drop
// counts below j.  Every term is positive, so the only inaccuracy is the
// relative mass (about 1e-19 per step) shed when truncating Poisson tails.
// Conditional-expectation use: averaging this probability over environments
// replaces an indicator frequency by its exact conditional mean, which keeps
// rare-event estimates positive and unbiased at any event size.
inline double stay_below_probability(const std::vector<double>& barrier, double rate) {
    if (!(rate > 0.0)) throw std::domain_error("stay_below_probability: rate must be positive");
    if (barrier.empty()) return 1.0;
    for (std::size_t j = 0; j < barrier.size(); ++j) {
        if (!std::isfinite(barrier[j]))
            throw std::invalid_argument("stay_below_probability: barrier must be finite");
        if (j > 0 && barrier[j] < barrier[j - 1])
            throw std::invalid_argument("stay_below_probability: barrier must be nondecreasing");
    }
    if (barrier.front() <= 0.0) return 0.0;

    // Poisson(lam) pmf on a window holding all but ~1e-19 of the mass;
    // returns the count of the window's first entry.
    std::vector<double> pmf;
    const auto fill_pmf = [&pmf](double lam) -> std::size_t {
        pmf.clear();
        if (lam <= 32.0) {
            double t = std::exp(-lam);
            for (std::size_t k = 0;;) {
                pmf.push_back(t);
                ++k;
                t *= lam / static_cast<double>(k);
                if (t < 1e-20 && static_cast<double>(k) > lam) break;
            }
            return 0;
        }
        const double sd = std::sqrt(lam);
        const auto k0 = static_cast<std::size_t>(std::max(0.0, lam - 12.0 * sd - 8.0));
        const auto k1 = static_cast<std::size_t>(lam + 12.0 * sd + 8.0);
        for (std::size_t k = k0; k <= k1; ++k)
            pmf.push_back(std::exp(-lam + static_cast<double>(k) * std::log(lam) -
                                   std::lgamma(static_cast<double>(k) + 1.0)));
        return k0;
    };

    std::vector<double> s{1.0}, ns; // s[i] = P{count = lo + i, barrier held so far}
    std::size_t lo = 0;
    double prev = 0.0;
    for (std::size_t j = 1; j <= barrier.size(); ++j) {
        const double db = barrier[j - 1] - prev;
        prev = barrier[j - 1];
        if (db > 0.0) {
            lo += fill_pmf(rate * db);
            ns.assign(s.size() + pmf.size() - 1, 0.0);
            for (std::size_t a = 0; a < s.size(); ++a) {
                const double sa = s[a];
                if (sa == 0.0) continue;
                for (std::size_t b = 0; b < pmf.size(); ++b) ns[a + b] += sa * pmf[b];
            }
            s.swap(ns);
        }
        if (lo < j) { // enforce at least j points below the barrier
            const std::size_t drop = std::min(j - lo, s.size());
            s.erase(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(drop));
            lo += drop;
            if (s.empty()) return 0.0;
        }
        double smax = 0.0;
        for (double v : s) smax = std::max(smax, v);
        if (smax <= 0.0) return 0.0;
        while (!s.empty() && s.back() < smax * 1e-25) s.pop_back();
    }
    double q = 0.0;
    for (double v : s) q += v;
    return std::min(q, 1.0);
}

// ----- maximal inequality --------------------------------------------------
//
// M_k = sum_{i<=k} (X_i - Y_i - 1/a + 1/b), X_i ~ Exp(a), Y_i ~ Exp(b)
// independent.  Checks the Doob bound
//     P{max_{k<=n} M_k >= x} <= exp(-C x min{x/n, 1}),
// with C = min{a/4, 1/a^2 + 1/b^2}.

struct martingale_check_result {
    double empirical = 0.0;
    double empirical_se = 0.0;
    double bound = 1.0;
};

inline martingale_check_result martingale_max_check(double a, double b, std::int64_t n, double x,
                                                    std::uint64_t replicas, const seed_spec& base,
                                                    unsigned workers = 1) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("martingale_max_check: rates must be positive");
    if (n < 1 || replicas < 2) throw std::invalid_argument("martingale_max_check: needs n >= 1, replicas >= 2");

    std::vector<std::uint8_t> hit(replicas, 0);
    const double drift = -1.0 / a + 1.0 / b;
    parallel_replicas(replicas, workers, [&](std::uint64_t r) {
        seed_spec spec = base;
        spec.replica_index = r;
        const counter_stream s = spec.stream();
        double walk = 0.0, peak = neg_inf; // max over k in [1,n], M_0 excluded
        for (std::int64_t i = 1; i <= n; ++i) {
            const double xi = s.exponential(a, rng_layer::aux, std::uint64_t(i), 0);
            const double yi = s.exponential(b, rng_layer::aux, std::uint64_t(i), 1);
            walk += xi - yi + drift;
            peak = std::max(peak, walk);
        }
        hit[r] = (peak >= x) ? 1 : 0;
    });

    std::uint64_t count = 0;
    for (std::uint8_t h : hit) count += h;
    martingale_check_result out;
    out.empirical = static_cast<double>(count) / static_cast<double>(replicas);
    out.empirical_se = frequency_se(out.empirical, replicas);
    const double c_const = std::min(a / 4.0, 1.0 / (a * a) + 1.0 / (b * b));
    out.bound = std::exp(-c_const * x * std::min(x / static_cast<double>(n), 1.0));
    return out;
}

} // namespace lpplab
