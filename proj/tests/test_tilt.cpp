#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lpplab/analytic.hpp"
#include "lpplab/field.hpp"
#include "lpplab/stats.hpp"
#include "lpplab/tilt.hpp"

using namespace lpplab;

TEST(rn_weight, pinned_values_and_unbiasedness) {
    EXPECT_DOUBLE_EQ(rn_weight(0.0, 10, 7.3), 1.0);
    EXPECT_DOUBLE_EQ(rn_weight(0.5, 4, 2.0), 16.0 * std::exp(-1.0));
    EXPECT_DOUBLE_EQ(rn_weight(-1.0, 2, 3.0), 0.25 * std::exp(3.0));
    EXPECT_THROW(rn_weight(1.0, 3, 1.0), std::domain_error);

    // E_Q[dP/dQ] = 1: average the weight over tilted streams.  Keep the tilt
    // moderate so the likelihood ratio has small variance and the normal
    // error bar is trustworthy.
    const std::int64_t n = 8;
    const double mu = 0.3;
    std::vector<double> w;
    for (std::uint64_t r = 0; r < 20000; ++r) {
        const auto draws = tilted_exp_stream(seed_spec{41, "tilt-mass", r}, n, mu);
        double s = 0.0;
        for (double d : draws) s += d;
        w.push_back(rn_weight(mu, n, s));
    }
    EXPECT_NEAR(mean_of(w), 1.0, 3.0 * standard_error(w));
}

TEST(chernoff, closed_form_and_degeneracies) {
    // Upper tail at s sd: exp(-n I(1 + s/sqrt(n))).
    EXPECT_NEAR(chernoff_sum_bound(16, 2.0, tail_side::upper),
                std::exp(-16.0 * cramer_rate(1.5)), 1e-15);
    EXPECT_NEAR(chernoff_sum_bound(16, 2.0, tail_side::lower),
                std::exp(-16.0 * cramer_rate(0.5)), 1e-15);
    EXPECT_DOUBLE_EQ(chernoff_sum_bound(9, 0.0, tail_side::upper), 1.0);
    // s >= sqrt(n) pushes the lower argument to zero mean: bound collapses.
    EXPECT_DOUBLE_EQ(chernoff_sum_bound(4, 2.0, tail_side::lower), 0.0);
    EXPECT_THROW(chernoff_sum_bound(0, 1.0, tail_side::upper), std::invalid_argument);
    EXPECT_THROW(chernoff_sum_bound(4, -1.0, tail_side::upper), std::invalid_argument);
}

TEST(chernoff, dominates_monte_carlo_frequencies) {
    const std::int64_t n = 16;
    const double s = 1.5;
    const double up_thr = n + s * std::sqrt((double)n);
    const double lo_thr = n - s * std::sqrt((double)n);
    int up = 0, lo = 0;
    const int reps = 20000;
    for (int r = 0; r < reps; ++r) {
        const auto draws = tilted_exp_stream(seed_spec{42, "tilt-chern", (std::uint64_t)r}, n, 0.0);
        double sum = 0.0;
        for (double d : draws) sum += d;
        up += (sum >= up_thr);
        lo += (sum <= lo_thr);
    }
    const double pu = (double)up / reps, pl = (double)lo / reps;
    EXPECT_LE(pu, chernoff_sum_bound(n, s, tail_side::upper) + 3.0 * frequency_se(pu, reps));
    EXPECT_LE(pl, chernoff_sum_bound(n, s, tail_side::lower) + 3.0 * frequency_se(pl, reps));
}

TEST(importance, zero_tilt_is_plain_monte_carlo) {
    importance_tail_config c;
    c.m = c.n = 12;
    c.w = zeta_fn(12.0, 12.0);
    c.s = 1.0;
    c.replicas = 4000;
    c.base = seed_spec{43, "tilt-is", 0};

    const auto naive = importance_tail(c);
    // Contributions at theta = 0 are indicators, so the estimate is the
    // empirical frequency and its SE the binomial one up to the n/(n-1)
    // variance correction.
    const double bessel = std::sqrt(4000.0 / 3999.0);
    EXPECT_NEAR(naive.se, bessel * frequency_se(naive.estimate, c.replicas), 1e-12);
    EXPECT_GT(naive.estimate, 0.0);
    EXPECT_LT(naive.estimate, 1.0);
    // Default threshold is the shape value plus s on the cube-root scale.
    EXPECT_NEAR(naive.threshold, shape_fn(12.0, 12.0) + std::cbrt(24.0), 1e-12);
}

TEST(importance, tilted_estimate_agrees_with_naive) {
    importance_tail_config c;
    c.m = c.n = 12;
    c.w = zeta_fn(12.0, 12.0);
    c.s = 1.0;
    c.replicas = 4000;
    c.base = seed_spec{43, "tilt-is", 0};
    const auto naive = importance_tail(c);

    c.theta = 0.3 * c.w;
    c.base = seed_spec{43, "tilt-is-b", 0};
    const auto tilted = importance_tail(c);
    const double gap = std::fabs(naive.estimate - tilted.estimate);
    EXPECT_LE(gap, 3.0 * std::sqrt(naive.se * naive.se + tilted.se * tilted.se));
    EXPECT_EQ(tilted.theta, c.theta);
    EXPECT_EQ(tilted.replicas, c.replicas);
}

TEST(importance, explicit_threshold_and_site_clamp) {
    importance_tail_config c;
    c.m = 6;
    c.n = 5;
    c.w = 0.5;
    c.threshold = neg_inf; // every replica hits
    c.tilt_sites = 100;    // clamped to m
    c.replicas = 500;
    c.base = seed_spec{44, "tilt-clamp", 0};
    const auto r = importance_tail(c);
    EXPECT_EQ(r.tilt_sites, 6);
    EXPECT_DOUBLE_EQ(r.threshold, neg_inf);
    // All-hit naive sampling estimates exactly one.
    EXPECT_DOUBLE_EQ(r.estimate, 1.0);
    EXPECT_DOUBLE_EQ(r.se, 0.0);
}

TEST(importance, unit_mass_under_tilt) {
    // With threshold -inf the weighted indicator integrates dP/dQ: mean 1.
    importance_tail_config c;
    c.m = 8;
    c.n = 4;
    c.w = 0.5;
    c.theta = 0.15;
    c.threshold = neg_inf;
    c.tilt_sites = 4;
    c.replicas = 40000;
    c.base = seed_spec{45, "tilt-mass2", 0};
    const auto r = importance_tail(c);
    EXPECT_NEAR(r.estimate, 1.0, 3.0 * r.se);
    EXPECT_LT(r.se, 0.05);
}

TEST(importance, argument_validation) {
    importance_tail_config c;
    c.m = 4;
    c.n = 4;
    c.replicas = 100;
    c.base = seed_spec{46, "tilt-err", 0};
    c.theta = 0.6; // w - theta <= 0
    EXPECT_THROW(importance_tail(c), std::domain_error);
    c.theta = 0.0;
    c.replicas = 0;
    EXPECT_THROW(importance_tail(c), std::invalid_argument);
    c.replicas = 100;
    c.m = 0;
    EXPECT_THROW(importance_tail(c), std::domain_error);
}

TEST(importance, workers_do_not_change_values) {
    importance_tail_config c;
    c.m = c.n = 10;
    c.w = 0.5;
    c.theta = 0.1;
    c.s = 0.5;
    c.replicas = 2000;
    c.base = seed_spec{47, "tilt-workers", 0};
    c.workers = 1;
    const auto one = importance_tail(c);
    c.workers = 4;
    const auto four = importance_tail(c);
    EXPECT_EQ(one.estimate, four.estimate);
    EXPECT_EQ(one.se, four.se);
}

TEST(stay_below, closed_forms_and_validation) {
    const double a = 0.7, b1 = 1.3, b2 = 2.9;
    // One step: P{Exp(a) <= b1}.
    EXPECT_NEAR(stay_below_probability({b1}, a), 1.0 - std::exp(-a * b1), 1e-13);
    // Two steps, integrated by hand: 1 - e^{-a b1} - a b1 e^{-a b2}.
    EXPECT_NEAR(stay_below_probability({b1, b2}, a),
                1.0 - std::exp(-a * b1) - a * b1 * std::exp(-a * b2), 1e-13);
    // Flat barrier: only the last constraint binds, so the probability is
    // P{Gamma(n, a) <= b} = P{Poisson(a b) >= n}.
    const std::vector<double> flat(40, 70.0);
    EXPECT_NEAR(stay_below_probability(flat, 0.7),
                1.0 - regularized_gamma_upper(40, 0.7 * 70.0), 1e-12);
    // A jump large enough to use the wide-window Poisson path.
    EXPECT_NEAR(stay_below_probability({2.0, 200.0}, 1.0),
                1.0 - std::exp(-2.0) - 2.0 * std::exp(-200.0), 1e-13);

    EXPECT_DOUBLE_EQ(stay_below_probability({}, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(stay_below_probability({-0.5, 3.0}, 1.0), 0.0);
    EXPECT_THROW(stay_below_probability({1.0, 2.0}, 0.0), std::domain_error);
    EXPECT_THROW(stay_below_probability({2.0, 1.0}, 0.5), std::invalid_argument);
    EXPECT_THROW(stay_below_probability({1.0, pos_inf}, 0.5), std::invalid_argument);
}

TEST(stay_below, matches_monte_carlo_walks) {
    const std::vector<double> barrier = {1.7, 3.0, 4.0, 4.5, 5.0, 6.0, 8.0, 11.0};
    const double rate = 0.3;
    const std::uint64_t reps = 200000;
    std::uint64_t stay = 0;
    for (std::uint64_t r = 0; r < reps; ++r) {
        const counter_stream s = seed_spec{43, "stay-below", r}.stream();
        double v = 0.0;
        bool ok = true;
        for (std::size_t j = 0; j < barrier.size(); ++j) {
            v += s.exponential(rate, rng_layer::aux, std::uint64_t(j), 0);
            if (v > barrier[j]) {
                ok = false;
                break;
            }
        }
        stay += ok ? 1 : 0;
    }
    const double mc = static_cast<double>(stay) / static_cast<double>(reps);
    const double q = stay_below_probability(barrier, rate);
    EXPECT_NEAR(q, mc, 4.0 * frequency_se(mc, reps));
}

TEST(stay_below, monotone_in_barrier_and_rate) {
    const std::vector<double> barrier = {2.0, 3.5, 5.0, 7.0, 9.5};
    const double q = stay_below_probability(barrier, 0.5);
    EXPECT_GT(q, 0.0);
    EXPECT_LT(q, 1.0);
    std::vector<double> raised = barrier;
    raised[2] += 0.75;
    EXPECT_GE(stay_below_probability(raised, 0.5), q);
    // A higher rate shortens the steps, so the walk stays below longer.
    EXPECT_GT(stay_below_probability(barrier, 0.8), q);
}

TEST(martingale, bound_formula_and_validation) {
    const auto r = martingale_max_check(1.0, 1.0, 100, 30.0, 2000, seed_spec{48, "tilt-mart", 0});
    // C = min{1/4, 2} = 1/4; x min(x/n,1) = 30 * 0.3 = 9.
    EXPECT_NEAR(r.bound, std::exp(-2.25), 1e-12);
    EXPECT_GE(r.empirical, 0.0);
    EXPECT_LE(r.empirical, r.bound + 3.0 * r.empirical_se);
    EXPECT_THROW(martingale_max_check(0.0, 1.0, 10, 1.0, 100, seed_spec{48, "m", 0}),
                 std::domain_error);
    EXPECT_THROW(martingale_max_check(1.0, 1.0, 0, 1.0, 100, seed_spec{48, "m", 0}),
                 std::invalid_argument);
}

TEST(martingale, centered_walk_rarely_strays) {
    // At x far above the sd scale sqrt(2 n) the hit frequency must be tiny.
    const auto r = martingale_max_check(1.0, 2.0, 50, 40.0, 3000, seed_spec{49, "tilt-mart2", 0});
    EXPECT_LT(r.empirical, 0.01);
    EXPECT_LE(r.empirical, r.bound + 3.0 * r.empirical_se);
}
