#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "lpplab/analytic.hpp"

using namespace lpplab;

TEST(mean, pinned_values) {
    // 20/0.5 + 20/0.5 = 80, exact in binary arithmetic.
    EXPECT_DOUBLE_EQ(mean_fn(20.0, 20.0, 0.5), 80.0);
    EXPECT_DOUBLE_EQ(mean_fn(3.0, 4.0, 0.25), 12.0 + 4.0 / 0.75);
    EXPECT_DOUBLE_EQ(mean_fn(1.0, 1.0, 0.5), 4.0);
}

TEST(mean, minimized_at_zeta_with_value_shape) {
    const double pts[][2] = {{1.0, 1.0}, {3.0, 7.0}, {64.0, 64.0}, {300.0, 20.0}};
    for (const auto& p : pts) {
        const double x = p[0], y = p[1];
        const double zeta = zeta_fn(x, y);
        const double at_min = mean_fn(x, y, zeta);
        EXPECT_NEAR(at_min, shape_fn(x, y), 1e-12 * at_min);
        EXPECT_GT(mean_fn(x, y, zeta + 0.05 * (1.0 - zeta)), at_min);
        EXPECT_GT(mean_fn(x, y, zeta - 0.05 * zeta), at_min);
    }
}

TEST(mean, domain_errors) {
    EXPECT_THROW(mean_fn(0.0, 1.0, 0.5), std::domain_error);
    EXPECT_THROW(mean_fn(1.0, -2.0, 0.5), std::domain_error);
    EXPECT_THROW(mean_fn(1.0, 1.0, 0.0), std::domain_error);
    EXPECT_THROW(mean_fn(1.0, 1.0, 1.0), std::domain_error);
}

TEST(mean_deriv, order_zero_recovers_mean) {
    EXPECT_DOUBLE_EQ(mean_deriv(3.0, 4.0, 0.35, 0), mean_fn(3.0, 4.0, 0.35));
    EXPECT_DOUBLE_EQ(mean_deriv(10.0, 10.0, 0.5, 0), mean_fn(10.0, 10.0, 0.5));
}

TEST(mean_deriv, pinned_values) {
    // Symmetric point: the two first-derivative terms cancel exactly.
    EXPECT_DOUBLE_EQ(mean_deriv(1.0, 1.0, 0.5, 1), 0.0);
    // k = 2 at (2,3,0.4): 2*2/0.4^3 + 2*3/0.6^3 = 62.5 + 250/9.
    EXPECT_NEAR(mean_deriv(2.0, 3.0, 0.4, 2), 62.5 + 250.0 / 9.0, 1e-10);
    EXPECT_THROW(mean_deriv(1.0, 1.0, 0.5, -1), std::domain_error);
}

TEST(mean_deriv, matches_central_differences) {
    // Fourth-order Richardson central differences as an independent oracle.
    const double h = 5e-3;
    const double pts[][3] = {{3.0, 4.0, 0.35}, {10.0, 10.0, 0.5}, {7.0, 2.0, 0.62}};
    for (const auto& p : pts) {
        const double x = p[0], y = p[1], z = p[2];
        for (int k = 1; k <= 3; ++k) {
            auto f = [&](double t) { return mean_deriv(x, y, t, k - 1); };
            const double d_h = (f(z + h) - f(z - h)) / (2.0 * h);
            const double d_half = (f(z + h / 2) - f(z - h / 2)) / h;
            const double oracle = (4.0 * d_half - d_h) / 3.0;
            const double exact = mean_deriv(x, y, z, k);
            EXPECT_NEAR(exact, oracle, 1e-6 * std::fabs(exact)) << "k=" << k;
        }
    }
}

TEST(shape, pinned_and_symmetry) {
    EXPECT_DOUBLE_EQ(shape_fn(1.0, 1.0), 4.0);
    EXPECT_DOUBLE_EQ(shape_fn(4.0, 9.0), 25.0);
    EXPECT_NEAR(shape_fn(2.0, 8.0), 18.0, 1e-12);
    EXPECT_DOUBLE_EQ(shape_fn(5.0, 11.0), shape_fn(11.0, 5.0));
}

TEST(zeta, pinned_and_complement) {
    EXPECT_DOUBLE_EQ(zeta_fn(1.0, 1.0), 0.5);
    EXPECT_NEAR(zeta_fn(4.0, 1.0), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(zeta_fn(3.0, 7.0) + zeta_fn(7.0, 3.0), 1.0, 1e-15);
}

TEST(sigma, cube_is_half_second_derivative_at_zeta) {
    EXPECT_NEAR(sigma_fn(1.0, 1.0), std::pow(2.0, 4.0 / 3.0), 1e-14);
    const double pts[][2] = {{1.0, 1.0}, {3.0, 7.0}, {10.0, 2.0}};
    for (const auto& p : pts) {
        const double x = p[0], y = p[1];
        const double cube = std::pow(sigma_fn(x, y), 3.0);
        const double half_dd = 0.5 * mean_deriv(x, y, zeta_fn(x, y), 2);
        EXPECT_NEAR(cube, half_dd, 1e-9 * cube);
    }
}

TEST(char_direction, inverts_zeta_on_rays) {
    for (const double z : {0.3, 0.5, 0.7, 0.9}) {
        const plane_point d = char_direction(z);
        EXPECT_NEAR(d.x + d.y, 1.0, 1e-15);
        EXPECT_NEAR(zeta_fn(d.x, d.y), z, 1e-14);
    }
    EXPECT_NEAR(char_direction(0.5).x, 0.5, 1e-15);
    EXPECT_THROW(char_direction(0.0), std::domain_error);
}

TEST(rains, pinned_and_additive) {
    // (m,n) = (8,8), w = 0.55, z = 0.45: 8 log(11/9) + 8 log(11/9).
    EXPECT_NEAR(rains_log_mgf(8.0, 8.0, 0.55, 0.45), 16.0 * std::log(11.0 / 9.0), 1e-13);
    EXPECT_DOUBLE_EQ(rains_log_mgf(5.0, 3.0, 0.4, 0.4), 0.0);
    // The log-MGF is the integral of the mean over [z,w], so it splits at any
    // intermediate parameter.
    const double m = 6.0, n = 9.0, z = 0.3, u = 0.45, w = 0.6;
    EXPECT_NEAR(rains_log_mgf(m, n, w, z),
                rains_log_mgf(m, n, u, z) + rains_log_mgf(m, n, w, u), 1e-13);
    EXPECT_THROW(rains_log_mgf(8.0, 8.0, 0.45, 0.55), std::domain_error);
    EXPECT_THROW(rains_log_mgf(-1.0, 8.0, 0.55, 0.45), std::domain_error);
}

TEST(cramer, pinned_values_and_convexity) {
    EXPECT_DOUBLE_EQ(cramer_rate(1.0), 0.0);
    EXPECT_NEAR(cramer_rate(0.5), std::log(2.0) - 0.5, 1e-15);
    EXPECT_NEAR(cramer_rate(2.0), 1.0 - std::log(2.0), 1e-15);
    EXPECT_EQ(cramer_rate(0.0), pos_inf);
    EXPECT_EQ(cramer_rate(-3.0), pos_inf);
    for (double x = 0.2; x < 3.0; x += 0.2) {
        EXPECT_GE(cramer_rate(x), 0.0);
        // Midpoint convexity.
        EXPECT_LE(cramer_rate(x + 0.1), 0.5 * (cramer_rate(x) + cramer_rate(x + 0.2)) + 1e-12);
    }
}

TEST(gamma_upper, matches_poisson_sum) {
    // Q(n,x) = e^{-x} sum_{k<n} x^k/k! for integer n; evaluate the sum in
    // long double as an independent oracle.
    for (int n = 1; n <= 64; n *= 2) {
        for (const double x : {0.1, 1.0, 2.5, 7.0, 20.0, 64.0, 256.0}) {
            long double term = std::exp((long double)-x), sum = term;
            for (int k = 1; k < n; ++k) {
                term *= x / k;
                sum += term;
            }
            const double q = regularized_gamma_upper(n, x);
            EXPECT_NEAR(q, (double)sum, 1e-12 * std::max(1e-30, (double)sum))
                << "n=" << n << " x=" << x;
        }
    }
}

TEST(gamma_upper, pinned_and_monotone) {
    EXPECT_DOUBLE_EQ(regularized_gamma_upper(1, 0.0), 1.0);
    EXPECT_NEAR(regularized_gamma_upper(1, 1.0), std::exp(-1.0), 1e-15);
    EXPECT_NEAR(regularized_gamma_upper(3, 2.5), std::exp(-2.5) * (1.0 + 2.5 + 3.125), 1e-13);
    for (double x = 0.0; x < 10.0; x += 0.5)
        EXPECT_GE(regularized_gamma_upper(4, x), regularized_gamma_upper(4, x + 0.5));
    EXPECT_THROW(regularized_gamma_upper(0, 1.0), std::domain_error);
    EXPECT_THROW(regularized_gamma_upper(3, -0.1), std::domain_error);
}

TEST(shift_index, defining_sandwich) {
    const int cases[][2] = {{10, 6}, {20, 20}, {2, 5}, {7, 1}};
    for (const auto& c : cases) {
        const int m = c[0], n = c[1];
        const double lo = zeta_fn(1.0, n), hi = zeta_fn((double)m, n);
        for (int i = 1; i <= 7; ++i) {
            const double w = lo + (hi - lo) * i / 8.0;
            const int k = shift_index(m, n, w);
            ASSERT_GE(k, 1);
            ASSERT_LE(k, m - 1);
            EXPECT_LT(zeta_fn((double)(m - k), n), w);
            EXPECT_LE(w, zeta_fn((double)(m - k + 1), n));
        }
        // Right endpoint is admissible and maps to the smallest shift.
        EXPECT_EQ(shift_index(m, n, hi), 1);
        EXPECT_THROW(shift_index(m, n, lo), std::domain_error);
        EXPECT_THROW(shift_index(m, n, std::nextafter(hi, 1.0)), std::domain_error);
    }
    EXPECT_THROW(shift_index(1, 5, 0.5), std::domain_error);
}

TEST(left_tail_exponent, pinned_and_errors) {
    EXPECT_DOUBLE_EQ(left_tail_exponent(0.0, 0.0, 3.0), -9.0);
    EXPECT_NEAR(left_tail_exponent(2.0, 1.0, 2.0), -7.0 / 3.0 - 2.0, 1e-15);
    EXPECT_THROW(left_tail_exponent(1.0, -0.5, 1.0), std::domain_error);
    EXPECT_THROW(left_tail_exponent(1.0, 2.0, 1.0), std::domain_error);
}
