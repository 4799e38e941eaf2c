#include <gtest/gtest.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "lpplab/partitions.hpp"

using namespace lpplab;

TEST(enumerate, counts_match_partition_function) {
    // p(1..10) = 1, 2, 3, 5, 7, 11, 15, 22, 30, 42.
    const std::size_t expect[] = {1, 2, 3, 5, 7, 11, 15, 22, 30, 42};
    for (int p = 1; p <= 10; ++p)
        EXPECT_EQ(enumerate_partitions(p).size(), expect[p - 1]) << "p=" << p;
    EXPECT_THROW(enumerate_partitions(0), std::domain_error);
    EXPECT_THROW(enumerate_partitions(21), std::domain_error);
}

TEST(enumerate, parts_are_nonincreasing_sum_to_p_and_distinct) {
    for (int p = 1; p <= 12; ++p) {
        std::vector<std::vector<int>> seen;
        for (const partition& lam : enumerate_partitions(p)) {
            EXPECT_EQ(lam.sum(), p);
            for (std::size_t i = 1; i < lam.parts.size(); ++i)
                EXPECT_LE(lam.parts[i], lam.parts[i - 1]);
            EXPECT_GE(lam.min_part(), 1);
            seen.push_back(lam.parts);
        }
        std::sort(seen.begin(), seen.end());
        EXPECT_TRUE(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
    }
}

TEST(block_count, pinned_small_partitions) {
    // Number of set partitions of [p] with the given block sizes.
    EXPECT_EQ(partition_block_count({{2}}), 1u);
    EXPECT_EQ(partition_block_count({{1, 1}}), 1u);
    EXPECT_EQ(partition_block_count({{2, 1}}), 3u);
    EXPECT_EQ(partition_block_count({{2, 2}}), 3u);
    EXPECT_EQ(partition_block_count({{3, 1}}), 4u);
    EXPECT_EQ(partition_block_count({{2, 1, 1}}), 6u);
    EXPECT_EQ(partition_block_count({{3, 2}}), 10u);
    EXPECT_EQ(partition_block_count({{2, 2, 1}}), 15u);
}

TEST(block_count, sums_to_bell_numbers) {
    // Summing set-partition counts over all partitions of p gives the Bell
    // numbers 1, 2, 5, 15, 52, 203, 877, 4140, ...
    const std::uint64_t bell[] = {1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975};
    for (int p = 1; p <= 10; ++p) {
        std::uint64_t total = 0;
        for (const partition& lam : enumerate_partitions(p)) total += partition_block_count(lam);
        EXPECT_EQ(total, bell[p - 1]) << "p=" << p;
    }
}

TEST(coeff, faa_di_bruno_reconstructs_composite_derivatives) {
    // d^p/dx^p exp(f(x)) at x = 0 with f = x + x^2: derivatives f' = 1 + 2x,
    // f'' = 2, higher zero.  The composition formula gives
    // p! sum_L c_L prod f^{(L_i)}(0), and the series of exp(x + x^2) gives the
    // same numbers by the recursion b_{k+1} = b_k + 2 k b_{k-1}.
    std::vector<double> series = {1.0, 1.0}; // derivatives of exp(x + x^2) at 0
    for (int k = 1; k + 1 <= 8; ++k)
        series.push_back(series[k] + 2.0 * k * series[k - 1]);
    for (int p = 1; p <= 8; ++p) {
        double total = 0.0;
        for (const partition& lam : enumerate_partitions(p)) {
            double prod = static_cast<double>(partition_block_count(lam));
            bool zero = false;
            for (int part : lam.parts) {
                if (part == 1) prod *= 1.0;
                else if (part == 2) prod *= 2.0;
                else zero = true;
            }
            if (!zero) total += prod;
        }
        EXPECT_DOUBLE_EQ(total, series[p]) << "p=" << p;
    }
}

TEST(coeff, denominator_integrality) {
    for (int p = 1; p <= 12; ++p)
        for (const partition& lam : enumerate_partitions(p)) {
            // p! c_L must be a positive integer; the accessor throws otherwise.
            EXPECT_GE(partition_block_count(lam), 1u);
            EXPECT_NEAR(partition_coeff(lam) * static_cast<double>(factorial_u64(p)),
                        static_cast<double>(partition_block_count(lam)), 1e-9);
        }
}

TEST(binomial, pinned_row_and_edges) {
    EXPECT_EQ(binomial_u64(5, 0), 1u);
    EXPECT_EQ(binomial_u64(5, 2), 10u);
    EXPECT_EQ(binomial_u64(10, 5), 252u);
    EXPECT_EQ(binomial_u64(5, 6), 0u);
    EXPECT_EQ(binomial_u64(5, -1), 0u);
    // Pascal identity on a grid.
    for (int n = 1; n <= 20; ++n)
        for (int k = 1; k <= n; ++k)
            EXPECT_EQ(binomial_u64(n, k), binomial_u64(n - 1, k - 1) + binomial_u64(n - 1, k));
}

TEST(moment_rhs, p2_reduces_to_variance_identity) {
    // For p = 2 the head is the single partition (2) with coefficient 1 and
    // factor d_z M, and the tail is 2 * boundary_moment(1,1).
    const double m = 6.0, n = 6.0, z = 0.5;
    const double fake_d1 = -3.25;
    const double rhs = moment_identity_rhs(m, n, z, 2, [&](int deriv, int power) {
        EXPECT_EQ(deriv, 1);
        EXPECT_EQ(power, 1);
        return fake_d1;
    });
    EXPECT_DOUBLE_EQ(rhs, mean_deriv(m, n, z, 1) - 2.0 * fake_d1);
}

TEST(moment_rhs, p3_calls_both_mixed_terms) {
    const double m = 4.0, n = 5.0, z = 0.45;
    std::map<std::pair<int, int>, int> calls;
    const double rhs = moment_identity_rhs(m, n, z, 3, [&](int deriv, int power) {
        ++calls[{deriv, power}];
        return 0.0;
    });
    // Head: only the partition (3) has min part >= 2; coefficient 1.
    EXPECT_DOUBLE_EQ(rhs, mean_deriv(m, n, z, 2));
    // Tail: k = 1 -> (2,1) and k = 2 -> (1,2), each once.
    EXPECT_EQ(calls.size(), 2u);
    EXPECT_EQ((calls[{2, 1}]), 1);
    EXPECT_EQ((calls[{1, 2}]), 1);
    EXPECT_THROW(moment_identity_rhs(m, n, z, 1, [](int, int) { return 0.0; }),
                 std::domain_error);
}
