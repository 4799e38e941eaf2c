#pragma once

// Integer partitions and Faa di Bruno coefficients, used by the centered
// moment recursion for the stationary passage time.
//
// For a partition L of p with multiplicities m_j = #{i : L_i = j}, the
// composition coefficient is
//     c_L = 1 / ( prod_j (j!)^{m_j} m_j! ),
// so that d^p/dx^p g(f(x)) = p! sum_{k} g^{(k)}(f) sum_{L of p, len k} c_L
// prod_i f^{(L_i)}.  p! c_L is the number of set partitions of [p] with block
// sizes L, hence an integer.  Everything here is exact in 64-bit integers for
// p <= 20 (20! < 2^64).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "analytic.hpp"

namespace lpplab {

inline constexpr int max_partition_order = 20;

struct partition {
    std::vector<int> parts; // nonincreasing, all >= 1

    int sum() const {
        int s = 0;
        for (int p : parts) s += p;
        return s;
    }
    int length() const { return static_cast<int>(parts.size()); }
    int min_part() const {
        int m = parts.empty() ? 0 : parts.front();
        for (int p : parts)
            if (p < m) m = p;
        return m;
    }
};

inline std::uint64_t factorial_u64(int n) {
    if (n < 0 || n > max_partition_order)
        throw std::domain_error("factorial_u64: order out of range");
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
    return f;
}

inline std::uint64_t binomial_u64(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t b = 1;
    for (int i = 1; i <= k; ++i) b = b * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return b;
}

namespace detail {

inline void enumerate_rec(int remaining, int max_part, std::vector<int>& cur,
                          std::vector<partition>& out) {
    if (remaining == 0) {
        out.push_back(partition{cur});
        return;
    }
    for (int part = std::min(remaining, max_part); part >= 1; --part) {
        cur.push_back(part);
        enumerate_rec(remaining - part, part, cur, out);
        cur.pop_back();
    }
}

} // namespace detail

// All partitions of p in reverse-lexicographic order:
// (p), (p-1,1), ..., (1,...,1).
inline std::vector<partition> enumerate_partitions(int p) {
    if (p < 1 || p > max_partition_order)
        throw std::domain_error("enumerate_partitions: order must be in [1,20]");
    std::vector<partition> out;
    std::vector<int> cur;
    detail::enumerate_rec(p, p, cur, out);
    return out;
}

// Exact denominator of c_L: prod_j (j!)^{m_j} m_j!.
inline std::uint64_t partition_coeff_denominator(const partition& lam) {
    std::uint64_t den = 1;
    int run = 0, prev = -1;
    for (int part : lam.parts) {
        if (part < 1 || part > max_partition_order)
            throw std::domain_error("partition_coeff_denominator: part out of range");
        if (part == prev) {
            ++run;
        } else {
            prev = part;
            run = 1;
        }
        den *= factorial_u64(part); // one factor j! per occurrence
        den *= static_cast<std::uint64_t>(run); // builds m_j! incrementally
    }
    return den;
}

inline double partition_coeff(const partition& lam) {
    return 1.0 / static_cast<double>(partition_coeff_denominator(lam));
}

// p! c_L: the number of set partitions of [p] with block sizes L.
inline std::uint64_t partition_block_count(const partition& lam) {
    const int p = lam.sum();
    const std::uint64_t num = factorial_u64(p);
    const std::uint64_t den = partition_coeff_denominator(lam);
    if (num % den != 0)
        throw std::logic_error("partition_block_count: coefficient is not integral");
    return num / den;
}

// Right-hand side of the centered moment recursion for the stationary
// passage time at (m,n), parameter z:
//
//   E[(G^z - M^z)^p] = p! sum_{L of p, min part >= 2} c_L prod_i d_z^{L_i - 1} M^z
//                      - sum_{k=1}^{p-1} C(p,k) d_w^{p-k} E[(G^{w,z} - M^z)^k] |_{w=z}.
//
// boundary_moment supplies the mixed boundary term: (deriv_order, power) ->
// d_w^{deriv_order} E[(G^{w,z} - M^z)^power] at w = z.
inline double moment_identity_rhs(double m, double n, double z, int p,
                                  const std::function<double(int, int)>& boundary_moment) {
    if (p < 2 || p > max_partition_order)
        throw std::domain_error("moment_identity_rhs: power must be in [2,20]");
    double head = 0.0;
    for (const partition& lam : enumerate_partitions(p)) {
        if (lam.min_part() < 2) continue;
        double prod = static_cast<double>(partition_block_count(lam));
        for (int part : lam.parts) prod *= mean_deriv(m, n, z, part - 1);
        head += prod;
    }
    double tail = 0.0;
    for (int k = 1; k <= p - 1; ++k)
        tail += static_cast<double>(binomial_u64(p, k)) * boundary_moment(p - k, k);
    return head - tail;
}

} // namespace lpplab
