#pragma once

// Fast invariant suite: exact dynamic-programming oracles, pathwise coupling
// and comparison inequalities, analytic closed-form identities, and stream
// sanity.  Shared by the command-line `verify` subcommand and the acceptance
// harness; every check returns signed-margin verdicts (margin 0 for exact
// checks that hold, -k when k instances fail).

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "analytic.hpp"
#include "field.hpp"
#include "lpp.hpp"
#include "partitions.hpp"
#include "report.hpp"
#include "rng.hpp"

namespace lpplab {

namespace detail {

inline verdict exact_verdict(const std::string& id, std::uint64_t violations,
                             const std::string& what) {
    verdict v;
    v.id = id;
    v.pass = violations == 0;
    v.margin = violations == 0 ? 0.0 : -static_cast<double>(violations);
    v.detail = what + (violations == 0 ? ": all held" : ": " + std::to_string(violations) +
                                                            " violations");
    return v;
}

// dyadic rational in (0,1] with a 20-bit mantissa, so that sums of a few
// dozen weights are exactly representable and path-sum comparisons are exact
inline double dyadic_unit(double u) {
    return (std::floor(u * 1048576.0) + 1.0) * 0x1p-20;
}

} // namespace detail

// DP values against exhaustive path enumeration on small random grids, for
// every boundary variant; plus the northeast construction against its own
// brute force.  The runtime verdict enforces the five-second budget separately.
inline std::vector<verdict> check_dp_oracle(std::uint64_t fields = 500,
                                            std::uint64_t seed = default_master_seed) {
    const auto t0 = std::chrono::steady_clock::now();
    std::uint64_t bad_values = 0, bad_ne = 0;
    for (std::uint64_t r = 0; r < fields; ++r) {
        const seed_spec spec{seed, "check/dp", r};
        const counter_stream cs = spec.sub("cfg").stream();
        const std::int64_t m =
            1 + static_cast<std::int64_t>(cs.uniform(rng_layer::aux, 1) * 11.0);
        const std::int64_t n =
            1 + static_cast<std::int64_t>(cs.uniform(rng_layer::aux, 2) *
                                          static_cast<double>(12 - m));
        const double w = 0.15 + 0.7 * cs.uniform(rng_layer::aux, 3);
        const double z = 0.15 + 0.7 * cs.uniform(rng_layer::aux, 4);
        const stream_field f(spec, m, n);

        const std::vector<std::pair<grid_variant, boundary_param>> cases{
            {grid_variant::bulk, boundary_param::bulk()},
            {grid_variant::one_sided_hor, boundary_param{w, -pos_inf}},
            {grid_variant::one_sided_ver, boundary_param{pos_inf, z}},
            {grid_variant::two_sided, boundary_param{w, z}},
        };
        for (const auto& [var, p] : cases) {
            const auto g = lpp_values_full(f, var, p);
            const double bf = lpp_bruteforce(f, var, p);
            if (g.at({m, n}) != bf) ++bad_values;
        }
        const auto ne = northeast_values(f, w);
        if (ne.at({1, 1}) != northeast_bruteforce(f, w, {1, 1})) ++bad_ne;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::vector<verdict> out;
    out.push_back(detail::exact_verdict("check.dp-oracle", bad_values,
                                        std::to_string(fields) +
                                            " grids x 4 variants vs exhaustive enumeration"));
    out.push_back(detail::exact_verdict("check.dp-northeast", bad_ne,
                                        "northeast recursion vs exhaustive enumeration"));
    verdict rt;
    rt.id = "check.dp-runtime";
    rt.margin = 5.0 - wall;
    rt.pass = rt.margin >= 0.0;
    rt.detail = "oracle sweep took " + std::to_string(wall) + " s, budget 5 s";
    out.push_back(rt);
    return out;
}

// Pathwise facts on shared-seed grids: the domination chain between the
// bulk, one-sided, and two-sided values; monotonicity of the one-sided value
// in the boundary rate; and the four deterministic increment-comparison
// inequalities, evaluated in exact dyadic arithmetic.
inline std::vector<verdict> check_couplings(std::uint64_t grids = 100,
                                            std::uint64_t seed = default_master_seed) {
    std::uint64_t bad_chain = 0, bad_mono = 0;
    std::uint64_t bad_cmp[4] = {0, 0, 0, 0};

    for (std::uint64_t r = 0; r < grids; ++r) {
        const seed_spec spec{seed, "check/coupling", r};
        const counter_stream cs = spec.sub("cfg").stream();
        const std::int64_t m =
            4 + static_cast<std::int64_t>(cs.uniform(rng_layer::aux, 1) * 9.0);
        const std::int64_t n =
            4 + static_cast<std::int64_t>(cs.uniform(rng_layer::aux, 2) * 9.0);
        const double a = 0.2 + 0.6 * cs.uniform(rng_layer::aux, 3);
        const double b = 0.2 + 0.6 * cs.uniform(rng_layer::aux, 4);
        const double w1 = std::min(a, b), w2 = std::max(a, b) + 0.01;
        const double z = 0.2 + 0.6 * cs.uniform(rng_layer::aux, 5);

        const stream_field f(spec, m, n);
        const auto d = decompose_to_target(f);
        const double bulk_g = d.to_row1[0];
        const auto bw1 = boundary_weights(f, boundary_param{w1, z});
        const auto bw2 = boundary_weights(f, boundary_param{w2, z});
        const double h1 = boundary_scan(d.to_row1, bw1.hor).value;
        const double h2 = boundary_scan(d.to_row1, bw2.hor).value;
        const double v1 = boundary_scan(d.to_col1, bw1.ver).value;
        const double two1 = std::max(h1, v1);
        if (!(bulk_g <= h1 && h1 <= two1 && bulk_g <= v1 && v1 <= two1)) ++bad_chain;
        if (!(h2 <= h1)) ++bad_mono; // lower rate means larger weights

        // exact comparison grid: passage values T[s] from every start s over
        // a 7x7 dyadic field
        constexpr std::int64_t M = 7;
        double q[M + 1][M + 1];
        const counter_stream ds = spec.sub("lcomp").stream();
        for (std::int64_t i = 1; i <= M; ++i)
            for (std::int64_t j = 1; j <= M; ++j)
                q[i][j] = detail::dyadic_unit(
                    ds.uniform(rng_layer::aux, site_index(i, j)));
        // T[si][sj][i][j] = passage value from (si,sj) to (i,j)
        static thread_local double T[M + 1][M + 1][M + 1][M + 1];
        for (std::int64_t si = 1; si <= M; ++si)
            for (std::int64_t sj = 1; sj <= M; ++sj)
                for (std::int64_t i = si; i <= M; ++i)
                    for (std::int64_t j = sj; j <= M; ++j) {
                        double best = -pos_inf;
                        if (i == si && j == sj) best = 0.0;
                        if (i > si) best = std::max(best, T[si][sj][i - 1][j]);
                        if (j > sj) best = std::max(best, T[si][sj][i][j - 1]);
                        T[si][sj][i][j] = q[i][j] + best;
                    }
        for (std::int64_t ui = 1; ui <= M - 2; ++ui)
            for (std::int64_t uj = 1; uj <= M - 2; ++uj)
                for (std::int64_t vi = ui; vi <= M - 1; ++vi)
                    for (std::int64_t vj = uj; vj <= M - 1; ++vj) {
                        const double A = T[ui][uj][vi][vj];
                        if (vi > ui) {
                            const double B = T[ui + 1][uj][vi][vj];
                            if (!(A - B <= T[ui][uj][vi][vj + 1] - T[ui + 1][uj][vi][vj + 1]))
                                ++bad_cmp[0];
                            if (!(A - B >= T[ui][uj][vi + 1][vj] - T[ui + 1][uj][vi + 1][vj]))
                                ++bad_cmp[1];
                        }
                        if (vj > uj) {
                            const double B = T[ui][uj + 1][vi][vj];
                            if (!(A - B <= T[ui][uj][vi + 1][vj] - T[ui][uj + 1][vi + 1][vj]))
                                ++bad_cmp[2];
                            if (!(A - B >= T[ui][uj][vi][vj + 1] - T[ui][uj + 1][vi][vj + 1]))
                                ++bad_cmp[3];
                        }
                    }
    }

    std::vector<verdict> out;
    out.push_back(detail::exact_verdict("check.coupling-chain", bad_chain,
                                        "bulk <= one-sided <= two-sided on shared seeds"));
    out.push_back(detail::exact_verdict("check.coupling-monotone", bad_mono,
                                        "one-sided value nonincreasing in the boundary rate"));
    const char* names[4] = {"a", "b", "c", "d"};
    for (int k = 0; k < 4; ++k)
        out.push_back(detail::exact_verdict(std::string("check.comparison-") + names[k],
                                            bad_cmp[k],
                                            "increment comparison inequality (" +
                                                std::string(names[k]) + ") on exact grids"));
    return out;
}

// Closed-form identities of the analytic kernel, each against an independent
// evaluation: numerical derivatives of the mean, the minimizing property of
// the characteristic parameter, the exponential-moment closed form, the
// finite Poisson sum for the regularized gamma tail, and the Cramér rate.
inline std::vector<verdict> check_analytic_identities() {
    double min_slack = pos_inf;
    std::uint64_t bad = 0;
    const auto within = [&](double err, double tol) {
        min_slack = std::min(min_slack, tol - err);
        if (!(err <= tol)) ++bad;
    };

    // mean derivatives vs Richardson finite differences
    for (const auto& [x, y, z] : {std::tuple{3.0, 4.0, 0.35}, {10.0, 10.0, 0.5},
                                  {7.0, 2.0, 0.62}}) {
        for (int k = 1; k <= 3; ++k) {
            const double h = 5e-3;
            const auto dk = [&](double zz, int kk) {
                return kk == 0 ? mean_fn(x, y, zz) : mean_deriv(x, y, zz, kk);
            };
            const double fd = (dk(z + h, k - 1) - dk(z - h, k - 1)) / (2.0 * h);
            const double fd2 = (dk(z + h / 2, k - 1) - dk(z - h / 2, k - 1)) / h;
            const double rich = (4.0 * fd2 - fd) / 3.0;
            within(std::abs(rich - dk(z, k)) / std::max(1.0, std::abs(dk(z, k))), 1e-6);
        }
    }

    // shape value is the minimum of the mean over the parameter
    for (const auto& [x, y] : {std::pair{5.0, 9.0}, {64.0, 64.0}, {300.0, 20.0}}) {
        const double zeta = zeta_fn(x, y);
        within(std::abs(mean_fn(x, y, zeta) - shape_fn(x, y)) / shape_fn(x, y), 1e-12);
        within(shape_fn(x, y) - mean_fn(x, y, zeta + 0.01), 0.0);
        within(shape_fn(x, y) - mean_fn(x, y, zeta - 0.01), 0.0);
        const double sq = std::sqrt(x) + std::sqrt(y);
        within(std::abs(sigma_fn(x, y) -
                        std::pow(sq, 4.0 / 3.0) / std::pow(x * y, 1.0 / 6.0)),
               1e-9);
    }

    // exponential-moment closed form at the pinned point: (11/9)^16
    within(std::abs(rains_log_mgf(8, 8, 0.55, 0.45) - 16.0 * std::log(11.0 / 9.0)), 1e-12);

    // regularized gamma tail vs the finite Poisson sum
    for (int n = 1; n <= 6; ++n)
        for (double xx : {0.1, 1.0, 2.5, 7.0, 20.0}) {
            double term = std::exp(-xx), sum = term;
            for (int k = 1; k < n; ++k) {
                term *= xx / static_cast<double>(k);
                sum += term;
            }
            within(std::abs(regularized_gamma_upper(n, xx) - sum), 1e-12);
        }

    // Cramér rate function
    within(std::abs(cramer_rate(1.0)), 0.0);
    within(std::abs(cramer_rate(0.5) - (std::log(2.0) - 0.5)), 1e-12);
    within(std::abs(cramer_rate(2.0) - (1.0 - std::log(2.0))), 1e-12);
    if (!(cramer_rate(0.0) == pos_inf && cramer_rate(-1.0) == pos_inf)) ++bad;

    // characteristic direction and shift index defining inequalities
    for (double z : {0.3, 0.5, 0.7}) {
        const auto [dx, dy] = char_direction(z);
        within(std::abs(zeta_fn(dx, dy) - z), 1e-12);
    }
    for (const auto& [m, n, w] : {std::tuple{10.0, 6.0, 0.5}, {20.0, 20.0, 0.45}}) {
        const int k = shift_index(static_cast<int>(m), static_cast<int>(n), w);
        if (!(zeta_fn(m - k, n) < w && w <= zeta_fn(m - k + 1, n))) ++bad;
    }

    verdict v;
    v.id = "check.analytic-identities";
    v.pass = bad == 0;
    v.margin = bad == 0 ? min_slack : -static_cast<double>(bad);
    v.detail = "closed forms vs independent evaluations, worst slack " +
               std::to_string(min_slack);
    return {v};
}

// Exact agreement of the partition expansion with the nested-derivative
// oracle for exp(x + x^2): integer arithmetic on both sides, orders p <= 5.
inline std::vector<verdict> check_partition_oracle() {
    // series oracle: f = exp(g) with g = x + x^2 satisfies f' = (1 + 2x) f,
    // so the scaled coefficients b_k = k! [x^k] f obey b_{k+1} = b_k + 2k b_{k-1}
    std::vector<std::int64_t> oracle{1, 1};
    for (int k = 1; k <= 5; ++k)
        oracle.push_back(oracle[static_cast<std::size_t>(k)] +
                         2 * static_cast<std::int64_t>(k) *
                             oracle[static_cast<std::size_t>(k - 1)]);

    const auto factorial = [](int k) {
        std::int64_t f = 1;
        for (int i = 2; i <= k; ++i) f *= i;
        return f;
    };

    std::uint64_t bad = 0;
    for (int p = 1; p <= 5; ++p) {
        std::int64_t total = 0;
        for (const partition& lam : enumerate_partitions(p)) {
            std::int64_t denom = 1;
            int twos = 0;
            bool zero = false;
            int current = 0, count = 0;
            const auto flush = [&]() {
                if (count == 0) return;
                for (int c = 0; c < count; ++c) denom *= factorial(current);
                denom *= factorial(count);
            };
            for (int part : lam.parts) {
                if (part > 2) zero = true;
                if (part == 2) ++twos;
                if (part == current) {
                    ++count;
                } else {
                    flush();
                    current = part;
                    count = 1;
                }
            }
            flush();
            if (zero) continue;
            const std::int64_t pf = factorial(p);
            if (pf % denom != 0) {
                ++bad; // Bell coefficients are always integers
                continue;
            }
            const std::int64_t bell = pf / denom;
            std::int64_t term = bell;
            for (int t = 0; t < twos; ++t) term *= 2; // g''(0) = 2, g'(0) = 1
            total += term;

            // the library's floating-point coefficient must round to the
            // same integer
            const double lib = static_cast<double>(pf) * partition_coeff(lam);
            if (std::abs(lib - static_cast<double>(bell)) >
                1e-9 * static_cast<double>(bell))
                ++bad;
        }
        if (total != oracle[static_cast<std::size_t>(p)]) ++bad;
    }
    return {detail::exact_verdict("check.partition-oracle", bad,
                                  "partition expansion vs series recurrence for exp(x+x^2)")};
}

// Stream sanity: determinism, replica separation, key avalanche and a
// collision scan over derived stream keys, open-interval uniforms.
inline std::vector<verdict> check_rng(std::uint64_t seed = default_master_seed) {
    std::uint64_t bad_det = 0, bad_sep = 0, bad_open = 0, collisions = 0;

    const seed_spec s0{seed, "check/rng", 0};
    const counter_stream a = s0.stream();
    const counter_stream b = s0.stream();
    for (std::uint64_t i = 1; i <= 32; ++i)
        if (a.uniform(rng_layer::bulk, i) != b.uniform(rng_layer::bulk, i)) ++bad_det;

    const counter_stream c = seed_spec{seed, "check/rng", 1}.stream();
    std::uint64_t equal = 0;
    for (std::uint64_t i = 1; i <= 64; ++i)
        if (a.uniform(rng_layer::bulk, i) == c.uniform(rng_layer::bulk, i)) ++equal;
    if (equal > 0) ++bad_sep;

    const std::uint64_t k0 = derive_stream_key(seed, "check/rng", 0);
    const std::uint64_t k1 = derive_stream_key(seed, "check/rng", 1);
    const int hamming = std::popcount(k0 ^ k1);
    if (hamming < 16) ++bad_sep;

    std::set<std::uint64_t> keys;
    for (std::uint64_t r = 0; r < 2000; ++r)
        for (int e = 0; e < 50; ++e)
            keys.insert(derive_stream_key(seed, "exp" + std::to_string(e), r));
    collisions = 100000 - keys.size();

    for (std::uint64_t i = 1; i <= 10000; ++i) {
        const double u = a.uniform(rng_layer::aux, i);
        if (!(u > 0.0 && u < 1.0)) ++bad_open;
    }

    std::vector<verdict> out;
    out.push_back(detail::exact_verdict("check.rng-determinism", bad_det,
                                        "identical spec reproduces identical draws"));
    out.push_back(detail::exact_verdict("check.rng-separation", bad_sep,
                                        "replica streams differ, key hamming >= 16"));
    out.push_back(detail::exact_verdict("check.rng-collisions", collisions,
                                        "100000 derived stream keys distinct"));
    out.push_back(detail::exact_verdict("check.rng-open-interval", bad_open,
                                        "uniforms strictly inside (0,1)"));
    return out;
}

// Everything the `verify` subcommand runs.
inline std::vector<verdict> run_all_checks(std::uint64_t seed = default_master_seed) {
    std::vector<verdict> all;
    for (auto f : {&check_dp_oracle}) {
        auto v = f(500, seed);
        all.insert(all.end(), v.begin(), v.end());
    }
    {
        auto v = check_couplings(100, seed);
        all.insert(all.end(), v.begin(), v.end());
    }
    {
        auto v = check_analytic_identities();
        all.insert(all.end(), v.begin(), v.end());
    }
    {
        auto v = check_partition_oracle();
        all.insert(all.end(), v.begin(), v.end());
    }
    {
        auto v = check_rng(seed);
        all.insert(all.end(), v.begin(), v.end());
    }
    return all;
}

} // namespace lpplab
