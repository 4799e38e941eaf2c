#pragma once

// The named Monte Carlo experiments.  Each driver samples with
// counter-addressed streams keyed by (master seed, experiment id, replica),
// reduces sequentially in replica order (so results are bitwise independent
// of the worker count), and emits verdicts with signed margins plus
// long-format point records.
//
// The heavy drivers share one structural trick: a single reverse interior
// sweep (decompose_to_target) yields the passage profile from every axis
// site to the target, after which bulk values, one-sided and two-sided
// boundary values, and exit points for any number of boundary parameters
// are O(N) scans against the same interior pass.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "analytic.hpp"
#include "field.hpp"
#include "lpp.hpp"
#include "partitions.hpp"
#include "pool.hpp"
#include "report.hpp"
#include "stats.hpp"
#include "tilt.hpp"

namespace lpplab {

struct run_context {
    std::uint64_t seed = default_master_seed;
    unsigned workers = 1;
};

namespace detail {

inline run_context context_of(const kv_config& cfg) {
    run_context ctx;
    ctx.seed = cfg.get_u64("seed", default_master_seed);
    const std::int64_t w = cfg.get_int("workers", static_cast<std::int64_t>(default_workers()));
    if (w < 1) throw std::invalid_argument("config: workers must be >= 1");
    ctx.workers = static_cast<unsigned>(w);
    return ctx;
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

inline void echo(experiment_result& res, const std::string& key, const std::string& v) {
    res.config_used[key] = v;
}

inline void echo_ctx(experiment_result& res, const run_context& ctx) {
    echo(res, "seed", std::to_string(ctx.seed));
    echo(res, "workers", std::to_string(ctx.workers));
}

inline std::string fmt_ulist(const std::vector<std::uint64_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

inline std::string fmt_dlist(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
    return s;
}

inline void add_point(experiment_result& res, double n, const std::string& param,
                      const std::string& stat, double value, double lo, double hi,
                      std::uint64_t replicas, std::uint64_t seed) {
    res.points.push_back({res.name, n, param, stat, value, lo, hi, replicas, seed});
}

template <class Fn>
std::vector<double> replica_doubles(std::uint64_t replicas, unsigned workers, Fn&& fn) {
    std::vector<double> out(replicas);
    parallel_replicas(replicas, workers, [&](std::uint64_t r) { out[r] = fn(r); });
    return out;
}

inline double median_of(std::vector<double> x) {
    if (x.empty()) throw std::invalid_argument("median_of: empty sample");
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    return (n % 2 == 1) ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

inline double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

// 95% normal-approximation interval for a frequency.
inline void freq_point(experiment_result& res, double n, const std::string& param,
                       const std::string& stat, double p, std::uint64_t reps, std::uint64_t seed) {
    const double se = frequency_se(p, reps);
    add_point(res, n, param, stat, p, p - 1.96 * se, p + 1.96 * se, reps, seed);
}

// ----- rains ---------------------------------------------------------------
// Exact exponential-moment identity of the two-sided model:
// E exp{(w-z) G^{w,z}_{(m,n)}} = (w/z)^m ((1-z)/(1-w))^n.

inline void run_rains(const kv_config& cfg, experiment_result& res, const run_context& ctx) {
    const std::int64_t m = cfg.get_int("m", 8), n = cfg.get_int("n", 8);
    const double w = cfg.get_double("w", 0.55), z = cfg.get_double("z", 0.45);
    const std::uint64_t reps = cfg.get_u64("replicas", 200000);
    const int boot = static_cast<int>(cfg.get_int("bootstrap", 400));
    echo_ctx(res, ctx);
    echo(res, "m", std::to_string(m));
    echo(res, "n", std::to_string(n));
    echo(res, "w", fmt(w));
    echo(res, "z", fmt(z));
    echo(res, "replicas", std::to_string(reps));
    echo(res, "bootstrap", std::to_string(boot));

    const double closed = std::exp(rains_log_mgf(static_cast<double>(m), static_cast<double>(n), w, z));
    const boundary_param bp{w, z};
    const std::vector<double> x = replica_doubles(reps, ctx.workers, [&](std::uint64_t r) {
        const stream_field f(seed_spec{ctx.seed, "rains", r}, m, n);
        const auto roll = lpp_values_rolling(f, grid_variant::two_sided, bp);
        return std::exp((w - z) * roll.final_at(m));
    });
    res.total_replicas += reps;

    const auto ci = bootstrap_ci(x, [](const std::vector<double>& v) { return mean_of(v); },
                                 seed_spec{ctx.seed, "rains/boot", 0}.stream(), boot);
    const std::string param = "w=" + fmt(w) + ";z=" + fmt(z);
    add_point(res, static_cast<double>(m), param, "mc_estimate", ci.point, ci.lo, ci.hi, reps, ctx.seed);
    add_point(res, static_cast<double>(m), param, "closed_form", closed, closed, closed, reps, ctx.seed);
    res.scalar("mc_estimate", ci.point);
    res.scalar("closed_form", closed);
    res.scalar("mc_se", ci.se);
    res.gate("rains.mgf-3se", 3.0 * ci.se - std::abs(ci.point - closed),
             "mc " + fmt(ci.point) + " vs closed " + fmt(closed) + ", se " + fmt(ci.se));
}

// ----- stationarity --------------------------------------------------------
// Burke property: interior increments of the stationary model are exponential
// with the boundary rates; the northeast-reversed model reproduces the
// two-sided law, and its consecutive increments sum to an Erlang law.

inline void run_stationarity(const kv_config& cfg, experiment_result& res, const run_context& ctx) {
    const std::int64_t n = cfg.get_int("n", 50);
    const double z = cfg.get_double("z", 0.5);
    const std::uint64_t reps = cfg.get_u64("replicas", 10000);
    const std::int64_t ne_n = cfg.get_int("ne_n", 20);
    const double ne_u = cfg.get_double("ne_u", 0.3);
    const std::uint64_t ne_reps = cfg.get_u64("ne_replicas", 10000);
    if (n < 4 || ne_n < 4) throw std::invalid_argument("stationarity: grids must have n >= 4");
    echo_ctx(res, ctx);
    echo(res, "n", std::to_string(n));
    echo(res, "z", fmt(z));
    echo(res, "replicas", std::to_string(reps));
    echo(res, "ne_n", std::to_string(ne_n));
    echo(res, "ne_u", fmt(ne_u));
    echo(res, "ne_replicas", std::to_string(ne_reps));

    const std::int64_t c = n / 2;
    std::vector<double> hinc(reps), vinc(reps);
    parallel_replicas(reps, ctx.workers, [&](std::uint64_t r) {
        const stream_field f(seed_spec{ctx.seed, "stationarity", r}, n, n);
        const auto g = lpp_values_full(f, grid_variant::two_sided, boundary_param::stationary(z));
        hinc[r] = g.at({c, c}) - g.at({c - 1, c});
        vinc[r] = g.at({c, c}) - g.at({c, c - 1});
    });
    res.total_replicas += reps;

    const auto exp_cdf = [](double rate) {
        return [rate](double t) { return t <= 0.0 ? 0.0 : 1.0 - std::exp(-rate * t); };
    };
    const auto ks_h = ks_test(hinc, exp_cdf(z));
    const auto ks_v = ks_test(vinc, exp_cdf(1.0 - z));
    const std::string param = "z=" + fmt(z);
    add_point(res, static_cast<double>(n), param, "ks_p_inc_hor", ks_h.p_value, ks_h.p_value,
              ks_h.p_value, reps, ctx.seed);
    add_point(res, static_cast<double>(n), param, "ks_p_inc_ver", ks_v.p_value, ks_v.p_value,
              ks_v.p_value, reps, ctx.seed);
    res.gate("stationarity.inc-hor-ks", ks_h.p_value - 0.01,
             "D=" + fmt(ks_h.d) + " p=" + fmt(ks_h.p_value) + " vs Exp(" + fmt(z) + ")");
    res.gate("stationarity.inc-ver-ks", ks_v.p_value - 0.01,
             "D=" + fmt(ks_v.d) + " p=" + fmt(ks_v.p_value) + " vs Exp(" + fmt(1.0 - z) + ")");

    // Reversal: the corner-to-corner value of the northeast frame has the law
    // of the forward two-sided value with horizontal rate u; three consecutive
    // bottom-row increments are Erlang(3, u).
    std::vector<double> rev(ne_reps), erl(ne_reps);
    parallel_replicas(ne_reps, ctx.workers, [&](std::uint64_t r) {
        const stream_field f(seed_spec{ctx.seed, "stationarity/ne", r}, ne_n, ne_n);
        const auto g = northeast_values(f, ne_u);
        rev[r] = g.at({1, 1});
        erl[r] = g.at({1, 1}) - g.at({4, 1});
    });
    const std::vector<double> fwd = replica_doubles(ne_reps, ctx.workers, [&](std::uint64_t r) {
        const stream_field f(seed_spec{ctx.seed, "stationarity/fwd", r}, ne_n, ne_n);
        return lpp_values_rolling(f, grid_variant::two_sided, boundary_param::stationary(ne_u))
            .final_at(ne_n);
    });
    res.total_replicas += 2 * ne_reps;

    const auto ks_rev = ks_test_two_sample(rev, fwd);
    const auto ks_erl = ks_test(erl, [ne_u](double t) {
        return t <= 0.0 ? 0.0 : 1.0 - regularized_gamma_upper(3, ne_u * t);
    });
    const std::string nep = "u=" + fmt(ne_u);
    add_point(res, static_cast<double>(ne_n), nep, "ks_p_reversal", ks_rev.p_value, ks_rev.p_value,
              ks_rev.p_value, ne_reps, ctx.seed);
    add_point(res, static_cast<double>(ne_n), nep, "ks_p_erlang3", ks_erl.p_value, ks_erl.p_value,
              ks_erl.p_value, ne_reps, ctx.seed);
    res.gate("stationarity.ne-reversal-ks", ks_rev.p_value - 0.01,
             "two-sample D=" + fmt(ks_rev.d) + " p=" + fmt(ks_rev.p_value));
    res.gate("stationarity.ne-erlang-ks", ks_erl.p_value - 0.01,
             "D=" + fmt(ks_erl.d) + " p=" + fmt(ks_erl.p_value) + " vs Erlang(3," + fmt(ne_u) + ")");
}

// ----- variance-identity ---------------------------------------------------
// Var G^z = d/dz M + (2/z) E[sum of horizontal boundary weights up to the
// horizontal exit point], both sides by independent Monte Carlo.

inline void run_variance_identity(const kv_config& cfg, experiment_result& res,
                                  const run_context& ctx) {
    const std::int64_t m = cfg.get_int("m", 10), n = cfg.get_int("n", 10);
    const double z = cfg.get_double("z", 0.5);
    const std::uint64_t reps = cfg.get_u64("replicas", 100000);
    const int boot = static_cast<int>(cfg.get_int("bootstrap", 400));
    echo_ctx(res, ctx);
    echo(res, "m", std::to_string(m));
    echo(res, "n", std::to_string(n));
    echo(res, "z", fmt(z));
    echo(res, "replicas", std::to_string(reps));
    echo(res, "bootstrap", std::to_string(boot));

    const std::vector<double> vals = replica_doubles(reps, ctx.workers, [&](std::uint64_t r) {
        const stream_field f(seed_spec{ctx.seed, "variance-identity/value", r}, m, n);
        return lpp_values_rolling(f, grid_variant::two_sided, boundary_param::stationary(z))
            .final_at(m);
    });
    const std::vector<double> exit_sum = replica_doubles(reps, ctx.workers, [&](std::uint64_t r) {
        const stream_field f(seed_spec{ctx.seed, "variance-identity/exit", r}, m, n);
        const auto g = lpp_values_full(f, grid_variant::two_sided, boundary_param::stationary(z));
        const auto path = geodesic_backtrack(g, {m, n});
        const auto e = exit_points(g, path);
        const auto b = boundary_weights(f, boundary_param::stationary(z));
        double s = 0.0;
        for (std::int64_t i = 1; i <= e.hor; ++i) s += b.hor[static_cast<std::size_t>(i - 1)];
        return s;
    });
    res.total_replicas += 2 * reps;

    const auto lhs = bootstrap_ci(vals, [](const std::vector<double>& v) { return sample_variance(v); },
                                  seed_spec{ctx.seed, "variance-identity/boot", 0}.stream(), boot);
    const double dm = mean_deriv(static_cast<double>(m), static_cast<double>(n), z, 1);
    const double rhs = dm + (2.0 / z) * mean_of(exit_sum);
    const double rhs_se = (2.0 / z) * standard_error(exit_sum);
    const std::string param = "z=" + fmt(z);
    add_point(res, static_cast<double>(m), param, "var_mc", lhs.point, lhs.lo, lhs.hi, reps, ctx.seed);
    add_point(res, static_cast<double>(m), param, "var_identity", rhs, rhs - 1.96 * rhs_se,
              rhs + 1.96 * rhs_se, reps, ctx.seed);
    res.scalar("var_mc", lhs.point);
    res.scalar("var_identity", rhs);
    const double se = std::sqrt(lhs.se * lhs.se + rhs_se * rhs_se);
    res.gate("variance-identity.both-sides-3se", 3.0 * se - std::abs(lhs.point - rhs),
             "lhs " + fmt(lhs.point) + " rhs " + fmt(rhs) + " combined se " + fmt(se));
}

// ----- moment-identity -----------------------------------------------------
// Central-moment recursion: p-th central moment of G^z equals the partition
// sum over mean derivatives minus binomially weighted mixed w-derivatives of
// lower centered moments; w-derivatives estimated by common-random-number
// central differences.  Gate p=2, report p=3.

inline void run_moment_identity(const kv_config& cfg, experiment_result& res,
                                const run_context& ctx) {
    const std::int64_t m = cfg.get_int("m", 6), n = cfg.get_int("n", 6);
    const double z = cfg.get_double("z", 0.5);
    const double h = cfg.get_double("h", 0.01);
    const std::uint64_t reps = cfg.get_u64("replicas", 200000);
    const int boot = static_cast<int>(cfg.get_int("bootstrap", 300));
    if (!(h > 0.0) && !(z - h > 0.0)) throw std::invalid_argument("moment-identity: bad step h");
    echo_ctx(res, ctx);
    echo(res, "m", std::to_string(m));
    echo(res, "n", std::to_string(n));
    echo(res, "z", fmt(z));
    echo(res, "h", fmt(h));
    echo(res, "replicas", std::to_string(reps));
    echo(res, "bootstrap", std::to_string(boot));

    const double x = static_cast<double>(m), y = static_cast<double>(n);
    // all centered moments use the fixed centering M^z, constant in w
    const double mean_exact = mean_fn(x, y, z);

    const std::vector<double> vals = replica_doubles(reps, ctx.workers, [&](std::uint64_t r) {
        const stream_field f(seed_spec{ctx.seed, "moment-identity/value", r}, m, n);
        return lpp_values_rolling(f, grid_variant::two_sided, boundary_param::stationary(z))
            .final_at(m);
    });

    // shared-field values at w = z-h, z, z+h: the same uniforms feed all
    // three boundary draws, so the differences are common-random-number
    std::vector<double> cm(reps), cp(reps), c0(reps);
    parallel_replicas(reps, ctx.workers, [&](std::uint64_t r) {
        const stream_field f(seed_spec{ctx.seed, "moment-identity/fd", r}, m, n);
        const double gm =
            lpp_values_rolling(f, grid_variant::two_sided, boundary_param{z - h, z}).final_at(m);
        const double g0 =
            lpp_values_rolling(f, grid_variant::two_sided, boundary_param{z, z}).final_at(m);
        const double gp =
            lpp_values_rolling(f, grid_variant::two_sided, boundary_param{z + h, z}).final_at(m);
        cm[r] = gm - mean_exact;
        c0[r] = g0 - mean_exact;
        cp[r] = gp - mean_exact;
    });
    res.total_replicas += 2 * reps;

    std::vector<double> d1(reps);
    for (std::uint64_t r = 0; r < reps; ++r) d1[r] = (cp[r] - cm[r]) / (2.0 * h);

    const auto lhs2 = bootstrap_ci(vals, [](const std::vector<double>& v) { return sample_variance(v); },
                                   seed_spec{ctx.seed, "moment-identity/boot", 0}.stream(), boot);
    const double rhs2 = mean_deriv(x, y, z, 1) - 2.0 * mean_of(d1);
    const double rhs2_se = 2.0 * standard_error(d1);
    const std::string param = "z=" + fmt(z) + ";h=" + fmt(h);
    add_point(res, x, param, "var_mc", lhs2.point, lhs2.lo, lhs2.hi, reps, ctx.seed);
    add_point(res, x, param, "var_fd_identity", rhs2, rhs2 - 1.96 * rhs2_se, rhs2 + 1.96 * rhs2_se,
              reps, ctx.seed);
    const double se2 = std::sqrt(lhs2.se * lhs2.se + rhs2_se * rhs2_se);
    res.gate("moment-identity.p2-3se", 3.0 * se2 - std::abs(lhs2.point - rhs2),
             "lhs " + fmt(lhs2.point) + " rhs " + fmt(rhs2) + " combined se " + fmt(se2));

    // p = 3, reported: mixed-derivative oracles from the same shared fields
    std::vector<double> third(reps);
    for (std::uint64_t r = 0; r < reps; ++r) {
        const double d = vals[r] - mean_exact;
        third[r] = d * d * d;
    }
    std::vector<double> dsq(reps), d2c(reps);
    for (std::uint64_t r = 0; r < reps; ++r) {
        dsq[r] = (cp[r] * cp[r] - cm[r] * cm[r]) / (2.0 * h);
        d2c[r] = (cp[r] - 2.0 * c0[r] + cm[r]) / (h * h);
    }
    const double d1_of_sq = mean_of(dsq), d2_of_ctr = mean_of(d2c);
    const double rhs3 =
        moment_identity_rhs(x, y, z, 3, [&](int deriv, int power) -> double {
            if (deriv == 1 && power == 2) return d1_of_sq;
            if (deriv == 2 && power == 1) return d2_of_ctr;
            throw std::logic_error("moment-identity: unexpected mixed-derivative order");
        });
    res.scalar("p3_mc", mean_of(third));
    res.scalar("p3_mc_se", standard_error(third));
    res.scalar("p3_identity", rhs3);
    add_point(res, x, param, "third_central_mc", mean_of(third),
              mean_of(third) - 1.96 * standard_error(third),
              mean_of(third) + 1.96 * standard_error(third), reps, ctx.seed);
    add_point(res, x, param, "third_central_identity", rhs3, rhs3, rhs3, reps, ctx.seed);
}

// ----- bulk-moments --------------------------------------------------------
// Cube-root fluctuation ladder: Var G^{zeta}_N ~ N^{2/3} and
// E|G_N - gamma_N|^p ~ N^{p/3} on the diagonal.

inline void run_bulk_moments(const kv_config& cfg, experiment_result& res, const run_context& ctx) {
    const std::vector<std::uint64_t> ladder =
        cfg.get_ulist("ladder", {128, 256, 512, 1024});
    const std::vector<std::uint64_t> reps_list =
        cfg.get_ulist("replicas", {5000, 5000, 2000, 1000});
    const int boot = static_cast<int>(cfg.get_int("bootstrap", 300));
    if (ladder.size() != reps_list.size())
        throw std::invalid_argument("bulk-moments: ladder and replicas lists differ in length");
    if (ladder.size() < 3) throw std::invalid_argument("bulk-moments: ladder needs >= 3 sizes");
    for (std::size_t i = 1; i < ladder.size(); ++i)
        if (ladder[i] <= ladder[i - 1])
            throw std::invalid_argument("bulk-moments: ladder must be strictly increasing");
    echo_ctx(res, ctx);
    echo(res, "ladder", fmt_ulist(ladder));
    echo(res, "replicas", fmt_ulist(reps_list));
    echo(res, "bootstrap", std::to_string(boot));

    std::vector<double> ns, var_zeta, abs1, abs2, abs3;
    for (std::size_t li = 0; li < ladder.size(); ++li) {
        const std::int64_t N = static_cast<std::int64_t>(ladder[li]);
        const std::uint64_t reps = reps_list[li];
        const double x = static_cast<double>(N);
        const double gamma_n = shape_fn(x, x);
        const double zeta = zeta_fn(x, x);

        std::vector<double> bulk_g(reps), stat_g(reps);
        parallel_replicas(reps, ctx.workers, [&](std::uint64_t r) {
            const stream_field f(
                seed_spec{ctx.seed, "bulk-moments/N" + std::to_string(N), r}, N, N);
            const auto d = decompose_to_target(f);
            bulk_g[r] = d.to_row1[0];
            const auto b = boundary_weights(f, boundary_param::stationary(zeta));
            const auto hs = boundary_scan(d.to_row1, b.hor);
            const auto vs = boundary_scan(d.to_col1, b.ver);
            stat_g[r] = std::max(hs.value, vs.value);
        });
        res.total_replicas += reps;

        const auto var_ci =
            bootstrap_ci(stat_g, [](const std::vector<double>& v) { return sample_variance(v); },
                         seed_spec{ctx.seed, "bulk-moments/boot" + std::to_string(N), 0}.stream(),
                         boot);
        const auto moments = mc_summary(bulk_g, gamma_n, {1, 2, 3});
        const std::string param = "zeta=" + fmt(zeta);
        add_point(res, x, param, "var_stationary", var_ci.point, var_ci.lo, var_ci.hi, reps,
                  ctx.seed);
        for (int p = 1; p <= 3; ++p) {
            add_point(res, x, param, "abs_gap_p" + std::to_string(p),
                      moments.central_abs[static_cast<std::size_t>(p - 1)], 0, 0, reps, ctx.seed);
            add_point(res, x, param, "pos_gap_p" + std::to_string(p),
                      moments.central_pos[static_cast<std::size_t>(p - 1)], 0, 0, reps, ctx.seed);
        }
        add_point(res, x, param, "mean_bulk", moments.mean, 0, 0, reps, ctx.seed);

        ns.push_back(x);
        var_zeta.push_back(var_ci.point);
        abs1.push_back(moments.central_abs[0]);
        abs2.push_back(moments.central_abs[1]);
        abs3.push_back(moments.central_abs[2]);
    }

    const auto fit_var = loglog_slope(ns, var_zeta);
    const auto fit1 = loglog_slope(ns, abs1);
    const auto fit2 = loglog_slope(ns, abs2);
    const auto fit3 = loglog_slope(ns, abs3);
    res.scalar("var_slope", fit_var.slope);
    res.scalar("abs_gap_slope_p1", fit1.slope);
    res.scalar("abs_gap_slope_p2", fit2.slope);
    res.scalar("abs_gap_slope_p3", fit3.slope);
    res.gate("bulk-moments.var-slope", 0.1 - std::abs(fit_var.slope - 2.0 / 3.0),
             "ln Var(G^zeta) vs ln N slope " + fmt(fit_var.slope) + ", window 2/3 +- 0.1");
    res.gate("bulk-moments.gap-slope", 0.08 - std::abs(fit1.slope - 1.0 / 3.0),
             "ln E|G - gamma| vs ln N slope " + fmt(fit1.slope) + ", window 1/3 +- 0.08");
}

// ----- boundary-kpz --------------------------------------------------------
// One-sided fluctuations across the critical window: for
// w = zeta + c K N^{-1/3}, c in {-1,0,+1}, variance stays on the N^{2/3}
// scale and the mean gap on the N^{1/3} scale.  Desk-scale windows +-0.15.

inline void run_boundary_kpz(const kv_config& cfg, experiment_result& res, const run_context& ctx) {
    const std::vector<std::uint64_t> ladder = cfg.get_ulist("ladder", {128, 256, 512, 1024});
    const std::vector<std::uint64_t> reps_list = cfg.get_ulist("replicas", {3000, 3000, 1200, 600});
    const double kwin = cfg.get_double("k_window", 1.0);
    if (ladder.size() != reps_list.size() || ladder.size() < 3)
        throw std::invalid_argument("boundary-kpz: need matching ladder/replicas, >= 3 sizes");
    echo_ctx(res, ctx);
    echo(res, "ladder", fmt_ulist(ladder));
    echo(res, "replicas", fmt_ulist(reps_list));
    echo(res, "k_window", fmt(kwin));

    const std::array<double, 3> cs{-1.0, 0.0, 1.0};
    const std::array<const char*, 3> cname{"minus", "center", "plus"};
    std::vector<double> ns;
    std::array<std::vector<double>, 3> var_c, gap_c;

    for (std::size_t li = 0; li < ladder.size(); ++li) {
        const std::int64_t N = static_cast<std::int64_t>(ladder[li]);
        const std::uint64_t reps = reps_list[li];
        const double x = static_cast<double>(N);
        const double gamma_n = shape_fn(x, x);
        const double zeta = zeta_fn(x, x);
        std::array<double, 3> ws{};
        for (std::size_t ci = 0; ci < 3; ++ci) ws[ci] = zeta + cs[ci] * kwin / std::cbrt(x);
        if (!(ws[0] > 0.0)) throw std::invalid_argument("boundary-kpz: window leaves (0,1)");

        std::array<std::vector<double>, 3> vals;
        std::array<std::vector<double>, 3> exits;
        for (auto& v : vals) v.resize(reps);
        for (auto& v : exits) v.resize(reps);
        parallel_replicas(reps, ctx.workers, [&](std::uint64_t r) {
            const stream_field f(
                seed_spec{ctx.seed, "boundary-kpz/N" + std::to_string(N), r}, N, N);
            const auto d = decompose_to_target(f);
            for (std::size_t ci = 0; ci < 3; ++ci) {
                const auto b = boundary_weights(f, boundary_param{ws[ci], -pos_inf});
                const auto hs = boundary_scan(d.to_row1, b.hor);
                vals[ci][r] = hs.value;
                exits[ci][r] = static_cast<double>(hs.exit);
            }
        });
        res.total_replicas += reps;

        ns.push_back(x);
        for (std::size_t ci = 0; ci < 3; ++ci) {
            const double var = sample_variance(vals[ci]);
            const auto mom = mc_summary(vals[ci], gamma_n, {1});
            var_c[ci].push_back(var);
            gap_c[ci].push_back(mom.central_abs[0]);
            const std::string param = std::string("c=") + cname[ci] + ";w=" + fmt(ws[ci]);
            add_point(res, x, param, "var_one_sided", var, 0, 0, reps, ctx.seed);
            add_point(res, x, param, "abs_gap_p1", mom.central_abs[0], 0, 0, reps, ctx.seed);
            add_point(res, x, param, "exit_over_n23", mean_of(exits[ci]) / std::pow(x, 2.0 / 3.0),
                      0, 0, reps, ctx.seed);
        }
    }

    for (std::size_t ci = 0; ci < 3; ++ci) {
        const auto fv = loglog_slope(ns, var_c[ci]);
        const auto fg = loglog_slope(ns, gap_c[ci]);
        res.scalar(std::string("var_slope_") + cname[ci], fv.slope);
        res.scalar(std::string("gap_slope_") + cname[ci], fg.slope);
        res.gate("boundary-kpz.var-slope-" + std::string(cname[ci]),
                 0.15 - std::abs(fv.slope - 2.0 / 3.0),
                 "slope " + fmt(fv.slope) + ", window 2/3 +- 0.15");
        res.gate("boundary-kpz.gap-slope-" + std::string(cname[ci]),
                 0.15 - std::abs(fg.slope - 1.0 / 3.0),
                 "slope " + fmt(fg.slope) + ", window 1/3 +- 0.15");
    }
}

// ----- gauss ---------------------------------------------------------------
// Macroscopically off-characteristic boundary: variance grows linearly in N,
// standardized values are asymptotically normal, and the exit point scales
// like (zeta - w) N.

inline void run_gauss(const kv_config& cfg, experiment_result& res, const run_context& ctx) {
    const std::vector<std::uint64_t> ladder = cfg.get_ulist("ladder", {128, 256, 512, 1024});
    const std::vector<std::uint64_t> reps_list =
        cfg.get_ulist("replicas", {5000, 5000, 2000, 10000});
    const double w_off = cfg.get_double("w_offset", 0.2);
    if (ladder.size() != reps_list.size() || ladder.size() < 3)
        throw std::invalid_argument("gauss: need matching ladder/replicas, >= 3 sizes");
    echo_ctx(res, ctx);
    echo(res, "ladder", fmt_ulist(ladder));
    echo(res, "replicas", fmt_ulist(reps_list));
    echo(res, "w_offset", fmt(w_off));

    std::vector<double> ns, vars, ratios;
    double ks_d = 1.0, ks_n = 0.0;
    for (std::size_t li = 0; li < ladder.size(); ++li) {
        const std::int64_t N = static_cast<std::int64_t>(ladder[li]);
        const std::uint64_t reps = reps_list[li];
        const double x = static_cast<double>(N);
        const double zeta = zeta_fn(x, x);
        const double w = zeta - w_off;
        if (!(w > 0.0)) throw std::invalid_argument("gauss: offset leaves (0,1)");

        std::vector<double> vals(reps), exits(reps);
        parallel_replicas(reps, ctx.workers, [&](std::uint64_t r) {
            const stream_field f(seed_spec{ctx.seed, "gauss/N" + std::to_string(N), r}, N, N);
            const auto d = decompose_to_target(f);
            const auto b = boundary_weights(f, boundary_param{w, -pos_inf});
            const auto hs = boundary_scan(d.to_row1, b.hor);
            vals[r] = hs.value;
            exits[r] = static_cast<double>(hs.exit);
        });
        res.total_replicas += reps;

        const double var = sample_variance(vals);
        const double ratio = mean_of(exits) / ((zeta - w) * x);
        ns.push_back(x);
        vars.push_back(var);
        ratios.push_back(ratio);
        const std::string param = "w=" + fmt(w);
        add_point(res, x, param, "var_one_sided", var, 0, 0, reps, ctx.seed);
        add_point(res, x, param, "mean_one_sided", mean_of(vals), 0, 0, reps, ctx.seed);
        add_point(res, x, param, "exit_ratio", ratio, 0, 0, reps, ctx.seed);

        if (li + 1 == ladder.size()) {
            const double mu = mean_of(vals), sd = std::sqrt(var);
            std::vector<double> std_vals(reps);
            for (std::uint64_t r = 0; r < reps; ++r) std_vals[r] = (vals[r] - mu) / sd;
            const auto ks = ks_test(std_vals, [](double t) { return detail::normal_cdf(t); });
            ks_d = ks.d;
            ks_n = x;
            add_point(res, x, param, "ks_d_normal", ks.d, ks.d, ks.d, reps, ctx.seed);
            add_point(res, x, param, "ks_p_normal", ks.p_value, ks.p_value, ks.p_value, reps,
                      ctx.seed);
        }
    }

    const auto fit = loglog_slope(ns, vars);
    res.scalar("var_slope", fit.slope);
    res.scalar("ks_d_normal", ks_d);
    res.gate("gauss.var-slope", std::min(fit.slope - 0.9, 1.1 - fit.slope),
             "ln Var vs ln N slope " + fmt(fit.slope) + ", window [0.9, 1.1]");
    res.gate("gauss.normal-ks", 0.03 - ks_d,
             "standardized KS D=" + fmt(ks_d) + " at N=" + fmt(ks_n) + ", gate D < 0.03");
    const double rmax = *std::max_element(ratios.begin(), ratios.end());
    const double rmin = *std::min_element(ratios.begin(), ratios.end());
    res.gate("gauss.exit-ratio-stable", 2.0 - rmax / rmin,
             "E[Z]/((zeta-w)N) in [" + fmt(rmin) + ", " + fmt(rmax) + "], max/min < 2");
}

// ----- exit ----------------------------------------------------------------
// Critical exit points live on the N^{2/3} scale; off-characteristic
// two-sided exit probabilities decay exponentially in N Delta^3.

inline void run_exit(const kv_config& cfg, experiment_result& res, const run_context& ctx) {
    const std::vector<std::uint64_t> ladder = cfg.get_ulist("ladder", {256, 512, 1024});
    const std::vector<std::uint64_t> reps_list = cfg.get_ulist("replicas", {3000, 1500, 800});
    const std::int64_t nd = cfg.get_int("n_decay", 512);
    const std::uint64_t reps_decay = cfg.get_u64("replicas_decay", 4000);
    const std::vector<double> deltas = cfg.get_dlist("deltas", {0.10, 0.15, 0.20});
    if (ladder.size() != reps_list.size() || ladder.empty())
        throw std::invalid_argument("exit: need matching ladder/replicas");
    echo_ctx(res, ctx);
    echo(res, "ladder", fmt_ulist(ladder));
    echo(res, "replicas", fmt_ulist(reps_list));
    echo(res, "n_decay", std::to_string(nd));
    echo(res, "replicas_decay", std::to_string(reps_decay));
    echo(res, "deltas", fmt_dlist(deltas));

    // critical one-sided exit medians
    std::vector<double> medians;
    for (std::size_t li = 0; li < ladder.size(); ++li) {
        const std::int64_t N = static_cast<std::int64_t>(ladder[li]);
        const std::uint64_t reps = reps_list[li];
        const double x = static_cast<double>(N);
        const double zeta = zeta_fn(x, x);
        const std::vector<double> exits = replica_doubles(reps, ctx.workers, [&](std::uint64_t r) {
            const stream_field f(seed_spec{ctx.seed, "exit/N" + std::to_string(N), r}, N, N);
            const auto d = decompose_to_target(f);
            const auto b = boundary_weights(f, boundary_param{zeta, -pos_inf});
            return static_cast<double>(boundary_scan(d.to_row1, b.hor).exit);
        });
        res.total_replicas += reps;
        const double med = median_of(exits) / std::pow(x, 2.0 / 3.0);
        medians.push_back(med);
        add_point(res, x, "w=zeta", "exit_median_over_n23", med, med, med, reps, ctx.seed);
    }
    double win_margin = pos_inf;
    for (double m : medians) win_margin = std::min({win_margin, m - 0.1, 10.0 - m});
    const double med_max = *std::max_element(medians.begin(), medians.end());
    const double med_min = *std::min_element(medians.begin(), medians.end());
    res.gate("exit.median-window", win_margin,
             "median Z/N^{2/3} in [" + fmt(med_min) + ", " + fmt(med_max) + "], window [0.1, 10]");
    res.gate("exit.median-stable", 2.0 - med_max / med_min,
             "max/min = " + fmt(med_max / med_min) + ", gate < 2");

    // off-characteristic decay: P{horizontal exit of the two-sided model > 0}
    // for z = zeta + Delta.  Direct frequencies die out past Delta = 0.10 (the
    // probability reaches ~1e-13 at Delta = 0.20), so each replica contributes
    // the exact conditional probability instead of an indicator: given the
    // interior profiles C_j and the horizontal side value T, the horizontal
    // side wins iff the vertical boundary walk (iid Exp(1-z) steps) stays
    // below the rising barrier T - C_j, a probability stay_below_probability
    // evaluates in closed recursion.  Averaging it over environments is
    // unbiased for the same event, keeps every replica informative at any
    // rarity, and one interior pass still serves every Delta.
    const double xd = static_cast<double>(nd);
    const double zeta_d = zeta_fn(xd, xd);
    std::vector<std::vector<double>> cond(deltas.size(), std::vector<double>(reps_decay, 0.0));
    parallel_replicas(reps_decay, ctx.workers, [&](std::uint64_t r) {
        const stream_field f(seed_spec{ctx.seed, "exit/decay", r}, nd, nd);
        const auto d = decompose_to_target(f);
        std::vector<double> barrier(static_cast<std::size_t>(nd));
        for (std::size_t di = 0; di < deltas.size(); ++di) {
            const double z = zeta_d + deltas[di];
            const auto b = boundary_weights(f, boundary_param{z, -pos_inf});
            const double top = boundary_scan(d.to_row1, b.hor).value;
            for (std::size_t j = 0; j < barrier.size(); ++j) barrier[j] = top - d.to_col1[j];
            cond[di][r] = stay_below_probability(barrier, 1.0 - z);
        }
    });
    res.total_replicas += reps_decay;

    std::vector<double> xs, lnp;
    bool degenerate = false;
    double mono_margin = pos_inf;
    double prev_lnp = pos_inf;
    for (std::size_t di = 0; di < deltas.size(); ++di) {
        const double p = mean_of(cond[di]);
        const double se = standard_error(cond[di]);
        add_point(res, xd, "delta=" + fmt(deltas[di]), "p_hor_exit_positive", p,
                  p - 1.96 * se, p + 1.96 * se, reps_decay, ctx.seed);
        if (!(p > 0.0)) {
            degenerate = true;
            continue;
        }
        const double xval = xd * deltas[di] * deltas[di] * deltas[di];
        xs.push_back(xval);
        lnp.push_back(std::log(p));
        if (prev_lnp != pos_inf) mono_margin = std::min(mono_margin, prev_lnp - std::log(p));
        prev_lnp = std::log(p);
    }
    if (degenerate || xs.size() < 3) {
        res.skip("exit.decay-monotone", "a Delta produced zero conditional mass");
        res.skip("exit.decay-slope", "a Delta produced zero conditional mass");
        res.skip("exit.decay-fit", "a Delta produced zero conditional mass");
        return;
    }
    const auto fit = linear_fit(xs, lnp);
    res.scalar("decay_slope", fit.slope);
    res.scalar("decay_r2", fit.r2);
    res.gate("exit.decay-monotone", mono_margin,
             "min consecutive drop of ln P is " + fmt(mono_margin));
    res.gate("exit.decay-slope", -fit.slope, "ln P vs N Delta^3 slope " + fmt(fit.slope));
    res.gate("exit.decay-fit", fit.r2 - 0.8, "R^2 = " + fmt(fit.r2) + ", gate >= 0.8");
}

// ----- tails ---------------------------------------------------------------
// Right tail of the critical one-sided value on the N^{1/3} scale with
// exponent 3/2, exponentially tilted boundary sampling for the deep points;
// left tail of the bulk value (shallow-regime exponent 3/2 fit, cube fit
// reported); mutual consistency across tilt strengths; unit-mass check.

inline void run_tails(const kv_config& cfg, experiment_result& res, const run_context& ctx) {
    const std::int64_t N = cfg.get_int("n", 512);
    const double x = static_cast<double>(N);
    const double zeta = zeta_fn(x, x);
    const double w = cfg.get_double("w", zeta);
    const std::uint64_t reps_direct = cfg.get_u64("replicas_direct", 12000);
    const std::uint64_t reps_is = cfg.get_u64("replicas_is", 4000);
    const std::uint64_t reps_theta = cfg.get_u64("replicas_theta", 4000);
    const std::vector<double> s_grid = cfg.get_dlist("s_grid", {1, 2, 3, 4});
    const double s_is_min = cfg.get_double("s_is_min", 3.0);
    const double s_theta = cfg.get_double("s_theta", 1.0);
    const std::int64_t unit_n = cfg.get_int("unit_n", 16);
    const double unit_theta = cfg.get_double("unit_theta", 0.1);
    const std::uint64_t unit_reps = cfg.get_u64("unit_replicas", 200000);
    echo_ctx(res, ctx);
    echo(res, "n", std::to_string(N));
    echo(res, "w", fmt(w));
    echo(res, "replicas_direct", std::to_string(reps_direct));
    echo(res, "replicas_is", std::to_string(reps_is));
    echo(res, "replicas_theta", std::to_string(reps_theta));
    echo(res, "s_grid", fmt_dlist(s_grid));
    echo(res, "s_is_min", fmt(s_is_min));
    echo(res, "s_theta", fmt(s_theta));
    echo(res, "unit_n", std::to_string(unit_n));
    echo(res, "unit_theta", fmt(unit_theta));
    echo(res, "unit_replicas", std::to_string(unit_reps));

    const double gamma_n = shape_fn(x, x);
    const double scale = std::cbrt(x);
    const auto thr = [&](double s) { return gamma_n + s * scale; };
    const auto tilt_k = [&](double s) {
        return std::max<std::int64_t>(
            1, static_cast<std::int64_t>(std::ceil(std::sqrt(s) * std::pow(x, 2.0 / 3.0))));
    };
    const auto theta_of = [&](double s) {
        return s * scale * w * w / static_cast<double>(tilt_k(s));
    };

    // direct pass: bulk and one-sided values from the same interior sweep
    std::vector<double> bulk(reps_direct), osided(reps_direct);
    parallel_replicas(reps_direct, ctx.workers, [&](std::uint64_t r) {
        const stream_field f(seed_spec{ctx.seed, "tails/direct", r}, N, N);
        const auto d = decompose_to_target(f);
        bulk[r] = d.to_row1[0];
        const auto b = boundary_weights(f, boundary_param{w, -pos_inf});
        osided[r] = boundary_scan(d.to_row1, b.hor).value;
    });
    res.total_replicas += reps_direct;

    // right tail of the one-sided value: direct below s_is_min, tilted above
    std::vector<double> r_s, r_p, r_se;
    for (double s : s_grid) {
        double p = 0.0, se = 0.0;
        if (s < s_is_min) {
            std::uint64_t c = 0;
            for (double v : osided)
                if (v >= thr(s)) ++c;
            p = static_cast<double>(c) / static_cast<double>(reps_direct);
            se = frequency_se(p, reps_direct);
            freq_point(res, x, "s=" + fmt(s) + ";mode=direct", "p_right_one_sided", p, reps_direct,
                       ctx.seed);
        } else {
            importance_tail_config ic;
            ic.m = N;
            ic.n = N;
            ic.w = w;
            ic.theta = theta_of(s);
            ic.s = s;
            ic.threshold = thr(s);
            ic.tilt_sites = tilt_k(s);
            ic.replicas = reps_is;
            ic.base = seed_spec{ctx.seed, "tails/is-s" + fmt(s), 0};
            ic.workers = ctx.workers;
            const auto ir = importance_tail(ic);
            p = ir.estimate;
            se = ir.se;
            add_point(res, x, "s=" + fmt(s) + ";mode=tilted;theta=" + fmt(ic.theta),
                      "p_right_one_sided", p, p - 1.96 * se, p + 1.96 * se, reps_is, ctx.seed);
            res.total_replicas += reps_is;
        }
        if (p > 0.0) {
            r_s.push_back(std::pow(s, 1.5));
            r_p.push_back(std::log(p));
            r_se.push_back(se);
        }
    }
    if (r_s.size() < 3) {
        res.skip("tails.right-slope", "too few positive right-tail estimates");
        res.skip("tails.right-fit", "too few positive right-tail estimates");
    } else {
        const auto fit = linear_fit(r_s, r_p);
        res.scalar("right_slope_s32", fit.slope);
        res.scalar("right_r2_s32", fit.r2);
        res.gate("tails.right-slope", -fit.slope, "ln P vs s^{3/2} slope " + fmt(fit.slope));
        res.gate("tails.right-fit", fit.r2 - 0.9, "R^2 = " + fmt(fit.r2) + ", gate >= 0.9");
    }

    // bulk right tail at the same thresholds, reported
    for (double s : s_grid) {
        std::uint64_t c = 0;
        for (double v : bulk)
            if (v >= thr(s)) ++c;
        freq_point(res, x, "s=" + fmt(s), "p_right_bulk",
                   static_cast<double>(c) / static_cast<double>(reps_direct), reps_direct,
                   ctx.seed);
    }

    // left tail of the bulk value
    std::vector<double> l_s32, l_s3, l_p;
    for (double s : s_grid) {
        std::uint64_t c = 0;
        for (double v : bulk)
            if (v <= gamma_n - s * scale) ++c;
        const double p = static_cast<double>(c) / static_cast<double>(reps_direct);
        freq_point(res, x, "s=" + fmt(s), "p_left_bulk", p, reps_direct, ctx.seed);
        if (p > 0.0) {
            l_s32.push_back(std::pow(s, 1.5));
            l_s3.push_back(s * s * s);
            l_p.push_back(std::log(p));
        }
    }
    if (l_s32.size() < 3) {
        res.skip("tails.left-slope", "too few positive left-tail frequencies");
        res.skip("tails.left-fit", "too few positive left-tail frequencies");
    } else {
        const auto fit = linear_fit(l_s32, l_p);
        const auto cube = linear_fit(l_s3, l_p);
        res.scalar("left_slope_s32", fit.slope);
        res.scalar("left_r2_s32", fit.r2);
        res.scalar("left_slope_s3", cube.slope);
        res.scalar("left_r2_s3", cube.r2);
        res.gate("tails.left-slope", -fit.slope, "ln P vs s^{3/2} slope " + fmt(fit.slope));
        res.gate("tails.left-fit", fit.r2 - 0.85, "R^2 = " + fmt(fit.r2) + ", gate >= 0.85");
    }

    // tilt-strength consistency at a common event: theta = 0 comes from the
    // direct pass, the tilted runs use their own streams
    {
        const double s = s_theta;
        const double threshold = thr(s);
        std::uint64_t c = 0;
        for (double v : osided)
            if (v >= threshold) ++c;
        std::vector<double> est, se;
        est.push_back(static_cast<double>(c) / static_cast<double>(reps_direct));
        se.push_back(frequency_se(est[0], reps_direct));
        for (double mult : {0.5, 1.0}) {
            importance_tail_config ic;
            ic.m = N;
            ic.n = N;
            ic.w = w;
            ic.theta = mult * theta_of(s);
            ic.s = s;
            ic.threshold = threshold;
            ic.tilt_sites = tilt_k(s);
            ic.replicas = reps_theta;
            ic.base = seed_spec{ctx.seed, "tails/theta-" + fmt(mult), 0};
            ic.workers = ctx.workers;
            const auto ir = importance_tail(ic);
            est.push_back(ir.estimate);
            se.push_back(ir.se);
            add_point(res, x, "s=" + fmt(s) + ";theta=" + fmt(ic.theta), "p_right_one_sided",
                      ir.estimate, ir.estimate - 1.96 * ir.se, ir.estimate + 1.96 * ir.se,
                      reps_theta, ctx.seed);
            res.total_replicas += reps_theta;
        }
        double margin = pos_inf;
        for (std::size_t i = 0; i < est.size(); ++i)
            for (std::size_t j = i + 1; j < est.size(); ++j) {
                const double comb = std::sqrt(se[i] * se[i] + se[j] * se[j]);
                margin = std::min(margin, 3.0 * comb - std::abs(est[i] - est[j]));
            }
        res.gate("tails.theta-consistency", margin,
                 "estimates " + fmt(est[0]) + ", " + fmt(est[1]) + ", " + fmt(est[2]) +
                     " pairwise within 3 combined se");
    }

    // unit mass: with the threshold dropped the weighted indicator integrates
    // to exactly one; a small grid suffices because the identity concerns
    // only the boundary tilt
    {
        importance_tail_config ic;
        ic.m = unit_n;
        ic.n = unit_n;
        ic.w = zeta_fn(static_cast<double>(unit_n), static_cast<double>(unit_n));
        ic.theta = unit_theta;
        ic.s = 0.0;
        ic.threshold = neg_inf;
        ic.tilt_sites = unit_n / 2;
        ic.replicas = unit_reps;
        ic.base = seed_spec{ctx.seed, "tails/unit", 0};
        ic.workers = ctx.workers;
        const auto ir = importance_tail(ic);
        res.total_replicas += unit_reps;
        res.scalar("unit_mass", ir.estimate);
        res.scalar("unit_mass_se", ir.se);
        res.gate("tails.unit-mass", 3.0 * ir.se - std::abs(ir.estimate - 1.0),
                 "mean weight " + fmt(ir.estimate) + ", se " + fmt(ir.se));
    }
}

// ----- inc-tail ------------------------------------------------------------
// The one-sided boundary gain over the bulk value at the critical parameter
// has an N^{1/3}-scale right tail with exponent 3/2.

inline void run_inc_tail(const kv_config& cfg, experiment_result& res, const run_context& ctx) {
    const std::int64_t N = cfg.get_int("n", 512);
    const std::uint64_t reps = cfg.get_u64("replicas", 10000);
    const std::vector<double> s_grid = cfg.get_dlist("s_grid", {0.5, 1.0, 1.5, 2.0});
    echo_ctx(res, ctx);
    echo(res, "n", std::to_string(N));
    echo(res, "replicas", std::to_string(reps));
    echo(res, "s_grid", fmt_dlist(s_grid));

    const double x = static_cast<double>(N);
    const double zeta = zeta_fn(x, x);
    const double scale = std::cbrt(x);
    std::vector<double> gain(reps);
    parallel_replicas(reps, ctx.workers, [&](std::uint64_t r) {
        const stream_field f(seed_spec{ctx.seed, "inc-tail", r}, N, N);
        const auto d = decompose_to_target(f);
        const auto b = boundary_weights(f, boundary_param{zeta, -pos_inf});
        gain[r] = boundary_scan(d.to_row1, b.hor).value - d.to_row1[0];
    });
    res.total_replicas += reps;

    std::vector<double> xs, lnp;
    double mono = pos_inf, prev = pos_inf;
    for (double s : s_grid) {
        std::uint64_t c = 0;
        for (double v : gain)
            if (v >= s * scale) ++c;
        const double p = static_cast<double>(c) / static_cast<double>(reps);
        freq_point(res, x, "s=" + fmt(s), "p_gain", p, reps, ctx.seed);
        if (p > 0.0) {
            if (prev != pos_inf) mono = std::min(mono, prev - std::log(p));
            prev = std::log(p);
            xs.push_back(std::pow(s, 1.5));
            lnp.push_back(std::log(p));
        }
    }
    if (xs.size() < 3) {
        res.skip("inc-tail.monotone", "too few positive frequencies; raise replicas");
        res.skip("inc-tail.fit", "too few positive frequencies; raise replicas");
        return;
    }
    const auto fit = linear_fit(xs, lnp);
    res.scalar("gain_slope_s32", fit.slope);
    res.scalar("gain_r2_s32", fit.r2);
    res.gate("inc-tail.monotone", mono, "min consecutive drop of ln P is " + fmt(mono));
    res.gate("inc-tail.fit", fit.r2 - 0.8, "R^2 = " + fmt(fit.r2) + ", gate >= 0.8");
}

// ----- mean-gap ------------------------------------------------------------
// The bulk mean sits strictly below the shape value, with a gap on the
// N^{1/3} scale, stable across the ladder.

inline void run_mean_gap(const kv_config& cfg, experiment_result& res, const run_context& ctx) {
    const std::vector<std::uint64_t> ladder = cfg.get_ulist("ladder", {128, 256, 512, 1024});
    const std::vector<std::uint64_t> reps_list = cfg.get_ulist("replicas", {4000, 4000, 1600, 800});
    if (ladder.size() != reps_list.size() || ladder.empty())
        throw std::invalid_argument("mean-gap: need matching ladder/replicas");
    echo_ctx(res, ctx);
    echo(res, "ladder", fmt_ulist(ladder));
    echo(res, "replicas", fmt_ulist(reps_list));

    std::vector<double> scaled, pos_margin, raw_margin;
    for (std::size_t li = 0; li < ladder.size(); ++li) {
        const std::int64_t N = static_cast<std::int64_t>(ladder[li]);
        const std::uint64_t reps = reps_list[li];
        const double x = static_cast<double>(N);
        const double gamma_n = shape_fn(x, x);
        const std::vector<double> vals = replica_doubles(reps, ctx.workers, [&](std::uint64_t r) {
            const stream_field f(seed_spec{ctx.seed, "mean-gap/N" + std::to_string(N), r}, N, N);
            return lpp_values_rolling(f, grid_variant::bulk).final_at(N);
        });
        res.total_replicas += reps;
        const double gap = gamma_n - mean_of(vals);
        const double se = standard_error(vals);
        scaled.push_back(gap / std::cbrt(x));
        pos_margin.push_back(gap / std::cbrt(x) - 3.0 * se / std::cbrt(x));
        raw_margin.push_back(gap - 3.0 * se);
        add_point(res, x, "", "mean_bulk", mean_of(vals), mean_of(vals) - 1.96 * se,
                  mean_of(vals) + 1.96 * se, reps, ctx.seed);
        add_point(res, x, "", "gap_over_n13", gap / std::cbrt(x), 0, 0, reps, ctx.seed);
    }
    const double pmin = *std::min_element(pos_margin.begin(), pos_margin.end());
    const double smax = *std::max_element(scaled.begin(), scaled.end());
    const double smin = *std::min_element(scaled.begin(), scaled.end());
    res.scalar("gap_over_n13_min", smin);
    res.scalar("gap_over_n13_max", smax);
    res.gate("mean-gap.positive-3se", pmin,
             "min over the ladder of (gap - 3 se)/N^{1/3} is " + fmt(pmin));
    res.gate("mean-gap.stable", 2.0 - smax / smin,
             "scaled gap max/min = " + fmt(smax / smin) + ", gate < 2");
    res.gate("mean-gap.mean-below-shape",
             *std::min_element(raw_margin.begin(), raw_margin.end()),
             "min over the ladder of gamma - mean - 3 se (raw units)");
}

// ----- var-lipschitz -------------------------------------------------------
// Variance of the stationary value is Lipschitz in the parameter on a scale
// proportional to N: a constant calibrated at a small size bounds the
// variance differences at a larger size.

inline void run_var_lipschitz(const kv_config& cfg, experiment_result& res,
                              const run_context& ctx) {
    const std::int64_t n_cal = cfg.get_int("n_cal", 64);
    const std::int64_t n_gate = cfg.get_int("n_gate", 256);
    const std::uint64_t reps_cal = cfg.get_u64("replicas_cal", 20000);
    const std::uint64_t reps_gate = cfg.get_u64("replicas_gate", 8000);
    const std::vector<double> z_grid = cfg.get_dlist("z_grid", {0.38, 0.42, 0.46, 0.50});
    const double safety = cfg.get_double("safety", 1.5);
    const int boot = static_cast<int>(cfg.get_int("bootstrap", 200));
    if (z_grid.size() < 2) throw std::invalid_argument("var-lipschitz: z_grid needs >= 2 points");
    echo_ctx(res, ctx);
    echo(res, "n_cal", std::to_string(n_cal));
    echo(res, "n_gate", std::to_string(n_gate));
    echo(res, "replicas_cal", std::to_string(reps_cal));
    echo(res, "replicas_gate", std::to_string(reps_gate));
    echo(res, "z_grid", fmt_dlist(z_grid));
    echo(res, "safety", fmt(safety));

    const auto variances = [&](std::int64_t N, std::uint64_t reps, const std::string& sub,
                               std::vector<bootstrap_ci_t>& cis) {
        std::vector<std::vector<double>> vals(z_grid.size(), std::vector<double>(reps));
        parallel_replicas(reps, ctx.workers, [&](std::uint64_t r) {
            const stream_field f(seed_spec{ctx.seed, "var-lipschitz/" + sub, r}, N, N);
            const auto d = decompose_to_target(f);
            for (std::size_t zi = 0; zi < z_grid.size(); ++zi) {
                const auto b = boundary_weights(f, boundary_param::stationary(z_grid[zi]));
                const auto hs = boundary_scan(d.to_row1, b.hor);
                const auto vs = boundary_scan(d.to_col1, b.ver);
                vals[zi][r] = std::max(hs.value, vs.value);
            }
        });
        res.total_replicas += reps;
        cis.clear();
        for (std::size_t zi = 0; zi < z_grid.size(); ++zi)
            cis.push_back(bootstrap_ci(
                vals[zi], [](const std::vector<double>& v) { return sample_variance(v); },
                seed_spec{ctx.seed, "var-lipschitz/boot-" + sub + "-z" + std::to_string(zi), 0}
                    .stream(),
                boot));
    };

    std::vector<bootstrap_ci_t> cal;
    variances(n_cal, reps_cal, "cal", cal);
    double c_hat = 0.0;
    for (std::size_t i = 1; i < z_grid.size(); ++i) {
        const double dz = std::abs(z_grid[i] - z_grid[i - 1]);
        c_hat = std::max(c_hat, std::abs(cal[i].point - cal[i - 1].point) /
                                    (static_cast<double>(n_cal) * dz));
    }
    c_hat *= safety;
    res.scalar("c_hat", c_hat);

    std::vector<bootstrap_ci_t> gate;
    variances(n_gate, reps_gate, "gate", gate);
    double margin = pos_inf;
    for (std::size_t i = 0; i < z_grid.size(); ++i) {
        add_point(res, static_cast<double>(n_gate), "z=" + fmt(z_grid[i]), "var_stationary",
                  gate[i].point, gate[i].lo, gate[i].hi, reps_gate, ctx.seed);
        if (i == 0) continue;
        const double dz = std::abs(z_grid[i] - z_grid[i - 1]);
        const double diff = std::abs(gate[i].point - gate[i - 1].point);
        const double se =
            std::sqrt(gate[i].se * gate[i].se + gate[i - 1].se * gate[i - 1].se);
        margin = std::min(margin,
                          c_hat * static_cast<double>(n_gate) * dz + 3.0 * se - diff);
    }
    res.gate("var-lipschitz.gated-bound", margin,
             "calibrated C=" + fmt(c_hat) + " bounds variance differences at N=" +
                 std::to_string(n_gate) + " within 3 se");
}

// ----- sums-tails ----------------------------------------------------------
// Exponential-sum machinery: Chernoff evaluators dominate the Monte Carlo
// frequencies, the exact gamma tail matches them, tilted streams have the
// tilted law, and the sum-tilt weight integrates to one.

inline void run_sums_tails(const kv_config& cfg, experiment_result& res, const run_context& ctx) {
    const std::vector<std::uint64_t> n_grid = cfg.get_ulist("n_grid", {4, 16, 64});
    const std::vector<double> s_grid = cfg.get_dlist("s_grid", {0.5, 1.0, 2.0});
    const std::uint64_t reps = cfg.get_u64("replicas", 200000);
    const std::vector<double> mu_grid = cfg.get_dlist("mu_grid", {-1.0, 0.0, 0.5, 0.9});
    const std::int64_t ks_reps = cfg.get_int("ks_replicas", 10000);
    const double rn_mu = cfg.get_double("rn_mu", 0.5);
    const std::int64_t rn_n = cfg.get_int("rn_n", 16);
    const std::uint64_t rn_reps = cfg.get_u64("rn_replicas", 200000);
    echo_ctx(res, ctx);
    echo(res, "n_grid", fmt_ulist(n_grid));
    echo(res, "s_grid", fmt_dlist(s_grid));
    echo(res, "replicas", std::to_string(reps));
    echo(res, "mu_grid", fmt_dlist(mu_grid));
    echo(res, "ks_replicas", std::to_string(ks_reps));
    echo(res, "rn_mu", fmt(rn_mu));
    echo(res, "rn_n", std::to_string(rn_n));
    echo(res, "rn_replicas", std::to_string(rn_reps));

    for (std::uint64_t nu : n_grid) {
        const std::int64_t n = static_cast<std::int64_t>(nu);
        const std::vector<double> sums = replica_doubles(reps, ctx.workers, [&](std::uint64_t r) {
            const counter_stream st =
                seed_spec{ctx.seed, "sums-tails/n" + std::to_string(n), r}.stream();
            double s = 0.0;
            for (std::int64_t i = 1; i <= n; ++i)
                s += st.exponential(1.0, rng_layer::aux, static_cast<std::uint64_t>(i), 0);
            return s;
        });
        res.total_replicas += reps;
        const double root = std::sqrt(static_cast<double>(n));
        for (double s : s_grid) {
            const double up_thr = static_cast<double>(n) + s * root;
            const double lo_thr = static_cast<double>(n) - s * root;
            std::uint64_t cu = 0, cl = 0;
            for (double v : sums) {
                if (v >= up_thr) ++cu;
                if (v <= lo_thr) ++cl;
            }
            const double pu = static_cast<double>(cu) / static_cast<double>(reps);
            const double pl = static_cast<double>(cl) / static_cast<double>(reps);
            const double seu = frequency_se(pu, reps), sel = frequency_se(pl, reps);
            const double bu = chernoff_sum_bound(n, s, tail_side::upper);
            const double bl = chernoff_sum_bound(n, s, tail_side::lower);
            const double qu = regularized_gamma_upper(static_cast<int>(n), up_thr);
            const double ql = 1.0 - regularized_gamma_upper(static_cast<int>(n), lo_thr);
            const std::string tag = "n" + std::to_string(n) + "-s" + fmt(s);
            const std::string param = "n=" + std::to_string(n) + ";s=" + fmt(s);
            freq_point(res, static_cast<double>(n), param, "p_upper", pu, reps, ctx.seed);
            freq_point(res, static_cast<double>(n), param, "p_lower", pl, reps, ctx.seed);
            add_point(res, static_cast<double>(n), param, "chernoff_upper", bu, bu, bu, reps,
                      ctx.seed);
            add_point(res, static_cast<double>(n), param, "chernoff_lower", bl, bl, bl, reps,
                      ctx.seed);
            res.gate("sums-tails.chernoff-up-" + tag, bu + 3.0 * seu - pu,
                     "freq " + fmt(pu) + " <= bound " + fmt(bu) + " + 3 se");
            res.gate("sums-tails.chernoff-lo-" + tag, bl + 3.0 * sel - pl,
                     "freq " + fmt(pl) + " <= bound " + fmt(bl) + " + 3 se");
            res.gate("sums-tails.gamma-up-" + tag, 3.0 * seu - std::abs(pu - qu),
                     "freq " + fmt(pu) + " vs exact " + fmt(qu));
            res.gate("sums-tails.gamma-lo-" + tag, 3.0 * sel - std::abs(pl - ql),
                     "freq " + fmt(pl) + " vs exact " + fmt(ql));
        }
    }

    // tilted streams carry the tilted exponential law
    for (std::size_t mi = 0; mi < mu_grid.size(); ++mi) {
        const double mu = mu_grid[mi];
        const auto draws =
            tilted_exp_stream(seed_spec{ctx.seed, "sums-tails/ks" + std::to_string(mi), 0},
                              ks_reps, mu);
        const double rate = 1.0 - mu;
        const auto ks = ks_test(draws, [rate](double t) {
            return t <= 0.0 ? 0.0 : 1.0 - std::exp(-rate * t);
        });
        add_point(res, static_cast<double>(ks_reps), "mu=" + fmt(mu), "ks_p_tilted", ks.p_value,
                  ks.p_value, ks.p_value, static_cast<std::uint64_t>(ks_reps), ctx.seed);
        res.gate("sums-tails.tilt-ks-mu" + std::to_string(mi), ks.p_value - 0.01,
                 "mu=" + fmt(mu) + " D=" + fmt(ks.d) + " p=" + fmt(ks.p_value));
    }

    // E_Q[dP/dQ] = 1 under the tilted sum law
    const std::vector<double> weights = replica_doubles(rn_reps, ctx.workers, [&](std::uint64_t r) {
        const auto draws =
            tilted_exp_stream(seed_spec{ctx.seed, "sums-tails/rn", r}, rn_n, rn_mu);
        double s = 0.0;
        for (double v : draws) s += v;
        return rn_weight(rn_mu, rn_n, s);
    });
    res.total_replicas += rn_reps;
    const double wm = mean_of(weights), wse = standard_error(weights);
    res.scalar("rn_unit_mass", wm);
    res.gate("sums-tails.rn-unit-mass", 3.0 * wse - std::abs(wm - 1.0),
             "mean weight " + fmt(wm) + ", se " + fmt(wse));

    // existential-constant witness for the power-integral sandwich:
    // integral_0^inf t^{p-1} exp(-t^q) dt = Gamma(p/q)/q, so the p-th root
    // against p^{1/q} stays within fixed constants over a (p,q) grid
    double ratio_min = pos_inf, ratio_max = -pos_inf;
    for (double q : {0.5, 1.0, 2.0})
        for (int p = 1; p <= 10; ++p) {
            const double r = static_cast<double>(p) / q;
            const double integral = std::exp(std::lgamma(r)) / q;
            const double ratio =
                std::pow(integral, 1.0 / static_cast<double>(p)) /
                std::pow(static_cast<double>(p), 1.0 / q);
            ratio_min = std::min(ratio_min, ratio);
            ratio_max = std::max(ratio_max, ratio);
        }
    res.scalar("power_integral_ratio_min", ratio_min);
    res.scalar("power_integral_ratio_max", ratio_max);
}

} // namespace detail

// ----- catalog -------------------------------------------------------------

struct catalog_entry {
    std::string name;
    std::string blurb;
    std::set<std::string> keys;
    void (*run)(const kv_config&, experiment_result&, const run_context&);
};

inline const std::vector<catalog_entry>& catalog() {
    const auto with = [](std::set<std::string> extra) {
        extra.insert("seed");
        extra.insert("workers");
        return extra;
    };
    static const std::vector<catalog_entry> entries{
        {"rains",
         "exact exponential-moment identity of the two-sided boundary model",
         with({"m", "n", "w", "z", "replicas", "bootstrap"}), &detail::run_rains},
        {"stationarity",
         "Burke increment stationarity, northeast reversal, Erlang increment sums",
         with({"n", "z", "replicas", "ne_n", "ne_u", "ne_replicas"}), &detail::run_stationarity},
        {"variance-identity",
         "stationary variance equals the exit-point boundary-sum identity",
         with({"m", "n", "z", "replicas", "bootstrap"}), &detail::run_variance_identity},
        {"moment-identity",
         "central-moment recursion against common-random-number derivative oracles",
         with({"m", "n", "z", "h", "replicas", "bootstrap"}), &detail::run_moment_identity},
        {"bulk-moments",
         "cube-root scaling of stationary variance and centered bulk moments",
         with({"ladder", "replicas", "bootstrap"}), &detail::run_bulk_moments},
        {"boundary-kpz",
         "one-sided fluctuation scaling across the critical boundary window",
         with({"ladder", "replicas", "k_window"}), &detail::run_boundary_kpz},
        {"gauss",
         "off-characteristic boundary: linear variance, normal limit, exit ratio",
         with({"ladder", "replicas", "w_offset"}), &detail::run_gauss},
        {"exit",
         "critical exit-point scale and off-characteristic exit-probability decay",
         with({"ladder", "replicas", "n_decay", "replicas_decay", "deltas"}), &detail::run_exit},
        {"tails",
         "right/left tail exponents with exponentially tilted boundary sampling",
         with({"n", "w", "replicas_direct", "replicas_is", "replicas_theta", "s_grid", "s_is_min",
               "s_theta", "unit_n", "unit_theta", "unit_replicas"}),
         &detail::run_tails},
        {"inc-tail",
         "tail of the one-sided boundary gain over the bulk value",
         with({"n", "replicas", "s_grid"}), &detail::run_inc_tail},
        {"mean-gap",
         "bulk mean below the shape value by a stable N^{1/3}-scale gap",
         with({"ladder", "replicas"}), &detail::run_mean_gap},
        {"var-lipschitz",
         "parameter-Lipschitz bound on the stationary variance, calibrated then gated",
         with({"n_cal", "n_gate", "replicas_cal", "replicas_gate", "z_grid", "safety",
               "bootstrap"}),
         &detail::run_var_lipschitz},
        {"sums-tails",
         "Chernoff and gamma evaluators against exponential-sum frequencies; tilt checks",
         with({"n_grid", "s_grid", "replicas", "mu_grid", "ks_replicas", "rn_mu", "rn_n",
               "rn_replicas"}),
         &detail::run_sums_tails},
    };
    return entries;
}

inline const catalog_entry& find_experiment(const std::string& name) {
    for (const auto& e : catalog())
        if (e.name == name) return e;
    throw std::invalid_argument("unknown experiment: " + name);
}

inline experiment_result run_experiment(const kv_config& cfg) {
    const catalog_entry& entry = find_experiment(cfg.name);
    cfg.require_keys_in(entry.keys);
    const run_context ctx = detail::context_of(cfg);
    experiment_result res;
    res.name = cfg.name;
    const auto t0 = std::chrono::steady_clock::now();
    entry.run(cfg, res, ctx);
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

} // namespace lpplab
