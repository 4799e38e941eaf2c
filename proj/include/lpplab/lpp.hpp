#pragma once

// Last-passage dynamic programming.
//
// Directed site percolation on the quadrant: a path from u to v moves by
// (1,0) or (0,1) steps and collects the weights of every vertex it visits,
// endpoints included.  G_{u,v} is the maximum collected weight.
//
// Variants fix the start vertex and the weight layout:
//   bulk            start (1,1), interior Exp(1) weights only
//   one_sided_hor   start (1,0), Exp(w) on the horizontal axis
//   one_sided_ver   start (0,1), Exp(1-z) on the vertical axis
//   two_sided       start (0,0), zero corner, both boundary rows
//   northeast       reversed orientation toward the corner (m+1,n+1)
//
// The bulk model is two_sided under the sentinel rates (boundary rows
// identically zero): with free zero-cost entry the best entry point into the
// interior is always (1,1), because interior weights are positive.
//
// Full mode stores the whole value matrix plus backpointers; rolling mode
// keeps one row.  Exact float ties in the DP argmax are broken toward the
// vertical predecessor and counted.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "field.hpp"
#include "lattice.hpp"

namespace lpplab {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

enum class grid_variant { bulk, one_sided_hor, one_sided_ver, two_sided, northeast };

inline const char* variant_name(grid_variant v) {
    switch (v) {
        case grid_variant::bulk: return "bulk";
        case grid_variant::one_sided_hor: return "one-sided-hor";
        case grid_variant::one_sided_ver: return "one-sided-ver";
        case grid_variant::two_sided: return "two-sided";
        case grid_variant::northeast: return "northeast";
    }
    return "?";
}

// Backpointer codes for forward variants.
enum : std::uint8_t { bp_start = 0, bp_from_left = 1, bp_from_below = 2 };

struct lpp_grid {
    grid_variant variant = grid_variant::bulk;
    std::int64_t m = 0, n = 0;   // bulk extents
    std::int64_t i0 = 1, j0 = 1; // smallest stored index per axis
    std::vector<double> values;
    std::vector<std::uint8_t> back; // empty in rolling results and northeast grids
    std::uint64_t tie_count = 0;

    std::int64_t cols() const { return m - i0 + 1; }
    std::int64_t rows() const { return n - j0 + 1; }

    bool contains(vertex v) const { return v.x >= i0 && v.x <= m && v.y >= j0 && v.y <= n; }

    double at(vertex v) const {
        if (!contains(v)) throw std::out_of_range("lpp_grid: vertex outside stored range");
        return values[index(v)];
    }

    std::size_t index(vertex v) const {
        return static_cast<std::size_t>(v.y - j0) * static_cast<std::size_t>(cols()) +
               static_cast<std::size_t>(v.x - i0);
    }
};

namespace detail {

// Weight of a stored vertex under a forward variant; start-vertex bonus makes
// the uniform recursion G = weight + max(left, below, entry) correct.
template <class Field>
struct forward_layout {
    const Field& f;
    grid_variant variant;
    const boundary_weights_t& b;

    std::int64_t i0() const { return variant == grid_variant::bulk ? 1 : 0; }
    std::int64_t j0() const { return i0(); }

    vertex start() const {
        switch (variant) {
            case grid_variant::bulk: return {1, 1};
            case grid_variant::one_sided_hor: return {1, 0};
            case grid_variant::one_sided_ver: return {0, 1};
            default: return {0, 0};
        }
    }

    // -inf marks vertices no admissible path may visit.
    double weight(std::int64_t i, std::int64_t j) const {
        if (i >= 1 && j >= 1) return f.bulk(i, j);
        if (i == 0 && j == 0)
            return variant == grid_variant::two_sided ? 0.0 : neg_inf;
        if (j == 0) { // (i,0), i >= 1
            if (variant == grid_variant::one_sided_hor || variant == grid_variant::two_sided)
                return b.hor[static_cast<std::size_t>(i - 1)];
            return neg_inf;
        }
        // (0,j), j >= 1
        if (variant == grid_variant::one_sided_ver || variant == grid_variant::two_sided)
            return b.ver[static_cast<std::size_t>(j - 1)];
        return neg_inf;
    }
};

} // namespace detail

// Full forward DP: value matrix and backpointers for every stored vertex.
template <class Field>
lpp_grid lpp_values_full(const Field& f, grid_variant variant,
                         boundary_param p = boundary_param::bulk()) {
    if (variant == grid_variant::northeast)
        throw std::invalid_argument("lpp_values_full: northeast grids use northeast_values");
    p.validate();
    const auto b = boundary_weights(f, p);
    const detail::forward_layout<Field> lay{f, variant, b};

    lpp_grid g;
    g.variant = variant;
    g.m = f.m();
    g.n = f.n();
    g.i0 = lay.i0();
    g.j0 = lay.j0();
    g.values.assign(static_cast<std::size_t>(g.cols()) * static_cast<std::size_t>(g.rows()), neg_inf);
    g.back.assign(g.values.size(), bp_start);

    const vertex start = lay.start();
    for (std::int64_t j = g.j0; j <= g.n; ++j) {
        for (std::int64_t i = g.i0; i <= g.m; ++i) {
            const double w = lay.weight(i, j);
            if (w == neg_inf) continue;
            const double left = (i > g.i0) ? g.values[g.index({i - 1, j})] : neg_inf;
            const double below = (j > g.j0) ? g.values[g.index({i, j - 1})] : neg_inf;
            const double entry = (i == start.x && j == start.y) ? 0.0 : neg_inf;
            double best = entry;
            std::uint8_t code = bp_start;
            if (left > best) {
                best = left;
                code = bp_from_left;
            }
            // ties go to the vertical predecessor
            if (below >= best && below != neg_inf) {
                if (below == best && code == bp_from_left) ++g.tie_count;
                best = below;
                code = bp_from_below;
            }
            if (best == neg_inf) continue; // unreachable vertex
            g.values[g.index({i, j})] = w + best;
            g.back[g.index({i, j})] = code;
        }
    }
    return g;
}

struct rolling_result {
    grid_variant variant = grid_variant::bulk;
    std::int64_t m = 0, n = 0, i0 = 1;
    std::vector<double> final_row;          // values at (i, n) for i in [i0, m]
    std::vector<double> probe_values;       // aligned with the probe request
    std::uint64_t tie_count = 0;

    double final_at(std::int64_t i) const {
        return final_row[static_cast<std::size_t>(i - i0)];
    }
};

// Rolling forward DP: one row of memory; emits the final row and any
// requested probe vertices.
template <class Field>
rolling_result lpp_values_rolling(const Field& f, grid_variant variant,
                                  boundary_param p = boundary_param::bulk(),
                                  const std::vector<vertex>& probes = {}) {
    if (variant == grid_variant::northeast)
        throw std::invalid_argument("lpp_values_rolling: northeast grids use northeast_values");
    p.validate();
    const auto b = boundary_weights(f, p);
    const detail::forward_layout<Field> lay{f, variant, b};

    rolling_result r;
    r.variant = variant;
    r.m = f.m();
    r.n = f.n();
    r.i0 = lay.i0();
    r.probe_values.assign(probes.size(), neg_inf);

    const vertex start = lay.start();
    std::vector<double> row(static_cast<std::size_t>(r.m - r.i0 + 1), neg_inf);
    for (std::int64_t j = lay.j0(); j <= r.n; ++j) {
        double left = neg_inf;
        for (std::int64_t i = r.i0; i <= r.m; ++i) {
            const std::size_t c = static_cast<std::size_t>(i - r.i0);
            const double w = lay.weight(i, j);
            double value = neg_inf;
            if (w != neg_inf) {
                const double below = row[c];
                const double entry = (i == start.x && j == start.y) ? 0.0 : neg_inf;
                double best = std::max(entry, left);
                if (below == best && below != neg_inf && left == best) ++r.tie_count;
                best = std::max(best, below);
                if (best != neg_inf) value = w + best;
            }
            row[c] = value;
            left = value;
        }
        for (std::size_t q = 0; q < probes.size(); ++q)
            if (probes[q].y == j && probes[q].x >= r.i0 && probes[q].x <= r.m)
                r.probe_values[q] = row[static_cast<std::size_t>(probes[q].x - r.i0)];
    }
    r.final_row = std::move(row);
    return r;
}

// Which end of a path carries the outermost rounded addition when its sum
// is folded.  Rounded addition is commutative but not associative, so an
// enumeration agrees bitwise with a dynamic program only when it folds the
// same way: the forward sweeps accumulate toward the target, the northeast
// sweep toward the start.
enum class fold_end { target, start };

// Exhaustive path enumeration between two vertices under an arbitrary vertex
// weight map; the reference oracle for the DP engines.  Guarded to small
// grids, where the path count (m+n choose m) stays tame.  Cells of weight
// -infinity are impassable.
inline double bruteforce_between(vertex u, vertex v,
                                 const std::function<double(vertex)>& weight,
                                 fold_end fold = fold_end::target) {
    if (!leq(u, v)) return neg_inf;
    if ((v.x - u.x) + (v.y - u.y) > 24)
        throw std::invalid_argument("bruteforce_between: path length cap exceeded");
    if (fold == fold_end::start) {
        struct rec_t {
            const std::function<double(vertex)>& weight;
            vertex target;
            double run(vertex at) const {
                const double w = weight(at);
                if (w == neg_inf) return neg_inf;
                if (at == target) return w;
                double best = neg_inf;
                if (at.x < target.x) best = std::max(best, run({at.x + 1, at.y}));
                if (at.y < target.y) best = std::max(best, run({at.x, at.y + 1}));
                return best == neg_inf ? neg_inf : w + best;
            }
        } rec{weight, v};
        return rec.run(u);
    }
    struct rec_t {
        const std::function<double(vertex)>& weight;
        vertex target;
        double best = neg_inf;
        void run(vertex at, double acc) {
            if (at == target) {
                best = std::max(best, acc);
                return;
            }
            if (at.x < target.x) step({at.x + 1, at.y}, acc);
            if (at.y < target.y) step({at.x, at.y + 1}, acc);
        }
        void step(vertex nxt, double acc) {
            const double w = weight(nxt);
            if (w == neg_inf) return;
            run(nxt, acc + w);
        }
    } rec{weight, v, neg_inf};
    const double w0 = weight(u);
    if (w0 == neg_inf) return neg_inf;
    rec.run(u, w0);
    return rec.best;
}

// Brute-force value of a forward variant at the given target (default (m,n)),
// restricted to m+n <= 14.
template <class Field>
double lpp_bruteforce(const Field& f, grid_variant variant,
                      boundary_param p = boundary_param::bulk(), vertex target = {0, 0}) {
    if (variant == grid_variant::northeast)
        throw std::invalid_argument("lpp_bruteforce: northeast grids use northeast_bruteforce");
    if (f.m() + f.n() > 14)
        throw std::invalid_argument("lpp_bruteforce: grid too large (m+n must be <= 14)");
    p.validate();
    if (target == vertex{0, 0}) target = {f.m(), f.n()};
    const auto b = boundary_weights(f, p);
    const detail::forward_layout<Field> lay{f, variant, b};
    return bruteforce_between(lay.start(), target,
                              [&](vertex a) { return lay.weight(a.x, a.y); });
}

// Backtracks the stored pointers from the target to the path start.
// Returned vertices run start-first.  On-grid float ties were already
// resolved toward the vertical predecessor during the fill.
inline std::vector<vertex> geodesic_backtrack(const lpp_grid& g, vertex target) {
    if (g.back.empty())
        throw std::invalid_argument("geodesic_backtrack: grid carries no backpointers");
    if (!g.contains(target) || g.at(target) == neg_inf)
        throw std::invalid_argument("geodesic_backtrack: target not reached by any path");
    std::vector<vertex> path;
    vertex at = target;
    for (;;) {
        path.push_back(at);
        const std::uint8_t code = g.back[g.index(at)];
        if (code == bp_start) break;
        at = (code == bp_from_left) ? vertex{at.x - 1, at.y} : vertex{at.x, at.y - 1};
    }
    std::reverse(path.begin(), path.end());
    return path;
}

// Largest axis indices visited by a geodesic of a boundary variant:
// hor = max{k : (k,0) on the path}, ver = max{l : (0,l) on the path}.
// Exactly one is positive for a two-sided geodesic to a nonzero target.
struct exit_point_t {
    std::int64_t hor = 0;
    std::int64_t ver = 0;
};

inline exit_point_t exit_points(const lpp_grid& g, const std::vector<vertex>& path) {
    if (g.variant == grid_variant::bulk || g.variant == grid_variant::northeast)
        throw std::invalid_argument("exit_points: defined only for boundary variants");
    exit_point_t e;
    for (const vertex& v : path) {
        if (v.y == 0) e.hor = std::max(e.hor, v.x);
        if (v.x == 0) e.ver = std::max(e.ver, v.y);
    }
    return e;
}

// Successive differences G(base + t e) - G(base + (t-1) e), t = 1..count,
// where e is the unit step along the chosen axis.
enum class axis { horizontal, vertical };

inline std::vector<double> increment_profile(const lpp_grid& g, vertex base, axis a,
                                             std::int64_t count) {
    const vertex e = (a == axis::horizontal) ? vertex{1, 0} : vertex{0, 1};
    std::vector<double> inc;
    inc.reserve(static_cast<std::size_t>(count));
    vertex prev = base;
    for (std::int64_t t = 1; t <= count; ++t) {
        const vertex cur = prev + e;
        inc.push_back(g.at(cur) - g.at(prev));
        prev = cur;
    }
    return inc;
}

// ----- northeast-reversed model -------------------------------------------
//
// Extended grid [1,m+1] x [1,n+1]: interior shares the bulk field, the top
// row (i,n+1) carries Exp(u), the right column (m+1,j) carries Exp(1-u), the
// corner weight is zero.  Values are passage times *to* the corner:
// R(i,j) = max over up-right paths from (i,j) to (m+1,n+1).

template <class Field>
lpp_grid northeast_values(const Field& f, double u) {
    const auto ne = northeast_weights(f, u);
    const std::int64_t m = f.m(), n = f.n();

    lpp_grid g;
    g.variant = grid_variant::northeast;
    g.m = m + 1;
    g.n = n + 1;
    g.i0 = 1;
    g.j0 = 1;
    g.values.assign(static_cast<std::size_t>(m + 1) * static_cast<std::size_t>(n + 1), neg_inf);

    const auto wt = [&](std::int64_t i, std::int64_t j) -> double {
        if (i == m + 1 && j == n + 1) return 0.0;
        if (j == n + 1) return ne.top[static_cast<std::size_t>(i - 1)];
        if (i == m + 1) return ne.right[static_cast<std::size_t>(j - 1)];
        return f.bulk(i, j);
    };

    for (std::int64_t i = m + 1; i >= 1; --i) {
        for (std::int64_t j = n + 1; j >= 1; --j) {
            const double right = (i < m + 1) ? g.values[g.index({i + 1, j})] : neg_inf;
            const double up = (j < n + 1) ? g.values[g.index({i, j + 1})] : neg_inf;
            double best = std::max(right, up);
            if (i == m + 1 && j == n + 1) best = 0.0; // path of a single vertex
            if (best == neg_inf) continue;
            const double own = (i == m + 1 && j == n + 1) ? 0.0 : wt(i, j) + best;
            g.values[g.index({i, j})] = own;
        }
    }
    return g;
}

template <class Field>
double northeast_bruteforce(const Field& f, double u, vertex from) {
    const std::int64_t m = f.m(), n = f.n();
    if (m + n > 12)
        throw std::invalid_argument("northeast_bruteforce: grid too large");
    const auto ne = northeast_weights(f, u);
    const auto wt = [&](vertex a) -> double {
        if (a.x == m + 1 && a.y == n + 1) return 0.0;
        if (a.y == n + 1) return ne.top[static_cast<std::size_t>(a.x - 1)];
        if (a.x == m + 1) return ne.right[static_cast<std::size_t>(a.y - 1)];
        return f.bulk(a.x, a.y);
    };
    return bruteforce_between(from, {m + 1, n + 1}, wt, fold_end::start);
}

// ----- axis decomposition --------------------------------------------------
//
// One reverse sweep over the interior computes, in O(n) memory,
//   to_row1[k-1] = G_{(k,1),(m,n)}   for k in [1,m]
//   to_col1[l-1] = G_{(1,l),(m,n)}   for l in [1,n].
// Every boundary variant then reduces to a scan against boundary prefix
// sums: G^{w,hor} = max_k { H_k + to_row1[k-1] } with H_k the prefix sum of
// horizontal boundary weights, and the maximizing k is the horizontal exit
// point.  This is how the large-grid experiments obtain values, exit points,
// and reweighted boundary scans from a single interior pass.

struct axis_decomposition {
    std::vector<double> to_row1, to_col1;
};

template <class Field>
axis_decomposition decompose_to_target(const Field& f) {
    const std::int64_t m = f.m(), n = f.n();
    axis_decomposition d;
    d.to_row1.resize(static_cast<std::size_t>(m));
    d.to_col1.resize(static_cast<std::size_t>(n));

    // row[j-1] holds R(i,j) = G_{(i,j),(m,n)} for the current i
    std::vector<double> row(static_cast<std::size_t>(n), neg_inf);
    for (std::int64_t i = m; i >= 1; --i) {
        double above = neg_inf; // R(i, j+1)
        for (std::int64_t j = n; j >= 1; --j) {
            const double right = row[static_cast<std::size_t>(j - 1)]; // R(i+1, j)
            double best = std::max(right, above);
            if (i == m && j == n) best = 0.0;
            const double value = (best == neg_inf) ? neg_inf : f.bulk(i, j) + best;
            row[static_cast<std::size_t>(j - 1)] = value;
            above = value;
        }
        d.to_row1[static_cast<std::size_t>(i - 1)] = row[0];
    }
    d.to_col1.assign(row.begin(), row.end());
    return d;
}

// Best boundary entry against an axis profile: value and exit point of the
// one-sided model.  Exact ties take the smallest entry index.
struct boundary_scan_t {
    double value = neg_inf;
    std::int64_t exit = 0;
};

inline boundary_scan_t boundary_scan(const std::vector<double>& axis_profile,
                                     const std::vector<double>& boundary) {
    if (axis_profile.size() != boundary.size())
        throw std::invalid_argument("boundary_scan: profile and boundary sizes differ");
    boundary_scan_t best;
    double prefix = 0.0;
    for (std::size_t k = 0; k < boundary.size(); ++k) {
        prefix += boundary[k];
        const double v = prefix + axis_profile[k];
        if (v > best.value) {
            best.value = v;
            best.exit = static_cast<std::int64_t>(k + 1);
        }
    }
    return best;
}

} // namespace lpplab
