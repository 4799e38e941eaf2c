#pragma once

// Random weight fields.  A field fixes all randomness for one replica:
// the interior Exp(1) array plus uniform draws for the two boundary rows and
// the northeast frame.  Boundary randomness is kept as uniforms so that the
// weights for any rate parameters come from the same draws; in particular
// boundary weights are monotone couplings across parameters.
//
// Two interchangeable representations: weight_field materializes everything
// up front (small grids, repeated access), stream_field regenerates values on
// demand from the counter RNG (large grids, single sweep).  Both produce
// bit-identical values at every site.

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "analytic.hpp"
#include "rng.hpp"

namespace lpplab {

struct seed_spec {
    std::uint64_t master_seed = 0;
    std::string experiment_id;
    std::uint64_t replica_index = 0;

    counter_stream stream() const {
        return counter_stream(derive_stream_key(master_seed, experiment_id, replica_index));
    }

    // Independent sub-stream for a named purpose within the same replica.
    seed_spec sub(const std::string& purpose) const {
        return {master_seed, experiment_id + "/" + purpose, replica_index};
    }
};

// Boundary rates (w, z): horizontal row i >= 1 carries Exp(w), vertical
// column j >= 1 carries Exp(1-z).  The bulk model is the sentinel pair
// (w, z) = (+inf, -inf), under which both boundary rows vanish.
struct boundary_param {
    double w = pos_inf;
    double z = -pos_inf;

    static boundary_param bulk() { return {pos_inf, -pos_inf}; }
    static boundary_param stationary(double z) { return {z, z}; }

    bool hor_trivial() const { return w == pos_inf; }
    bool ver_trivial() const { return z == -pos_inf; }

    void validate() const {
        if (!(w > 0.0)) throw std::domain_error("boundary_param: horizontal rate w must be positive");
        if (!(z < 1.0)) throw std::domain_error("boundary_param: vertical rate 1-z must be positive");
    }
};

class stream_field {
public:
    stream_field(const seed_spec& spec, std::int64_t m, std::int64_t n)
        : stream_(spec.stream()), m_(m), n_(n) {
        if (m < 1 || n < 1) throw std::domain_error("stream_field: extents must be positive");
    }

    std::int64_t m() const { return m_; }
    std::int64_t n() const { return n_; }

    double bulk(std::int64_t i, std::int64_t j) const {
        return -std::log(stream_.uniform(rng_layer::bulk, site_index(i, j)));
    }
    double hor_uniform(std::int64_t i) const { return stream_.uniform(rng_layer::hor, std::uint64_t(i)); }
    double ver_uniform(std::int64_t j) const { return stream_.uniform(rng_layer::ver, std::uint64_t(j)); }
    double ne_top_uniform(std::int64_t i) const { return stream_.uniform(rng_layer::ne_top, std::uint64_t(i)); }
    double ne_right_uniform(std::int64_t j) const { return stream_.uniform(rng_layer::ne_right, std::uint64_t(j)); }

    const counter_stream& stream() const { return stream_; }

private:
    counter_stream stream_;
    std::int64_t m_, n_;
};

class weight_field {
public:
    weight_field(const seed_spec& spec, std::int64_t m, std::int64_t n)
        : src_(spec, m, n), m_(m), n_(n) {
        bulk_.resize(static_cast<std::size_t>(m) * static_cast<std::size_t>(n));
        for (std::int64_t j = 1; j <= n; ++j)
            for (std::int64_t i = 1; i <= m; ++i)
                bulk_[idx(i, j)] = src_.bulk(i, j);
        hor_u_.resize(static_cast<std::size_t>(m));
        for (std::int64_t i = 1; i <= m; ++i) hor_u_[i - 1] = src_.hor_uniform(i);
        ver_u_.resize(static_cast<std::size_t>(n));
        for (std::int64_t j = 1; j <= n; ++j) ver_u_[j - 1] = src_.ver_uniform(j);
        ne_top_u_.resize(static_cast<std::size_t>(m));
        for (std::int64_t i = 1; i <= m; ++i) ne_top_u_[i - 1] = src_.ne_top_uniform(i);
        ne_right_u_.resize(static_cast<std::size_t>(n));
        for (std::int64_t j = 1; j <= n; ++j) ne_right_u_[j - 1] = src_.ne_right_uniform(j);
    }

    std::int64_t m() const { return m_; }
    std::int64_t n() const { return n_; }

    double bulk(std::int64_t i, std::int64_t j) const { return bulk_[idx(i, j)]; }
    double hor_uniform(std::int64_t i) const { return hor_u_[i - 1]; }
    double ver_uniform(std::int64_t j) const { return ver_u_[j - 1]; }
    double ne_top_uniform(std::int64_t i) const { return ne_top_u_[i - 1]; }
    double ne_right_uniform(std::int64_t j) const { return ne_right_u_[j - 1]; }

private:
    std::size_t idx(std::int64_t i, std::int64_t j) const {
        return static_cast<std::size_t>(j - 1) * static_cast<std::size_t>(m_) +
               static_cast<std::size_t>(i - 1);
    }

    stream_field src_;
    std::int64_t m_, n_;
    std::vector<double> bulk_, hor_u_, ver_u_, ne_top_u_, ne_right_u_;
};

// Materialize a field, refusing grids whose storage would exceed the budget.
inline weight_field sample_field(const seed_spec& spec, std::int64_t m, std::int64_t n,
                                 std::size_t max_bytes = std::size_t(1) << 30) {
    if (m < 1 || n < 1) throw std::domain_error("sample_field: extents must be positive");
    const std::size_t doubles = static_cast<std::size_t>(m) * static_cast<std::size_t>(n) +
                                2 * static_cast<std::size_t>(m) + 2 * static_cast<std::size_t>(n);
    const std::size_t bytes = doubles * sizeof(double);
    if (bytes > max_bytes)
        throw std::length_error("sample_field: grid needs " + std::to_string(bytes) +
                                " bytes, budget is " + std::to_string(max_bytes));
    return weight_field(spec, m, n);
}

// Boundary weights for given rates, from the field's stored uniforms.
// hor[i-1] ~ Exp(w) sits at (i,0); ver[j-1] ~ Exp(1-z) sits at (0,j).
// Under the bulk sentinel the corresponding row is identically zero.
struct boundary_weights_t {
    std::vector<double> hor, ver;
};

template <class Field>
boundary_weights_t boundary_weights(const Field& f, boundary_param p) {
    p.validate();
    boundary_weights_t b;
    b.hor.resize(static_cast<std::size_t>(f.m()));
    for (std::int64_t i = 1; i <= f.m(); ++i)
        b.hor[i - 1] = p.hor_trivial() ? 0.0 : -std::log(f.hor_uniform(i)) / p.w;
    b.ver.resize(static_cast<std::size_t>(f.n()));
    for (std::int64_t j = 1; j <= f.n(); ++j)
        b.ver[j - 1] = p.ver_trivial() ? 0.0 : -std::log(f.ver_uniform(j)) / (1.0 - p.z);
    return b;
}

// Frame of the northeast-reversed model on the extended grid
// [1,m+1] x [1,n+1]: top row (i, n+1) ~ Exp(u) for i in [m], right column
// (m+1, j) ~ Exp(1-u) for j in [n], corner (m+1, n+1) = 0, interior shared
// with the bulk field.
struct northeast_frame_t {
    std::vector<double> top, right;
};

template <class Field>
northeast_frame_t northeast_weights(const Field& f, double u) {
    if (!(u > 0.0) || !(u < 1.0))
        throw std::domain_error("northeast_weights: parameter must lie in (0,1)");
    northeast_frame_t ne;
    ne.top.resize(static_cast<std::size_t>(f.m()));
    for (std::int64_t i = 1; i <= f.m(); ++i) ne.top[i - 1] = -std::log(f.ne_top_uniform(i)) / u;
    ne.right.resize(static_cast<std::size_t>(f.n()));
    for (std::int64_t j = 1; j <= f.n(); ++j) ne.right[j - 1] = -std::log(f.ne_right_uniform(j)) / (1.0 - u);
    return ne;
}

// n draws of Exp(1-mu) from the replica's auxiliary stream, mu < 1.
// mu = 0 reproduces the untilted Exp(1) stream from the same uniforms.
inline std::vector<double> tilted_exp_stream(const seed_spec& spec, std::int64_t n, double mu) {
    if (!(mu < 1.0)) throw std::domain_error("tilted_exp_stream: tilt must satisfy mu < 1");
    if (n < 0) throw std::domain_error("tilted_exp_stream: count must be nonnegative");
    const counter_stream s = spec.stream();
    std::vector<double> out(static_cast<std::size_t>(n));
    for (std::int64_t i = 1; i <= n; ++i)
        out[i - 1] = -std::log(s.uniform(rng_layer::aux, std::uint64_t(i))) / (1.0 - mu);
    return out;
}

// Binary dump of a sampled field for debugging reproduction.  Header: magic,
// format version, extents, and the seed spec that regenerates the field;
// payload: the bulk matrix as 64-bit floats, row-major (j outer, i inner).
// Byte order is the host's; the format targets little-endian platforms.
inline void dump_field(const std::string& path, const seed_spec& spec, std::int64_t m,
                       std::int64_t n) {
    const weight_field f = sample_field(spec, m, n);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("dump_field: cannot write " + path);
    const char magic[8] = {'L', 'P', 'P', 'F', 'I', 'E', 'L', 'D'};
    out.write(magic, 8);
    const auto put_u64 = [&](std::uint64_t v) {
        out.write(reinterpret_cast<const char*>(&v), sizeof v);
    };
    put_u64(1); // format version
    put_u64(static_cast<std::uint64_t>(m));
    put_u64(static_cast<std::uint64_t>(n));
    put_u64(spec.master_seed);
    put_u64(spec.replica_index);
    put_u64(spec.experiment_id.size());
    out.write(spec.experiment_id.data(), static_cast<std::streamsize>(spec.experiment_id.size()));
    for (std::int64_t j = 1; j <= n; ++j)
        for (std::int64_t i = 1; i <= m; ++i) {
            const double v = f.bulk(i, j);
            out.write(reinterpret_cast<const char*>(&v), sizeof v);
        }
    if (!out) throw std::runtime_error("dump_field: write failed for " + path);
}

} // namespace lpplab
