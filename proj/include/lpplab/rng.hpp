#pragma once

// Counter-based random number generation.
//
// Every random quantity in the library is a pure function of
// (stream key, layer, site, slot).  The stream key is derived from
// (master seed, experiment id, replica index); layers separate the bulk
// field from the boundary rows, the northeast frame, and auxiliary draws.
// Because draws are addressed rather than sequenced, any subset of sites can
// be generated in any order, on any number of workers, with identical values.
//
// The block cipher is Philox4x32 with 10 rounds (Salmon et al., SC'11),
// using the published multipliers and Weyl constants.

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace lpplab {

namespace detail {

// 64-bit finalizer from splitmix64; full-avalanche bijection.
inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

} // namespace detail

struct philox4x32 {
    static constexpr std::uint32_t mult_hi = 0xD2511F53u; // acts on words 0/1
    static constexpr std::uint32_t mult_lo = 0xCD9E8D57u; // acts on words 2/3
    static constexpr std::uint32_t weyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t weyl1 = 0xBB67AE85u;

    using counter_t = std::array<std::uint32_t, 4>;
    using key_t = std::array<std::uint32_t, 2>;

    static counter_t encrypt(counter_t c, key_t k) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t(mult_hi) * c[0];
            const std::uint64_t p1 = std::uint64_t(mult_lo) * c[2];
            c = {std::uint32_t(p1 >> 32) ^ c[1] ^ k[0],
                 std::uint32_t(p1),
                 std::uint32_t(p0 >> 32) ^ c[3] ^ k[1],
                 std::uint32_t(p0)};
            k[0] += weyl0;
            k[1] += weyl1;
        }
        return c;
    }
};

// Addressed layers.  Values are part of the reproducibility contract: changing
// them changes every stream.
enum class rng_layer : std::uint32_t {
    bulk = 0,      // interior Exp(1) field
    hor = 1,       // horizontal boundary uniforms
    ver = 2,       // vertical boundary uniforms
    ne_top = 3,    // northeast frame, top row uniforms
    ne_right = 4,  // northeast frame, right column uniforms
    aux = 5,       // per-replica scalar draws (tilted streams, sums)
    boot = 6,      // bootstrap resampling indices
};

// One keyed stream; addressing (layer, site, slot) -> 64 random bits.
class counter_stream {
public:
    explicit counter_stream(std::uint64_t key) : key_{std::uint32_t(key), std::uint32_t(key >> 32)} {}

    std::uint64_t bits(rng_layer layer, std::uint64_t site, std::uint32_t slot = 0) const {
        philox4x32::counter_t c = {std::uint32_t(site), std::uint32_t(site >> 32),
                                   static_cast<std::uint32_t>(layer), slot};
        const auto out = philox4x32::encrypt(c, key_);
        return std::uint64_t(out[0]) | (std::uint64_t(out[1]) << 32);
    }

    // Uniform on the open interval (0,1): the top 53 bits placed on the
    // half-offset lattice (r + 1/2) * 2^-53, so 0 and 1 are unreachable and
    // -log stays finite and positive.
    double uniform(rng_layer layer, std::uint64_t site, std::uint32_t slot = 0) const {
        const std::uint64_t r = bits(layer, site, slot) >> 11;
        return (static_cast<double>(r) + 0.5) * 0x1p-53;
    }

    // Exponential with the given rate, by inverse CDF.
    double exponential(double rate, rng_layer layer, std::uint64_t site, std::uint32_t slot = 0) const {
        return -std::log(uniform(layer, site, slot)) / rate;
    }

    std::uint64_t key_as_u64() const {
        return std::uint64_t(key_[0]) | (std::uint64_t(key_[1]) << 32);
    }

private:
    philox4x32::key_t key_;
};

// Site addresses for planar fields: pack (i,j) into one 64-bit word.  The
// address depends only on the site, never on grid extents, so a weight at a
// given site is the same in every grid that contains the site.
inline std::uint64_t site_index(std::int64_t i, std::int64_t j) {
    return (std::uint64_t(std::uint32_t(j)) << 32) | std::uint64_t(std::uint32_t(i));
}

// Stream-key derivation.  The algorithm below is frozen: splitmix64 rounds
// folded over the master seed, an FNV-1a hash of the experiment id, and the
// replica index.  Distinct inputs must map to distinct keys in practice and
// neighbouring replicas must decorrelate (avalanche); both properties are
// pinned by tests.
inline std::uint64_t derive_stream_key(std::uint64_t master_seed, std::string_view experiment_id,
                                       std::uint64_t replica_index) {
    std::uint64_t h = 0x9E3779B97F4A7C15ull;
    h = detail::mix64(h ^ master_seed);
    h = detail::mix64(h ^ detail::fnv1a64(experiment_id));
    h = detail::mix64(h ^ replica_index);
    return h;
}

} // namespace lpplab
