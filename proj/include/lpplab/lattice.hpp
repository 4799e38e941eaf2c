#pragma once

// Lattice and continuum coordinates for the planar corner-growth geometry.
// Lattice sites are 1-based in the bulk; boundary rows/columns sit at index 0.

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace lpplab {

struct vertex {
    std::int64_t x = 0;
    std::int64_t y = 0;

    friend bool operator==(const vertex&, const vertex&) = default;
};

inline vertex operator+(vertex a, vertex b) { return {a.x + b.x, a.y + b.y}; }
inline vertex operator-(vertex a, vertex b) { return {a.x - b.x, a.y - b.y}; }

// Coordinatewise partial order; up-right paths exist from a to b iff a <= b.
inline bool leq(vertex a, vertex b) { return a.x <= b.x && a.y <= b.y; }

inline double l1_norm(vertex v) {
    return static_cast<double>(std::llabs(v.x) + std::llabs(v.y));
}

// A direction in the open positive quadrant.
struct plane_point {
    double x = 0.0;
    double y = 0.0;

    plane_point() = default;
    plane_point(double x_, double y_) : x(x_), y(y_) {
        if (!(x > 0.0) || !(y > 0.0))
            throw std::domain_error("plane_point: coordinates must be positive");
    }

    // Membership in the cone that keeps both coordinates comparable:
    // x >= delta*y and y >= delta*x.
    bool in_cone(double delta) const { return x >= delta * y && y >= delta * x; }

    double l1() const { return x + y; }
};

} // namespace lpplab
