#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>

namespace cgoslab {

// Uniform tensor-product lattice. Node (i,j,k) sits at
// origin[a] + index*dx[a] along each axis. Whether the lattice is read as
// periodic (torus cell, last node + dx wraps to origin) or bounded
// (inclusive faces) is up to the operator acting on it; the geometry here
// is the same either way.
struct Grid3 {
    std::array<std::size_t, 3> n{0, 0, 0};
    std::array<double, 3> dx{0, 0, 0};
    std::array<double, 3> origin{0, 0, 0};

    std::size_t size() const { return n[0] * n[1] * n[2]; }

    std::size_t id(std::size_t i, std::size_t j, std::size_t k) const {
        return (i * n[1] + j) * n[2] + k;
    }

    double x(int axis, std::size_t idx) const {
        return origin[axis] + static_cast<double>(idx) * dx[axis];
    }

    double cell_volume() const { return dx[0] * dx[1] * dx[2]; }

    // center of the periodic cell [origin, origin + n dx) along an axis
    double center(int axis) const {
        return origin[axis] +
               0.5 * static_cast<double>(n[axis]) * dx[axis];
    }
    std::array<double, 3> center3() const {
        return {center(0), center(1), center(2)};
    }
    double half_extent(int axis) const {
        return 0.5 * static_cast<double>(n[axis]) * dx[axis];
    }

    // torus cube centered at c instead of the origin
    static Grid3 torus_cube_at(std::size_t m, double half,
                               const std::array<double, 3>& c) {
        Grid3 g = torus_cube(m, half);
        for (int ax = 0; ax < 3; ++ax) g.origin[ax] += c[ax];
        return g;
    }

    // cube [-half, half)^3 sampled with m nodes per axis, torus convention
    static Grid3 torus_cube(std::size_t m, double half) {
        Grid3 g;
        g.n = {m, m, m};
        double d = 2.0 * half / static_cast<double>(m);
        g.dx = {d, d, d};
        g.origin = {-half, -half, -half};
        return g;
    }

    // slab lattice: x' in [-radius, radius], x3 in [0, thickness], all
    // faces landing exactly on nodes (inclusive endpoints)
    static Grid3 slab(std::size_t m_lateral, std::size_t m_vertical,
                      double radius, double thickness) {
        assert(m_lateral >= 2 && m_vertical >= 2);
        Grid3 g;
        g.n = {m_lateral, m_lateral, m_vertical};
        g.dx = {2.0 * radius / static_cast<double>(m_lateral - 1),
                2.0 * radius / static_cast<double>(m_lateral - 1),
                thickness / static_cast<double>(m_vertical - 1)};
        g.origin = {-radius, -radius, 0.0};
        return g;
    }
};

inline bool same_layout(const Grid3& a, const Grid3& b) {
    return a.n == b.n && a.dx == b.dx && a.origin == b.origin;
}

}
