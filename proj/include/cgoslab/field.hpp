#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <vector>

#include "grid.hpp"

namespace cgoslab {

using cplx = std::complex<double>;

// Scalar sample field over a Grid3, flat row-major storage.
struct Field3 {
    Grid3 grid;
    std::vector<cplx> v;

    Field3() = default;
    explicit Field3(const Grid3& g, cplx fill = {0.0, 0.0})
        : grid(g), v(g.size(), fill) {}

    cplx& operator()(std::size_t i, std::size_t j, std::size_t k) {
        return v[grid.id(i, j, k)];
    }
    cplx operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return v[grid.id(i, j, k)];
    }

    std::size_t size() const { return v.size(); }
};

inline Field3& operator+=(Field3& a, const Field3& b) {
    assert(a.size() == b.size());
    for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] += b.v[i];
    return a;
}

inline Field3& operator-=(Field3& a, const Field3& b) {
    assert(a.size() == b.size());
    for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] -= b.v[i];
    return a;
}

inline Field3& operator*=(Field3& a, cplx s) {
    for (auto& x : a.v) x *= s;
    return a;
}

// volume-weighted L2 norm over the whole lattice
inline double l2_norm(const Field3& f) {
    double s = 0.0;
    for (const auto& x : f.v) s += std::norm(x);
    return std::sqrt(s * f.grid.cell_volume());
}

inline double sup_norm(const Field3& f) {
    double m = 0.0;
    for (const auto& x : f.v) m = std::max(m, std::abs(x));
    return m;
}

// L2 norm restricted to |x_a - center_a| <= half for all axes
inline double l2_norm_box(const Field3& f, const std::array<double, 3>& center,
                          double half) {
    const Grid3& g = f.grid;
    double s = 0.0;
    for (std::size_t i = 0; i < g.n[0]; ++i) {
        if (std::abs(g.x(0, i) - center[0]) > half + 1e-12) continue;
        for (std::size_t j = 0; j < g.n[1]; ++j) {
            if (std::abs(g.x(1, j) - center[1]) > half + 1e-12) continue;
            for (std::size_t k = 0; k < g.n[2]; ++k) {
                if (std::abs(g.x(2, k) - center[2]) > half + 1e-12) continue;
                s += std::norm(f(i, j, k));
            }
        }
    }
    return std::sqrt(s * g.cell_volume());
}

// max |a - b|, fields on identical layouts
inline double max_abs_diff(const Field3& a, const Field3& b) {
    assert(a.size() == b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i)
        m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
}

}
