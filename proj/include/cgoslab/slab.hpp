#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fft.hpp"
#include "field.hpp"
#include "krylov.hpp"
#include "potential.hpp"
#include "stencil.hpp"

namespace cgoslab {

// Truncated forward geometry: the slab 0 <= z <= thickness cut to the box
// |x1|, |x2| <= radius, with homogeneous Dirichlet walls standing in for
// lateral decay. Sources supported well inside the box feel the truncation
// only exponentially weakly.
struct SlabConfig {
    std::size_t n_lateral = 49;
    std::size_t n_vertical = 25;
    double radius = 2.5;
    double thickness = 1.0;
    double tol = 1e-11;
    int restart = 40;
    int max_iterations = 400;
};

inline Grid3 slab_grid(const SlabConfig& c) {
    return Grid3::slab(c.n_lateral, c.n_vertical, c.radius, c.thickness);
}

// Dirichlet samples on the top face z = thickness, row-major over (x1, x2)
struct BoundaryDatum {
    std::size_t n0 = 0, n1 = 0;
    std::vector<cplx> f;

    BoundaryDatum() = default;
    BoundaryDatum(std::size_t a, std::size_t b) : n0(a), n1(b), f(a * b) {}
    cplx& at(std::size_t i, std::size_t j) { return f[i * n1 + j]; }
    cplx at(std::size_t i, std::size_t j) const { return f[i * n1 + j]; }
};

template <class F>
inline BoundaryDatum sample_datum(const Grid3& g, F&& fn) {
    BoundaryDatum d(g.n[0], g.n[1]);
    for (std::size_t i = 0; i < g.n[0]; ++i)
        for (std::size_t j = 0; j < g.n[1]; ++j)
            d.at(i, j) = fn(g.x(0, i), g.x(1, j));
    return d;
}

// Magnetic operator (sum over (D_j + A_j)^2 plus q) minus k^2, applied with
// centered second-order stencils at interior nodes. Boundary values of u
// are read as Dirichlet data; the output ring is zero.
inline Field3 apply_magnetic_op(const SampledPotential& p, double k,
                                const Field3& u) {
    const Grid3& g = u.grid;
    Field3 out(g);
    const double k2 = k * k;
    const std::ptrdiff_t off[3] = {
        static_cast<std::ptrdiff_t>(g.n[1] * g.n[2]),
        static_cast<std::ptrdiff_t>(g.n[2]), 1};
    double inv2dx[3], invdx2[3];
    for (int a = 0; a < 3; ++a) {
        inv2dx[a] = 0.5 / g.dx[a];
        invdx2[a] = 1.0 / (g.dx[a] * g.dx[a]);
    }
    const cplx mi(0.0, -1.0);
    for (std::size_t i = 1; i + 1 < g.n[0]; ++i)
        for (std::size_t j = 1; j + 1 < g.n[1]; ++j)
            for (std::size_t m = 1; m + 1 < g.n[2]; ++m) {
                const std::size_t id = g.id(i, j, m);
                cplx acc = 0.0;
                cplx a2 = 0.0;
                for (int a = 0; a < 3; ++a) {
                    const cplx up = u.v[id + off[a]], dn = u.v[id - off[a]];
                    acc -= (up + dn - 2.0 * u.v[id]) * invdx2[a];
                    const cplx grad = (up - dn) * inv2dx[a];
                    const cplx div =
                        (p.A[a].v[id + off[a]] * up -
                         p.A[a].v[id - off[a]] * dn) *
                        inv2dx[a];
                    acc += p.A[a].v[id] * (mi * grad) + mi * div;
                    a2 += p.A[a].v[id] * p.A[a].v[id];
                }
                out.v[id] = acc + (a2 + p.q.v[id] - k2) * u.v[id];
            }
    return out;
}

// Exact inverse of the interior Dirichlet Laplacian minus k^2, via the
// odd sine transform that diagonalizes it. Also the arbiter of spectral
// admissibility: a k^2 sitting on the discrete spectrum is rejected.
class DirichletPoissonInverse {
  public:
    DirichletPoissonInverse(const Grid3& g, double k) : g_(g), k2_(k * k) {
        for (int a = 0; a < 3; ++a) {
            m_[a] = g.n[a] - 2;
            lam_[a].resize(m_[a]);
            for (std::size_t t = 0; t < m_[a]; ++t) {
                const double s = std::sin(
                    0.5 * M_PI * static_cast<double>(t + 1) /
                    static_cast<double>(g.n[a] - 1));
                lam_[a][t] = 4.0 * s * s / (g.dx[a] * g.dx[a]);
            }
        }
        scale_ = 1.0;
        for (int a = 0; a < 3; ++a)
            scale_ /= 2.0 * static_cast<double>(m_[a] + 1);
        gap_ = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m_[0]; ++i)
            for (std::size_t j = 0; j < m_[1]; ++j)
                for (std::size_t t = 0; t < m_[2]; ++t)
                    gap_ = std::min(gap_,
                                    std::abs(lam_[0][i] + lam_[1][j] +
                                             lam_[2][t] - k2_));
        if (gap_ < 1e-10 * lam_[0][0])
            throw std::invalid_argument(
                "spectral parameter collides with the discrete Dirichlet "
                "spectrum; pick a different k");
    }

    double spectral_gap() const { return gap_; }

    Field3 apply(const Field3& b) const {
        const std::size_t sz = m_[0] * m_[1] * m_[2];
        std::vector<double> re(sz), im(sz);
        std::size_t t = 0;
        for (std::size_t i = 1; i + 1 < g_.n[0]; ++i)
            for (std::size_t j = 1; j + 1 < g_.n[1]; ++j)
                for (std::size_t m = 1; m + 1 < g_.n[2]; ++m, ++t) {
                    const cplx z = b.v[g_.id(i, j, m)];
                    re[t] = z.real();
                    im[t] = z.imag();
                }
        dst1_3d(re, static_cast<int>(m_[0]), static_cast<int>(m_[1]),
                static_cast<int>(m_[2]));
        dst1_3d(im, static_cast<int>(m_[0]), static_cast<int>(m_[1]),
                static_cast<int>(m_[2]));
        t = 0;
        for (std::size_t i = 0; i < m_[0]; ++i)
            for (std::size_t j = 0; j < m_[1]; ++j)
                for (std::size_t m = 0; m < m_[2]; ++m, ++t) {
                    const double d =
                        lam_[0][i] + lam_[1][j] + lam_[2][m] - k2_;
                    re[t] /= d;
                    im[t] /= d;
                }
        dst1_3d(re, static_cast<int>(m_[0]), static_cast<int>(m_[1]),
                static_cast<int>(m_[2]));
        dst1_3d(im, static_cast<int>(m_[0]), static_cast<int>(m_[1]),
                static_cast<int>(m_[2]));
        Field3 out(g_);
        t = 0;
        for (std::size_t i = 1; i + 1 < g_.n[0]; ++i)
            for (std::size_t j = 1; j + 1 < g_.n[1]; ++j)
                for (std::size_t m = 1; m + 1 < g_.n[2]; ++m, ++t)
                    out.v[g_.id(i, j, m)] =
                        cplx(re[t], im[t]) * scale_;
        return out;
    }

  private:
    Grid3 g_;
    double k2_;
    std::array<std::size_t, 3> m_{};
    std::array<std::vector<double>, 3> lam_;
    double scale_ = 1.0;
    double gap_ = 0.0;
};

struct SlabSolution {
    Field3 u;  // boundary ring carries the data: f on top, zero elsewhere
    KrylovResult stats;
    double defect = 0.0;
    double k = 0.0;
};

// Dirichlet problem: operator applied to u equals k^2 u inside, u = f on
// the top face, u = 0 on the bottom face and the lateral truncation walls.
inline SlabSolution solve_dirichlet(const SampledPotential& p, double k,
                                    const BoundaryDatum& f,
                                    const SlabConfig& cfg) {
    const Grid3& g = p.q.grid;
    if (f.n0 != g.n[0] || f.n1 != g.n[1])
        throw std::invalid_argument(
            "boundary datum does not match the lateral grid");
    double fsup = 0.0;
    for (const auto& z : f.f) fsup = std::max(fsup, std::abs(z));
    for (std::size_t i = 0; i < g.n[0]; ++i)
        for (std::size_t j = 0; j < g.n[1]; ++j) {
            const bool rim = i == 0 || j == 0 || i + 1 == g.n[0] ||
                             j + 1 == g.n[1];
            if (rim && std::abs(f.at(i, j)) > 1e-12 * (1.0 + fsup))
                throw std::invalid_argument(
                    "boundary datum must vanish on the rim of the top "
                    "face (support strictly inside the truncation box)");
        }

    // linear vertical lift of the data; vanishes on every other face
    Field3 lift(g);
    const double L = cfg.thickness;
    for (std::size_t i = 0; i < g.n[0]; ++i)
        for (std::size_t j = 0; j < g.n[1]; ++j)
            for (std::size_t m = 0; m < g.n[2]; ++m)
                lift(i, j, m) = f.at(i, j) * (g.x(2, m) / L);

    SlabSolution sol;
    sol.k = k;
    DirichletPoissonInverse minv(g, k);

    Field3 b = apply_magnetic_op(p, k, lift);
    b *= cplx(-1.0, 0.0);
    auto aop = [&](const Field3& v) {
        return minv.apply(apply_magnetic_op(p, k, v));
    };
    Field3 rhs = minv.apply(b);
    Field3 u0(g);
    sol.stats = gmres(aop, rhs, u0, cfg.tol, cfg.restart,
                      cfg.max_iterations);

    sol.u = lift;
    sol.u += u0;
    Field3 res = apply_magnetic_op(p, k, sol.u);
    const double un = l2_norm(sol.u);
    sol.defect = un > 0.0 ? l2_norm(res) / un : 0.0;
    return sol;
}

// Conormal traces (normal derivative plus i A.nu) on both slab faces,
// synthesized from a Dirichlet solve with a one-sided 3-point stencil.
struct DtnSample {
    std::size_t n0 = 0, n1 = 0;
    std::vector<cplx> bottom, top;
    double k = 0.0;

    cplx bottom_at(std::size_t i, std::size_t j) const {
        return bottom[i * n1 + j];
    }
    cplx top_at(std::size_t i, std::size_t j) const {
        return top[i * n1 + j];
    }
};

inline DtnSample dtn_from_solution(const SampledPotential& p,
                                   const SlabSolution& sol) {
    const Grid3& g = sol.u.grid;
    DtnSample d;
    d.n0 = g.n[0];
    d.n1 = g.n[1];
    d.k = sol.k;
    d.bottom.resize(d.n0 * d.n1);
    d.top.resize(d.n0 * d.n1);
    const double inv2dz = 0.5 / g.dx[2];
    const std::size_t kt = g.n[2] - 1;
    const cplx iu(0.0, 1.0);
    for (std::size_t i = 0; i < g.n[0]; ++i)
        for (std::size_t j = 0; j < g.n[1]; ++j) {
            // bottom face: outward normal points down
            const cplx db =
                (3.0 * sol.u(i, j, 0) - 4.0 * sol.u(i, j, 1) +
                 sol.u(i, j, 2)) *
                inv2dz;
            d.bottom[i * d.n1 + j] =
                db - iu * p.A[2](i, j, 0) * sol.u(i, j, 0);
            // top face: outward normal points up
            const cplx dt =
                (3.0 * sol.u(i, j, kt) - 4.0 * sol.u(i, j, kt - 1) +
                 sol.u(i, j, kt - 2)) *
                inv2dz;
            d.top[i * d.n1 + j] =
                dt + iu * p.A[2](i, j, kt) * sol.u(i, j, kt);
        }
    return d;
}

inline DtnSample dtn_apply(const SampledPotential& p, double k,
                           const BoundaryDatum& f, const SlabConfig& cfg,
                           SlabSolution* solution_out = nullptr) {
    SlabSolution sol = solve_dirichlet(p, k, f, cfg);
    DtnSample d = dtn_from_solution(p, sol);
    if (solution_out) *solution_out = std::move(sol);
    return d;
}

// The surface-pairing identity connecting the operator applied to u against
// v with conormal traces. Fields and coefficients are sampled on a grid
// padded by one ghost ring so centered stencils reach every physical node.
inline Grid3 with_ghost(const Grid3& g) {
    Grid3 e = g;
    for (int a = 0; a < 3; ++a) {
        e.n[a] += 2;
        e.origin[a] -= g.dx[a];
    }
    return e;
}

struct GreenCheck {
    cplx lhs = 0.0, rhs = 0.0;
    double gap = 0.0;  // |lhs - rhs| / (|lhs| + |rhs|)
};

namespace slabdetail {

// trapezoid weight along one axis of an inclusive-face grid
inline double trap(std::size_t t, std::size_t n) {
    return (t == 0 || t + 1 == n) ? 0.5 : 1.0;
}

}  // namespace slabdetail

// u, v, p sampled on with_ghost(physical); all integrals over the physical
// box. The volume terms use centered stencils (the ghost ring lets them
// reach face nodes); the surface terms use the same one-sided 3-point
// normal derivative as the conormal synthesis, so the two sides are
// discretized independently and their gap measures quadrature quality.
inline GreenCheck green_check(const Field3& u, const Field3& v,
                              const SampledPotential& p, double k = 0.0) {
    const Grid3& ge = u.grid;  // ghost grid
    Grid3 g = ge;              // physical grid
    for (int a = 0; a < 3; ++a) {
        g.n[a] -= 2;
        g.origin[a] += ge.dx[a];
    }

    SampledPotential pc{{p.A[0], p.A[1], p.A[2]}, p.q};
    for (int a = 0; a < 3; ++a)
        for (auto& z : pc.A[a].v) z = std::conj(z);
    for (auto& z : pc.q.v) z = std::conj(z);

    Field3 Lu = apply_magnetic_op(p, k, u);
    Field3 Lcv = apply_magnetic_op(pc, k, v);

    GreenCheck out;
    const double vol = g.cell_volume();
    using slabdetail::trap;
    cplx lhs = 0.0;
    for (std::size_t i = 0; i < g.n[0]; ++i)
        for (std::size_t j = 0; j < g.n[1]; ++j)
            for (std::size_t m = 0; m < g.n[2]; ++m) {
                const double w = vol * trap(i, g.n[0]) * trap(j, g.n[1]) *
                                 trap(m, g.n[2]);
                const std::size_t id = ge.id(i + 1, j + 1, m + 1);
                lhs += w * (Lu.v[id] * std::conj(v.v[id]) -
                            u.v[id] * std::conj(Lcv.v[id]));
            }

    // surface terms: sum over the six faces with outward normals
    cplx rhs = 0.0;
    const cplx iu(0.0, 1.0);
    for (int ax = 0; ax < 3; ++ax) {
        const int b0 = (ax + 1) % 3, b1 = (ax + 2) % 3;
        const double area = g.dx[b0] * g.dx[b1];
        const std::ptrdiff_t off =
            ax == 0 ? static_cast<std::ptrdiff_t>(ge.n[1] * ge.n[2])
                    : (ax == 1 ? static_cast<std::ptrdiff_t>(ge.n[2]) : 1);
        for (int side = 0; side < 2; ++side) {
            const double sgn = side == 0 ? -1.0 : 1.0;  // outward direction
            const std::size_t face = side == 0 ? 0 : g.n[ax] - 1;
            for (std::size_t s = 0; s < g.n[b0]; ++s)
                for (std::size_t t = 0; t < g.n[b1]; ++t) {
                    std::array<std::size_t, 3> idx{};
                    idx[ax] = face + 1;
                    idx[b0] = s + 1;
                    idx[b1] = t + 1;
                    const std::size_t id = ge.id(idx[0], idx[1], idx[2]);
                    const double w = area * trap(s, g.n[b0]) *
                                     trap(t, g.n[b1]);
                    const std::ptrdiff_t in =
                        side == 0 ? off : -off;  // inward neighbor step
                    const cplx dnu = (3.0 * u.v[id] - 4.0 * u.v[id + in] +
                                      u.v[id + 2 * in]) *
                                     (0.5 / g.dx[ax]);
                    const cplx dnv = (3.0 * v.v[id] - 4.0 * v.v[id + in] +
                                      v.v[id + 2 * in]) *
                                     (0.5 / g.dx[ax]);
                    const cplx nA = sgn * p.A[ax].v[id];
                    // conormal of v carries the conjugated coefficient
                    rhs += w * (u.v[id] *
                                    std::conj(dnv + iu * std::conj(nA) *
                                                        v.v[id]) -
                                (dnu + iu * nA * u.v[id]) *
                                    std::conj(v.v[id]));
                }
        }
    }
    out.lhs = lhs;
    out.rhs = rhs;
    const double denom = std::abs(lhs) + std::abs(rhs);
    out.gap = denom > 0.0 ? std::abs(lhs - rhs) / denom : 0.0;
    return out;
}

}
