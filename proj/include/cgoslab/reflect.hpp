#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "cgo.hpp"
#include "potential.hpp"

namespace cgoslab {

// Plane the partial-data solution vanishes on: the bottom slab face z = 0
// or the top face z = L.
enum class Mirror { bottom, top };

// Torus cell covering the slab box together with its mirror image, centered
// on the mirror plane so the reflection z -> -z (or z -> 2L - z) is an exact
// node permutation. With half = 1.6 and thickness 1, both z = 0 and z = L
// land on nodes whenever m is a multiple of 16.
inline Grid3 doubled_grid(std::size_t m, Mirror mirror, double half = 1.6,
                          double thickness = 1.0) {
    const std::array<double, 3> c{
        0.0, 0.0, mirror == Mirror::bottom ? 0.0 : thickness};
    Grid3 g = Grid3::torus_cube_at(m, half, c);
    const double d = g.dx[2];
    auto on_node = [&](double z) {
        const double t = (z - g.origin[2]) / d;
        return std::abs(t - std::round(t)) < 1e-9;
    };
    if (!on_node(0.0) || !on_node(thickness))
        throw std::invalid_argument(
            "doubled grid does not place both slab faces on nodes; "
            "use a node count divisible by 16");
    return g;
}

// vertical-mirror image of a node index (grids centered on the mirror plane)
inline std::size_t mirror_node(std::size_t k, std::size_t n) {
    return (n - k) % n;
}

// node index of a coordinate along an axis, required to be node-exact
inline std::size_t nearest_node(const Grid3& g, int axis, double coord) {
    const double t = (coord - g.origin[axis]) / g.dx[axis];
    const double r = std::round(t);
    if (std::abs(t - r) > 1e-9)
        throw std::invalid_argument("coordinate is not a grid node");
    return static_cast<std::size_t>(r);
}

// samples of f composed with the vertical mirror map, with optional sign
inline Field3 mirror_field(const Field3& f, double sign = 1.0) {
    const Grid3& g = f.grid;
    Field3 out(g);
    for (std::size_t i = 0; i < g.n[0]; ++i)
        for (std::size_t j = 0; j < g.n[1]; ++j)
            for (std::size_t k = 0; k < g.n[2]; ++k)
                out(i, j, k) = sign * f(i, j, mirror_node(k, g.n[2]));
    return out;
}

// Even/odd extension of slab-supported coefficients across the mirror plane:
// horizontal components and q continue evenly, the vertical component oddly.
// The input is sampled on the doubled grid; whatever the sampler produced
// strictly outside the slab is zeroed first (the physical coefficients live
// in 0 <= z <= L only), then the mirror half is overwritten by reflection.
// The odd extension stays bounded only if the vertical component vanishes
// on the mirror plane, so a nonzero trace there is rejected.
inline SampledPotential extend_even_odd(SampledPotential s, Mirror mirror,
                                        double thickness,
                                        double* trace_defect = nullptr) {
    const Grid3& g = s.q.grid;
    const std::size_t n2 = g.n[2];
    const double L = thickness;
    const double plane_z = mirror == Mirror::bottom ? 0.0 : L;
    if (std::abs(g.center(2) - plane_z) > 1e-12)
        throw std::invalid_argument(
            "extension grid must be centered on the mirror plane");

    double amax = 0.0;
    for (int a = 0; a < 3; ++a) amax = std::max(amax, sup_norm(s.A[a]));

    for (std::size_t k = 0; k < n2; ++k) {
        const double z = g.x(2, k);
        if (z >= -1e-12 && z <= L + 1e-12) continue;
        for (std::size_t i = 0; i < g.n[0]; ++i)
            for (std::size_t j = 0; j < g.n[1]; ++j) {
                const std::size_t id = g.id(i, j, k);
                for (int a = 0; a < 3; ++a) s.A[a].v[id] = 0.0;
                s.q.v[id] = 0.0;
            }
    }

    const std::size_t kc = nearest_node(g, 2, plane_z);
    double tr = 0.0;
    for (std::size_t i = 0; i < g.n[0]; ++i)
        for (std::size_t j = 0; j < g.n[1]; ++j)
            tr = std::max(tr, std::abs(s.A[2](i, j, kc)));
    if (trace_defect) *trace_defect = tr;
    if (tr > 1e-12 * (1.0 + amax))
        throw std::invalid_argument(
            "vertical potential component must vanish on the mirror plane; "
            "flatten it with a gauge change first");
    for (std::size_t i = 0; i < g.n[0]; ++i)
        for (std::size_t j = 0; j < g.n[1]; ++j)
            s.A[2](i, j, kc) = 0.0;

    for (std::size_t k = 0; k < n2; ++k) {
        const double z = g.x(2, k);
        const bool image_side =
            mirror == Mirror::bottom ? z < -1e-12 : z > L + 1e-12;
        if (!image_side) continue;
        const std::size_t km = mirror_node(k, n2);
        if (km == k) continue;  // seam ring, zero on both sides already
        for (std::size_t i = 0; i < g.n[0]; ++i)
            for (std::size_t j = 0; j < g.n[1]; ++j) {
                const std::size_t id = g.id(i, j, k);
                const std::size_t im = g.id(i, j, km);
                s.A[0].v[id] = s.A[0].v[im];
                s.A[1].v[id] = s.A[1].v[im];
                s.A[2].v[id] = -s.A[2].v[im];
                s.q.v[id] = s.q.v[im];
            }
    }
    return s;
}

inline SampledPotential conjugate_potential(SampledPotential s) {
    for (int a = 0; a < 3; ++a)
        for (auto& x : s.A[a].v) x = std::conj(x);
    for (auto& x : s.q.v) x = std::conj(x);
    return s;
}

struct PartialConfig {
    std::size_t n = 64;      // nodes per axis on the doubled torus
    double half = 1.6;       // torus half-extent
    double thickness = 1.0;  // slab thickness L
    CgoConfig cgo{};
};

// Oscillating solution on the slab vanishing on one face, represented as
//   u(x) = e^{x.zeta/h} (g(x) - f(z) g(Rx)),   f(z) = e^{(Rx-x).zeta/h},
// with R the mirror map and g the doubled-torus profile a + r built for the
// even/odd extended coefficients. The exponential prefactor is never
// assembled; f and g are the bounded pieces all consumers work with.
struct PartialCgo {
    Mirror mirror = Mirror::bottom;
    double thickness = 1.0;
    int member = 1;
    CgoSolution sol;             // doubled-torus build, full diagnostics
    Field3 g;                    // a + r
    std::array<Field3, 3> dg;    // gradient of g (Bloch-exact for r)
    double extension_trace = 0.0;

    const cvec3& zeta() const { return sol.zeta(); }
    double h() const { return sol.pair.h; }

    // J zeta with J = diag(1,1,-1): the frequency of the reflected branch
    cvec3 zeta_mirrored() const {
        cvec3 z = sol.zeta();
        z[2] = -z[2];
        return z;
    }

    // e^{(Rx-x).zeta/h}; the builder's frame checks keep |f| <= 1 on the slab
    cplx reflection_factor(double z) const {
        const cplx e = mirror == Mirror::bottom
                           ? -2.0 * z * sol.zeta()[2] / sol.pair.h
                           : (2.0 * thickness - 2.0 * z) * sol.zeta()[2] /
                                 sol.pair.h;
        return std::exp(e);
    }
};

// bounded profile G(x) = g(x) - f(z) g(Rx) of the partial-data solution
inline cplx reduced_profile(const PartialCgo& u, std::size_t i,
                            std::size_t j, std::size_t k) {
    const Grid3& grid = u.g.grid;
    const std::size_t km = mirror_node(k, grid.n[2]);
    return u.g(i, j, k) -
           u.reflection_factor(grid.x(2, k)) * u.g(i, j, km);
}

// max |G| over the fixed-plane node ring; zero by construction since the
// mirror map fixes that ring and f = 1 there
inline double fixed_plane_defect(const PartialCgo& u) {
    const Grid3& g = u.g.grid;
    const double plane_z =
        u.mirror == Mirror::bottom ? 0.0 : u.thickness;
    const std::size_t kc = nearest_node(g, 2, plane_z);
    double m = 0.0;
    for (std::size_t i = 0; i < g.n[0]; ++i)
        for (std::size_t j = 0; j < g.n[1]; ++j)
            m = std::max(m, std::abs(reduced_profile(u, i, j, kc)));
    return m;
}

namespace reflectdetail {

inline void check_frame(const ZetaPair& zp, int member, Mirror mirror) {
    const double m2v = zp.mu2[2], m1v = zp.mu1[2];
    if (member == 1) {
        if (mirror == Mirror::top)
            throw std::invalid_argument(
                "first-member solutions are built against the bottom plane");
        if (m2v < 0.0)
            throw std::invalid_argument(
                "bottom reflection of the first member needs a second "
                "transverse direction with nonnegative vertical part");
        return;
    }
    if (mirror == Mirror::top) {
        if (m2v < 0.0)
            throw std::invalid_argument(
                "top reflection of the second member needs a second "
                "transverse direction with nonnegative vertical part");
        return;
    }
    // second member against the bottom plane: the same-side construction,
    // which works only with an in-plane second direction and a genuinely
    // tilted first one (otherwise the reflected branch is unbounded or the
    // cross phases stop oscillating)
    if (m2v != 0.0)
        throw std::invalid_argument(
            "same-side construction needs the second transverse direction "
            "to lie in the horizontal plane");
    if (m1v == 0.0)
        throw std::invalid_argument(
            "same-side construction needs a first transverse direction "
            "with nonzero vertical part");
}

}  // namespace reflectdetail

// Build the partial-data solution from coefficients already sampled on the
// doubled grid (zeroed/extended here). Member 2 solves the adjoint-side
// equation, so its coefficients are conjugated before the build.
inline PartialCgo build_partial_cgo(const SampledPotential& slab_sampled,
                                    const ZetaPair& zp, int member,
                                    Mirror mirror, const PartialConfig& pc) {
    reflectdetail::check_frame(zp, member, mirror);
    PartialCgo out;
    out.mirror = mirror;
    out.thickness = pc.thickness;
    out.member = member;

    SampledPotential ext = extend_even_odd(slab_sampled, mirror,
                                           pc.thickness,
                                           &out.extension_trace);
    if (member == 2) ext = conjugate_potential(std::move(ext));

    out.sol = build_cgo(ext.A, ext.q, zp, member, pc.cgo);

    const Grid3& g = out.sol.amplitude.grid;
    out.g = out.sol.profile();
    std::array<std::vector<cplx>, 3> mod;
    for (int ax = 0; ax < 3; ++ax) {
        mod[ax].resize(g.n[ax]);
        for (std::size_t t = 0; t < g.n[ax]; ++t)
            mod[ax][t] =
                std::exp(cplx(0.0, out.sol.shift[ax] * g.x(ax, t)));
    }
    for (int ax = 0; ax < 3; ++ax) {
        Field3 da = partial_periodic(out.sol.amplitude, ax);
        Field3 dr = partial_periodic(out.sol.rho, ax);
        const cplx is(0.0, out.sol.shift[ax]);
        out.dg[ax] = Field3(g);
        for (std::size_t i = 0; i < g.n[0]; ++i)
            for (std::size_t j = 0; j < g.n[1]; ++j)
                for (std::size_t k = 0; k < g.n[2]; ++k) {
                    const std::size_t id = g.id(i, j, k);
                    out.dg[ax].v[id] =
                        da.v[id] + mod[0][i] * mod[1][j] * mod[2][k] *
                                       (dr.v[id] + is * out.sol.rho.v[id]);
                }
    }
    return out;
}

inline PartialCgo build_partial_cgo(const PotentialSpec& spec,
                                    const ZetaPair& zp, int member,
                                    Mirror mirror, const PartialConfig& pc) {
    const Grid3 g = doubled_grid(pc.n, mirror, pc.half, pc.thickness);
    return build_partial_cgo(sample_potential(spec, g), zp, member, mirror,
                             pc);
}

}
