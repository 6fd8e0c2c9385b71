#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "field.hpp"
#include "smooth.hpp"
#include "stencil.hpp"
#include "zeta.hpp"

namespace cgoslab {

// Compactly supported potential pair (vector A, scalar q) built from a
// weighted sum of balls. profile "indicator" gives the discontinuous
// (non-Lipschitz) variant, "bump" a smooth one. Amplitudes are constant
// per scenario; overlapping balls add their weights, and negative weights
// are allowed (sign-alternating clusters stay bounded but rough).
struct BallSupport {
    std::array<double, 3> center{0, 0, 0};
    double radius = 0.0;
    double weight = 1.0;
};

struct PotentialSpec {
    std::vector<BallSupport> balls;
    std::array<double, 3> a_amplitude{0, 0, 0};
    cplx q_amplitude{0, 0};
    // "indicator": jump at the rim. "rim": (1 - r^2/rho^2)^rim_power,
    // continuous but with unbounded gradient at the rim when rim_power < 1
    // (still not Lipschitz). "bump": smooth.
    std::string profile = "indicator";
    double rim_power = 0.5;
    // extra scalar-only lumps, weight * exp(-r^2/radius^2) added to q and
    // nothing else. Gaussians keep a closed-form Fourier transform, which is
    // what reconstruction checks compare against; the tails beyond ~3 radii
    // are far below any tolerance used here.
    std::vector<BallSupport> q_gaussians;

    double support_radius() const {
        double r = 0.0;
        for (const auto& b : balls) {
            double c = std::sqrt(b.center[0] * b.center[0] +
                                 b.center[1] * b.center[1] +
                                 b.center[2] * b.center[2]);
            r = std::max(r, c + b.radius);
        }
        for (const auto& b : q_gaussians) {
            double c = std::sqrt(b.center[0] * b.center[0] +
                                 b.center[1] * b.center[1] +
                                 b.center[2] * b.center[2]);
            r = std::max(r, c + 3.0 * b.radius);
        }
        return r;
    }
};

inline double shape_value(const PotentialSpec& p, double x, double y,
                          double z) {
    double s = 0.0;
    if (p.profile == "bump") {
        for (const auto& b : p.balls) {
            const double dx = x - b.center[0], dy = y - b.center[1],
                         dz = z - b.center[2];
            s += b.weight * bump_profile((dx * dx + dy * dy + dz * dz) /
                                         (b.radius * b.radius));
        }
        return s;
    }
    if (p.profile == "rim") {
        for (const auto& b : p.balls) {
            const double dx = x - b.center[0], dy = y - b.center[1],
                         dz = z - b.center[2];
            const double t =
                1.0 - (dx * dx + dy * dy + dz * dz) / (b.radius * b.radius);
            if (t > 0.0) s += b.weight * std::pow(t, p.rim_power);
        }
        return s;
    }
    for (const auto& b : p.balls) {
        const double dx = x - b.center[0], dy = y - b.center[1],
                     dz = z - b.center[2];
        if (dx * dx + dy * dy + dz * dz < b.radius * b.radius)
            s += b.weight;
    }
    return s;
}

struct SampledPotential {
    std::array<Field3, 3> A;
    Field3 q;
};

inline SampledPotential sample_potential(const PotentialSpec& p,
                                         const Grid3& g) {
    SampledPotential out{{Field3(g), Field3(g), Field3(g)}, Field3(g)};
    for (std::size_t i = 0; i < g.n[0]; ++i)
        for (std::size_t j = 0; j < g.n[1]; ++j)
            for (std::size_t k = 0; k < g.n[2]; ++k) {
                const double x = g.x(0, i), y = g.x(1, j), z = g.x(2, k);
                const double s = shape_value(p, x, y, z);
                const std::size_t id = g.id(i, j, k);
                for (int a = 0; a < 3; ++a)
                    out.A[a].v[id] = p.a_amplitude[a] * s;
                cplx qv = p.q_amplitude * s;
                for (const auto& b : p.q_gaussians) {
                    const double dx = x - b.center[0], dy = y - b.center[1],
                                 dz = z - b.center[2];
                    qv += b.weight *
                          std::exp(-(dx * dx + dy * dy + dz * dz) /
                                   (b.radius * b.radius));
                }
                out.q.v[id] = qv;
            }
    return out;
}

// gauge change A -> A + grad(psi), q unchanged (bounded-lattice stencil)
inline std::array<Field3, 3> gauge_shift(const std::array<Field3, 3>& A,
                                         const Field3& psi) {
    std::array<Field3, 3> out = A;
    for (int a = 0; a < 3; ++a) {
        Field3 d = partial_bounded(psi, a);
        out[a] += d;
    }
    return out;
}

// Scalar gauge generator: a weighted sum of smooth bumps (same shape family
// as the "bump" potential profile). Kept separate from PotentialSpec because
// it produces a scalar, not a coefficient pair.
struct GaugeSpec {
    std::vector<BallSupport> bumps;
    bool empty() const { return bumps.empty(); }
};

inline Field3 sample_gauge(const GaugeSpec& gs, const Grid3& g) {
    Field3 psi(g);
    for (std::size_t i = 0; i < g.n[0]; ++i)
        for (std::size_t j = 0; j < g.n[1]; ++j)
            for (std::size_t k = 0; k < g.n[2]; ++k) {
                double s = 0.0;
                for (const auto& b : gs.bumps) {
                    const double dx = g.x(0, i) - b.center[0],
                                 dy = g.x(1, j) - b.center[1],
                                 dz = g.x(2, k) - b.center[2];
                    s += b.weight *
                         bump_profile((dx * dx + dy * dy + dz * dz) /
                                      (b.radius * b.radius));
                }
                psi(i, j, k) = s;
            }
    return psi;
}

// A potential plus an optional gauge shift, applied with the lattice
// gradient at sampling time. Using the discrete gradient (rather than an
// analytic one) makes gauge-related pairs cancel at stencil level in the
// magnetic field, since the curl of a lattice gradient vanishes wherever
// the centered stencils commute.
struct PotentialInput {
    PotentialSpec base;
    GaugeSpec gauge;
};

inline SampledPotential realize(const PotentialInput& in, const Grid3& g) {
    SampledPotential s = sample_potential(in.base, g);
    if (!in.gauge.empty()) s.A = gauge_shift(s.A, sample_gauge(in.gauge, g));
    return s;
}

// magnetic field entries dA_{jk} = d_j A_k - d_k A_j on a bounded lattice
inline Field3 curl_entry(const std::array<Field3, 3>& A, int j, int k) {
    Field3 djk = partial_bounded(A[k], j);
    Field3 dkj = partial_bounded(A[j], k);
    djk -= dkj;
    return djk;
}

// Gauge function whose gradient removes the vertical component of A on both
// slab faces: psi(x) = -x3 c(x3) A3(x',0) - (x3 - L) c(L - x3) A3(x',L),
// with c a cutoff equal to 1 near 0 and 0 past 2L/5. With this sign the
// face traces cancel (the printed formula in some sources doubles the top
// trace instead).
inline Field3 face_flattening_gauge(const Field3& A3, double thickness) {
    const Grid3& g = A3.grid;
    Field3 psi(g);
    const double L = thickness;
    auto cut = [&](double t) {
        return 1.0 - quintic_step((t - 0.2 * L) / (0.2 * L));
    };
    const std::size_t ktop = g.n[2] - 1;
    for (std::size_t i = 0; i < g.n[0]; ++i)
        for (std::size_t j = 0; j < g.n[1]; ++j) {
            const cplx bot = A3(i, j, 0);
            const cplx top = A3(i, j, ktop);
            for (std::size_t k = 0; k < g.n[2]; ++k) {
                const double z = g.x(2, k);
                psi(i, j, k) =
                    -z * cut(z) * bot - (z - L) * cut(L - z) * top;
            }
        }
    return psi;
}

}
