#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "cauchy.hpp"
#include "fft.hpp"
#include "field.hpp"
#include "krylov.hpp"
#include "mollify.hpp"
#include "smooth.hpp"
#include "stencil.hpp"
#include "zeta.hpp"

namespace cgoslab {

struct CgoConfig {
    double c_eps = 1.0;      // mollification scale: eps = c_eps * h^(1/3)
    double taper_core = 0.80;   // fraction of the torus half-width where
    double taper_edge = 0.96;   // the amplitude taper starts / ends
    double measure_half = 0.55; // half-width of the physical measurement box
    double gmres_tol = 1e-11;
    int gmres_restart = 40;
    int gmres_max_iterations = 400;
};

// One oscillating solution u = e^{x.zeta/h} (a + r) on the torus lattice.
// The huge exponential prefactor is never assembled; downstream consumers
// work with g = a + r and bounded pairwise products.
//
// The remainder is solved in Bloch form r = e^{i s.x} rho with rho torus
// periodic and s a half-cell frequency shift: the shifted lattice stays
// clear of the characteristic set of the conjugated symbol (which always
// passes through k = 0), so the discrete system is honestly invertible and
// needs no regularization of the solution itself.
struct CgoSolution {
    ZetaPair pair;
    int member = 1;  // 1 or 2: which zeta of the pair
    double eps = 0.0;
    Field3 amplitude;   // a = e^{chi Phi}
    Field3 remainder;   // r = e^{i s.x} rho, assembled
    Field3 rho;         // periodic Bloch profile of the remainder
    Field3 phase;       // Phi (untapered transport phase)
    vec3 shift{0.0, 0.0, 0.0};      // s, the frequency-lattice shift
    double symbol_floor = 0.0;      // min |symbol| on the shifted lattice
    KrylovResult stats;
    double defect = 0.0;  // ||conjugated op applied to a + r|| / (h^2 ||a+r||)
                          // on the measurement box

    const cvec3& zeta() const {
        return member == 1 ? pair.zeta1 : pair.zeta2;
    }
    const cvec3& zeta_limit() const {
        return member == 1 ? pair.limit1 : pair.limit2;
    }
    Field3 profile() const {  // g = a + r
        Field3 g = amplitude;
        g += remainder;
        return g;
    }
};

// per-axis quintic taper, 1 on the core box, 0 near the torus seam
inline Field3 seam_taper(const Grid3& g, double core_frac, double edge_frac) {
    Field3 chi(g, cplx(1.0, 0.0));
    for (int ax = 0; ax < 3; ++ax) {
        const double half = g.half_extent(ax);
        const double c0 = g.center(ax);
        const double core = core_frac * half, edge = edge_frac * half;
        std::vector<double> w(g.n[ax]);
        for (std::size_t t = 0; t < g.n[ax]; ++t)
            w[t] = 1.0 - quintic_step((std::abs(g.x(ax, t) - c0) - core) /
                                      (edge - core));
        std::array<std::size_t, 3> idx{};
        for (idx[0] = 0; idx[0] < g.n[0]; ++idx[0])
            for (idx[1] = 0; idx[1] < g.n[1]; ++idx[1])
                for (idx[2] = 0; idx[2] < g.n[2]; ++idx[2])
                    chi(idx[0], idx[1], idx[2]) *= w[idx[ax]];
    }
    return chi;
}

namespace cgodetail {

// min |free symbol| over the lattice for a candidate Bloch phase, without
// materializing the full symbol field
inline double shifted_floor(const cvec3& zeta, double h, const Grid3& g,
                            const std::array<double, 3>& theta) {
    cplx zz = 0.0;
    for (int j = 0; j < 3; ++j) zz += zeta[j] * zeta[j];
    std::array<std::vector<cplx>, 3> tab;
    for (int ax = 0; ax < 3; ++ax) {
        tab[ax].resize(g.n[ax]);
        const double d = g.dx[ax];
        for (std::size_t t = 0; t < g.n[ax]; ++t) {
            const double kappa = 2.0 * M_PI * static_cast<double>(t) /
                                     static_cast<double>(g.n[ax]) +
                                 theta[ax];
            tab[ax][t] =
                h * h * (2.0 - 2.0 * std::cos(kappa)) / (d * d) -
                cplx(0.0, 2.0) * h * zeta[ax] * std::sin(kappa) / d;
            if (ax == 0) tab[ax][t] -= zz;
        }
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.n[0]; ++i)
        for (std::size_t j = 0; j < g.n[1]; ++j)
            for (std::size_t k = 0; k < g.n[2]; ++k)
                best = std::min(best,
                                std::abs(tab[0][i] + tab[1][j] + tab[2][k]));
    return best;
}

// deterministic shift chooser: try the seven axis/diagonal half-cell
// patterns plus a mu2-directed one, keep the best-conditioned lattice
inline std::pair<std::array<double, 3>, double> choose_shift(
    const cvec3& zeta, const vec3& mu2, double h, const Grid3& g) {
    std::vector<std::array<double, 3>> cands;
    for (int mask = 1; mask < 8; ++mask) {
        std::array<double, 3> t{0.0, 0.0, 0.0};
        for (int ax = 0; ax < 3; ++ax)
            if (mask & (1 << ax))
                t[ax] = M_PI / static_cast<double>(g.n[ax]);
        cands.push_back(t);
    }
    {
        std::array<double, 3> t{};
        for (int ax = 0; ax < 3; ++ax)
            t[ax] = M_PI * mu2[ax] / static_cast<double>(g.n[ax]);
        cands.push_back(t);
    }
    std::array<double, 3> best{};
    double best_floor = -1.0;
    for (const auto& t : cands) {
        const double fl = shifted_floor(zeta, h, g, t);
        if (fl > best_floor) {
            best_floor = fl;
            best = t;
        }
    }
    return {best, best_floor};
}

}  // namespace cgodetail

inline CgoSolution build_cgo(const std::array<Field3, 3>& A, const Field3& q,
                             const ZetaPair& pair, int member,
                             const CgoConfig& cfg) {
    const Grid3& g = q.grid;
    const double h = pair.h;
    CgoSolution sol;
    sol.pair = pair;
    sol.member = member;
    sol.eps = cfg.c_eps * std::cbrt(h);

    double pot_sup = sup_norm(q);
    for (int j = 0; j < 3; ++j) pot_sup = std::max(pot_sup, sup_norm(A[j]));

    std::array<Field3, 3> As = {mollify_torus(A[0], sol.eps),
                                mollify_torus(A[1], sol.eps),
                                mollify_torus(A[2], sol.eps)};
    sol.phase = transport_phase(As, sol.zeta_limit());

    Field3 chi = seam_taper(g, cfg.taper_core, cfg.taper_edge);
    sol.amplitude = Field3(g);
    for (std::size_t t = 0; t < g.size(); ++t)
        sol.amplitude.v[t] = std::exp(chi.v[t] * sol.phase.v[t]);

    ConjugatedTorusOp op0(sol.zeta(), h, A, q);
    const std::array<double, 3> box_center = g.center3();

    if (pot_sup == 0.0) {
        // free operator: the plane wave e^{x.zeta/h} solves the equation
        // exactly (zeta.zeta = 0), so the remainder is identically zero
        sol.remainder = Field3(g);
        sol.rho = Field3(g);
        sol.stats.converged = true;
        sol.symbol_floor = op0.symbol_floor();
        Field3 res = op0.apply(sol.amplitude);
        const double un = l2_norm_box(sol.amplitude, box_center,
                                      cfg.measure_half);
        sol.defect =
            l2_norm_box(res, box_center, cfg.measure_half) / (h * h * un);
        return sol;
    }

    auto [theta, floor] =
        cgodetail::choose_shift(sol.zeta(), pair.mu2, h, g);
    sol.symbol_floor = floor;
    for (int ax = 0; ax < 3; ++ax) sol.shift[ax] = theta[ax] / g.dx[ax];

    ConjugatedTorusOp op(sol.zeta(), h, A, q, theta);
    Field3 sym = op.symbol();
    // exact spectral inverse of the free part: the shifted lattice carries
    // no symbol zeros, so left preconditioning keeps the system equivalent
    Field3 inv(g);
    for (std::size_t t = 0; t < g.size(); ++t)
        inv.v[t] = 1.0 / sym.v[t];

    // modulation tables e^{+- i s.x}, separable per axis
    std::array<std::vector<cplx>, 3> modm;
    for (int ax = 0; ax < 3; ++ax) {
        modm[ax].resize(g.n[ax]);
        for (std::size_t t = 0; t < g.n[ax]; ++t)
            modm[ax][t] = std::exp(cplx(0.0, -sol.shift[ax] * g.x(ax, t)));
    }
    auto modulate = [&](Field3& w, bool forward) {
        for (std::size_t i = 0; i < g.n[0]; ++i)
            for (std::size_t j = 0; j < g.n[1]; ++j)
                for (std::size_t k = 0; k < g.n[2]; ++k) {
                    cplx m = modm[0][i] * modm[1][j] * modm[2][k];
                    if (!forward) m = std::conj(m);
                    w(i, j, k) *= m;
                }
    };

    auto minv = [&](const Field3& v) {
        Field3 w = v;
        fft3_forward(w);
        for (std::size_t t = 0; t < w.size(); ++t) w.v[t] *= inv.v[t];
        fft3_backward_normalized(w);
        return w;
    };
    auto wop = [&](const Field3& v) {  // potential part, shifted frame
        Field3 w = op.apply(v);
        Field3 c = v;
        fft3_forward(c);
        for (std::size_t t = 0; t < c.size(); ++t) c.v[t] *= sym.v[t];
        fft3_backward_normalized(c);
        w -= c;
        return w;
    };
    auto aop = [&](const Field3& v) {
        Field3 w = minv(wop(v));
        w += v;
        return w;
    };

    Field3 f = op0.apply(sol.amplitude);
    modulate(f, true);  // e^{-i s.x} f
    Field3 b = minv(f);
    b *= cplx(-1.0, 0.0);
    sol.rho = Field3(g);
    sol.stats = gmres(aop, b, sol.rho, cfg.gmres_tol, cfg.gmres_restart,
                      cfg.gmres_max_iterations);

    sol.remainder = sol.rho;
    modulate(sol.remainder, false);  // r = e^{+i s.x} rho

    Field3 total = sol.profile();
    Field3 res = op0.apply(total);
    const double un = l2_norm_box(total, box_center, cfg.measure_half);
    sol.defect =
        l2_norm_box(res, box_center, cfg.measure_half) / (h * h * un);
    return sol;
}

// scaled seminorm sqrt(||r||^2 + ||h D r||^2) on a measurement box centered
// at the grid center (interior centered stencils; the box must stay clear
// of the torus seam)
inline double h1_scaled_norm(const Field3& r, double h, double half) {
    const std::array<double, 3> center = r.grid.center3();
    double acc = l2_norm_box(r, center, half);
    double grad2 = 0.0;
    for (int ax = 0; ax < 3; ++ax) {
        Field3 d = partial_periodic(r, ax);
        const double gn = l2_norm_box(d, center, half);
        grad2 += gn * gn;
    }
    return std::sqrt(acc * acc + h * h * grad2);
}

struct SweepRow {
    double h, eps, r_l2, r_grad, h1_scaled;
    int iterations;
    double residual, defect, symbol_floor;
};

// remainder-decay sweep across a list of h values (fixed potentials)
inline std::vector<SweepRow> remainder_sweep(
    const std::array<Field3, 3>& A, const Field3& q, const vec3& xi,
    const vec3& mu1, const vec3& mu2, const std::vector<double>& hs,
    const CgoConfig& cfg) {
    std::vector<SweepRow> rows;
    for (double h : hs) {
        ZetaPair zp = make_zeta_pair(xi, mu1, mu2, h);
        CgoSolution sol = build_cgo(A, q, zp, 1, cfg);
        SweepRow row{};
        row.h = h;
        row.eps = sol.eps;
        const std::array<double, 3> c = q.grid.center3();
        row.r_l2 = l2_norm_box(sol.remainder, c, cfg.measure_half);
        double g2 = 0.0;
        for (int ax = 0; ax < 3; ++ax) {
            Field3 d = partial_periodic(sol.remainder, ax);
            const double gn = l2_norm_box(d, c, cfg.measure_half);
            g2 += gn * gn;
        }
        row.r_grad = std::sqrt(g2);
        row.h1_scaled = std::hypot(row.r_l2, h * row.r_grad);
        row.iterations = sol.stats.iterations;
        row.residual = sol.stats.relative_residual;
        row.defect = sol.defect;
        row.symbol_floor = sol.symbol_floor;
        rows.push_back(row);
    }
    return rows;
}

// least-squares slope of log(value) against log(h)
inline double fit_log_slope(const std::vector<double>& hs,
                            const std::vector<double>& vals) {
    const std::size_t n = hs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(hs[i]), y = std::log(vals[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double d = n * sxx - sx * sx;
    return (n * sxy - sx * sy) / d;
}

}
