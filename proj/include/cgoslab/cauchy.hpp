#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fft.hpp"
#include "field.hpp"
#include "zeta.hpp"

namespace cgoslab {

// Planar Cauchy transform: inverse of 2 d/dzbar (or 2 d/dz with the
// conjugated kernel) applied slice by slice. The convolution kernel is
// 1/(2 pi (y1 + i y2)) sampled at lattice offsets, with the cells nearest
// the singularity replaced by exact cell averages obtained from a contour
// integral, which restores second-order accuracy.
namespace cauchydetail {

// 32-point Gauss-Legendre nodes/weights on [-1, 1]
inline const std::vector<double>& gl_nodes();
inline const std::vector<double>& gl_weights();

inline void gl_init(std::vector<double>& xs, std::vector<double>& ws) {
    // Newton iteration on Legendre P_32; plenty for kernel-table use
    const int n = 32;
    xs.resize(n);
    ws.resize(n);
    for (int i = 0; i < n / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = -p1 / dp;
            x += dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        xs[n - 1 - i] = x;
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
}

inline const std::vector<double>& gl_nodes() {
    static std::vector<double> xs, ws;
    if (xs.empty()) gl_init(xs, ws);
    return xs;
}
inline const std::vector<double>& gl_weights() {
    static std::vector<double> xs, ws;
    if (ws.empty()) gl_init(xs, ws);
    return ws;
}

inline cplx edge_integral(cplx z0, cplx z1) {  // integral of conj(z)/z dz
    const auto& xs = gl_nodes();
    const auto& ws = gl_weights();
    const cplx mid = 0.5 * (z0 + z1), hlf = 0.5 * (z1 - z0);
    cplx s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        cplx z = mid + xs[i] * hlf;
        s += ws[i] * std::conj(z) / z;
    }
    return s * hlf;
}

// average of 1/(2 pi z) over the rectangle [c0 - d0/2, c0 + d0/2] x
// [c1 - d1/2, c1 + d1/2]; uses int int 1/z dA = (1/2i) contour conj(z)/z dz
inline cplx cell_average(double c0, double c1, double d0, double d1) {
    const cplx a(c0 - d0 / 2, c1 - d1 / 2), b(c0 + d0 / 2, c1 - d1 / 2),
        c(c0 + d0 / 2, c1 + d1 / 2), d(c0 - d0 / 2, c1 + d1 / 2);
    cplx loop = edge_integral(a, b) + edge_integral(b, c) +
                edge_integral(c, d) + edge_integral(d, a);
    return loop / cplx(0.0, 2.0) / (2.0 * M_PI * d0 * d1);
}

}  // namespace cauchydetail

// Kernel table on a (p0 x p1) wrap-order lattice with steps (d0, d1).
// Entries near the origin (within `near` cells) use exact cell averages.
// conjugate=true builds 1/(2 pi conj(z)) instead.
inline std::vector<cplx> cauchy_kernel(int p0, int p1, double d0, double d1,
                                       bool conjugate = false, int near = 4) {
    std::vector<cplx> K(static_cast<std::size_t>(p0) * p1);
    for (int i = 0; i < p0; ++i) {
        const int oi = (i <= p0 / 2) ? i : i - p0;
        for (int j = 0; j < p1; ++j) {
            const int oj = (j <= p1 / 2) ? j : j - p1;
            const double y0 = oi * d0, y1 = oj * d1;
            cplx val;
            if (std::abs(oi) <= near && std::abs(oj) <= near)
                val = cauchydetail::cell_average(y0, y1, d0, d1);
            else
                val = 1.0 / (2.0 * M_PI * cplx(y0, y1));
            if (conjugate) val = std::conj(val);
            K[static_cast<std::size_t>(i) * p1 + j] = val;
        }
    }
    return K;
}

// 2D convolution of one slice with the kernel, zero-padded to 2x
class PlaneCauchy {
public:
    PlaneCauchy(int n0, int n1, double d0, double d1, bool conjugate)
        : n0_(n0), n1_(n1), p0_(2 * n0), p1_(2 * n1), d0_(d0), d1_(d1) {
        K_ = cauchy_kernel(p0_, p1_, d0, d1, conjugate);
        fft2_inplace(K_, p0_, p1_, FFTW_FORWARD);
    }

    // slice(i, j) indexed as i*n1 + j: coordinates (i*d0, j*d1)
    void apply(std::vector<cplx>& slice) const {
        std::vector<cplx> buf(static_cast<std::size_t>(p0_) * p1_,
                              cplx(0.0));
        for (int i = 0; i < n0_; ++i)
            for (int j = 0; j < n1_; ++j)
                buf[static_cast<std::size_t>(i) * p1_ + j] =
                    slice[static_cast<std::size_t>(i) * n1_ + j];
        fft2_inplace(buf, p0_, p1_, FFTW_FORWARD);
        for (std::size_t t = 0; t < buf.size(); ++t) buf[t] *= K_[t];
        fft2_inplace(buf, p0_, p1_, FFTW_BACKWARD);
        // area element is |d0 d1|: the step signs only orient the kernel
        const double scale = std::abs(d0_ * d1_) /
                             (static_cast<double>(p0_) *
                              static_cast<double>(p1_));
        for (int i = 0; i < n0_; ++i)
            for (int j = 0; j < n1_; ++j)
                slice[static_cast<std::size_t>(i) * n1_ + j] =
                    buf[static_cast<std::size_t>(i) * p1_ + j] * scale;
    }

private:
    int n0_, n1_, p0_, p1_;
    double d0_, d1_;
    std::vector<cplx> K_;
};

namespace cauchydetail {

// classify a unit vector as +-(lattice axis); returns axis in [0,3) and
// sign, or -1 if not axis-aligned
inline int axis_of(const vec3& e, int& sign, double tol = 1e-12) {
    for (int a = 0; a < 3; ++a) {
        if (std::abs(std::abs(e[a]) - 1.0) < tol &&
            std::abs(e[(a + 1) % 3]) < tol && std::abs(e[(a + 2) % 3]) < tol) {
            sign = e[a] > 0 ? 1 : -1;
            return a;
        }
    }
    return -1;
}

}  // namespace cauchydetail

// Solve (zeta0 . grad) u = f on each plane spanned by (Re zeta0, Im zeta0).
// zeta0 = i mu1 + mu2 with {mu1, mu2} orthonormal; then zeta0.grad is the
// Cauchy-Riemann operator 2 d/dzbar in plane coordinates z = t1 + i t2,
// t1 along mu2, t2 along mu1. Axis-aligned frames use the lattice fast
// path; general frames resample through trilinear interpolation.
inline Field3 dbar_solve(const Field3& f, const cvec3& zeta0) {
    const Grid3& g = f.grid;
    vec3 e1, e2;
    for (int a = 0; a < 3; ++a) {
        e1[a] = zeta0[a].real();
        e2[a] = zeta0[a].imag();
    }
    int s1 = 0, s2 = 0;
    const int a1 = cauchydetail::axis_of(e1, s1);
    const int a2 = cauchydetail::axis_of(e2, s2);

    if (a1 >= 0 && a2 >= 0 && a1 != a2) {
        const int a3 = 3 - a1 - a2;  // slicing axis
        const int n1 = static_cast<int>(g.n[a1]);
        const int n2 = static_cast<int>(g.n[a2]);
        // signed steps fold the frame orientation into the kernel argument
        PlaneCauchy pc(n1, n2, s1 * g.dx[a1], s2 * g.dx[a2], false);
        Field3 out(g);
        std::vector<cplx> slice(static_cast<std::size_t>(n1) * n2);
        std::array<std::size_t, 3> idx{};
        for (std::size_t t = 0; t < g.n[a3]; ++t) {
            idx[a3] = t;
            for (int i = 0; i < n1; ++i) {
                idx[a1] = static_cast<std::size_t>(i);
                for (int j = 0; j < n2; ++j) {
                    idx[a2] = static_cast<std::size_t>(j);
                    slice[static_cast<std::size_t>(i) * n2 + j] =
                        f(idx[0], idx[1], idx[2]);
                }
            }
            pc.apply(slice);
            for (int i = 0; i < n1; ++i) {
                idx[a1] = static_cast<std::size_t>(i);
                for (int j = 0; j < n2; ++j) {
                    idx[a2] = static_cast<std::size_t>(j);
                    out(idx[0], idx[1], idx[2]) =
                        slice[static_cast<std::size_t>(i) * n2 + j];
                }
            }
        }
        return out;
    }

    // general-plane path: resample onto a rotated lattice, transform, return
    if (g.n[0] != g.n[1] || g.n[1] != g.n[2] || g.dx[0] != g.dx[1] ||
        g.dx[1] != g.dx[2])
        throw std::invalid_argument(
            "general-frame plane transform needs a cubic lattice");
    const int n = static_cast<int>(g.n[0]);
    const double d = g.dx[0];
    const double half = -g.origin[0];
    PlaneCauchy pc(n, n, d, d, false);
    auto trilinear = [&](double x, double y, double z) -> cplx {
        auto clamp = [&](double c, int axis) {
            double t = (c - g.origin[axis]) / g.dx[axis];
            return std::min(std::max(t, 0.0),
                            static_cast<double>(g.n[axis] - 1) - 1e-9);
        };
        const double tx = clamp(x, 0), ty = clamp(y, 1), tz = clamp(z, 2);
        const std::size_t i0 = static_cast<std::size_t>(tx),
                          j0 = static_cast<std::size_t>(ty),
                          k0 = static_cast<std::size_t>(tz);
        const double fx = tx - i0, fy = ty - j0, fz = tz - k0;
        cplx acc = 0.0;
        for (int di = 0; di < 2; ++di)
            for (int dj = 0; dj < 2; ++dj)
                for (int dk = 0; dk < 2; ++dk) {
                    const double w = (di ? fx : 1 - fx) * (dj ? fy : 1 - fy) *
                                     (dk ? fz : 1 - fz);
                    acc += w * f(i0 + di, j0 + dj, k0 + dk);
                }
        return acc;
    };
    const vec3 e3 = cross(e1, e2);
    Field3 out(g);
    std::vector<cplx> slice(static_cast<std::size_t>(n) * n);
    // forward resample: plane lattice point p = t3*e3 + t1*e1 + t2*e2
    std::vector<std::vector<cplx>> planes(g.n[0]);
    for (int t3 = 0; t3 < n; ++t3) {
        const double c3 = -half + t3 * d;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double c1 = -half + i * d, c2 = -half + j * d;
                const double x = c3 * e3[0] + c1 * e1[0] + c2 * e2[0];
                const double y = c3 * e3[1] + c1 * e1[1] + c2 * e2[1];
                const double z = c3 * e3[2] + c1 * e1[2] + c2 * e2[2];
                // points outside the box read as zero (compact support)
                if (std::abs(x) > half || std::abs(y) > half ||
                    std::abs(z) > half)
                    slice[static_cast<std::size_t>(i) * n + j] = 0.0;
                else
                    slice[static_cast<std::size_t>(i) * n + j] =
                        trilinear(x, y, z);
            }
        pc.apply(slice);
        planes[t3] = slice;
    }
    // backward resample: express each lattice node in plane coordinates
    for (std::size_t i = 0; i < g.n[0]; ++i)
        for (std::size_t j = 0; j < g.n[1]; ++j)
            for (std::size_t k = 0; k < g.n[2]; ++k) {
                const vec3 p = {g.x(0, i), g.x(1, j), g.x(2, k)};
                const double t3 = dot(p, e3), t1 = dot(p, e1),
                             t2 = dot(p, e2);
                auto toidx = [&](double c) {
                    return std::min(std::max((c + half) / d, 0.0),
                                    static_cast<double>(n - 1) - 1e-9);
                };
                const double a = toidx(t3), b = toidx(t1), c = toidx(t2);
                const std::size_t a0 = static_cast<std::size_t>(a),
                                  b0 = static_cast<std::size_t>(b),
                                  c0 = static_cast<std::size_t>(c);
                const double fa = a - a0, fb = b - b0, fc = c - c0;
                cplx acc = 0.0;
                for (int da = 0; da < 2; ++da)
                    for (int db = 0; db < 2; ++db)
                        for (int dc = 0; dc < 2; ++dc) {
                            const double w = (da ? fa : 1 - fa) *
                                             (db ? fb : 1 - fb) *
                                             (dc ? fc : 1 - fc);
                            const auto& pl = planes[std::min(
                                a0 + da, static_cast<std::size_t>(n - 1))];
                            acc += w * pl[std::min(b0 + db,
                                                   static_cast<std::size_t>(
                                                       n - 1)) *
                                              n +
                                          std::min(c0 + dc,
                                                   static_cast<std::size_t>(
                                                       n - 1))];
                        }
                out(i, j, k) = acc;
            }
    return out;
}

// transport phase: solves (zeta0 . grad) phi = -i (zeta0 . A), which is
// zeta0 . (D phi + A) = 0 with D = -i grad
inline Field3 transport_phase(const std::array<Field3, 3>& A_sharp,
                              const cvec3& zeta0) {
    const Grid3& g = A_sharp[0].grid;
    Field3 rhs(g);
    for (std::size_t t = 0; t < rhs.size(); ++t) {
        cplx s = 0.0;
        for (int a = 0; a < 3; ++a) s += zeta0[a] * A_sharp[a].v[t];
        rhs.v[t] = cplx(0.0, -1.0) * s;
    }
    return dbar_solve(rhs, zeta0);
}

}
