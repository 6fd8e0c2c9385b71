#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>

#include "field.hpp"

namespace cgoslab {

using vec3 = std::array<double, 3>;
using cvec3 = std::array<cplx, 3>;

inline double dot(const vec3& a, const vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline vec3 cross(const vec3& a, const vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const vec3& a) { return std::sqrt(dot(a, a)); }
inline vec3 normalized(const vec3& a) {
    double n = norm(a);
    return {a[0] / n, a[1] / n, a[2] / n};
}
inline vec3 scaled(const vec3& a, double s) {
    return {a[0] * s, a[1] * s, a[2] * s};
}

inline cplx cdot(const cvec3& a, const cvec3& b) {  // bilinear, no conjugation
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// Complex frequency pair for the oscillating-solution ansatz. Both members
// share one s = sqrt(1 - h^2|xi|^2/4), which makes
// zeta1 + conj(zeta2) = i h xi hold exactly in floating point.
struct ZetaPair {
    cvec3 zeta1, zeta2;
    cvec3 limit1, limit2;  // h -> 0 directions i mu1 +- mu2
    vec3 xi, mu1, mu2;
    double h = 0.0, s = 0.0;
};

// requires {xi/|xi|, mu1, mu2} orthonormal and h|xi| < 2
inline ZetaPair make_zeta_pair(const vec3& xi, const vec3& mu1,
                               const vec3& mu2, double h) {
    const double xin = norm(xi);
    if (h * xin >= 2.0)
        throw std::invalid_argument("frequency too large for this h");
    ZetaPair z;
    z.xi = xi;
    z.mu1 = mu1;
    z.mu2 = mu2;
    z.h = h;
    z.s = std::sqrt(1.0 - h * h * xin * xin / 4.0);
    for (int j = 0; j < 3; ++j) {
        const cplx ix(0.0, h * xi[j] / 2.0);
        const cplx im1(0.0, z.s * mu1[j]);
        z.zeta1[j] = ix + im1 + mu2[j];
        z.zeta2[j] = -ix + im1 - mu2[j];
        z.limit1[j] = cplx(mu2[j], mu1[j]);
        z.limit2[j] = cplx(-mu2[j], mu1[j]);
    }
    return z;
}

struct ZetaCheck {
    double null1, null2;       // |zeta.zeta|
    double sum_defect;         // |zeta1 + conj(zeta2) - i h xi|
    double ortho;              // worst orthonormality residual
    double drift1, drift2;     // |zeta - limit|, with proven bound below
    double drift_bound;        // (h|xi|/2) sqrt(1 + h^2|xi|^2/4)
};

inline ZetaCheck check_zeta_pair(const ZetaPair& z) {
    ZetaCheck c{};
    c.null1 = std::abs(cdot(z.zeta1, z.zeta1));
    c.null2 = std::abs(cdot(z.zeta2, z.zeta2));
    double sd = 0.0;
    for (int j = 0; j < 3; ++j)
        sd = std::max(sd, std::abs(z.zeta1[j] + std::conj(z.zeta2[j]) -
                                   cplx(0.0, z.h * z.xi[j])));
    c.sum_defect = sd;
    const vec3 xh = normalized(z.xi);
    c.ortho = std::max({std::abs(dot(xh, z.mu1)), std::abs(dot(xh, z.mu2)),
                        std::abs(dot(z.mu1, z.mu2)),
                        std::abs(norm(z.mu1) - 1.0),
                        std::abs(norm(z.mu2) - 1.0)});
    auto drift = [&](const cvec3& zt, const cvec3& lim) {
        double s = 0.0;
        for (int j = 0; j < 3; ++j) s += std::norm(zt[j] - lim[j]);
        return std::sqrt(s);
    };
    c.drift1 = drift(z.zeta1, z.limit1);
    c.drift2 = drift(z.zeta2, z.limit2);
    const double t = z.h * norm(z.xi) / 2.0;
    c.drift_bound = t * std::sqrt(1.0 + t * t);
    return c;
}

// Deterministic choice of the transverse frame for a given frequency.
// out_of_plane: second direction leans out of the horizontal plane
//   (mu2_3 > 0), usable whenever xi is not vertical.
// in_plane: second direction lies in the horizontal plane (mu2_3 = 0,
//   mu1_3 = |xi'|/|xi| > 0), usable whenever xi has a horizontal part.
enum class FrameMode { out_of_plane, in_plane };

inline std::optional<std::pair<vec3, vec3>> choose_frame(const vec3& xi,
                                                         FrameMode mode) {
    const double xin = norm(xi);
    if (xin == 0.0) return std::nullopt;
    const vec3 xh = normalized(xi);
    const double lat = std::hypot(xh[0], xh[1]);
    if (lat < 1e-12) return std::nullopt;  // vertical frequency: no frame
    if (mode == FrameMode::out_of_plane) {
        vec3 m2 = {-xh[2] * xh[0], -xh[2] * xh[1], 1.0 - xh[2] * xh[2]};
        m2 = normalized(m2);
        vec3 m1 = normalized(cross(xh, m2));
        return std::make_pair(m1, m2);
    }
    vec3 m2 = {-xh[1] / lat, xh[0] / lat, 0.0};
    vec3 m1 = normalized(cross(xh, m2));
    if (m1[2] < 0.0) {  // keep the vertical component positive
        m1 = scaled(m1, -1.0);
        m2 = scaled(m2, -1.0);
    }
    return std::make_pair(m1, m2);
}

}
