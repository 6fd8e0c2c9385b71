#pragma once

#include <cmath>

#include "fft.hpp"
#include "field.hpp"
#include "smooth.hpp"

namespace cgoslab {

// Mollification at scale eps on the torus lattice: circular convolution with
// the compact bump profile, normalized by its discrete sum so constants are
// reproduced exactly at any resolution.
inline Field3 mollify_torus(const Field3& f, double eps) {
    const Grid3& g = f.grid;
    Field3 ker(g);
    double sum = 0.0;
    for (std::size_t i = 0; i < g.n[0]; ++i)
        for (std::size_t j = 0; j < g.n[1]; ++j)
            for (std::size_t k = 0; k < g.n[2]; ++k) {
                // signed minimum-image offsets from the origin node
                const std::size_t idx[3] = {i, j, k};
                double r2 = 0.0;
                for (int a = 0; a < 3; ++a) {
                    const double half_n =
                        static_cast<double>(g.n[a]) / 2.0;
                    double t = static_cast<double>(idx[a]);
                    if (t > half_n) t -= static_cast<double>(g.n[a]);
                    const double y = t * g.dx[a] / eps;
                    r2 += y * y;
                }
                const double w = bump_profile(r2);
                ker(i, j, k) = w;
                sum += w;
            }
    ker *= cplx(1.0 / sum, 0.0);

    Field3 out = f;
    fft3_forward(out);
    fft3_forward(ker);
    for (std::size_t t = 0; t < out.size(); ++t) out.v[t] *= ker.v[t];
    fft3_backward_normalized(out);
    return out;
}

}
