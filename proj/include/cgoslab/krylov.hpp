#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "field.hpp"

namespace cgoslab {

struct KrylovResult {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

namespace krylovdetail {

inline cplx dot(const Field3& a, const Field3& b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i)
        s += std::conj(a.v[i]) * b.v[i];
    return s;
}

inline double nrm(const Field3& a) {
    double s = 0.0;
    for (const auto& x : a.v) s += std::norm(x);
    return std::sqrt(s);
}

}  // namespace krylovdetail

// Restarted GMRES with modified Gram-Schmidt and Givens updates.
// op must act linearly; the iteration runs on unweighted vector norms.
inline KrylovResult gmres(const std::function<Field3(const Field3&)>& op,
                          const Field3& b, Field3& x, double tol = 1e-11,
                          int restart = 40, int max_iterations = 400) {
    using namespace krylovdetail;
    const double nb = nrm(b);
    KrylovResult out;
    if (nb == 0.0) {
        x = Field3(b.grid);
        out.converged = true;
        return out;
    }
    if (x.size() != b.size()) x = Field3(b.grid);

    std::vector<Field3> V;
    std::vector<std::vector<cplx>> H;  // H[col][row], rows 0..col+1
    std::vector<cplx> cs(restart), sn(restart), g(restart + 1);

    while (out.iterations < max_iterations) {
        Field3 r = op(x);
        for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] = b.v[i] - r.v[i];
        double beta = nrm(r);
        out.relative_residual = beta / nb;
        if (out.relative_residual < tol) {
            out.converged = true;
            return out;
        }
        V.assign(1, r);
        V[0] *= cplx(1.0 / beta, 0.0);
        H.clear();
        std::fill(g.begin(), g.end(), cplx(0.0));
        g[0] = beta;

        int j = 0;
        for (; j < restart && out.iterations < max_iterations; ++j) {
            ++out.iterations;
            Field3 w = op(V[j]);
            H.emplace_back(j + 2, cplx(0.0));
            for (int i = 0; i <= j; ++i) {
                H[j][i] = dot(V[i], w);
                for (std::size_t t = 0; t < w.v.size(); ++t)
                    w.v[t] -= H[j][i] * V[i].v[t];
            }
            double hn = nrm(w);
            H[j][j + 1] = hn;
            for (int i = 0; i < j; ++i) {
                cplx t = cs[i] * H[j][i] + sn[i] * H[j][i + 1];
                H[j][i + 1] = -std::conj(sn[i]) * H[j][i] + cs[i] * H[j][i + 1];
                H[j][i] = t;
            }
            double denom = std::hypot(std::abs(H[j][j]), hn);
            if (denom == 0.0) denom = 1.0;
            cs[j] = std::abs(H[j][j]) / denom;
            sn[j] = (std::abs(H[j][j]) == 0.0)
                        ? cplx(hn / denom, 0.0)
                        : (H[j][j] / std::abs(H[j][j])) * (hn / denom);
            H[j][j] = cs[j] * H[j][j] + sn[j] * H[j][j + 1];
            H[j][j + 1] = 0.0;
            g[j + 1] = -std::conj(sn[j]) * g[j];
            g[j] = cs[j] * g[j];
            out.relative_residual = std::abs(g[j + 1]) / nb;
            if (out.relative_residual < tol) {
                ++j;
                break;
            }
            w *= cplx(1.0 / hn, 0.0);
            V.push_back(std::move(w));
        }

        // back-substitute and update x
        std::vector<cplx> y(j);
        for (int i = j - 1; i >= 0; --i) {
            cplx s = g[i];
            for (int t = i + 1; t < j; ++t) s -= H[t][i] * y[t];
            y[i] = s / H[i][i];
        }
        for (int i = 0; i < j; ++i)
            for (std::size_t t = 0; t < x.v.size(); ++t)
                x.v[t] += y[i] * V[i].v[t];

        if (out.relative_residual < tol) {
            out.converged = true;
            return out;
        }
    }
    return out;
}

}
