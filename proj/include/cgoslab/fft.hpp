#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <tuple>
#include <vector>

#include "field.hpp"

namespace cgoslab {

// Thin FFTW layer. Plans are created with FFTW_ESTIMATE (deterministic
// algorithm choice) and FFTW_UNALIGNED (safe for vectors we did not
// allocate through fftw_malloc), cached per shape, never destroyed.
// Single-threaded by design; plan creation is not reentrant.
namespace fftdetail {

using c2c_key = std::tuple<int, int, int, int>;

inline fftw_plan c2c_plan(int n0, int n1, int n2, int sign) {
    static std::map<c2c_key, fftw_plan> cache;
    auto it = cache.find({n0, n1, n2, sign});
    if (it != cache.end()) return it->second;
    std::vector<std::complex<double>> tmp(
        static_cast<std::size_t>(n0) * n1 * n2);
    fftw_plan p = fftw_plan_dft_3d(
        n0, n1, n2, reinterpret_cast<fftw_complex*>(tmp.data()),
        reinterpret_cast<fftw_complex*>(tmp.data()), sign,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.insert({{n0, n1, n2, sign}, p});
    return p;
}

using r2r_key = std::tuple<int, int, int>;

inline fftw_plan dst1_plan(int n0, int n1, int n2) {
    static std::map<r2r_key, fftw_plan> cache;
    auto it = cache.find({n0, n1, n2});
    if (it != cache.end()) return it->second;
    std::vector<double> tmp(static_cast<std::size_t>(n0) * n1 * n2);
    fftw_plan p = fftw_plan_r2r_3d(n0, n1, n2, tmp.data(), tmp.data(),
                                   FFTW_RODFT00, FFTW_RODFT00, FFTW_RODFT00,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.insert({{n0, n1, n2}, p});
    return p;
}

}  // namespace fftdetail

// in-place unnormalized forward/backward transform of the sample vector
inline void fft3(Field3& f, int sign) {
    auto* d = reinterpret_cast<fftw_complex*>(f.v.data());
    fftw_execute_dft(fftdetail::c2c_plan(static_cast<int>(f.grid.n[0]),
                                         static_cast<int>(f.grid.n[1]),
                                         static_cast<int>(f.grid.n[2]), sign),
                     d, d);
}

inline void fft3_forward(Field3& f) { fft3(f, FFTW_FORWARD); }

inline void fft3_backward_normalized(Field3& f) {
    fft3(f, FFTW_BACKWARD);
    f *= cplx(1.0 / static_cast<double>(f.size()), 0.0);
}

// in-place 3D DST-I (RODFT00), unnormalized; applying it twice multiplies
// by prod 2(n_a + 1)
inline void dst1_3d(std::vector<double>& data, int n0, int n1, int n2) {
    fftw_execute_r2r(fftdetail::dst1_plan(n0, n1, n2), data.data(),
                     data.data());
}

// 2D complex transform on a contiguous buffer (used by the plane transform)
inline void fft2_inplace(std::vector<cplx>& data, int n0, int n1, int sign) {
    static std::map<std::tuple<int, int, int>, fftw_plan> cache;
    fftw_plan p;
    auto it = cache.find({n0, n1, sign});
    if (it != cache.end()) {
        p = it->second;
    } else {
        std::vector<cplx> tmp(static_cast<std::size_t>(n0) * n1);
        p = fftw_plan_dft_2d(n0, n1,
                             reinterpret_cast<fftw_complex*>(tmp.data()),
                             reinterpret_cast<fftw_complex*>(tmp.data()), sign,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
        cache.insert({{n0, n1, sign}, p});
    }
    auto* d = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p, d, d);
}

}
