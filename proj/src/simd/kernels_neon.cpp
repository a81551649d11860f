#include "magsim/simd.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace magsim::simd::neon {

namespace {

inline void caxpy(std::size_t n, cplx s, const cplx* x, cplx* y)
{
    const double* xd = reinterpret_cast<const double*>(x);
    double* yd = reinterpret_cast<double*>(y);
    const float64x2_t sr = vdupq_n_f64(s.real());
    // (xr + i xi)(sr + i si) = (xr sr - xi si) + i (xi sr + xr si)
    const float64x2_t si = {-s.imag(), s.imag()};
    for (std::size_t i = 0; i < n; ++i) {
        const float64x2_t xv = vld1q_f64(xd + 2 * i);
        const float64x2_t xs = vextq_f64(xv, xv, 1);
        float64x2_t yv = vld1q_f64(yd + 2 * i);
        yv = vfmaq_f64(yv, xv, sr);
        yv = vfmaq_f64(yv, xs, si);
        vst1q_f64(yd + 2 * i, yv);
    }
}

}  // namespace

void cmatmul(std::size_t n, const cplx* a, const cplx* b, cplx* c)
{
    for (std::size_t j = 0; j < n; ++j) {
        cplx* cj = c + j * n;
        for (std::size_t i = 0; i < n; ++i) cj[i] = 0.0;
        for (std::size_t k = 0; k < n; ++k) caxpy(n, b[j * n + k], a + k * n, cj);
    }
}

void cmatvec(std::size_t n, const cplx* a, const cplx* x, cplx* y)
{
    for (std::size_t i = 0; i < n; ++i) y[i] = 0.0;
    for (std::size_t k = 0; k < n; ++k) caxpy(n, x[k], a + k * n, y);
}


}  // namespace magsim::simd::neon
#endif
