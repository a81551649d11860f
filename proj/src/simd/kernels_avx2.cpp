#include "magsim/simd.hpp"

#include <immintrin.h>

// Compiled with -mavx2 -mfma; only reached after the dispatcher has checked
// the CPU flags.
namespace magsim::simd::avx2 {

namespace {

// Two packed complex numbers times a broadcast complex scalar.
inline __m256d cmul_bcast(__m256d a, __m256d br, __m256d bi)
{
    const __m256d swapped = _mm256_permute_pd(a, 0b0101);
    return _mm256_fmaddsub_pd(a, br, _mm256_mul_pd(swapped, bi));
}

inline void caxpy(std::size_t n, cplx s, const cplx* x, cplx* y)
{
    const __m256d br = _mm256_set1_pd(s.real());
    const __m256d bi = _mm256_set1_pd(s.imag());
    const double* xd = reinterpret_cast<const double*>(x);
    double* yd = reinterpret_cast<double*>(y);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(yv, cmul_bcast(xv, br, bi)));
    }
    for (; i < n; ++i) y[i] += x[i] * s;
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


}  // namespace magsim::simd::avx2
