#include "magsim/simd.hpp"

namespace magsim::simd::scalar {

void cmatmul(std::size_t n, const cplx* a, const cplx* b, cplx* c)
{
    for (std::size_t j = 0; j < n; ++j) {
        cplx* cj = c + j * n;
        for (std::size_t i = 0; i < n; ++i) cj[i] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const cplx bkj = b[j * n + k];
            const cplx* ak = a + k * n;
            for (std::size_t i = 0; i < n; ++i) cj[i] += ak[i] * bkj;
        }
    }
}

void cmatvec(std::size_t n, const cplx* a, const cplx* x, cplx* y)
{
    for (std::size_t i = 0; i < n; ++i) y[i] = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const cplx xk = x[k];
        const cplx* ak = a + k * n;
        for (std::size_t i = 0; i < n; ++i) y[i] += ak[i] * xk;
    }
}


}  // namespace magsim::simd::scalar
