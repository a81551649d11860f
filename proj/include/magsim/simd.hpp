#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

// Small dense complex kernels on the hot path of the propagator products.
// Each has a scalar reference and vector variants chosen once at runtime.
// MAGSIM_SIMD=scalar forces the reference path.
namespace magsim::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2, neon };

Isa detected_isa();
Isa active_isa();
// Test hook. Requests for an ISA the CPU lacks fall back to scalar.
void force_isa(Isa isa);
std::string_view isa_name(Isa isa);

// Column-major n x n: c = a * b. c must not alias a or b.
void cmatmul(std::size_t n, const cplx* a, const cplx* b, cplx* c);
// y = a * x for column-major n x n a. y must not alias x.
void cmatvec(std::size_t n, const cplx* a, const cplx* x, cplx* y);

namespace scalar {
void cmatmul(std::size_t n, const cplx* a, const cplx* b, cplx* c);
void cmatvec(std::size_t n, const cplx* a, const cplx* x, cplx* y);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void cmatmul(std::size_t n, const cplx* a, const cplx* b, cplx* c);
void cmatvec(std::size_t n, const cplx* a, const cplx* x, cplx* y);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
void cmatmul(std::size_t n, const cplx* a, const cplx* b, cplx* c);
void cmatvec(std::size_t n, const cplx* a, const cplx* x, cplx* y);
}  // namespace neon
#endif

}  // namespace magsim::simd
