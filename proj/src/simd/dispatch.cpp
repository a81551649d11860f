#include "magsim/simd.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace magsim::simd {

namespace {

struct Table {
    void (*cmatmul)(std::size_t, const cplx*, const cplx*, cplx*);
    void (*cmatvec)(std::size_t, const cplx*, const cplx*, cplx*);
};

constexpr Table kScalar{scalar::cmatmul, scalar::cmatvec};
#if defined(__x86_64__) || defined(_M_X64)
constexpr Table kAvx2{avx2::cmatmul, avx2::cmatvec};
#endif
#if defined(__aarch64__)
constexpr Table kNeon{neon::cmatmul, neon::cmatvec};
#endif

bool supported(Isa isa)
{
    switch (isa) {
    case Isa::scalar:
        return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
        return true;
#else
        return false;
#endif
    }
    return false;
}

const Table* table_for(Isa isa)
{
    switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::avx2:
        return &kAvx2;
#endif
#if defined(__aarch64__)
    case Isa::neon:
        return &kNeon;
#endif
    default:
        return &kScalar;
    }
}

Isa initial_isa()
{
    const char* env = std::getenv("MAGSIM_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return Isa::scalar;
    return detected_isa();
}

std::atomic<Isa>& current()
{
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

const Table& active() { return *table_for(current().load(std::memory_order_relaxed)); }

}  // namespace

Isa detected_isa()
{
    if (supported(Isa::avx2)) return Isa::avx2;
    if (supported(Isa::neon)) return Isa::neon;
    return Isa::scalar;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) { current().store(supported(isa) ? isa : Isa::scalar); }

std::string_view isa_name(Isa isa)
{
    switch (isa) {
    case Isa::avx2:
        return "avx2";
    case Isa::neon:
        return "neon";
    default:
        return "scalar";
    }
}

void cmatmul(std::size_t n, const cplx* a, const cplx* b, cplx* c) { active().cmatmul(n, a, b, c); }
void cmatvec(std::size_t n, const cplx* a, const cplx* x, cplx* y) { active().cmatvec(n, a, x, y); }

}  // namespace magsim::simd
