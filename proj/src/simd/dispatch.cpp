#include "lund/simd.hpp"

namespace lund::simd {
namespace {

bool g_force_scalar = false;

bool detect_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

}  // namespace

bool avx2_supported() {
    static const bool ok = detect_avx2();
    return ok;
}

const Kernels& active() {
    if (g_force_scalar) return scalar_kernels();
    return avx2_supported() ? avx2_kernels() : scalar_kernels();
}

void force_scalar(bool on) { g_force_scalar = on; }

}  // namespace lund::simd
