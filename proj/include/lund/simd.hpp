#pragma once

#include <cstddef>

namespace lund::simd {

// Hot inner loops shared across the library. Each kernel has a scalar
// reference implementation and, on x86 with AVX2+FMA, a vectorized variant.
// The active table is chosen once at load time from CPU capabilities.
// Variants agree to rounding error, not bitwise (FMA and lane-wise sums
// reassociate); equivalence tests hold them to ~1e-13 relative.
struct Kernels {
    const char* name;

    // sum_i (a[i] - b[i])^2
    double (*sqdist)(const double* a, const double* b, std::size_t n);

    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);

    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

    // sum_i w[i] * (a[i] - b[i])^2
    double (*weighted_sqdist)(const double* w, const double* a, const double* b,
                              std::size_t n);
};

const Kernels& scalar_kernels();
const Kernels& avx2_kernels();  // falls back to scalar entries when unsupported
bool avx2_supported();

// Active table: AVX2 when available, scalar otherwise.
const Kernels& active();

// Test hook. Not thread safe; flip only before spawning workers.
void force_scalar(bool on);

}  // namespace lund::simd
