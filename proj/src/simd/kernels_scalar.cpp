#include "lund/simd.hpp"

namespace lund::simd {
namespace {

double sqdist_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double weighted_sqdist_scalar(const double* w, const double* a, const double* b,
                              std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += w[i] * d * d;
    }
    return acc;
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k{"scalar", sqdist_scalar, dot_scalar, axpy_scalar,
                           weighted_sqdist_scalar};
    return k;
}

}  // namespace lund::simd
