#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace lund {

// Engine-only draws: the byte stream depends only on std::mt19937_64, not on
// the standard library's distribution implementations, so seeded runs are
// reproducible across toolchains.
inline double u01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;  // [0, 1)
}

inline double norm01(std::mt19937_64& g) {
    const double u1 = 1.0 - u01(g);  // (0, 1]
    const double u2 = u01(g);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
}

inline double tnorm(std::mt19937_64& g, double lim) {
    double z = norm01(g);
    while (std::abs(z) > lim) z = norm01(g);
    return z;
}

// cumulative scan; weights need not be normalized
inline std::size_t draw_discrete(std::mt19937_64& g, const std::vector<double>& w) {
    double total = 0.0;
    for (double x : w) total += x;
    const double u = u01(g) * total;
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < w.size(); ++k) {
        acc += w[k];
        if (u < acc) return k;
    }
    return w.size() - 1;
}

}  // namespace lund
