#include "lund/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lund/errors.hpp"

namespace lund {

DensityEstimate kde(const PointCloud& cloud, const NeighborList& neighbors, double sigma) {
    if (!(sigma > 0.0)) throw InvalidParameterError("kde: sigma must be > 0");
    if (neighbors.n != cloud.n) throw InvalidParameterError("kde: neighbor list mismatch");

    const std::size_t n = cloud.n;
    DensityEstimate est;
    est.p.resize(n);
    const double inv_s2 = 1.0 / (sigma * sigma);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        const double* d = neighbors.distances(i);
        for (std::size_t s = 0; s < neighbors.k; ++s) acc += std::exp(-d[s] * d[s] * inv_s2);
        est.p[i] = acc;
    }
    est.p /= est.p.sum();
    est.p /= est.p.sum();  // second pass pins the sum to 1 within a few ulp

    est.order.resize(n);
    std::iota(est.order.begin(), est.order.end(), 0u);
    std::sort(est.order.begin(), est.order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (est.p[a] != est.p[b]) return est.p[a] > est.p[b];
        return a < b;
    });
    est.rank.resize(n);
    for (std::size_t r = 0; r < n; ++r) est.rank[est.order[r]] = static_cast<std::uint32_t>(r);
    return est;
}

}  // namespace lund
