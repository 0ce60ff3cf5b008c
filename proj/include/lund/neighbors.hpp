#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lund/point_cloud.hpp"

namespace lund {

// k nearest neighbors per point, self excluded. Rows are sorted ascending by
// (distance, index), so exact ties go to the lower index. Distances are exact
// Euclidean values (same arithmetic as the bruteforce scan).
struct NeighborList {
    std::size_t n = 0;
    std::size_t k = 0;
    std::vector<std::uint32_t> idx;  // n * k
    std::vector<double> dist;        // n * k

    const std::uint32_t* neighbors(std::size_t i) const { return idx.data() + i * k; }
    const double* distances(std::size_t i) const { return dist.data() + i * k; }
};

enum class KnnMethod {
    automatic,  // kdtree for anything non-trivial
    kdtree,
    brute,
};

NeighborList knn(const PointCloud& cloud, std::size_t k,
                 KnnMethod method = KnnMethod::automatic);

}  // namespace lund
