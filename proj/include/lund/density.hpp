#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "lund/neighbors.hpp"
#include "lund/point_cloud.hpp"

namespace lund {

// Kernel density estimate restricted to each point's neighbor list,
// normalized to sum to 1. `order` ranks points by decreasing density with
// exact ties broken toward the lower index, which makes the density maximizer
// unique; `rank` is the inverse permutation.
struct DensityEstimate {
    Eigen::VectorXd p;
    std::vector<std::uint32_t> order;
    std::vector<std::uint32_t> rank;

    // true when i comes strictly before j in the tie-broken density order
    bool denser(std::size_t i, std::size_t j) const { return rank[i] < rank[j]; }
};

DensityEstimate kde(const PointCloud& cloud, const NeighborList& neighbors, double sigma);

}  // namespace lund
