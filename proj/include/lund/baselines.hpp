#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lund/density.hpp"
#include "lund/point_cloud.hpp"
#include "lund/spectral.hpp"

namespace lund {

struct BaselineResult {
    std::vector<int> labels;  // 1..k_used
    std::size_t k_used = 0;
    std::string method;
    std::map<std::string, double> extras;  // e.g. kmeans objective
};

struct KmeansOptions {
    std::size_t restarts = 10;
    std::size_t max_iter = 100;
    std::uint64_t seed = 7;
};

// Lloyd iterations from probabilistic farthest-point seeding; best restart
// by objective. Rows of `points` are samples. Empty clusters are re-seeded
// from the point farthest from its current center.
BaselineResult kmeans(const Eigen::MatrixXd& points, std::size_t k,
                      const KmeansOptions& opts = {});

// 1-D embedding by the second eigenvector of the random-walk operator on the
// dense kernel graph, then k-means.
BaselineResult spectral_shi(const PointCloud& cloud, double sigma, std::size_t k,
                            const KmeansOptions& opts = {});

// Rows of the first k symmetric-Laplacian eigenvectors, row-normalized, then
// k-means.
BaselineResult spectral_ng(const PointCloud& cloud, double sigma, std::size_t k,
                           const KmeansOptions& opts = {});

// Density-peaks clustering: the mode/label machinery of the diffusion
// pipeline run verbatim with the Euclidean metric and a fixed K.
BaselineResult fsfdpc(const PointCloud& cloud, const DensityEstimate& density,
                      std::size_t k);

// argmax_i of the signed consecutive difference values[i+1] - values[i],
// ties to the smaller index. Ascending Laplacian input: the classic
// largest-gap rule. Descending random-walk input: the smallest drop, which
// reproduces the published behavior of this estimator on near-reducible data
// (the top of the spectrum is the flattest spot, so it answers 1).
std::size_t eigengap_khat(const SpectralDecomposition& dec);

}  // namespace lund
