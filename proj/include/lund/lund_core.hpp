#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lund/density.hpp"
#include "lund/diffusion.hpp"
#include "lund/point_cloud.hpp"

namespace lund {

struct LundConfig {
    std::uint64_t t = 1;
    double tau = 2.0;  // threshold on consecutive score ratios (> 0)
    enum class KEstimator { ratio_argmax, tau_threshold, fixed } estimator =
        KEstimator::ratio_argmax;
    std::size_t k_fixed = 0;  // used by KEstimator::fixed
    std::size_t m = 100;      // eigenpairs kept by the pipeline
};

struct LundResult {
    std::vector<int> labels;                 // 1..k_hat
    std::size_t k_hat = 0;
    std::vector<std::uint32_t> modes;        // modes[l-1] carries label l
    Eigen::VectorXd rho;                     // distance to nearest denser point
    Eigen::VectorXd score;                   // density * rho
    std::vector<std::uint32_t> score_order;  // all points, decreasing score
    Eigen::VectorXd sorted_scores;           // score[score_order]
};

// The mode/labeling core is written against an abstract pairwise metric so
// the same code runs on diffusion distances (LUND) and on Euclidean
// distances (FSFDPC).
using MetricFn = std::function<double(std::size_t, std::size_t)>;

// rho(x): min distance to a point strictly denser than x in the tie-broken
// density order; for the unique density maximizer, max distance to any point.
Eigen::VectorXd compute_rho(const MetricFn& metric, const DensityEstimate& density,
                            std::size_t n);
Eigen::VectorXd compute_rho(const DiffusionOperator& op, const DensityEstimate& density);

// Decreasing-score order (ties: denser point first). The density maximizer
// always lands at position 0.
void sort_scores(const Eigen::VectorXd& score, const DensityEstimate& density,
                 std::vector<std::uint32_t>& order, Eigen::VectorXd& sorted);

// K estimation on the sorted scores; modes are the top-k_hat entries of the
// score order. Ratio rules inspect sorted[k-1]/sorted[k].
std::pair<std::size_t, std::vector<std::uint32_t>> estimate_modes_and_k(
    const Eigen::VectorXd& sorted_scores, const std::vector<std::uint32_t>& score_order,
    const LundConfig& config);

// Mode l-1 gets label l; every other point, visited in decreasing density,
// takes the label of its metric-nearest strictly-denser (hence already
// labeled) point.
std::vector<int> label_points(const MetricFn& metric, const DensityEstimate& density,
                              const std::vector<std::uint32_t>& modes, std::size_t n);
std::vector<int> label_points(const DiffusionOperator& op, const DensityEstimate& density,
                              const std::vector<std::uint32_t>& modes);

// Mode estimation + labeling on a prebuilt operator and density (the sweep
// driver reuses one spectral decomposition across many t).
LundResult lund_from_operator(const DiffusionOperator& op, const DensityEstimate& density,
                              const LundConfig& config);

// Full pipeline: kernel graph (dense, or kNN-sparse when graph_knn > 0),
// random walk, spectral truncation at config.m, diffusion operator at
// config.t, KDE on kde_knn neighbors.
struct LundParams {
    double sigma = 0.3;
    std::size_t graph_knn = 0;  // 0 = dense kernel graph
    std::size_t kde_knn = 100;
    double kde_sigma = 0.0;     // 0 = reuse sigma
};

LundResult lund(const PointCloud& points, const LundParams& params,
                const LundConfig& config);

}  // namespace lund
