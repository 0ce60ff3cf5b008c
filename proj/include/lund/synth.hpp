#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lund/point_cloud.hpp"

namespace lund {

// Seeded generators for the synthetic families used by the experiments.
// Cluster assignment is multinomial in the weights; coordinates are then
// drawn from the per-cluster model. Deterministic given seed.
struct DatasetSpec {
    enum class Family {
        bottleneck,
        nonlinear_circles,
        nadler_gaussians,
        gaussian_pair,
        custom_mixture
    };
    Family family = Family::custom_mixture;
    std::size_t n = 2000;
    std::uint64_t seed = 1;

    // mixture weights (all families; defaults filled per family when empty)
    std::vector<double> weights;

    // custom_mixture / nadler_gaussians: component means and covariances
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covs;

    // gaussian_pair: means (scale,0) and (0,scale), covariance I/10
    double pair_scale = 1.4142135623730951;

    // bottleneck: two barbells (blob pairs joined by a low-density bridge)
    // plus one isolated blob; blob tails truncated so the inter-cluster gap
    // is controlled
    double bn_blob_std = 0.2;
    double bn_bar_len = 2.5;       // blob separation inside a barbell
    double bn_bridge_frac = 0.10;  // fraction of barbell points on the bridge
    double bn_bridge_std = 0.05;   // transverse jitter of bridge points
    double bn_gap = 1.5;           // center-to-center separation between clusters
    double bn_trunc = 2.5;         // truncation, in stds, of blob/bridge tails

    // nonlinear_circles: filled disk + two annuli with antipodal density bumps
    double nc_disk_r = 0.5;
    std::array<double, 2> nc_radii{1.5, 2.5};
    double nc_radial_std = 0.05;
    double nc_bump_frac = 0.85;  // fraction of annulus points inside the bumps
    double nc_bump_std = 0.35;   // angular std of each bump (radians)

    std::size_t k() const;
};

PointCloud generate(const DatasetSpec& spec);

// The frozen named instances used by the experiment harness.
std::map<std::string, DatasetSpec> default_specs();

}  // namespace lund
