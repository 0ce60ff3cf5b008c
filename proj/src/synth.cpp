#include "lund/synth.hpp"

#include <cmath>
#include <random>

#include "lund/errors.hpp"
#include "lund/rng.hpp"

namespace lund {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_weights(const std::vector<double>& w) {
    if (w.empty()) throw InvalidParameterError("generate: empty mixture weights");
    double s = 0.0;
    for (double x : w) {
        if (!(x > 0.0)) throw InvalidParameterError("generate: weights must be positive");
        s += x;
    }
    if (std::abs(s - 1.0) > 1e-9)
        throw InvalidParameterError("generate: weights must sum to 1");
}

struct MixtureModel {
    std::vector<double> weights;
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> chol;  // lower factors
    Eigen::Index dim = 0;
};

MixtureModel build_mixture(const std::vector<double>& weights,
                           const std::vector<Eigen::VectorXd>& means,
                           const std::vector<Eigen::MatrixXd>& covs) {
    check_weights(weights);
    if (means.size() != weights.size() || covs.size() != weights.size())
        throw InvalidParameterError("generate: mixture component count mismatch");
    MixtureModel m;
    m.weights = weights;
    m.means = means;
    m.dim = means.front().size();
    for (std::size_t k = 0; k < means.size(); ++k) {
        if (means[k].size() != m.dim)
            throw InvalidParameterError("generate: mixture mean dimension mismatch");
        if (covs[k].rows() != m.dim || covs[k].cols() != m.dim)
            throw InvalidParameterError("generate: covariance shape mismatch");
        Eigen::LLT<Eigen::MatrixXd> llt(covs[k]);
        if (llt.info() != Eigen::Success)
            throw InvalidParameterError("generate: covariance not positive definite");
        m.chol.push_back(llt.matrixL());
    }
    return m;
}

PointCloud generate_mixture(const DatasetSpec& spec, const MixtureModel& m) {
    PointCloud cloud;
    cloud.n = spec.n;
    cloud.dim = static_cast<std::size_t>(m.dim);
    cloud.data.resize(spec.n * cloud.dim);
    cloud.labels.resize(spec.n);
    std::mt19937_64 rng(spec.seed);
    Eigen::VectorXd z(m.dim);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const std::size_t k = draw_discrete(rng, m.weights);
        cloud.labels[i] = static_cast<int>(k) + 1;
        for (Eigen::Index d = 0; d < m.dim; ++d) z[d] = norm01(rng);
        const Eigen::VectorXd x = m.means[k] + m.chol[k] * z;
        for (Eigen::Index d = 0; d < m.dim; ++d)
            cloud.data[i * cloud.dim + static_cast<std::size_t>(d)] = x[d];
    }
    return cloud;
}

PointCloud generate_bottleneck(const DatasetSpec& spec) {
    std::vector<double> w = spec.weights.empty()
                                ? std::vector<double>{0.4, 0.4, 0.2}
                                : spec.weights;
    check_weights(w);
    if (w.size() != 3)
        throw InvalidParameterError("generate: bottleneck takes 3 weights");
    const double L = spec.bn_bar_len;
    const double g = spec.bn_gap;
    // barbell bar centers at y = 0 and y = -g; the isolated blob sits above,
    // far enough that only the barbell pair sets the bottleneck scale, but
    // close enough that the kernel never underflows to an exactly
    // disconnected support at the smallest sweep bandwidth (0.05)
    const double cx[3] = {0.0, 0.0, L / 2.0};
    const double cy[3] = {0.0, -g, 1.8};
    PointCloud cloud;
    cloud.n = spec.n;
    cloud.dim = 2;
    cloud.data.resize(spec.n * 2);
    cloud.labels.resize(spec.n);
    std::mt19937_64 rng(spec.seed);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const std::size_t k = draw_discrete(rng, w);
        cloud.labels[i] = static_cast<int>(k) + 1;
        double x, y;
        if (k == 2) {
            x = cx[2] + spec.bn_blob_std * tnorm(rng, spec.bn_trunc);
            y = cy[2] + spec.bn_blob_std * tnorm(rng, spec.bn_trunc);
        } else if (u01(rng) < spec.bn_bridge_frac) {
            x = cx[k] + L * u01(rng);
            y = cy[k] + spec.bn_bridge_std * tnorm(rng, spec.bn_trunc);
        } else {
            const double end = u01(rng) < 0.5 ? 0.0 : L;
            x = cx[k] + end + spec.bn_blob_std * tnorm(rng, spec.bn_trunc);
            y = cy[k] + spec.bn_blob_std * tnorm(rng, spec.bn_trunc);
        }
        cloud.data[i * 2] = x;
        cloud.data[i * 2 + 1] = y;
    }
    return cloud;
}

PointCloud generate_circles(const DatasetSpec& spec) {
    std::vector<double> w = spec.weights.empty()
                                ? std::vector<double>{0.2, 0.35, 0.45}
                                : spec.weights;
    check_weights(w);
    if (w.size() != 3)
        throw InvalidParameterError("generate: nonlinear_circles takes 3 weights");
    if (!(spec.nc_bump_frac >= 0.0 && spec.nc_bump_frac <= 1.0))
        throw InvalidParameterError("generate: bump fraction outside [0,1]");
    // antipodal density bumps per annulus, offset between the annuli
    const double bump_base[2] = {0.0, kPi / 2.0};
    PointCloud cloud;
    cloud.n = spec.n;
    cloud.dim = 2;
    cloud.data.resize(spec.n * 2);
    cloud.labels.resize(spec.n);
    std::mt19937_64 rng(spec.seed);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const std::size_t k = draw_discrete(rng, w);
        cloud.labels[i] = static_cast<int>(k) + 1;
        double r, theta;
        if (k == 0) {
            r = spec.nc_disk_r * std::sqrt(u01(rng));
            theta = 2.0 * kPi * u01(rng);
        } else {
            r = spec.nc_radii[k - 1] + spec.nc_radial_std * tnorm(rng, 2.5);
            if (u01(rng) < spec.nc_bump_frac) {
                const double center =
                    bump_base[k - 1] + (u01(rng) < 0.5 ? 0.0 : kPi);
                theta = center + spec.nc_bump_std * norm01(rng);
            } else {
                theta = 2.0 * kPi * u01(rng);
            }
        }
        cloud.data[i * 2] = r * std::cos(theta);
        cloud.data[i * 2 + 1] = r * std::sin(theta);
    }
    return cloud;
}

}  // namespace

std::size_t DatasetSpec::k() const {
    switch (family) {
        case Family::bottleneck:
        case Family::nonlinear_circles:
        case Family::nadler_gaussians:
            return 3;
        case Family::gaussian_pair:
            return 2;
        case Family::custom_mixture:
            return weights.size();
    }
    return 0;
}

PointCloud generate(const DatasetSpec& spec) {
    if (spec.n < spec.k() || spec.k() == 0)
        throw InvalidParameterError("generate: need n >= number of clusters");
    switch (spec.family) {
        case DatasetSpec::Family::bottleneck:
            return generate_bottleneck(spec);
        case DatasetSpec::Family::nonlinear_circles:
            return generate_circles(spec);
        case DatasetSpec::Family::nadler_gaussians: {
            DatasetSpec s = spec;
            if (s.weights.empty()) s.weights = {0.5, 0.25, 0.25};
            if (s.means.empty()) {
                s.means = {Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(2.2, 0.6),
                           Eigen::Vector2d(2.2, -0.6)};
                s.covs = {0.25 * Eigen::Matrix2d::Identity(),
                          0.0225 * Eigen::Matrix2d::Identity(),
                          0.0225 * Eigen::Matrix2d::Identity()};
            }
            return generate_mixture(s, build_mixture(s.weights, s.means, s.covs));
        }
        case DatasetSpec::Family::gaussian_pair: {
            DatasetSpec s = spec;
            if (s.weights.empty()) s.weights = {0.5, 0.5};
            s.means = {Eigen::Vector2d(s.pair_scale, 0.0),
                       Eigen::Vector2d(0.0, s.pair_scale)};
            s.covs = {0.1 * Eigen::Matrix2d::Identity(),
                      0.1 * Eigen::Matrix2d::Identity()};
            return generate_mixture(s, build_mixture(s.weights, s.means, s.covs));
        }
        case DatasetSpec::Family::custom_mixture:
            return generate_mixture(spec,
                                    build_mixture(spec.weights, spec.means, spec.covs));
    }
    throw InvalidParameterError("generate: unknown family");
}

std::map<std::string, DatasetSpec> default_specs() {
    std::map<std::string, DatasetSpec> out;
    {
        DatasetSpec s;
        s.family = DatasetSpec::Family::bottleneck;
        s.n = 2000;
        s.seed = 11;
        out.emplace("bottleneck", s);
    }
    {
        DatasetSpec s;
        s.family = DatasetSpec::Family::nonlinear_circles;
        s.n = 2000;
        s.seed = 12;
        out.emplace("nonlinear_circles", s);
    }
    {
        DatasetSpec s;
        s.family = DatasetSpec::Family::nadler_gaussians;
        s.n = 2000;
        s.seed = 13;
        out.emplace("nadler_gaussians", s);
    }
    {
        DatasetSpec s;
        s.family = DatasetSpec::Family::gaussian_pair;
        s.n = 2000;
        s.seed = 14;
        s.pair_scale = std::sqrt(2.0);
        out.emplace("gaussian_pair", s);
        s.seed = 15;
        s.pair_scale = std::sqrt(3.0);
        out.emplace("gaussian_pair_sqrt3", s);
        s.seed = 16;
        s.pair_scale = 2.0;
        out.emplace("gaussian_pair_2", s);
    }
    return out;
}

}  // namespace lund
