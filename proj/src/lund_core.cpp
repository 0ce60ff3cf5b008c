#include "lund/lund_core.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>

#include "lund/errors.hpp"
#include "lund/markov.hpp"
#include "lund/neighbors.hpp"
#include "lund/spectral.hpp"
#include "lund/thread_pool.hpp"

namespace lund {

namespace {

// rho over an arbitrary metric; templated so the diffusion-operator path
// does not pay a std::function call per pair.
template <class Metric>
Eigen::VectorXd rho_impl(std::size_t n, const DensityEstimate& density, Metric&& metric) {
    if (n < 2) throw InvalidParameterError("compute_rho: need at least 2 points");
    if (density.order.size() != n)
        throw InvalidParameterError("compute_rho: density/size mismatch");
    Eigen::VectorXd rho(static_cast<Eigen::Index>(n));
    const auto& order = density.order;
    parallel_for(n, [&](std::size_t pos) {
        const std::size_t i = order[pos];
        if (pos == 0) {
            // unique maximizer of the tie-broken density order: farthest point
            double best = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                best = std::max(best, metric(i, j));
            }
            rho[static_cast<Eigen::Index>(i)] = best;
        } else {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t q = 0; q < pos; ++q)
                best = std::min(best, metric(i, order[q]));
            rho[static_cast<Eigen::Index>(i)] = best;
        }
    });
    return rho;
}

template <class Metric>
std::vector<int> label_impl(std::size_t n, const DensityEstimate& density,
                            const std::vector<std::uint32_t>& modes, Metric&& metric) {
    if (modes.empty()) throw InvalidParameterError("label_points: no modes");
    if (density.order.size() != n)
        throw InvalidParameterError("label_points: density/size mismatch");
    std::vector<int> labels(n, 0);
    for (std::size_t l = 0; l < modes.size(); ++l) {
        if (modes[l] >= n) throw InvalidParameterError("label_points: mode out of range");
        labels[modes[l]] = static_cast<int>(l) + 1;
    }
    const auto& order = density.order;
    if (labels[order[0]] == 0)
        throw Error("label_points: density maximizer is not a mode");
    for (std::size_t pos = 1; pos < n; ++pos) {
        const std::size_t i = order[pos];
        if (labels[i] != 0) continue;
        // every strictly denser point sits at a smaller position and is
        // already labeled; nearest one wins, first-visited on ties
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = order[0];
        for (std::size_t q = 0; q < pos; ++q) {
            const double d = metric(i, order[q]);
            if (d < best) {
                best = d;
                arg = order[q];
            }
        }
        labels[i] = labels[arg];
    }
    return labels;
}

}  // namespace

Eigen::VectorXd compute_rho(const MetricFn& metric, const DensityEstimate& density,
                            std::size_t n) {
    return rho_impl(n, density, metric);
}

Eigen::VectorXd compute_rho(const DiffusionOperator& op, const DensityEstimate& density) {
    return rho_impl(op.n(), density,
                    [&op](std::size_t i, std::size_t j) { return op.distance(i, j); });
}

void sort_scores(const Eigen::VectorXd& score, const DensityEstimate& density,
                 std::vector<std::uint32_t>& order, Eigen::VectorXd& sorted) {
    const std::size_t n = static_cast<std::size_t>(score.size());
    if (density.rank.size() != n)
        throw InvalidParameterError("sort_scores: density/size mismatch");
    order.resize(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        const double sa = score[static_cast<Eigen::Index>(a)];
        const double sb = score[static_cast<Eigen::Index>(b)];
        if (sa != sb) return sa > sb;
        return density.rank[a] < density.rank[b];  // denser first on ties
    });
    sorted.resize(static_cast<Eigen::Index>(n));
    for (std::size_t q = 0; q < n; ++q)
        sorted[static_cast<Eigen::Index>(q)] = score[static_cast<Eigen::Index>(order[q])];
}

std::pair<std::size_t, std::vector<std::uint32_t>> estimate_modes_and_k(
    const Eigen::VectorXd& sorted_scores, const std::vector<std::uint32_t>& score_order,
    const LundConfig& config) {
    const std::size_t n = static_cast<std::size_t>(sorted_scores.size());
    if (n < 2) throw InvalidParameterError("estimate_modes_and_k: need at least 2 points");
    if (score_order.size() != n)
        throw InvalidParameterError("estimate_modes_and_k: order/score mismatch");

    std::size_t k_hat = 0;
    switch (config.estimator) {
        case LundConfig::KEstimator::fixed: {
            if (config.k_fixed < 1 || config.k_fixed > n)
                throw InvalidParameterError("estimate_modes_and_k: fixed K out of [1, n]");
            k_hat = config.k_fixed;
            break;
        }
        case LundConfig::KEstimator::ratio_argmax: {
            // argmax over k in [1, n-1] of sorted[k-1]/sorted[k]; ties keep
            // the smallest k
            double best = -1.0;
            for (std::size_t k = 1; k < n; ++k) {
                const double den = sorted_scores[static_cast<Eigen::Index>(k)];
                if (den <= 0.0)
                    throw DegenerateScoreError(
                        "estimate_modes_and_k: zero score in ratio scan");
                const double r = sorted_scores[static_cast<Eigen::Index>(k - 1)] / den;
                if (r > best) {
                    best = r;
                    k_hat = k;
                }
            }
            break;
        }
        case LundConfig::KEstimator::tau_threshold: {
            if (!(config.tau > 0.0))
                throw InvalidParameterError("estimate_modes_and_k: tau must be positive");
            for (std::size_t k = 1; k < n; ++k) {
                const double den = sorted_scores[static_cast<Eigen::Index>(k)];
                if (den <= 0.0)
                    throw DegenerateScoreError(
                        "estimate_modes_and_k: zero score in ratio scan");
                if (sorted_scores[static_cast<Eigen::Index>(k - 1)] / den > config.tau) {
                    k_hat = k;
                    break;
                }
            }
            if (k_hat == 0)
                throw EstimationFailureError(
                    "estimate_modes_and_k: no ratio exceeds tau");
            break;
        }
    }
    std::vector<std::uint32_t> modes(score_order.begin(),
                                     score_order.begin() + static_cast<std::ptrdiff_t>(k_hat));
    return {k_hat, modes};
}

std::vector<int> label_points(const MetricFn& metric, const DensityEstimate& density,
                              const std::vector<std::uint32_t>& modes, std::size_t n) {
    return label_impl(n, density, modes, metric);
}

std::vector<int> label_points(const DiffusionOperator& op, const DensityEstimate& density,
                              const std::vector<std::uint32_t>& modes) {
    return label_impl(op.n(), density, modes,
                      [&op](std::size_t i, std::size_t j) { return op.distance(i, j); });
}

LundResult lund_from_operator(const DiffusionOperator& op, const DensityEstimate& density,
                              const LundConfig& config) {
    LundResult res;
    res.rho = compute_rho(op, density);
    res.score = density.p.cwiseProduct(res.rho);
    sort_scores(res.score, density, res.score_order, res.sorted_scores);
    auto [k_hat, modes] = estimate_modes_and_k(res.sorted_scores, res.score_order, config);
    res.k_hat = k_hat;
    res.modes = std::move(modes);
    res.labels = label_points(op, density, res.modes);
    return res;
}

LundResult lund(const PointCloud& points, const LundParams& params,
                const LundConfig& config) {
    if (points.n < 2) throw InvalidParameterError("lund: need at least 2 points");
    if (!(params.sigma > 0.0)) throw InvalidParameterError("lund: sigma must be positive");

    KernelGraph graph;
    if (params.graph_knn > 0) {
        const NeighborList nl = knn(points, params.graph_knn);
        graph = build_kernel(points, params.sigma, nl);
    } else {
        graph = build_kernel(points, params.sigma);
    }
    const MarkovChain chain = build_chain(graph);

    EigOptions eopts;
    eopts.m = config.m;
    const SpectralDecomposition dec = eig_markov(chain, eopts);
    const DiffusionOperator op(dec, config.t, Measure::inverse_pi);

    const std::size_t kde_k = std::min(params.kde_knn, points.n - 1);
    const NeighborList nl_kde = knn(points, kde_k);
    const double kde_sigma = params.kde_sigma > 0.0 ? params.kde_sigma : params.sigma;
    const DensityEstimate density = kde(points, nl_kde, kde_sigma);

    return lund_from_operator(op, density, config);
}

}  // namespace lund
