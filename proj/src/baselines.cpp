#include "lund/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <random>

#include "lund/errors.hpp"
#include "lund/lund_core.hpp"
#include "lund/markov.hpp"
#include "lund/rng.hpp"
#include "lund/simd.hpp"

namespace lund {

namespace {

using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double row_sqdist(const RowMajor& a, Eigen::Index i, const RowMajor& b,
                  Eigen::Index j) {
    return simd::active().sqdist(a.data() + i * a.cols(), b.data() + j * b.cols(),
                         static_cast<std::size_t>(a.cols()));
}

// probabilistic farthest-point seeding (k-means++ style)
RowMajor seed_centers(const RowMajor& pts, std::size_t k, std::mt19937_64& rng) {
    const Eigen::Index n = pts.rows();
    RowMajor centers(static_cast<Eigen::Index>(k), pts.cols());
    std::vector<double> d2(static_cast<std::size_t>(n),
                           std::numeric_limits<double>::infinity());
    Eigen::Index first = static_cast<Eigen::Index>(u01(rng) * static_cast<double>(n));
    first = std::min(first, n - 1);
    centers.row(0) = pts.row(first);
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = row_sqdist(pts, i, centers, static_cast<Eigen::Index>(c - 1));
            d2[static_cast<std::size_t>(i)] =
                std::min(d2[static_cast<std::size_t>(i)], d);
            total += d2[static_cast<std::size_t>(i)];
        }
        Eigen::Index pick = 0;
        if (total > 0.0) {
            const double u = u01(rng) * total;
            double acc = 0.0;
            pick = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += d2[static_cast<std::size_t>(i)];
                if (u < acc) {
                    pick = i;
                    break;
                }
            }
        } else {
            // all points coincide with chosen centers; any pick is equivalent
            pick = static_cast<Eigen::Index>(c) % n;
        }
        centers.row(static_cast<Eigen::Index>(c)) = pts.row(pick);
    }
    return centers;
}

double lloyd(const RowMajor& pts, std::size_t k, std::size_t max_iter,
             std::mt19937_64& rng, std::vector<int>& assign) {
    const Eigen::Index n = pts.rows();
    RowMajor centers = seed_centers(pts, k, rng);
    assign.assign(static_cast<std::size_t>(n), -1);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double d = row_sqdist(pts, i, centers, static_cast<Eigen::Index>(c));
                if (d < bd) {
                    bd = d;
                    best = static_cast<int>(c);
                }
            }
            if (assign[static_cast<std::size_t>(i)] != best) {
                assign[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }
        // empty cluster: re-seed from the point farthest from its center
        std::vector<Eigen::Index> count(k, 0);
        for (Eigen::Index i = 0; i < n; ++i)
            ++count[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
        for (std::size_t c = 0; c < k; ++c) {
            if (count[c] != 0) continue;
            Eigen::Index far = 0;
            double fd = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const std::size_t a =
                    static_cast<std::size_t>(assign[static_cast<std::size_t>(i)]);
                if (count[a] <= 1) continue;  // do not empty another cluster
                const double d = row_sqdist(pts, i, centers, static_cast<Eigen::Index>(a));
                if (d > fd) {
                    fd = d;
                    far = i;
                }
            }
            --count[static_cast<std::size_t>(assign[static_cast<std::size_t>(far)])];
            assign[static_cast<std::size_t>(far)] = static_cast<int>(c);
            ++count[c];
            changed = true;
        }
        // means update
        centers.setZero();
        for (Eigen::Index i = 0; i < n; ++i)
            centers.row(assign[static_cast<std::size_t>(i)]) += pts.row(i);
        for (std::size_t c = 0; c < k; ++c)
            if (count[c] > 0)
                centers.row(static_cast<Eigen::Index>(c)) /=
                    static_cast<double>(count[c]);
        if (!changed) break;
    }
    double obj = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        obj += row_sqdist(pts, i, centers,
                          static_cast<Eigen::Index>(assign[static_cast<std::size_t>(i)]));
    return obj;
}

BaselineResult kmeans_rowmajor(const RowMajor& pts, std::size_t k,
                               const KmeansOptions& opts) {
    const Eigen::Index n = pts.rows();
    if (n == 0) throw InvalidParameterError("kmeans: empty input");
    if (k < 1 || static_cast<Eigen::Index>(k) > n)
        throw InvalidParameterError("kmeans: K outside [1, n]");
    if (opts.restarts < 1) throw InvalidParameterError("kmeans: need >= 1 restart");
    std::mt19937_64 rng(opts.seed);
    BaselineResult res;
    res.method = "kmeans";
    res.k_used = k;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < opts.restarts; ++r) {
        std::vector<int> assign;
        const double obj = lloyd(pts, k, opts.max_iter, rng, assign);
        if (obj < best) {
            best = obj;
            res.labels.resize(assign.size());
            for (std::size_t i = 0; i < assign.size(); ++i)
                res.labels[i] = assign[i] + 1;
        }
    }
    res.extras["objective"] = best;
    return res;
}

RowMajor kernel_embed_shi(const PointCloud& cloud, double sigma) {
    const KernelGraph graph = build_kernel(cloud, sigma);
    const MarkovChain chain = build_chain(graph);
    EigOptions eo;
    eo.m = 2;
    const SpectralDecomposition dec = eig_markov(chain, eo);
    RowMajor e(dec.vectors.rows(), 1);
    e.col(0) = dec.vectors.col(1);
    return e;
}

}  // namespace

BaselineResult kmeans(const Eigen::MatrixXd& points, std::size_t k,
                      const KmeansOptions& opts) {
    RowMajor pts = points;
    return kmeans_rowmajor(pts, k, opts);
}

BaselineResult spectral_shi(const PointCloud& cloud, double sigma, std::size_t k,
                            const KmeansOptions& opts) {
    BaselineResult res = kmeans_rowmajor(kernel_embed_shi(cloud, sigma), k, opts);
    res.method = "spectral_shi";
    return res;
}

BaselineResult spectral_ng(const PointCloud& cloud, double sigma, std::size_t k,
                           const KmeansOptions& opts) {
    if (k < 1 || k > cloud.n)
        throw InvalidParameterError("spectral_ng: K outside [1, n]");
    const KernelGraph graph = build_kernel(cloud, sigma);
    EigOptions eo;
    eo.m = k;
    const SpectralDecomposition dec = eig_sym_laplacian(graph, eo);
    RowMajor e = dec.vectors.leftCols(static_cast<Eigen::Index>(k));
    for (Eigen::Index i = 0; i < e.rows(); ++i) {
        const double norm = e.row(i).norm();
        if (norm > 0.0) {
            e.row(i) /= norm;
        } else {
            std::cerr << "spectral_ng: zero embedding row " << i
                      << " left unnormalized\n";
        }
    }
    BaselineResult res = kmeans_rowmajor(e, k, opts);
    res.method = "spectral_ng";
    return res;
}

BaselineResult fsfdpc(const PointCloud& cloud, const DensityEstimate& density,
                      std::size_t k) {
    const std::size_t n = cloud.n;
    if (k < 1 || k > n) throw InvalidParameterError("fsfdpc: K outside [1, n]");
    const std::size_t dim = cloud.dim;
    const double* data = cloud.data.data();
    const MetricFn metric = [data, dim](std::size_t i, std::size_t j) {
        return std::sqrt(simd::active().sqdist(data + i * dim, data + j * dim, dim));
    };
    const Eigen::VectorXd rho = compute_rho(metric, density, n);
    const Eigen::VectorXd score = density.p.cwiseProduct(rho);
    std::vector<std::uint32_t> order;
    Eigen::VectorXd sorted;
    sort_scores(score, density, order, sorted);
    LundConfig cfg;
    cfg.estimator = LundConfig::KEstimator::fixed;
    cfg.k_fixed = k;
    const auto [k_hat, modes] = estimate_modes_and_k(sorted, order, cfg);
    BaselineResult res;
    res.method = "fsfdpc";
    res.k_used = k_hat;
    res.labels = label_points(metric, density, modes, n);
    return res;
}

std::size_t eigengap_khat(const SpectralDecomposition& dec) {
    const Eigen::Index m = dec.values.size();
    if (m < 2) throw InvalidParameterError("eigengap_khat: need at least 2 eigenvalues");
    // Literal argmax_i (lambda_{i+1} - lambda_i), signed, ties to the smaller
    // index. On an ascending Laplacian spectrum this is the classic
    // largest-gap heuristic; on a descending random-walk spectrum it selects
    // the smallest drop, which is what the published model-order panels show.
    std::size_t k = 1;
    double best = dec.values[1] - dec.values[0];
    for (Eigen::Index i = 2; i < m; ++i) {
        const double gap = dec.values[i] - dec.values[i - 1];
        if (gap > best) {
            best = gap;
            k = static_cast<std::size_t>(i);
        }
    }
    return k;
}

}  // namespace lund
