#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "lund/baselines.hpp"
#include "lund/density.hpp"
#include "lund/errors.hpp"
#include "lund/evaluation.hpp"
#include "lund/lund_core.hpp"
#include "lund/markov.hpp"
#include "lund/neighbors.hpp"
#include "lund/rng.hpp"
#include "lund/spectral.hpp"

using namespace lund;

namespace {

PointCloud two_blobs(std::uint64_t seed, std::size_t per, double gap) {
    std::mt19937_64 g(seed);
    PointCloud c;
    c.n = 2 * per;
    c.dim = 2;
    c.data.resize(c.n * 2);
    c.labels.resize(c.n);
    for (std::size_t i = 0; i < c.n; ++i) {
        const bool second = i >= per;
        c.labels[i] = second ? 2 : 1;
        c.data[2 * i] = (second ? gap : 0.0) + 0.25 * norm01(g);
        c.data[2 * i + 1] = 0.25 * norm01(g);
    }
    return c;
}

// exhaustive 2-partition objective: best sum of within-cluster squared
// distances to the cluster means
double brute_k2_objective(const Eigen::MatrixXd& pts) {
    const std::size_t n = static_cast<std::size_t>(pts.rows());
    double best = 1e300;
    for (std::size_t mask = 1; mask + 1 < (1ull << n); ++mask) {
        Eigen::VectorXd m0 = Eigen::VectorXd::Zero(pts.cols());
        Eigen::VectorXd m1 = Eigen::VectorXd::Zero(pts.cols());
        std::size_t c0 = 0, c1 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1ull << i)) {
                m1 += pts.row(static_cast<Eigen::Index>(i)).transpose();
                ++c1;
            } else {
                m0 += pts.row(static_cast<Eigen::Index>(i)).transpose();
                ++c0;
            }
        }
        m0 /= static_cast<double>(c0);
        m1 /= static_cast<double>(c1);
        double obj = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Eigen::VectorXd x = pts.row(static_cast<Eigen::Index>(i)).transpose();
            obj += (mask & (1ull << i)) ? (x - m1).squaredNorm() : (x - m0).squaredNorm();
        }
        best = std::min(best, obj);
    }
    return best;
}

}  // namespace

TEST_CASE("kmeans with k equal to n has zero objective") {
    Eigen::MatrixXd pts(2, 2);
    pts << 0, 0, 5, 5;
    const BaselineResult r = kmeans(pts, 2);
    CHECK(r.extras.at("objective") == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(r.k_used == 2);
    CHECK(r.labels[0] != r.labels[1]);
}

TEST_CASE("kmeans k=1 returns the mean and total scatter") {
    std::mt19937_64 g(3);
    Eigen::MatrixXd pts(20, 2);
    for (Eigen::Index i = 0; i < pts.size(); ++i) pts(i / 2, i % 2) = u01(g);
    const BaselineResult r = kmeans(pts, 1);
    const Eigen::RowVector2d mean = pts.colwise().mean();
    double scatter = 0.0;
    for (Eigen::Index i = 0; i < 20; ++i) scatter += (pts.row(i) - mean).squaredNorm();
    CHECK(r.extras.at("objective") == doctest::Approx(scatter).epsilon(1e-10));
    for (int l : r.labels) CHECK(l == 1);
}

TEST_CASE("kmeans finds the optimal 2-partition of small instances") {
    std::mt19937_64 g(17);
    for (int rep = 0; rep < 5; ++rep) {
        Eigen::MatrixXd pts(8, 2);
        for (Eigen::Index i = 0; i < pts.size(); ++i) pts(i / 2, i % 2) = 3.0 * u01(g);
        const BaselineResult r = kmeans(pts, 2);
        CHECK(r.extras.at("objective") ==
              doctest::Approx(brute_k2_objective(pts)).epsilon(1e-8));
    }
}

TEST_CASE("kmeans square corners split into opposite pairs") {
    Eigen::MatrixXd pts(4, 2);
    pts << 0, 0, 1, 0, 0, 1, 1, 1;
    const BaselineResult r = kmeans(pts, 2);
    // optimal objective: two side pairs, each contributing 2 * (1/2)^2 = 0.5
    CHECK(r.extras.at("objective") == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("spectral baselines recover well-separated blobs") {
    const PointCloud c = two_blobs(5, 30, 10.0);
    const BaselineResult shi = spectral_shi(c, 1.0, 2);
    CHECK(score(shi.labels, c.labels).overall == doctest::Approx(1.0));
    CHECK(shi.k_used == 2);
    const BaselineResult ng = spectral_ng(c, 1.0, 2);
    CHECK(score(ng.labels, c.labels).overall == doctest::Approx(1.0));
    CHECK(std::set<int>(ng.labels.begin(), ng.labels.end()).size() == 2);
}

TEST_CASE("fsfdpc equals the mode machinery under the euclidean metric") {
    const PointCloud c = two_blobs(9, 25, 8.0);
    const DensityEstimate d = kde(c, knn(c, 10), 1.0);
    const BaselineResult r = fsfdpc(c, d, 2);
    CHECK(r.k_used == 2);
    CHECK(score(r.labels, c.labels).overall == doctest::Approx(1.0));

    // replay through the shared core with the same metric: identical output
    const Eigen::MatrixXd dist = pairwise_distances(c);
    const MetricFn metric = [&](std::size_t i, std::size_t j) {
        return dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    };
    const Eigen::VectorXd rho = compute_rho(metric, d, c.n);
    const Eigen::VectorXd sc = d.p.cwiseProduct(rho);
    std::vector<std::uint32_t> order;
    Eigen::VectorXd sorted;
    sort_scores(sc, d, order, sorted);
    LundConfig cfg;
    cfg.estimator = LundConfig::KEstimator::fixed;
    cfg.k_fixed = 2;
    const auto [k, modes] = estimate_modes_and_k(sorted, order, cfg);
    const std::vector<int> labels = label_points(metric, d, modes, c.n);
    CHECK(labels == r.labels);
}

TEST_CASE("fsfdpc with k equal to n makes every point a mode") {
    PointCloud c;
    c.n = 4;
    c.dim = 1;
    c.data = {0.0, 1.0, 2.0, 3.0};
    const DensityEstimate d = kde(c, knn(c, 3), 1.0);
    const BaselineResult r = fsfdpc(c, d, 4);
    std::set<int> distinct(r.labels.begin(), r.labels.end());
    CHECK(distinct.size() == 4);
}

TEST_CASE("eigengap on an ascending laplacian spectrum takes the largest gap") {
    SpectralDecomposition dec;
    dec.values.resize(5);
    dec.values << 0.0, 0.0, 0.0, 0.9, 0.95;
    CHECK(eigengap_khat(dec) == 3);

    dec.values.resize(4);
    dec.values << 0.0, 0.5, 0.6, 0.7;
    CHECK(eigengap_khat(dec) == 1);

    dec.values.resize(2);
    dec.values << 0.0, 0.3;
    CHECK(eigengap_khat(dec) == 1);

    dec.values.resize(1);
    dec.values << 0.0;
    CHECK_THROWS_AS(eigengap_khat(dec), InvalidParameterError);
}

TEST_CASE("eigengap semantics on a nearly reducible graph") {
    // three tight blobs, far apart: L_sym has three near-zero eigenvalues,
    // the random walk has three near-unit ones
    std::mt19937_64 g(13);
    PointCloud c;
    c.n = 45;
    c.dim = 2;
    c.data.resize(c.n * 2);
    for (std::size_t i = 0; i < c.n; ++i) {
        const double cx = (i % 3 == 0) ? 0.0 : (i % 3 == 1 ? 20.0 : 40.0);
        c.data[2 * i] = cx + 0.2 * norm01(g);
        c.data[2 * i + 1] = 0.2 * norm01(g);
    }
    const KernelGraph graph = build_kernel(c, 3.0);
    EigOptions eo;
    eo.m = 10;

    // ascending Laplacian input: the classic rule answers the block count
    CHECK(eigengap_khat(eig_sym_laplacian(graph, eo)) == 3);

    // descending random-walk input: the signed argmax sits at the flattest
    // spot, the near-unit plateau, so the answer collapses to 1
    CHECK(eigengap_khat(eig_markov(build_chain(graph), eo)) == 1);
}

TEST_CASE("kmeans input validation") {
    Eigen::MatrixXd pts(3, 2);
    pts << 0, 0, 1, 1, 2, 2;
    CHECK_THROWS_AS(kmeans(pts, 0), InvalidParameterError);
    CHECK_THROWS_AS(kmeans(pts, 4), InvalidParameterError);
}
