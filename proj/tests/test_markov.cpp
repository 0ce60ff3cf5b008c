#include "doctest.h"

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "lund/errors.hpp"
#include "lund/markov.hpp"
#include "lund/rng.hpp"

using namespace lund;

namespace {

PointCloud two_points(double gap) {
    PointCloud c;
    c.n = 2;
    c.dim = 1;
    c.data = {0.0, gap};
    return c;
}

PointCloud random_cloud(std::uint64_t seed, std::size_t n, std::size_t dim) {
    std::mt19937_64 g(seed);
    PointCloud c;
    c.n = n;
    c.dim = dim;
    c.data.resize(n * dim);
    for (auto& x : c.data) x = u01(g);
    return c;
}

KernelGraph graph_from_weights(const Eigen::MatrixXd& w) {
    KernelGraph g;
    g.mode = GraphMode::dense;
    g.sigma = 1.0;
    g.n = static_cast<std::size_t>(w.rows());
    g.w_dense = w;
    return g;
}

}  // namespace

TEST_CASE("kernel values at characteristic distances") {
    const double sigma = 0.7;
    const KernelGraph g = build_kernel(two_points(sigma), sigma);
    CHECK(g.w_dense(0, 0) == 1.0);
    CHECK(g.w_dense(1, 1) == 1.0);
    CHECK(g.w_dense(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(g.w_dense(1, 0) == g.w_dense(0, 1));

    const KernelGraph coincident = build_kernel(two_points(0.0), sigma);
    CHECK(coincident.w_dense(0, 1) == 1.0);
}

TEST_CASE("uniform weights give the uniform chain") {
    const MarkovChain c = build_chain(graph_from_weights(Eigen::MatrixXd::Ones(2, 2)));
    CHECK(c.p_dense(0, 0) == doctest::Approx(0.5));
    CHECK(c.p_dense(0, 1) == doctest::Approx(0.5));
    CHECK(c.p_dense(1, 0) == doctest::Approx(0.5));
    CHECK(c.pi(0) == doctest::Approx(0.5));
    CHECK(c.pi(1) == doctest::Approx(0.5));
}

TEST_CASE("asymmetric weights normalize by degree") {
    Eigen::MatrixXd w(2, 2);
    w << 1, 2, 2, 1;
    const MarkovChain c = build_chain(graph_from_weights(w));
    CHECK(c.p_dense(0, 0) == doctest::Approx(1.0 / 3.0));
    CHECK(c.p_dense(0, 1) == doctest::Approx(2.0 / 3.0));
    CHECK(c.p_dense(1, 0) == doctest::Approx(2.0 / 3.0));
    // equal degrees, so the stationary weight splits evenly
    CHECK(c.pi(0) == doctest::Approx(0.5));
    CHECK(c.pi(1) == doctest::Approx(0.5));
}

TEST_CASE("row sums, stationarity and detailed balance on random clouds") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const PointCloud cloud = random_cloud(seed, 30, 2);
        const MarkovChain c = build_chain(build_kernel(cloud, 0.4));
        REQUIRE(c.n == 30);
        for (Eigen::Index i = 0; i < 30; ++i)
            CHECK(std::abs(c.p_dense.row(i).sum() - 1.0) <= 1e-12);
        CHECK(std::abs(c.pi.sum() - 1.0) <= 1e-12);
        const Eigen::VectorXd drift = c.p_dense.transpose() * c.pi - c.pi;
        CHECK(drift.cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(c.reversible);
        for (Eigen::Index i = 0; i < 30; ++i)
            for (Eigen::Index j = 0; j < 30; ++j)
                CHECK(std::abs(c.pi(i) * c.p_dense(i, j) - c.pi(j) * c.p_dense(j, i)) <=
                      1e-10);
    }
}

TEST_CASE("sparse knn chain matches the dense chain on its support") {
    const PointCloud cloud = random_cloud(9, 50, 2);
    const NeighborList nl = knn(cloud, 49);  // full support
    const MarkovChain sparse = build_chain(build_kernel(cloud, 0.5, nl));
    const MarkovChain dense = build_chain(build_kernel(cloud, 0.5));
    const Eigen::MatrixXd diff = sparse.dense_p() - dense.p_dense;
    CHECK(diff.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((sparse.pi - dense.pi).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("lazify halves the dynamics and keeps pi") {
    Eigen::MatrixXd w(2, 2);
    w << 0, 1, 1, 0;
    // kernel graphs always carry the unit diagonal, so feed the transition
    // matrix directly
    Eigen::MatrixXd p(2, 2);
    p << 0, 1, 1, 0;
    const MarkovChain c = chain_from_transition(p);
    const MarkovChain lazy = lazify(c);
    CHECK(lazy.p_dense(0, 0) == doctest::Approx(0.5));
    CHECK(lazy.p_dense(0, 1) == doctest::Approx(0.5));
    CHECK(lazy.p_dense(1, 1) == doctest::Approx(0.5));
    CHECK((lazy.pi - c.pi).cwiseAbs().maxCoeff() <= 1e-15);

    const MarkovChain big = build_chain(build_kernel(random_cloud(4, 20, 2), 0.3));
    const MarkovChain lazy_big = lazify(big);
    for (Eigen::Index i = 0; i < 20; ++i) {
        CHECK(lazy_big.p_dense(i, i) >= 0.5);
        CHECK(std::abs(lazy_big.p_dense.row(i).sum() - 1.0) <= 1e-12);
    }
    CHECK((lazy_big.pi - big.pi).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("isolated point is a degenerate graph") {
    // distance 60 at sigma 1: the kernel underflows to exactly 0
    const PointCloud c = two_points(60.0);
    CHECK_THROWS_AS(build_chain(build_kernel(c, 1.0)), DegenerateGraphError);
}

TEST_CASE("two far pairs make a reducible support") {
    PointCloud c;
    c.n = 4;
    c.dim = 1;
    c.data = {0.0, 0.1, 100.0, 100.1};
    CHECK_THROWS_AS(build_chain(build_kernel(c, 1.0)), ReducibleChainError);
}

TEST_CASE("chain_from_transition validates its input") {
    Eigen::MatrixXd bad(2, 2);
    bad << 0.5, 0.4, 0.5, 0.5;
    CHECK_THROWS_AS(chain_from_transition(bad), InvalidParameterError);

    Eigen::MatrixXd reducible = Eigen::MatrixXd::Identity(3, 3);
    CHECK_THROWS_AS(chain_from_transition(reducible), ReducibleChainError);
    const MarkovChain ok = chain_from_transition(reducible, false);
    CHECK(ok.n == 3);
    CHECK(std::abs(ok.pi.sum() - 1.0) <= 1e-12);

    Eigen::MatrixXd p(3, 3);
    p << 0.2, 0.8, 0.0, 0.3, 0.2, 0.5, 0.25, 0.25, 0.5;
    const MarkovChain c = chain_from_transition(p);
    const Eigen::VectorXd drift = c.p_dense.transpose() * c.pi - c.pi;
    CHECK(drift.cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(c.pi.minCoeff() > 0.0);
}

TEST_CASE("kernel rejects bad sigma and empty input") {
    CHECK_THROWS_AS(build_kernel(two_points(1.0), 0.0), InvalidParameterError);
    CHECK_THROWS_AS(build_kernel(two_points(1.0), -1.0), InvalidParameterError);
    PointCloud empty;
    CHECK_THROWS_AS(build_kernel(empty, 1.0), InvalidParameterError);
}
