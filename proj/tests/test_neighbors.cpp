#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "lund/errors.hpp"
#include "lund/neighbors.hpp"
#include "lund/point_cloud.hpp"
#include "lund/rng.hpp"

using namespace lund;

namespace {

PointCloud random_cloud(std::uint64_t seed, std::size_t n, std::size_t dim) {
    std::mt19937_64 g(seed);
    PointCloud c;
    c.n = n;
    c.dim = dim;
    c.data.resize(n * dim);
    for (auto& x : c.data) x = 10.0 * (u01(g) - 0.5);
    return c;
}

// reference answer straight from the distance matrix
NeighborList brute_oracle(const PointCloud& c, std::size_t k) {
    const Eigen::MatrixXd d = pairwise_distances(c);
    NeighborList out;
    out.n = c.n;
    out.k = k;
    out.idx.resize(c.n * k);
    out.dist.resize(c.n * k);
    for (std::size_t i = 0; i < c.n; ++i) {
        std::vector<std::pair<double, std::uint32_t>> cand;
        for (std::size_t j = 0; j < c.n; ++j)
            if (j != i)
                cand.emplace_back(d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                                  static_cast<std::uint32_t>(j));
        std::sort(cand.begin(), cand.end());
        for (std::size_t s = 0; s < k; ++s) {
            out.idx[i * k + s] = cand[s].second;
            out.dist[i * k + s] = cand[s].first;
        }
    }
    return out;
}

void check_same(const NeighborList& a, const NeighborList& b) {
    REQUIRE(a.n == b.n);
    REQUIRE(a.k == b.k);
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t s = 0; s < a.k; ++s) {
            CHECK(a.idx[i * a.k + s] == b.idx[i * a.k + s]);
            CHECK(a.dist[i * a.k + s] ==
                  doctest::Approx(b.dist[i * a.k + s]).epsilon(1e-12));
        }
}

}  // namespace

TEST_CASE("nearest neighbor on collinear points") {
    PointCloud c;
    c.n = 3;
    c.dim = 1;
    c.data = {0.0, 1.0, 3.0};
    for (auto method : {KnnMethod::brute, KnnMethod::kdtree}) {
        const NeighborList nl = knn(c, 1, method);
        CHECK(nl.neighbors(0)[0] == 1);
        CHECK(nl.neighbors(1)[0] == 0);
        CHECK(nl.neighbors(2)[0] == 1);
        CHECK(nl.distances(0)[0] == doctest::Approx(1.0));
        CHECK(nl.distances(2)[0] == doctest::Approx(2.0));
    }
}

TEST_CASE("full neighbor list equals the sorted distance matrix") {
    const PointCloud c = random_cloud(3, 40, 3);
    const NeighborList ref = brute_oracle(c, c.n - 1);
    check_same(knn(c, c.n - 1, KnnMethod::brute), ref);
    check_same(knn(c, c.n - 1, KnnMethod::kdtree), ref);
}

TEST_CASE("kdtree agrees with brute force across shapes") {
    for (auto [n, dim, k] : {std::tuple<std::size_t, std::size_t, std::size_t>{60, 2, 5},
                             {33, 7, 10},
                             {100, 1, 3},
                             {25, 10, 24}}) {
        const PointCloud c = random_cloud(100 + n, n, dim);
        check_same(knn(c, k, KnnMethod::kdtree), knn(c, k, KnnMethod::brute));
    }
}

TEST_CASE("duplicate points report zero distance ties toward lower index") {
    PointCloud c;
    c.n = 4;
    c.dim = 2;
    c.data = {0, 0, 0, 0, 5, 5, 5, 5};
    for (auto method : {KnnMethod::brute, KnnMethod::kdtree}) {
        const NeighborList nl = knn(c, 2, method);
        CHECK(nl.distances(0)[0] == 0.0);
        CHECK(nl.neighbors(0)[0] == 1);
        CHECK(nl.distances(1)[0] == 0.0);
        CHECK(nl.neighbors(1)[0] == 0);
        CHECK(nl.neighbors(2)[0] == 3);
        CHECK(nl.distances(2)[0] == 0.0);
        // second neighbor of 0 is one of the far duplicates, lower index first
        CHECK(nl.neighbors(0)[1] == 2);
    }
}

TEST_CASE("k out of range is rejected") {
    const PointCloud c = random_cloud(9, 5, 2);
    CHECK_THROWS_AS(knn(c, 5), InvalidParameterError);
    CHECK_THROWS_AS(knn(c, 0), InvalidParameterError);
    PointCloud empty;
    CHECK_THROWS_AS(knn(empty, 1), InvalidParameterError);
}

TEST_CASE("automatic method matches the reference") {
    const PointCloud c = random_cloud(77, 120, 4);
    check_same(knn(c, 8), brute_oracle(c, 8));
}
