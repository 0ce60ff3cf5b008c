#include "doctest.h"

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "lund/diffusion.hpp"
#include "lund/errors.hpp"
#include "lund/markov.hpp"
#include "lund/rng.hpp"
#include "lund/spectral.hpp"

using namespace lund;

namespace {

PointCloud random_cloud(std::uint64_t seed, std::size_t n, std::size_t dim) {
    std::mt19937_64 g(seed);
    PointCloud c;
    c.n = n;
    c.dim = dim;
    c.data.resize(n * dim);
    for (auto& x : c.data) x = u01(g);
    return c;
}

MarkovChain random_chain(std::uint64_t seed, std::size_t n) {
    return build_chain(build_kernel(random_cloud(seed, n, 2), 0.5));
}

SpectralDecomposition full_dec(const MarkovChain& c) {
    EigOptions eo;
    eo.m = c.n;
    return eig_markov(c, eo);
}

}  // namespace

TEST_CASE("distance to self is zero") {
    const MarkovChain c = random_chain(2, 12);
    const DiffusionOperator op(full_dec(c), 5);
    for (std::size_t i = 0; i < 12; ++i) CHECK(op.distance(i, i) == 0.0);
}

TEST_CASE("t = 0 rows of the identity are sqrt(2) apart in counting measure") {
    const MarkovChain c = random_chain(3, 10);
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = i + 1; j < 10; ++j) {
            const double d = diffusion_distance_oracle(c, 0, i, j, Measure::counting);
            CHECK(d == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
        }
}

TEST_CASE("spectral distances match the power oracle") {
    const MarkovChain c = random_chain(7, 25);
    const SpectralDecomposition dec = full_dec(c);
    for (std::uint64_t t : {1ull, 3ull, 8ull}) {
        const DiffusionOperator op(dec, t, Measure::inverse_pi);
        const Eigen::MatrixXd pt = stochastic_power(c.p_dense, t);
        for (std::size_t i = 0; i < 25; i += 3)
            for (std::size_t j = i + 1; j < 25; j += 2) {
                const double ref =
                    diffusion_distance_from_power(pt, c.pi, i, j, Measure::inverse_pi);
                CHECK(op.distance(i, j) ==
                      doctest::Approx(ref).epsilon(1e-8));
            }
    }
}

TEST_CASE("embedding rows realize the distances") {
    const MarkovChain c = random_chain(11, 18);
    const DiffusionOperator op(full_dec(c), 4);
    REQUIRE(op.embedding_dim() == 17);
    for (std::size_t i = 0; i < 18; i += 2)
        for (std::size_t j = 1; j < 18; j += 3) {
            double s = 0.0;
            for (std::size_t k = 0; k < op.embedding_dim(); ++k) {
                const double diff = op.embedding_row(i)[k] - op.embedding_row(j)[k];
                s += diff * diff;
            }
            CHECK(std::sqrt(s) == doctest::Approx(op.distance(i, j)).epsilon(1e-10));
        }
}

TEST_CASE("pairwise matrix is symmetric and matches pointwise calls") {
    const MarkovChain c = random_chain(13, 15);
    const DiffusionOperator op(full_dec(c), 6);
    const Eigen::MatrixXd d = pairwise_diffusion(op);
    REQUIRE(d.rows() == 15);
    CHECK((d - d.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(d.diagonal().cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(d(2, 9) == doctest::Approx(op.distance(2, 9)).epsilon(1e-12));
    CHECK(d(0, 14) == doctest::Approx(op.distance(0, 14)).epsilon(1e-12));

    const std::vector<std::uint32_t> subset = {3, 7, 11};
    const Eigen::MatrixXd ds = pairwise_diffusion(op, subset);
    REQUIRE(ds.rows() == 3);
    CHECK(ds(0, 2) == doctest::Approx(op.distance(3, 11)).epsilon(1e-12));
}

TEST_CASE("triangle inequality holds") {
    const MarkovChain c = random_chain(17, 14);
    const DiffusionOperator op(full_dec(c), 3);
    for (std::size_t i = 0; i < 14; ++i)
        for (std::size_t j = 0; j < 14; ++j)
            for (std::size_t k = 0; k < 14; ++k)
                CHECK(op.distance(i, j) <=
                      op.distance(i, k) + op.distance(k, j) + 1e-12);
}

TEST_CASE("distances decay toward zero as t grows on a connected chain") {
    const MarkovChain c = random_chain(19, 16);
    const SpectralDecomposition dec = full_dec(c);
    double prev = 1e300;
    for (std::uint64_t t : {1ull, 4ull, 16ull, 64ull, 256ull}) {
        const DiffusionOperator op(dec, t);
        double maxd = 0.0;
        for (std::size_t i = 0; i < 16; ++i)
            for (std::size_t j = i + 1; j < 16; ++j)
                maxd = std::max(maxd, op.distance(i, j));
        CHECK(maxd <= prev + 1e-12);
        prev = maxd;
    }
    CHECK(prev <= 1e-6);
}

TEST_CASE("reducible two-block limit in counting measure") {
    // exactly reducible chain: in the t -> infinity limit rows converge to
    // the per-block stationary vectors, so cross-block distance approaches
    // sqrt(||pi_1||^2 + ||pi_2||^2)
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(5, 5);
    p.block(0, 0, 2, 2) << 0.5, 0.5, 0.5, 0.5;
    p.block(2, 2, 3, 3) << 0.4, 0.3, 0.3, 0.3, 0.4, 0.3, 0.3, 0.3, 0.4;
    const Eigen::MatrixXd pt = stochastic_power(p, 1u << 16);
    Eigen::VectorXd pi_dummy = Eigen::VectorXd::Constant(5, 0.2);
    const double d = diffusion_distance_from_power(pt, pi_dummy, 0, 3, Measure::counting);
    const double lim = std::sqrt(2 * 0.25 + 3 * (1.0 / 9.0));
    CHECK(d == doctest::Approx(lim).epsilon(1e-10));
}

TEST_CASE("attenuation is sign-correct and flushes underflow") {
    Eigen::VectorXd values(4);
    values << 1.0, 0.5, -0.5, 0.99;
    const Eigen::VectorXd a3 = spectral_attenuation(values, 3);
    CHECK(a3(0) == 1.0);
    CHECK(a3(1) == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(a3(2) == doctest::Approx(-0.125).epsilon(1e-14));
    CHECK(a3(3) == doctest::Approx(std::pow(0.99, 3)).epsilon(1e-12));

    const Eigen::VectorXd a_huge = spectral_attenuation(values, 1000000000000ull);
    CHECK(a_huge(0) == 1.0);
    CHECK(a_huge(1) == 0.0);  // 0.5^1e12 underflows, flushed
    CHECK(a_huge(2) == 0.0);
    CHECK(a_huge(3) == 0.0);  // 0.99^1e12 ~ 1e-4365796

    const Eigen::VectorXd a0 = spectral_attenuation(values, 0);
    CHECK(a0(1) == 1.0);
    CHECK(a0(2) == 1.0);
}

TEST_CASE("stochastic_power matches repeated multiplication") {
    const MarkovChain c = random_chain(23, 9);
    Eigen::MatrixXd ref = Eigen::MatrixXd::Identity(9, 9);
    for (int i = 0; i < 13; ++i) ref *= c.p_dense;
    CHECK((stochastic_power(c.p_dense, 13) - ref).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK((stochastic_power(c.p_dense, 0) - Eigen::MatrixXd::Identity(9, 9))
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK_THROWS_AS(stochastic_power(c.p_dense, (1ull << 16) + 1),
                    UnsupportedParameterError);
}

TEST_CASE("truncated spectrum underestimates but tracks the oracle") {
    const MarkovChain c = random_chain(29, 40);
    EigOptions eo;
    eo.m = 12;
    const SpectralDecomposition dec = eig_markov(c, eo);
    const DiffusionOperator op(dec, 32);
    const Eigen::MatrixXd pt = stochastic_power(c.p_dense, 32);
    for (std::size_t i = 0; i < 40; i += 7)
        for (std::size_t j = 3; j < 40; j += 11) {
            if (i == j) continue;
            const double ref =
                diffusion_distance_from_power(pt, c.pi, i, j, Measure::inverse_pi);
            const double trunc = op.distance(i, j);
            CHECK(trunc <= ref + 1e-10);          // dropping terms only shrinks
            CHECK(trunc == doctest::Approx(ref).epsilon(1e-3));  // tail decayed at t=32
        }
}
