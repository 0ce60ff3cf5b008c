#include "doctest.h"

#include <cmath>
#include <random>

#include <Eigen/Dense>

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

}  // namespace

TEST_CASE("two-state uniform chain has spectrum (1, 0)") {
    Eigen::MatrixXd p(2, 2);
    p << 0.5, 0.5, 0.5, 0.5;
    EigOptions eo;
    eo.m = 2;
    const SpectralDecomposition dec = eig_markov(chain_from_transition(p), eo);
    CHECK(dec.values(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dec.values(1) == doctest::Approx(0.0).epsilon(1e-12));
    // constant first eigenvector, unit in l2(pi)
    CHECK(dec.vectors(0, 0) == doctest::Approx(dec.vectors(1, 0)).epsilon(1e-12));
    CHECK(dec.vectors(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("two-state sticky chain has second eigenvalue 1/3") {
    Eigen::MatrixXd p(2, 2);
    p << 2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0;
    EigOptions eo;
    eo.m = 2;
    const SpectralDecomposition dec = eig_markov(chain_from_transition(p), eo);
    CHECK(dec.values(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dec.values(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("full decomposition reconstructs P") {
    const MarkovChain c = random_chain(5, 20);
    EigOptions eo;
    eo.m = 20;
    const SpectralDecomposition dec = eig_markov(c, eo);
    // P = sum_l lambda_l psi_l (psi_l .* pi)^T under the l2(pi) normalization
    Eigen::MatrixXd rec = Eigen::MatrixXd::Zero(20, 20);
    for (std::size_t l = 0; l < 20; ++l) {
        const Eigen::VectorXd psi = dec.vectors.col(static_cast<Eigen::Index>(l));
        const Eigen::VectorXd left = psi.cwiseProduct(c.pi);
        rec += dec.values(static_cast<Eigen::Index>(l)) * psi * left.transpose();
    }
    CHECK((rec - c.p_dense).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("eigenvectors are pi-orthonormal") {
    const MarkovChain c = random_chain(8, 25);
    EigOptions eo;
    eo.m = 10;
    const SpectralDecomposition dec = eig_markov(c, eo);
    for (std::size_t a = 0; a < 10; ++a)
        for (std::size_t b = 0; b <= a; ++b) {
            const double ip = (dec.vectors.col(static_cast<Eigen::Index>(a))
                                   .cwiseProduct(dec.vectors.col(static_cast<Eigen::Index>(b)))
                                   .cwiseProduct(c.pi))
                                  .sum();
            CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) <= 1e-8);
        }
}

TEST_CASE("right eigenvector residuals are small") {
    const MarkovChain c = random_chain(13, 30);
    EigOptions eo;
    eo.m = 12;
    const SpectralDecomposition dec = eig_markov(c, eo);
    for (std::size_t l = 0; l < 12; ++l) {
        const Eigen::VectorXd v = dec.vectors.col(static_cast<Eigen::Index>(l));
        const double res =
            (c.p_dense * v - dec.values(static_cast<Eigen::Index>(l)) * v).norm() / v.norm();
        CHECK(res <= 1e-8);
    }
    // descending order
    for (Eigen::Index l = 1; l < dec.values.size(); ++l)
        CHECK(dec.values(l) <= dec.values(l - 1) + 1e-12);
    CHECK(dec.values(0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("triangle graph symmetric laplacian spectrum") {
    // K3 with unit weights: L_sym eigenvalues 0, 3/2, 3/2
    PointCloud c;
    c.n = 3;
    c.dim = 2;
    const double s = std::sqrt(3.0) / 2.0;
    c.data = {0.0, 0.0, 1.0, 0.0, 0.5, s};
    const double sigma = 1e6;  // equilateral, so any sigma gives equal weights
    EigOptions eo;
    eo.m = 3;
    const SpectralDecomposition dec = eig_sym_laplacian(build_kernel(c, sigma), eo);
    CHECK(dec.values(0) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(dec.values(1) == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(dec.values(2) == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(dec.pi.size() == 0);
}

TEST_CASE("laplacian eigenvalues live in [0, 2] and start at 0") {
    const PointCloud c = random_cloud(21, 30, 2);
    EigOptions eo;
    eo.m = 30;
    const SpectralDecomposition dec = eig_sym_laplacian(build_kernel(c, 0.4), eo);
    CHECK(dec.values(0) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(dec.values.minCoeff() >= -1e-10);
    CHECK(dec.values.maxCoeff() <= 2.0 + 1e-10);
    for (Eigen::Index l = 1; l < dec.values.size(); ++l)
        CHECK(dec.values(l) >= dec.values(l - 1) - 1e-12);
}

TEST_CASE("sign convention and reruns are deterministic") {
    const MarkovChain c = random_chain(31, 24);
    EigOptions eo;
    eo.m = 8;
    const SpectralDecomposition a = eig_markov(c, eo);
    const SpectralDecomposition b = eig_markov(c, eo);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.vectors - b.vectors).cwiseAbs().maxCoeff() == 0.0);
    for (std::size_t l = 0; l < 8; ++l) {
        const Eigen::VectorXd v = a.vectors.col(static_cast<Eigen::Index>(l));
        const double sup = v.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (std::abs(v(i)) > 1e-12 * sup) {
                CHECK(v(i) > 0.0);
                break;
            }
        }
    }
}

TEST_CASE("lanczos agrees with the dense path") {
    const MarkovChain c = random_chain(41, 120);
    EigOptions dense_o;
    dense_o.m = 10;
    dense_o.method = EigOptions::Method::dense;
    EigOptions lanc_o;
    lanc_o.m = 10;
    lanc_o.method = EigOptions::Method::lanczos;
    const SpectralDecomposition d = eig_markov(c, dense_o);
    const SpectralDecomposition l = eig_markov(c, lanc_o);
    CHECK((d.values - l.values).cwiseAbs().maxCoeff() <= 1e-8);
    for (std::size_t k = 0; k < 10; ++k) {
        const Eigen::VectorXd vd = d.vectors.col(static_cast<Eigen::Index>(k));
        const Eigen::VectorXd vl = l.vectors.col(static_cast<Eigen::Index>(k));
        // eigenvalue collisions can rotate vectors; compare up to sign via
        // the pi-inner product magnitude
        const double ip = std::abs(vd.cwiseProduct(vl).cwiseProduct(c.pi).sum());
        CHECK(ip == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("m larger than n clamps") {
    const MarkovChain c = random_chain(51, 6);
    EigOptions eo;
    eo.m = 50;
    const SpectralDecomposition dec = eig_markov(c, eo);
    CHECK(dec.m() == 6);
}
