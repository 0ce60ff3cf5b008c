#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "lund/markov.hpp"
#include "lund/spectral.hpp"

namespace lund {

// Measure weighting the l2 norm over rows of P^t: nu = 1 (counting) or
// nu = 1/pi (the weighting under which the spectral sum is exact).
enum class Measure { counting, inverse_pi };

// Distances D_t(x,y) between rows of P^t, evaluated through the truncated
// eigendecomposition. Time enters as attenuation a_l = lambda_l^t computed in
// the log domain so t up to 1e16 neither overflows nor loses the sign of
// negative eigenvalues; values below the representable range flush to 0.
// The constant eigenvector contributes nothing and is skipped.
class DiffusionOperator {
public:
    DiffusionOperator(const SpectralDecomposition& dec, std::uint64_t t,
                      Measure measure = Measure::inverse_pi);

    double distance(std::size_t i, std::size_t j) const;

    std::uint64_t t() const { return t_; }
    Measure measure() const { return measure_; }
    std::size_t n() const { return n_; }
    std::size_t m() const { return attenuation_.size(); }

    // a_l for l = 1..M (a_1 == 1)
    const std::vector<double>& attenuation() const { return attenuation_; }

    // Row-major point coordinates such that distance(i,j) is the plain
    // Euclidean distance between rows. dim = M - 1.
    const double* embedding_row(std::size_t i) const {
        return embedding_.data() + i * dim_;
    }
    std::size_t embedding_dim() const { return dim_; }

private:
    std::size_t n_ = 0;
    std::size_t dim_ = 0;
    std::uint64_t t_ = 0;
    Measure measure_ = Measure::inverse_pi;
    std::vector<double> attenuation_;
    std::vector<double> embedding_;  // n * dim_
};

// Symmetric distance matrix over `subset` (empty = all points).
Eigen::MatrixXd pairwise_diffusion(const DiffusionOperator& op,
                                   const std::vector<std::uint32_t>& subset = {});

// lambda^t in the log domain for each eigenvalue: sign-correct for negative
// lambda, clamped to [-1,1] before powering, flushed to 0 below the
// representable range. values[0] is pinned to 1 (the stationary eigenvalue).
Eigen::VectorXd spectral_attenuation(const Eigen::VectorXd& values, std::uint64_t t);

// P^t by repeated squaring. Oracle-grade reference, t <= 2^16.
Eigen::MatrixXd stochastic_power(const Eigen::MatrixXd& p, std::uint64_t t);

// Definition-level diffusion distance straight from rows of P^t.
double diffusion_distance_oracle(const MarkovChain& chain, std::uint64_t t,
                                 std::size_t i, std::size_t j, Measure measure);

// Same, reusing a precomputed P^t (rows i and j of `pt`).
double diffusion_distance_from_power(const Eigen::MatrixXd& pt, const Eigen::VectorXd& pi,
                                     std::size_t i, std::size_t j, Measure measure);

}  // namespace lund
