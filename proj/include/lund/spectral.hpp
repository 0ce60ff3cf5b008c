#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "lund/markov.hpp"

namespace lund {

// Truncated eigendecomposition.
//
// For eig_markov: values are the M largest eigenvalues of P in descending
// order (values[0] = 1), vectors are right eigenvectors of P normalized in
// l2(pi): sum_i psi(i)^2 pi_i = 1. The first eigenvector is constant.
//
// For eig_sym_laplacian: values are the M smallest eigenvalues of
// L_sym = I - D^-1/2 W D^-1/2 (self-loops stripped) in ascending order,
// vectors are l2-normalized.
//
// Sign convention for every eigenvector: the first component that is nonzero
// (above 1e-12 of the sup norm) is positive. Reruns on identical input are
// bit-identical.
struct SpectralDecomposition {
    Eigen::VectorXd values;   // M
    Eigen::MatrixXd vectors;  // n x M, column l = eigenvector l
    Eigen::VectorXd pi;       // markov flavor only; empty otherwise

    std::size_t m() const { return static_cast<std::size_t>(values.size()); }
    std::size_t n() const { return static_cast<std::size_t>(vectors.rows()); }
};

struct EigOptions {
    std::size_t m = 100;   // clamped to n with a warning
    double tol = 1e-8;     // per-pair residual ||A v - lambda v||_2
    enum class Method { automatic, dense, lanczos } method = Method::automatic;
    bool strict = true;    // false: return best effort instead of throwing
};

SpectralDecomposition eig_markov(const MarkovChain& chain, const EigOptions& opts = {});
SpectralDecomposition eig_sym_laplacian(const KernelGraph& graph,
                                        const EigOptions& opts = {});

// Dense symmetric eigensolver (LAPACK dsyevr), all pairs, values ascending.
// Exposed for oracles and diagnostics.
void dense_sym_eig(const Eigen::MatrixXd& a, Eigen::VectorXd& values,
                   Eigen::MatrixXd& vectors);

}  // namespace lund
