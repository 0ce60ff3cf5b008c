#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "lund/csr.hpp"
#include "lund/neighbors.hpp"
#include "lund/point_cloud.hpp"

namespace lund {

enum class GraphMode { dense, sparse };

// Gaussian kernel graph. W_ij = exp(-d(x_i,x_j)^2 / sigma^2) for i != j and
// W_ii = 1. Dense mode stores the full matrix; sparse mode stores the
// symmetrized union of the kNN supports plus the diagonal.
struct KernelGraph {
    GraphMode mode = GraphMode::dense;
    double sigma = 0.0;
    std::size_t n = 0;
    Eigen::MatrixXd w_dense;
    Csr w_sparse;
};

KernelGraph build_kernel(const PointCloud& cloud, double sigma);
KernelGraph build_kernel(const PointCloud& cloud, double sigma,
                         const NeighborList& neighbors);

// Row-stochastic random walk P = D^-1 W with stationary distribution
// pi = degree / total degree. Construction verifies row sums, stationarity,
// and connectivity of the support; disconnected graphs are rejected.
struct MarkovChain {
    GraphMode mode = GraphMode::dense;
    std::size_t n = 0;
    Eigen::MatrixXd p_dense;
    Csr p_sparse;
    Eigen::VectorXd pi;
    bool reversible = false;

    Eigen::MatrixXd dense_p() const;          // densifies sparse storage
    void matvec(const double* x, double* y) const;  // y = P x
};

MarkovChain build_chain(const KernelGraph& graph);

// Wraps an explicit row-stochastic matrix (rows must sum to 1 within 1e-12).
// With require_irreducible=false a reducible matrix is accepted; its pi is
// then merely *a* stationary distribution.
MarkovChain chain_from_transition(const Eigen::MatrixXd& p,
                                  bool require_irreducible = true);

// (P + I) / 2. Keeps pi, makes every holding probability >= 1/2.
MarkovChain lazify(const MarkovChain& chain);

}  // namespace lund
