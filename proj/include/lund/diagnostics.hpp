#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lund/markov.hpp"

namespace lund {

// Assignment of states to blocks. Blocks must be nonempty, disjoint, covering.
struct Partition {
    std::vector<std::uint32_t> block_of;             // state -> block in [0, k)
    std::vector<std::vector<std::uint32_t>> blocks;  // index sets, ascending

    std::size_t n() const { return block_of.size(); }
    std::size_t k() const { return blocks.size(); }
    void validate() const;

    // arbitrary label values; blocks ordered by ascending label
    static Partition from_labels(const std::vector<int>& labels);
};

// Per-block stochastic complements S_kk, their stationary vectors, and the
// assembled S / S^inf in original index order. The watched chain on block k
// absorbs excursions through the rest of the graph:
//   S_kk = P_kk + P_k* (I - P_*)^{-1} P_*k.
struct ReducedChain {
    Partition partition;
    std::vector<Eigen::MatrixXd> s_blocks;   // block-local index order
    std::vector<Eigen::VectorXd> pi_blocks;  // stationary of each S_kk
    Eigen::MatrixXd s;      // n x n, zero across blocks
    Eigen::MatrixXd s_inf;  // rows: pi of own block, zero elsewhere

    Eigen::Index n() const { return s.rows(); }
};

ReducedChain stochastic_complement(const MarkovChain& chain, const Partition& partition);

// The three constants of the near-reducibility bound and every curve the
// experiment figures need, on a shared t grid.
struct MesoscopicReport {
    double delta = 0.0;      // 2 max_k ||P_k*||_inf
    double kappa = 1.0;      // ||Z||_inf ||Z^-1||_inf, blockwise diagonalizer
    double lambda_k1 = 0.0;  // largest non-unit eigenvalue modulus of S

    std::vector<std::uint64_t> t_grid;
    std::vector<double> bound_curve;      // t delta + kappa lambda_k1^t
    std::vector<double> empirical_curve;  // ||P^t - S^inf||_inf (maybe row-sampled)
    std::vector<double> gamma_curve;
    std::vector<double> dtin_curve;   // counting-measure D_t^in
    std::vector<double> dtbtw_curve;  // counting-measure D_t^btw
    bool row_sampled = false;         // true: empirical/gamma/D are lower/upper
                                      // approximations from a row subsample

    // [ln(2 kappa / eps) / ln(1 / lambda_k1), eps / (2 delta)]
    std::pair<double, double> time_window(double eps) const;
};

// Default grid: half-decades 10^0 .. 10^16, rounded to integers, deduplicated.
std::vector<std::uint64_t> default_t_grid();

// t_grid must be nonempty (default_t_grid() gives the usual half-decades).
// subsample = 0: all rows when n <= 1024, else 512 seeded rows.
MesoscopicReport mesoscopic_report(const MarkovChain& chain, const Partition& partition,
                                   const std::vector<std::uint64_t>& t_grid,
                                   std::size_t subsample = 0);

std::string to_json(const MesoscopicReport& report);

// Rowwise l1-vs-l2 balance of P^t - S^inf, in [1, sqrt(n)]. Rows with zero
// difference contribute the limit value 1.
double gamma(const MarkovChain& chain, const ReducedChain& reduced, std::uint64_t t);

// max_{i,j} |P^t_ij - pi_j| / pi_j
double relative_pointwise_distance(const MarkovChain& chain, std::uint64_t t);

// Exact minimum over all nonempty proper subsets; n <= 20.
double conductance_bruteforce(const MarkovChain& chain);

struct Theorem11Report {
    bool window_ok = false;  // t strictly inside the admissible window
    double window_lo = 0.0;
    double window_hi = 0.0;
    double epsilon = 0.0;
    double gamma_t = 0.0;
    double dtin = 0.0;   // counting measure
    double dtbtw = 0.0;  // counting measure
    double min_sinf_norm = 0.0;
    double bound_in = 0.0;   // 2 eps gamma / sqrt(n)
    double bound_btw = 0.0;  // 2 min ||s_inf row|| - bound_in
    double slack_in = 0.0;   // bound_in - dtin
    double slack_btw = 0.0;  // dtbtw - bound_btw
    bool holds_in = false;
    bool holds_btw = false;
};

// Checks the within/between diffusion-distance bounds at time t for the
// given epsilon. When t falls outside the admissible window the check is
// skipped (window_ok = false) and only the window fields are meaningful.
Theorem11Report theorem11_verify(const MarkovChain& chain, const Partition& partition,
                                 std::uint64_t t, double epsilon);

// P^t - S^t == sum_{i=1..t} S^{t-i} (P - S) P^{i-1}, max-norm residual 1e-10.
bool telescoping_identity_check(const MarkovChain& chain, const ReducedChain& reduced,
                                std::uint64_t t);

}  // namespace lund
