#include "lund/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "json.hpp"
#include "lund/diffusion.hpp"
#include "lund/errors.hpp"
#include "lund/rng.hpp"
#include "lund/simd.hpp"
#include "lund/spectral.hpp"
#include "lund/thread_pool.hpp"

namespace lund {

namespace {

constexpr std::size_t kDenseLimit = 4096;
constexpr double kStochasticTol = 1e-10;

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::MatrixXd dense_p_checked(const MarkovChain& chain) {
    if (chain.n > kDenseLimit)
        throw UnsupportedSizeError("diagnostics: dense transition matrix capped at 4096");
    return chain.dense_p();
}

// lambda^t for lambda in [0,1), log-domain
double pow_t(double lambda, std::uint64_t t) {
    if (t == 0) return 1.0;
    if (lambda <= 0.0) return 0.0;
    if (lambda >= 1.0) return 1.0;
    const double e = static_cast<double>(t) * std::log(lambda);
    return e <= -745.0 ? 0.0 : std::exp(e);
}

// strong connectivity + aperiodicity of a block's support
void check_primitive(const Eigen::MatrixXd& s) {
    const Eigen::Index m = s.rows();
    if (m == 1) return;  // scalar block: S = [1], absorbing and primitive
    auto reachable = [&](bool transpose) {
        std::vector<char> seen(static_cast<std::size_t>(m), 0);
        std::vector<Eigen::Index> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const Eigen::Index u = stack.back();
            stack.pop_back();
            for (Eigen::Index v = 0; v < m; ++v) {
                const double w = transpose ? s(v, u) : s(u, v);
                if (w > 0.0 && !seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = 1;
                    stack.push_back(v);
                }
            }
        }
        return std::count(seen.begin(), seen.end(), 1) == m;
    };
    if (!reachable(false) || !reachable(true))
        throw UnsupportedChainError("stochastic complement block is not irreducible");
    // period via BFS levels: gcd over edges of d(u) + 1 - d(v)
    std::vector<long> depth(static_cast<std::size_t>(m), -1);
    std::vector<Eigen::Index> queue{0};
    depth[0] = 0;
    long g = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const Eigen::Index u = queue[head];
        for (Eigen::Index v = 0; v < m; ++v) {
            if (s(u, v) <= 0.0) continue;
            if (depth[static_cast<std::size_t>(v)] < 0) {
                depth[static_cast<std::size_t>(v)] =
                    depth[static_cast<std::size_t>(u)] + 1;
                queue.push_back(v);
            } else {
                g = std::gcd(g, depth[static_cast<std::size_t>(u)] + 1 -
                                    depth[static_cast<std::size_t>(v)]);
            }
        }
    }
    if (std::abs(g) != 1)
        throw UnsupportedChainError("stochastic complement block is periodic");
}

// stationary vector by bordered solve: v^T S = v^T, sum v = 1
Eigen::VectorXd stationary_of(const Eigen::MatrixXd& s) {
    const Eigen::Index m = s.rows();
    if (m == 1) return Eigen::VectorXd::Ones(1);
    Eigen::MatrixXd a = s.transpose() - Eigen::MatrixXd::Identity(m, m);
    a.row(m - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    rhs[m - 1] = 1.0;
    Eigen::VectorXd v = Eigen::FullPivLU<Eigen::MatrixXd>(a).solve(rhs);
    for (Eigen::Index i = 0; i < m; ++i) v[i] = std::max(v[i], 0.0);
    const double total = v.sum();
    if (!(total > 0.0))
        throw NumericalError("stochastic complement: stationary solve degenerate");
    v /= total;
    const double res = ((s.transpose() * v) - v).cwiseAbs().maxCoeff();
    if (res > kStochasticTol)
        throw NumericalError("stochastic complement: pi S != pi beyond tolerance");
    return v;
}

struct BlockSpectra {
    double kappa = 1.0;
    double lambda_k1 = 0.0;
};

// Blockwise diagonalizer: symmetric conjugate when the block is reversible
// w.r.t. its stationary vector, dense general eigensolver otherwise.
BlockSpectra block_spectra(const ReducedChain& rc) {
    double z_norm = 0.0, zinv_norm = 0.0, lam = 0.0;
    for (std::size_t k = 0; k < rc.s_blocks.size(); ++k) {
        const Eigen::MatrixXd& s = rc.s_blocks[k];
        const Eigen::VectorXd& pik = rc.pi_blocks[k];
        const Eigen::Index m = s.rows();
        if (m == 1) {
            z_norm = std::max(z_norm, 1.0);
            zinv_norm = std::max(zinv_norm, 1.0);
            continue;
        }
        double rev_err = 0.0;
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = i + 1; j < m; ++j)
                rev_err = std::max(rev_err,
                                   std::abs(pik[i] * s(i, j) - pik[j] * s(j, i)));
        if (rev_err <= 1e-9 && pik.minCoeff() > 0.0) {
            const Eigen::VectorXd sq = pik.cwiseSqrt();
            Eigen::MatrixXd a = sq.asDiagonal() * s * sq.cwiseInverse().asDiagonal();
            a = 0.5 * (a + a.transpose());
            Eigen::VectorXd values;
            Eigen::MatrixXd vectors;
            dense_sym_eig(a, values, vectors);  // ascending
            lam = std::max(lam, std::max(std::abs(values[0]),
                                         std::abs(values[m - 2])));
            if (values[m - 1] < 1.0 - 1e-8)
                throw NumericalError("complement block lost its unit eigenvalue");
            const Eigen::MatrixXd z = sq.cwiseInverse().asDiagonal() * vectors;
            const Eigen::MatrixXd zinv = vectors.transpose() * sq.asDiagonal();
            z_norm = std::max(z_norm, z.cwiseAbs().rowwise().sum().maxCoeff());
            zinv_norm = std::max(zinv_norm, zinv.cwiseAbs().rowwise().sum().maxCoeff());
        } else {
            Eigen::EigenSolver<Eigen::MatrixXd> es(s);
            if (es.info() != Eigen::Success)
                throw NumericalError("complement block eigendecomposition failed");
            const Eigen::VectorXcd vals = es.eigenvalues();
            const Eigen::MatrixXcd z = es.eigenvectors();
            Eigen::FullPivLU<Eigen::MatrixXcd> lu(z);
            if (!lu.isInvertible())
                throw NumericalError("complement block is not diagonalizable");
            const Eigen::MatrixXcd zinv = lu.inverse();
            Eigen::Index unit = 0;
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < m; ++i) {
                const double d = std::abs(vals[i] - std::complex<double>(1.0, 0.0));
                if (d < best) {
                    best = d;
                    unit = i;
                }
            }
            if (best > 1e-8)
                throw NumericalError("complement block lost its unit eigenvalue");
            for (Eigen::Index i = 0; i < m; ++i)
                if (i != unit) lam = std::max(lam, std::abs(vals[i]));
            z_norm = std::max(z_norm, z.cwiseAbs().rowwise().sum().maxCoeff());
            zinv_norm = std::max(zinv_norm, zinv.cwiseAbs().rowwise().sum().maxCoeff());
        }
    }
    BlockSpectra out;
    out.kappa = std::max(1.0, z_norm * zinv_norm);
    if (lam >= 1.0)
        throw UnsupportedChainError("complement spectrum reaches 1: block not primitive");
    out.lambda_k1 = lam;
    return out;
}

// Rows of P^t at arbitrary t: spectral reconstruction for reversible chains,
// explicit powering (t <= 2^16) otherwise.
class TransitionRows {
public:
    explicit TransitionRows(const MarkovChain& chain) : chain_(chain) {
        if (chain.reversible && chain.n <= kDenseLimit) {
            EigOptions eo;
            eo.m = chain.n;
            dec_ = eig_markov(chain, eo);
            b_ = dec_.vectors;
            for (Eigen::Index l = 0; l < b_.cols(); ++l)
                b_.col(l) = dec_.vectors.col(l).cwiseProduct(dec_.pi);
            spectral_ = true;
        }
    }

    bool spectral() const { return spectral_; }

    RowMat rows(const std::vector<std::uint32_t>& idx, std::uint64_t t) const {
        const Eigen::Index r = static_cast<Eigen::Index>(idx.size());
        if (spectral_) {
            const Eigen::VectorXd att = spectral_attenuation(dec_.values, t);
            Eigen::MatrixXd u(r, dec_.vectors.cols());
            for (Eigen::Index i = 0; i < r; ++i)
                u.row(i) = dec_.vectors.row(static_cast<Eigen::Index>(idx[
                    static_cast<std::size_t>(i)]));
            RowMat out = (u * att.asDiagonal()) * b_.transpose();
            return out;
        }
        const Eigen::MatrixXd pt = stochastic_power(dense_p_checked(chain_), t);
        RowMat out(r, pt.cols());
        for (Eigen::Index i = 0; i < r; ++i)
            out.row(i) = pt.row(static_cast<Eigen::Index>(idx[
                static_cast<std::size_t>(i)]));
        return out;
    }

private:
    const MarkovChain& chain_;
    SpectralDecomposition dec_;
    Eigen::MatrixXd b_;  // psi_l .* pi columns
    bool spectral_ = false;
};

std::vector<std::uint32_t> all_rows(std::size_t n) {
    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    return idx;
}

std::vector<std::uint32_t> sample_rows(std::size_t n, std::size_t want,
                                       std::uint64_t seed) {
    std::vector<std::uint32_t> idx = all_rows(n);
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < want; ++i) {
        const std::size_t j =
            i + static_cast<std::size_t>(u01(rng) * static_cast<double>(n - i));
        std::swap(idx[i], idx[std::min(j, n - 1)]);
    }
    idx.resize(want);
    std::sort(idx.begin(), idx.end());
    return idx;
}

// gamma over the given rows of P^t - S^inf; zero rows contribute 1
double gamma_of_rows(const RowMat& diff) {
    const Eigen::Index n = diff.cols();
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    double best = 1.0;
    for (Eigen::Index i = 0; i < diff.rows(); ++i) {
        const double l2 = diff.row(i).norm();
        if (l2 == 0.0) continue;
        double acc = 0.0;
        for (Eigen::Index u = 0; u < n; ++u) {
            const double d = std::abs(diff(i, u)) / l2 - inv_sqrt_n;
            acc += d * d;
        }
        const double denom = 1.0 - 0.5 * acc;
        if (!(denom > 0.0))
            throw NumericalError("gamma: balance denominator not positive");
        best = std::max(best, 1.0 / denom);
    }
    return std::min(best, std::sqrt(static_cast<double>(n)));
}

struct DtPair {
    double in = 0.0;
    double btw = std::numeric_limits<double>::quiet_NaN();
};

// counting-measure within/between distances over the sampled rows
DtPair dt_curves(const RowMat& rows_pt, const std::vector<std::uint32_t>& idx,
                 const Partition& part) {
    DtPair out;
    const std::size_t r = idx.size();
    const std::size_t n = static_cast<std::size_t>(rows_pt.cols());
    double btw = std::numeric_limits<double>::infinity();
    bool any_btw = false;
    for (std::size_t a = 0; a < r; ++a) {
        for (std::size_t b = a + 1; b < r; ++b) {
            const double d2 = simd::active().sqdist(
                rows_pt.data() + a * n, rows_pt.data() + b * n, n);
            if (part.block_of[idx[a]] == part.block_of[idx[b]]) {
                out.in = std::max(out.in, d2);
            } else {
                btw = std::min(btw, d2);
                any_btw = true;
            }
        }
    }
    out.in = std::sqrt(out.in);
    if (any_btw) out.btw = std::sqrt(btw);
    return out;
}

}  // namespace

void Partition::validate() const {
    if (blocks.empty()) throw InvalidParameterError("partition: no blocks");
    std::vector<char> seen(block_of.size(), 0);
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        if (blocks[k].empty()) throw InvalidParameterError("partition: empty block");
        for (std::uint32_t i : blocks[k]) {
            if (i >= block_of.size() || block_of[i] != k || seen[i])
                throw InvalidParameterError("partition: blocks are inconsistent");
            seen[i] = 1;
        }
    }
    if (std::count(seen.begin(), seen.end(), 1) !=
        static_cast<std::ptrdiff_t>(block_of.size()))
        throw InvalidParameterError("partition: blocks do not cover all states");
}

Partition Partition::from_labels(const std::vector<int>& labels) {
    if (labels.empty()) throw InvalidParameterError("partition: empty labels");
    std::map<int, std::uint32_t> dense;
    for (int v : labels) dense.emplace(v, 0);
    std::uint32_t next = 0;
    for (auto& [v, id] : dense) id = next++;
    Partition p;
    p.block_of.resize(labels.size());
    p.blocks.resize(dense.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const std::uint32_t k = dense.at(labels[i]);
        p.block_of[i] = k;
        p.blocks[k].push_back(static_cast<std::uint32_t>(i));
    }
    p.validate();
    return p;
}

ReducedChain stochastic_complement(const MarkovChain& chain, const Partition& partition) {
    partition.validate();
    if (partition.n() != chain.n)
        throw InvalidParameterError("stochastic_complement: partition size mismatch");
    const Eigen::MatrixXd p = dense_p_checked(chain);
    const Eigen::Index n = p.rows();

    ReducedChain rc;
    rc.partition = partition;
    rc.s = Eigen::MatrixXd::Zero(n, n);
    rc.s_inf = Eigen::MatrixXd::Zero(n, n);

    for (std::size_t k = 0; k < partition.k(); ++k) {
        const auto& blk = partition.blocks[k];
        const Eigen::Index nk = static_cast<Eigen::Index>(blk.size());
        std::vector<std::uint32_t> comp;
        comp.reserve(static_cast<std::size_t>(n) - blk.size());
        for (std::uint32_t i = 0; i < static_cast<std::uint32_t>(n); ++i)
            if (partition.block_of[i] != k) comp.push_back(i);
        const Eigen::Index nc = static_cast<Eigen::Index>(comp.size());

        Eigen::MatrixXd p_kk(nk, nk), p_kc(nk, nc), p_ck(nc, nk), p_cc(nc, nc);
        for (Eigen::Index a = 0; a < nk; ++a)
            for (Eigen::Index b = 0; b < nk; ++b)
                p_kk(a, b) = p(blk[static_cast<std::size_t>(a)],
                               blk[static_cast<std::size_t>(b)]);
        for (Eigen::Index a = 0; a < nk; ++a)
            for (Eigen::Index b = 0; b < nc; ++b)
                p_kc(a, b) = p(blk[static_cast<std::size_t>(a)],
                               comp[static_cast<std::size_t>(b)]);
        for (Eigen::Index a = 0; a < nc; ++a)
            for (Eigen::Index b = 0; b < nk; ++b)
                p_ck(a, b) = p(comp[static_cast<std::size_t>(a)],
                               blk[static_cast<std::size_t>(b)]);
        for (Eigen::Index a = 0; a < nc; ++a)
            for (Eigen::Index b = 0; b < nc; ++b)
                p_cc(a, b) = p(comp[static_cast<std::size_t>(a)],
                               comp[static_cast<std::size_t>(b)]);

        Eigen::MatrixXd s_kk;
        if (nc == 0 || p_kc.cwiseAbs().maxCoeff() == 0.0) {
            s_kk = p_kk;  // no excursions leave the block
        } else {
            const Eigen::MatrixXd m =
                Eigen::MatrixXd::Identity(nc, nc) - p_cc;
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
            const Eigen::MatrixXd x = lu.solve(p_ck);
            const double res = (m * x - p_ck).cwiseAbs().maxCoeff();
            if (!(res <= 1e-8))
                throw NumericalError(
                    "stochastic_complement: I - P_* is numerically singular");
            s_kk = p_kk + p_kc * x;
        }

        for (Eigen::Index a = 0; a < nk; ++a) {
            const double rs = s_kk.row(a).sum();
            if (std::abs(rs - 1.0) > kStochasticTol)
                throw NumericalError("stochastic_complement: block row sum drifted");
            if (s_kk.row(a).minCoeff() < -kStochasticTol)
                throw NumericalError("stochastic_complement: negative block entry");
        }
        check_primitive(s_kk);
        const Eigen::VectorXd pik = stationary_of(s_kk);

        for (Eigen::Index a = 0; a < nk; ++a) {
            for (Eigen::Index b = 0; b < nk; ++b) {
                rc.s(blk[static_cast<std::size_t>(a)], blk[static_cast<std::size_t>(b)]) =
                    s_kk(a, b);
                rc.s_inf(blk[static_cast<std::size_t>(a)],
                         blk[static_cast<std::size_t>(b)]) = pik[b];
            }
        }
        rc.s_blocks.push_back(std::move(s_kk));
        rc.pi_blocks.push_back(pik);
    }
    return rc;
}

std::vector<std::uint64_t> default_t_grid() {
    std::vector<std::uint64_t> grid;
    for (int j = 0; j <= 32; ++j) {
        const double v = std::pow(10.0, static_cast<double>(j) / 2.0);
        const std::uint64_t t = static_cast<std::uint64_t>(std::llround(v));
        if (grid.empty() || grid.back() != t) grid.push_back(t);
    }
    return grid;
}

std::pair<double, double> MesoscopicReport::time_window(double eps) const {
    if (!(eps > 0.0)) throw InvalidParameterError("time_window: eps must be positive");
    const double lo = lambda_k1 > 0.0
                          ? std::log(2.0 * kappa / eps) / std::log(1.0 / lambda_k1)
                          : 0.0;
    const double hi = delta > 0.0 ? eps / (2.0 * delta)
                                  : std::numeric_limits<double>::infinity();
    return {lo, hi};
}

MesoscopicReport mesoscopic_report(const MarkovChain& chain, const Partition& partition,
                                   const std::vector<std::uint64_t>& t_grid,
                                   std::size_t subsample) {
    if (t_grid.empty()) throw InvalidParameterError("mesoscopic_report: empty t grid");
    const ReducedChain rc = stochastic_complement(chain, partition);
    const Eigen::MatrixXd p = dense_p_checked(chain);
    const std::size_t n = chain.n;

    MesoscopicReport rep;
    rep.t_grid = t_grid;

    double max_off = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        double off = 0.0;
        for (Eigen::Index j = 0; j < p.cols(); ++j)
            if (partition.block_of[static_cast<std::size_t>(j)] !=
                partition.block_of[static_cast<std::size_t>(i)])
                off += std::abs(p(i, j));
        max_off = std::max(max_off, off);
    }
    rep.delta = 2.0 * max_off;

    const BlockSpectra bs = block_spectra(rc);
    rep.kappa = bs.kappa;
    rep.lambda_k1 = bs.lambda_k1;

    std::size_t want = subsample == 0 ? (n <= 1024 ? n : 512) : std::min(subsample, n);
    const std::vector<std::uint32_t> rows =
        want == n ? all_rows(n) : sample_rows(n, want, 0xd1a6u);
    rep.row_sampled = rows.size() < n;

    const TransitionRows tr(chain);
    RowMat sinf_rows(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
    for (std::size_t a = 0; a < rows.size(); ++a)
        sinf_rows.row(static_cast<Eigen::Index>(a)) =
            rc.s_inf.row(static_cast<Eigen::Index>(rows[a]));

    const std::size_t nt = t_grid.size();
    rep.bound_curve.assign(nt, 0.0);
    rep.empirical_curve.assign(nt, 0.0);
    rep.gamma_curve.assign(nt, 0.0);
    rep.dtin_curve.assign(nt, 0.0);
    rep.dtbtw_curve.assign(nt, 0.0);

    parallel_for(nt, [&](std::size_t ti) {
        const std::uint64_t t = t_grid[ti];
        const RowMat rt = tr.rows(rows, t);
        const RowMat diff = rt - sinf_rows;
        rep.bound_curve[ti] = static_cast<double>(t) * rep.delta +
                              rep.kappa * pow_t(rep.lambda_k1, t);
        rep.empirical_curve[ti] = diff.cwiseAbs().rowwise().sum().maxCoeff();
        rep.gamma_curve[ti] = gamma_of_rows(diff);
        const DtPair dt = dt_curves(rt, rows, partition);
        rep.dtin_curve[ti] = dt.in;
        rep.dtbtw_curve[ti] = dt.btw;
    });
    return rep;
}

std::string to_json(const MesoscopicReport& report) {
    nlohmann::json j;
    j["delta"] = report.delta;
    j["kappa"] = report.kappa;
    j["lambda_k1"] = report.lambda_k1;
    j["row_sampled"] = report.row_sampled;
    j["t"] = report.t_grid;
    j["bound"] = report.bound_curve;
    j["empirical"] = report.empirical_curve;
    j["gamma"] = report.gamma_curve;
    j["dtin"] = report.dtin_curve;
    j["dtbtw"] = report.dtbtw_curve;
    return j.dump(2);
}

double gamma(const MarkovChain& chain, const ReducedChain& reduced, std::uint64_t t) {
    if (reduced.n() != static_cast<Eigen::Index>(chain.n))
        throw InvalidParameterError("gamma: chain/reduction size mismatch");
    const TransitionRows tr(chain);
    const std::vector<std::uint32_t> rows = all_rows(chain.n);
    const RowMat diff = tr.rows(rows, t) - RowMat(reduced.s_inf);
    return gamma_of_rows(diff);
}

double relative_pointwise_distance(const MarkovChain& chain, std::uint64_t t) {
    const TransitionRows tr(chain);
    const RowMat rt = tr.rows(all_rows(chain.n), t);
    double delta = 0.0;
    for (Eigen::Index i = 0; i < rt.rows(); ++i)
        for (Eigen::Index j = 0; j < rt.cols(); ++j)
            delta = std::max(delta, std::abs(rt(i, j) - chain.pi[j]) / chain.pi[j]);
    return delta;
}

double conductance_bruteforce(const MarkovChain& chain) {
    const std::size_t n = chain.n;
    if (n > 20)
        throw UnsupportedSizeError("conductance_bruteforce: 2^n scan capped at n = 20");
    if (n < 2) throw InvalidParameterError("conductance_bruteforce: need >= 2 states");
    const Eigen::MatrixXd p = dense_p_checked(chain);
    const Eigen::VectorXd& pi = chain.pi;
    double best = std::numeric_limits<double>::infinity();
    const std::uint32_t full = (1u << n) - 1;
    for (std::uint32_t mask = 1; mask < full; ++mask) {
        double flow = 0.0, pis = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(mask & (1u << i))) continue;
            pis += pi[static_cast<Eigen::Index>(i)];
            for (std::size_t j = 0; j < n; ++j)
                if (!(mask & (1u << j)))
                    flow += pi[static_cast<Eigen::Index>(i)] *
                            p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        const double denom = std::min(pis, 1.0 - pis);
        if (denom > 0.0) best = std::min(best, flow / denom);
    }
    return best;
}

Theorem11Report theorem11_verify(const MarkovChain& chain, const Partition& partition,
                                 std::uint64_t t, double epsilon) {
    if (!(epsilon > 0.0))
        throw InvalidParameterError("theorem11_verify: epsilon must be positive");
    if (partition.k() < 2)
        throw InvalidParameterError("theorem11_verify: need >= 2 blocks");
    const ReducedChain rc = stochastic_complement(chain, partition);
    const Eigen::MatrixXd p = dense_p_checked(chain);
    const std::size_t n = chain.n;

    double max_off = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        double off = 0.0;
        for (Eigen::Index j = 0; j < p.cols(); ++j)
            if (partition.block_of[static_cast<std::size_t>(j)] !=
                partition.block_of[static_cast<std::size_t>(i)])
                off += std::abs(p(i, j));
        max_off = std::max(max_off, off);
    }
    const double delta = 2.0 * max_off;
    const BlockSpectra bs = block_spectra(rc);

    Theorem11Report rep;
    rep.epsilon = epsilon;
    rep.window_lo = bs.lambda_k1 > 0.0
                        ? std::log(2.0 * bs.kappa / epsilon) /
                              std::log(1.0 / bs.lambda_k1)
                        : 0.0;
    rep.window_hi = delta > 0.0 ? epsilon / (2.0 * delta)
                                : std::numeric_limits<double>::infinity();
    const double td = static_cast<double>(t);
    rep.window_ok = td > rep.window_lo && td < rep.window_hi;
    if (!rep.window_ok) {
        std::cerr << "theorem11_verify: t = " << t << " outside window ("
                  << rep.window_lo << ", " << rep.window_hi << "); check skipped\n";
        rep.gamma_t = rep.dtin = rep.dtbtw = rep.bound_in = rep.bound_btw =
            rep.slack_in = rep.slack_btw = std::numeric_limits<double>::quiet_NaN();
        return rep;
    }

    const TransitionRows tr(chain);
    const std::vector<std::uint32_t> rows = all_rows(n);
    const RowMat rt = tr.rows(rows, t);
    rep.gamma_t = gamma_of_rows(rt - RowMat(rc.s_inf));
    const DtPair dt = dt_curves(rt, rows, partition);
    rep.dtin = dt.in;
    rep.dtbtw = dt.btw;

    double min_norm = std::numeric_limits<double>::infinity();
    for (const auto& pik : rc.pi_blocks) min_norm = std::min(min_norm, pik.norm());
    rep.min_sinf_norm = min_norm;

    rep.bound_in = 2.0 * epsilon * rep.gamma_t / std::sqrt(static_cast<double>(n));
    rep.bound_btw = 2.0 * min_norm - rep.bound_in;
    rep.slack_in = rep.bound_in - rep.dtin;
    rep.slack_btw = rep.dtbtw - rep.bound_btw;
    rep.holds_in = rep.slack_in >= 0.0;
    rep.holds_btw = rep.slack_btw >= 0.0;
    return rep;
}

bool telescoping_identity_check(const MarkovChain& chain, const ReducedChain& reduced,
                                std::uint64_t t) {
    if (t > 64)
        throw UnsupportedParameterError("telescoping_identity_check: t capped at 64");
    if (t == 0) return true;  // both sides are zero matrices
    const Eigen::MatrixXd p = dense_p_checked(chain);
    const Eigen::MatrixXd& s = reduced.s;
    const Eigen::MatrixXd d = p - s;

    // T_{j+1} = S T_j + (P - S) P^j, T_1 = P - S
    Eigen::MatrixXd acc = d;
    Eigen::MatrixXd p_pow = p;  // P^j
    for (std::uint64_t j = 1; j < t; ++j) {
        acc = s * acc + d * p_pow;
        p_pow = p_pow * p;
    }
    Eigen::MatrixXd s_pow = Eigen::MatrixXd::Identity(p.rows(), p.cols());
    for (std::uint64_t j = 0; j < t; ++j) s_pow = s_pow * s;
    const Eigen::MatrixXd lhs = p_pow - s_pow;  // p_pow == P^t after the loop
    return (lhs - acc).cwiseAbs().maxCoeff() <= 1e-10;
}

}  // namespace lund
