#include "lund/markov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "lund/errors.hpp"
#include "lund/thread_pool.hpp"

namespace lund {
namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kStationaryTol = 1e-10;
constexpr double kReversibleTol = 1e-10;

// Adjacency-list view of a (possibly dense) support for the BFS below.
std::vector<std::vector<std::uint32_t>> support_adjacency(const KernelGraph& g) {
    std::vector<std::vector<std::uint32_t>> adj(g.n);
    if (g.mode == GraphMode::dense) {
        for (std::size_t i = 0; i < g.n; ++i)
            for (std::size_t j = 0; j < g.n; ++j)
                if (i != j && g.w_dense(i, j) > 0.0)
                    adj[i].push_back(static_cast<std::uint32_t>(j));
    } else {
        for (std::size_t i = 0; i < g.n; ++i)
            for (std::size_t s = g.w_sparse.rowptr[i]; s < g.w_sparse.rowptr[i + 1]; ++s)
                if (g.w_sparse.col[s] != i && g.w_sparse.val[s] > 0.0)
                    adj[i].push_back(g.w_sparse.col[s]);
    }
    return adj;
}

std::vector<std::vector<std::uint32_t>> components_of(
    const std::vector<std::vector<std::uint32_t>>& adj) {
    const std::size_t n = adj.size();
    std::vector<int> comp(n, -1);
    std::vector<std::vector<std::uint32_t>> comps;
    std::vector<std::uint32_t> stack;
    for (std::size_t s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        const int id = static_cast<int>(comps.size());
        comps.emplace_back();
        comp[s] = id;
        stack.push_back(static_cast<std::uint32_t>(s));
        while (!stack.empty()) {
            const std::uint32_t u = stack.back();
            stack.pop_back();
            comps[id].push_back(u);
            for (std::uint32_t v : adj[u]) {
                if (comp[v] < 0) {
                    comp[v] = id;
                    stack.push_back(v);
                }
            }
        }
        std::sort(comps[id].begin(), comps[id].end());
    }
    return comps;
}

[[noreturn]] void throw_reducible(const std::vector<std::vector<std::uint32_t>>& comps) {
    std::ostringstream msg;
    msg << "reducible chain: support has " << comps.size() << " components;";
    for (const auto& c : comps) {
        msg << " [";
        const std::size_t show = std::min<std::size_t>(c.size(), 8);
        for (std::size_t i = 0; i < show; ++i) {
            if (i) msg << ' ';
            msg << c[i];
        }
        if (c.size() > show) msg << " ... " << c.size() << " total";
        msg << "]";
    }
    throw ReducibleChainError(msg.str());
}

void check_chain_invariants(const MarkovChain& c) {
    const std::size_t n = c.n;
    // row sums
    if (c.mode == GraphMode::dense) {
        for (std::size_t i = 0; i < n; ++i) {
            const double s = c.p_dense.row(i).sum();
            if (std::abs(s - 1.0) > kRowSumTol)
                throw NumericalError("markov: row " + std::to_string(i) +
                                     " sums to " + std::to_string(s));
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t t = c.p_sparse.rowptr[i]; t < c.p_sparse.rowptr[i + 1]; ++t)
                s += c.p_sparse.val[t];
            if (std::abs(s - 1.0) > kRowSumTol)
                throw NumericalError("markov: row " + std::to_string(i) +
                                     " sums to " + std::to_string(s));
        }
    }

    // stationarity: || pi^T P - pi^T ||_1
    Eigen::VectorXd piP = Eigen::VectorXd::Zero(n);
    if (c.mode == GraphMode::dense) {
        piP.noalias() = c.p_dense.transpose() * c.pi;
    } else {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t t = c.p_sparse.rowptr[i]; t < c.p_sparse.rowptr[i + 1]; ++t)
                piP[c.p_sparse.col[t]] += c.pi[i] * c.p_sparse.val[t];
    }
    const double drift = (piP - c.pi).lpNorm<1>();
    if (drift > kStationaryTol)
        throw NumericalError("markov: ||piP - pi||_1 = " + std::to_string(drift));
}

void check_reversible(MarkovChain& c) {
    double worst = 0.0;
    if (c.mode == GraphMode::dense) {
        for (std::size_t i = 0; i < c.n; ++i)
            for (std::size_t j = i + 1; j < c.n; ++j)
                worst = std::max(worst, std::abs(c.pi[i] * c.p_dense(i, j) -
                                                 c.pi[j] * c.p_dense(j, i)));
    } else {
        const Csr& p = c.p_sparse;
        for (std::size_t i = 0; i < c.n; ++i) {
            for (std::size_t s = p.rowptr[i]; s < p.rowptr[i + 1]; ++s) {
                const std::uint32_t j = p.col[s];
                if (j <= i) continue;
                // transpose entry via binary search in row j
                const auto lo = p.col.begin() + static_cast<std::ptrdiff_t>(p.rowptr[j]);
                const auto hi = p.col.begin() + static_cast<std::ptrdiff_t>(p.rowptr[j + 1]);
                const auto it = std::lower_bound(lo, hi, static_cast<std::uint32_t>(i));
                const double pji =
                    (it != hi && *it == i) ? p.val[it - p.col.begin()] : 0.0;
                worst = std::max(worst, std::abs(c.pi[i] * p.val[s] - c.pi[j] * pji));
            }
        }
    }
    c.reversible = worst <= kReversibleTol;
}

}  // namespace

KernelGraph build_kernel(const PointCloud& cloud, double sigma) {
    if (!(sigma > 0.0)) throw InvalidParameterError("build_kernel: sigma must be > 0");
    if (cloud.n == 0) throw InvalidParameterError("build_kernel: empty point cloud");

    KernelGraph g;
    g.mode = GraphMode::dense;
    g.sigma = sigma;
    g.n = cloud.n;
    g.w_dense.resize(cloud.n, cloud.n);
    const double inv_s2 = 1.0 / (sigma * sigma);

    parallel_for(cloud.n, [&](std::size_t i) {
        g.w_dense(i, i) = 1.0;
        const double* xi = cloud.row(i);
        for (std::size_t j = i + 1; j < cloud.n; ++j) {
            double d2 = 0.0;
            for (std::size_t d = 0; d < cloud.dim; ++d) {
                const double t = xi[d] - cloud.row(j)[d];
                d2 += t * t;
            }
            g.w_dense(i, j) = std::exp(-d2 * inv_s2);
        }
    });
    for (std::size_t i = 0; i < cloud.n; ++i)
        for (std::size_t j = 0; j < i; ++j) g.w_dense(i, j) = g.w_dense(j, i);
    return g;
}

KernelGraph build_kernel(const PointCloud& cloud, double sigma,
                         const NeighborList& neighbors) {
    if (!(sigma > 0.0)) throw InvalidParameterError("build_kernel: sigma must be > 0");
    if (neighbors.n != cloud.n)
        throw InvalidParameterError("build_kernel: neighbor list size mismatch");

    const std::size_t n = cloud.n;
    const double inv_s2 = 1.0 / (sigma * sigma);

    // union of directed kNN supports, plus the diagonal
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(n);
    for (std::size_t i = 0; i < n; ++i)
        rows[i].emplace_back(static_cast<std::uint32_t>(i), 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t s = 0; s < neighbors.k; ++s) {
            const std::uint32_t j = neighbors.neighbors(i)[s];
            const double d = neighbors.distances(i)[s];
            const double w = std::exp(-d * d * inv_s2);
            rows[i].emplace_back(j, w);
            rows[j].emplace_back(static_cast<std::uint32_t>(i), w);
        }
    }

    KernelGraph g;
    g.mode = GraphMode::sparse;
    g.sigma = sigma;
    g.n = n;
    g.w_sparse.n = n;
    g.w_sparse.rowptr.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto& r = rows[i];
        std::sort(r.begin(), r.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        r.erase(std::unique(r.begin(), r.end(),
                            [](const auto& a, const auto& b) { return a.first == b.first; }),
                r.end());
        g.w_sparse.rowptr[i + 1] = g.w_sparse.rowptr[i] + r.size();
    }
    g.w_sparse.col.reserve(g.w_sparse.rowptr[n]);
    g.w_sparse.val.reserve(g.w_sparse.rowptr[n]);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& [j, w] : rows[i]) {
            g.w_sparse.col.push_back(j);
            g.w_sparse.val.push_back(w);
        }
    }
    return g;
}

Eigen::MatrixXd MarkovChain::dense_p() const {
    if (mode == GraphMode::dense) return p_dense;
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t s = p_sparse.rowptr[i]; s < p_sparse.rowptr[i + 1]; ++s)
            p(i, p_sparse.col[s]) = p_sparse.val[s];
    return p;
}

void MarkovChain::matvec(const double* x, double* y) const {
    if (mode == GraphMode::dense) {
        Eigen::Map<const Eigen::VectorXd> vx(x, n);
        Eigen::Map<Eigen::VectorXd> vy(y, n);
        vy.noalias() = p_dense * vx;
    } else {
        p_sparse.matvec(x, y);
    }
}

MarkovChain build_chain(const KernelGraph& graph) {
    const std::size_t n = graph.n;
    if (n == 0) throw InvalidParameterError("build_chain: empty graph");

    // isolated points first (clearer error than the reducibility report)
    for (std::size_t i = 0; i < n; ++i) {
        double off = 0.0;
        if (graph.mode == GraphMode::dense) {
            off = graph.w_dense.row(i).sum() - graph.w_dense(i, i);
        } else {
            for (std::size_t s = graph.w_sparse.rowptr[i]; s < graph.w_sparse.rowptr[i + 1]; ++s)
                if (graph.w_sparse.col[s] != i) off += graph.w_sparse.val[s];
        }
        if (off <= 0.0)
            throw DegenerateGraphError(
                "degenerate graph: point " + std::to_string(i) +
                " has zero off-diagonal kernel mass (sigma too small)");
    }

    const auto comps = components_of(support_adjacency(graph));
    if (comps.size() != 1) throw_reducible(comps);

    MarkovChain c;
    c.mode = graph.mode;
    c.n = n;
    Eigen::VectorXd degree(n);

    if (graph.mode == GraphMode::dense) {
        degree = graph.w_dense.rowwise().sum();
        c.p_dense = graph.w_dense.array().colwise() * (1.0 / degree.array());
    } else {
        c.p_sparse = graph.w_sparse;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t t = c.p_sparse.rowptr[i]; t < c.p_sparse.rowptr[i + 1]; ++t)
                s += c.p_sparse.val[t];
            degree[i] = s;
            for (std::size_t t = c.p_sparse.rowptr[i]; t < c.p_sparse.rowptr[i + 1]; ++t)
                c.p_sparse.val[t] /= s;
        }
    }
    c.pi = degree / degree.sum();

    check_chain_invariants(c);
    check_reversible(c);
    if (!c.reversible)
        throw NumericalError("build_chain: detailed balance violated beyond tolerance");
    return c;
}

MarkovChain chain_from_transition(const Eigen::MatrixXd& p, bool require_irreducible) {
    const std::size_t n = static_cast<std::size_t>(p.rows());
    if (p.rows() != p.cols() || n == 0)
        throw InvalidParameterError("chain_from_transition: square nonempty matrix required");
    if ((p.array() < -kRowSumTol).any())
        throw InvalidParameterError("chain_from_transition: negative entry");
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(p.row(i).sum() - 1.0) > kRowSumTol)
            throw InvalidParameterError("chain_from_transition: row " + std::to_string(i) +
                                        " does not sum to 1");

    // strong connectivity: 0 reaches everything in P and in P^T
    bool irreducible = true;
    for (bool transpose : {false, true}) {
        std::vector<char> seen(n, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        std::size_t cnt = 1;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v = 0; v < n; ++v) {
                const double w = transpose ? p(v, u) : p(u, v);
                if (w > 0.0 && !seen[v]) {
                    seen[v] = 1;
                    ++cnt;
                    stack.push_back(v);
                }
            }
        }
        if (cnt != n) irreducible = false;
    }
    if (!irreducible && require_irreducible) {
        std::vector<std::vector<std::uint32_t>> adj(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && (p(i, j) > 0.0 || p(j, i) > 0.0))
                    adj[i].push_back(static_cast<std::uint32_t>(j));
        throw_reducible(components_of(adj));
    }

    MarkovChain c;
    c.mode = GraphMode::dense;
    c.n = n;
    c.p_dense = p;

    Eigen::VectorXd pi;
    double drift = 1.0;
    if (irreducible) {
        // stationary distribution: solve (P^T - I) pi = 0 with sum(pi) = 1
        Eigen::MatrixXd m = p.transpose() - Eigen::MatrixXd::Identity(n, n);
        m.row(n - 1).setOnes();
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
        rhs[n - 1] = 1.0;
        pi = Eigen::FullPivLU<Eigen::MatrixXd>(m).solve(rhs);
        pi = pi.cwiseMax(0.0);
        if (pi.sum() <= 0.0) pi.setConstant(1.0);
        pi /= pi.sum();
        drift = ((p.transpose() * pi) - pi).lpNorm<1>();
    }
    if (drift > kStationaryTol) {
        // reducible support (or a failed direct solve): the kernel of
        // P^T - I has dimension > 1 and the solver picks an arbitrary
        // corner of it, possibly with exact zeros. Damped power iteration
        // from the uniform vector instead converges to the size-weighted
        // mixture of per-class stationaries, positive on every recurrent
        // state, which is the canonical choice downstream code expects.
        pi.setConstant(n, 1.0 / static_cast<double>(n));
        for (int it = 0; it < 200000; ++it) {
            Eigen::VectorXd next = 0.5 * (p.transpose() * pi) + 0.5 * pi;
            next /= next.sum();
            drift = (next - pi).lpNorm<1>();
            pi = next;
            if (drift < 1e-15) break;
        }
        drift = ((p.transpose() * pi) - pi).lpNorm<1>();
        if (drift > kStationaryTol)
            throw NumericalError("chain_from_transition: stationary solve failed, drift " +
                                 std::to_string(drift));
    }
    c.pi = pi;
    check_chain_invariants(c);
    check_reversible(c);
    return c;
}

MarkovChain lazify(const MarkovChain& chain) {
    MarkovChain c = chain;
    if (c.mode == GraphMode::dense) {
        c.p_dense = 0.5 * (chain.p_dense + Eigen::MatrixXd::Identity(chain.n, chain.n));
    } else {
        bool diag_seen = false;
        for (std::size_t i = 0; i < c.n; ++i) {
            diag_seen = false;
            for (std::size_t s = c.p_sparse.rowptr[i]; s < c.p_sparse.rowptr[i + 1]; ++s) {
                c.p_sparse.val[s] *= 0.5;
                if (c.p_sparse.col[s] == i) {
                    c.p_sparse.val[s] += 0.5;
                    diag_seen = true;
                }
            }
            if (!diag_seen)
                throw NumericalError("lazify: sparse chain lacks diagonal entry");
        }
    }
    check_chain_invariants(c);
    return c;
}

}  // namespace lund
