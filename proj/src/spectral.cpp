#include "lund/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "lund/errors.hpp"

namespace lund {
namespace {

struct LinOp {
    std::size_t n = 0;
    std::function<void(const double*, double*)> apply;  // y = A x
};

void canonical_sign(Eigen::Ref<Eigen::MatrixXd> vecs) {
    for (Eigen::Index c = 0; c < vecs.cols(); ++c) {
        auto col = vecs.col(c);
        const double thresh = 1e-12 * col.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < col.size(); ++i) {
            if (std::abs(col[i]) > thresh) {
                if (col[i] < 0.0) col = -col;
                break;
            }
        }
    }
}

// Residuals ||A v - lambda v||_2 for every held pair.
double max_residual(const LinOp& op, const Eigen::VectorXd& vals,
                    const Eigen::MatrixXd& vecs) {
    Eigen::VectorXd av(op.n);
    double worst = 0.0;
    for (Eigen::Index c = 0; c < vecs.cols(); ++c) {
        op.apply(vecs.col(c).data(), av.data());
        worst = std::max(worst, (av - vals[c] * vecs.col(c)).norm());
    }
    return worst;
}

// Top-M algebraic eigenpairs of a dense symmetric matrix, descending.
void dense_topm(const Eigen::MatrixXd& a, std::size_t m, Eigen::VectorXd& vals,
                Eigen::MatrixXd& vecs) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    Eigen::MatrixXd work = a;
    Eigen::VectorXd w(n);
    Eigen::MatrixXd z(n, m);
    std::vector<lapack_int> isuppz(2 * std::max<std::size_t>(m, 1));
    lapack_int found = 0;
    const lapack_int il = n - static_cast<lapack_int>(m) + 1;
    const lapack_int info = LAPACKE_dsyevr(
        LAPACK_COL_MAJOR, 'V', 'I', 'L', n, work.data(), n, 0.0, 0.0, il, n,
        0.0, &found, w.data(), z.data(), n, isuppz.data());
    if (info != 0 || found != static_cast<lapack_int>(m))
        throw NumericalError("dense eigensolver failed, info=" + std::to_string(info));
    // ascending -> descending
    vals.resize(m);
    vecs.resize(n, m);
    for (std::size_t c = 0; c < m; ++c) {
        vals[c] = w[m - 1 - c];
        vecs.col(c) = z.col(m - 1 - c);
    }
}

// Lanczos with full reorthogonalization. Returns true when every requested
// pair meets tol (verified with explicit residuals by the caller).
bool lanczos_topm(const LinOp& op, std::size_t m_want, double tol,
                  std::size_t max_m, Eigen::VectorXd& vals, Eigen::MatrixXd& vecs) {
    const std::size_t n = op.n;
    max_m = std::min(max_m, n);
    if (m_want > max_m) return false;

    Eigen::MatrixXd q(n, max_m + 1);
    std::vector<double> alpha, beta;
    alpha.reserve(max_m);
    beta.reserve(max_m);

    std::mt19937_64 rng(0x5eed1234abcdULL);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    auto fill_random = [&](Eigen::Ref<Eigen::VectorXd> v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = unif(rng);
    };

    fill_random(q.col(0));
    q.col(0).normalize();

    Eigen::VectorXd w(n);
    std::size_t m = 0;
    auto tridiag_check = [&](std::size_t steps) -> bool {
        // Ritz values of T_steps; residual bound |beta_last * s_last|
        if (steps < m_want) return false;
        std::vector<double> d(alpha.begin(), alpha.begin() + steps);
        std::vector<double> e(steps > 1 ? steps - 1 : 0);
        for (std::size_t i = 0; i + 1 < steps; ++i) e[i] = beta[i];
        Eigen::MatrixXd s(steps, steps);
        if (LAPACKE_dstevd(LAPACK_COL_MAJOR, 'V', static_cast<lapack_int>(steps),
                           d.data(), e.data(), s.data(),
                           static_cast<lapack_int>(steps)) != 0)
            return false;
        const double blast = beta.empty() ? 0.0 : beta[steps - 1];
        for (std::size_t c = 0; c < m_want; ++c) {
            const std::size_t src = steps - 1 - c;  // ascending -> top
            if (std::abs(blast * s(steps - 1, src)) > 0.5 * tol) return false;
        }
        return true;
    };

    bool converged = false;
    for (std::size_t j = 0; j < max_m; ++j) {
        op.apply(q.col(j).data(), w.data());
        if (j > 0) w -= beta[j - 1] * q.col(j - 1);
        const double a = q.col(j).dot(w);
        alpha.push_back(a);
        w -= a * q.col(j);
        // two passes of classical Gram-Schmidt against the whole basis
        for (int pass = 0; pass < 2; ++pass) {
            Eigen::VectorXd proj = q.leftCols(j + 1).transpose() * w;
            w.noalias() -= q.leftCols(j + 1) * proj;
        }
        double b = w.norm();
        if (b < 1e-12) {
            // invariant subspace hit: restart with a fresh direction
            fill_random(w);
            for (int pass = 0; pass < 2; ++pass) {
                Eigen::VectorXd proj = q.leftCols(j + 1).transpose() * w;
                w.noalias() -= q.leftCols(j + 1) * proj;
            }
            const double nb = w.norm();
            if (nb < 1e-12) {  // space exhausted
                m = j + 1;
                beta.push_back(0.0);
                break;
            }
            beta.push_back(0.0);
            q.col(j + 1) = w / nb;
        } else {
            beta.push_back(b);
            q.col(j + 1) = w / b;
        }
        m = j + 1;
        const bool due = (m >= std::max<std::size_t>(2 * m_want + 10, 32) && m % 64 == 0) ||
                         m == max_m;
        if (due && tridiag_check(m)) {
            converged = true;
            break;
        }
    }
    if (m < m_want) return false;

    std::vector<double> d(alpha.begin(), alpha.begin() + m);
    std::vector<double> e(m > 1 ? m - 1 : 0);
    for (std::size_t i = 0; i + 1 < m; ++i) e[i] = beta[i];
    Eigen::MatrixXd s(m, m);
    if (LAPACKE_dstevd(LAPACK_COL_MAJOR, 'V', static_cast<lapack_int>(m), d.data(),
                       e.data(), s.data(), static_cast<lapack_int>(m)) != 0)
        return false;

    vals.resize(m_want);
    vecs.resize(n, m_want);
    for (std::size_t c = 0; c < m_want; ++c) {
        const std::size_t src = m - 1 - c;
        vals[c] = d[src];
        vecs.col(c).noalias() = q.leftCols(m) * s.col(src);
        vecs.col(c).normalize();
    }
    return converged || m == n;
}

// Shared driver: top-M algebraic pairs, descending, residual-verified.
void sym_topm(const LinOp& op, const Eigen::MatrixXd* dense_a, const EigOptions& opts,
              std::size_t m, Eigen::VectorXd& vals, Eigen::MatrixXd& vecs) {
    const std::size_t n = op.n;
    bool use_dense = dense_a != nullptr;
    if (opts.method == EigOptions::Method::lanczos) use_dense = false;
    if (opts.method == EigOptions::Method::automatic && use_dense)
        use_dense = n <= 4096;

    if (!use_dense) {
        const std::size_t budget = std::min(n, std::max<std::size_t>(4 * m, 200));
        const bool ok = lanczos_topm(op, m, opts.tol, budget, vals, vecs);
        const bool sized = vals.size() == static_cast<Eigen::Index>(m);
        const double res = sized ? max_residual(op, vals, vecs) : 1.0;
        if (ok && res <= 3.0 * opts.tol) return;
        if (dense_a && n <= 4096 && opts.method == EigOptions::Method::automatic) {
            // fall through to the dense solver
        } else if (opts.strict) {
            throw NumericalError("eig: lanczos did not converge, residual " +
                                 std::to_string(res));
        } else if (sized) {
            return;  // best effort, caller asked for it
        } else {
            throw NumericalError("eig: lanczos produced no usable basis");
        }
    }

    dense_topm(*dense_a, m, vals, vecs);
    const double res = max_residual(op, vals, vecs);
    if (res > 3.0 * opts.tol && opts.strict)
        throw NumericalError("eig: residual " + std::to_string(res) +
                             " exceeds tolerance");
}

std::size_t clamp_m(std::size_t m, std::size_t n, const char* what) {
    if (m == 0) throw InvalidParameterError(std::string(what) + ": M must be >= 1");
    if (m > n) {
        std::fprintf(stderr, "[lund] %s: M=%zu clamped to n=%zu\n", what, m, n);
        return n;
    }
    return m;
}

}  // namespace

void dense_sym_eig(const Eigen::MatrixXd& a, Eigen::VectorXd& values,
                   Eigen::MatrixXd& vectors) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    vectors = a;
    values.resize(n);
    const lapack_int info =
        LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, vectors.data(), n, values.data());
    if (info != 0)
        throw NumericalError("dense_sym_eig: dsyevd info=" + std::to_string(info));
}

SpectralDecomposition eig_markov(const MarkovChain& chain, const EigOptions& opts) {
    if (!chain.reversible)
        throw UnsupportedChainError("eig_markov: chain is not reversible");
    const std::size_t n = chain.n;
    const std::size_t m = clamp_m(opts.m, n, "eig_markov");

    const Eigen::VectorXd sqrt_pi = chain.pi.cwiseSqrt();
    const Eigen::VectorXd inv_sqrt_pi = sqrt_pi.cwiseInverse();

    // symmetric conjugate A = D_pi^1/2 P D_pi^-1/2
    Eigen::MatrixXd a_dense;
    Csr a_sparse;
    LinOp op;
    op.n = n;
    if (chain.mode == GraphMode::dense) {
        a_dense = sqrt_pi.asDiagonal() * chain.p_dense * inv_sqrt_pi.asDiagonal();
        a_dense = 0.5 * (a_dense + a_dense.transpose()).eval();
        op.apply = [&a_dense, n](const double* x, double* y) {
            Eigen::Map<const Eigen::VectorXd> vx(x, n);
            Eigen::Map<Eigen::VectorXd> vy(y, n);
            vy.noalias() = a_dense.selfadjointView<Eigen::Lower>() * vx;
        };
    } else {
        a_sparse = chain.p_sparse;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t s = a_sparse.rowptr[i]; s < a_sparse.rowptr[i + 1]; ++s)
                a_sparse.val[s] *= sqrt_pi[i] * inv_sqrt_pi[a_sparse.col[s]];
        // make symmetry exact (support is symmetric by construction)
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t s = a_sparse.rowptr[i]; s < a_sparse.rowptr[i + 1]; ++s) {
                const std::uint32_t j = a_sparse.col[s];
                if (j <= i) continue;
                const auto lo = a_sparse.col.begin() + static_cast<std::ptrdiff_t>(a_sparse.rowptr[j]);
                const auto hi = a_sparse.col.begin() + static_cast<std::ptrdiff_t>(a_sparse.rowptr[j + 1]);
                const auto it = std::lower_bound(lo, hi, static_cast<std::uint32_t>(i));
                if (it != hi && *it == i) {
                    const std::size_t st = static_cast<std::size_t>(it - a_sparse.col.begin());
                    const double avg = 0.5 * (a_sparse.val[s] + a_sparse.val[st]);
                    a_sparse.val[s] = avg;
                    a_sparse.val[st] = avg;
                }
            }
        }
        op.apply = [&a_sparse](const double* x, double* y) { a_sparse.matvec(x, y); };
    }

    SpectralDecomposition dec;
    sym_topm(op, chain.mode == GraphMode::dense ? &a_dense : nullptr, opts, m,
             dec.values, dec.vectors);

    // psi = D_pi^-1/2 v; with unit-norm v this is exactly the l2(pi) normalization
    dec.vectors = inv_sqrt_pi.asDiagonal() * dec.vectors;
    canonical_sign(dec.vectors);
    dec.pi = chain.pi;
    return dec;
}

SpectralDecomposition eig_sym_laplacian(const KernelGraph& graph, const EigOptions& opts) {
    const std::size_t n = graph.n;
    const std::size_t m = clamp_m(opts.m, n, "eig_sym_laplacian");

    // classical convention: self-loops stripped before forming degrees
    Eigen::VectorXd deg = Eigen::VectorXd::Zero(n);
    if (graph.mode == GraphMode::dense) {
        deg = graph.w_dense.rowwise().sum() - graph.w_dense.diagonal();
    } else {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t s = graph.w_sparse.rowptr[i]; s < graph.w_sparse.rowptr[i + 1]; ++s)
                if (graph.w_sparse.col[s] != i) deg[i] += graph.w_sparse.val[s];
    }
    for (std::size_t i = 0; i < n; ++i)
        if (deg[i] <= 0.0)
            throw DegenerateGraphError("eig_sym_laplacian: point " + std::to_string(i) +
                                       " is isolated");

    {
        // connected support is a precondition (otherwise 0 is a multiple eigenvalue)
        std::vector<char> seen(n, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        std::size_t cnt = 1;
        auto visit = [&](std::size_t u, std::size_t v, double w) {
            if (u != v && w > 0.0 && !seen[v]) {
                seen[v] = 1;
                ++cnt;
                stack.push_back(v);
            }
        };
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            if (graph.mode == GraphMode::dense) {
                for (std::size_t v = 0; v < n; ++v) visit(u, v, graph.w_dense(u, v));
            } else {
                for (std::size_t s = graph.w_sparse.rowptr[u]; s < graph.w_sparse.rowptr[u + 1]; ++s)
                    visit(u, graph.w_sparse.col[s], graph.w_sparse.val[s]);
            }
        }
        if (cnt != n)
            throw ReducibleChainError("eig_sym_laplacian: graph support is disconnected");
    }

    const Eigen::VectorXd inv_sqrt_deg = deg.cwiseSqrt().cwiseInverse();

    Eigen::MatrixXd b_dense;
    Csr b_sparse;
    LinOp op;
    op.n = n;
    if (graph.mode == GraphMode::dense) {
        b_dense = inv_sqrt_deg.asDiagonal() * graph.w_dense * inv_sqrt_deg.asDiagonal();
        b_dense.diagonal().setZero();
        b_dense = 0.5 * (b_dense + b_dense.transpose()).eval();
        op.apply = [&b_dense, n](const double* x, double* y) {
            Eigen::Map<const Eigen::VectorXd> vx(x, n);
            Eigen::Map<Eigen::VectorXd> vy(y, n);
            vy.noalias() = b_dense.selfadjointView<Eigen::Lower>() * vx;
        };
    } else {
        b_sparse = graph.w_sparse;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t s = b_sparse.rowptr[i]; s < b_sparse.rowptr[i + 1]; ++s) {
                const std::uint32_t j = b_sparse.col[s];
                b_sparse.val[s] = (j == i) ? 0.0
                                           : b_sparse.val[s] * inv_sqrt_deg[i] * inv_sqrt_deg[j];
            }
        op.apply = [&b_sparse](const double* x, double* y) { b_sparse.matvec(x, y); };
    }

    SpectralDecomposition dec;
    sym_topm(op, graph.mode == GraphMode::dense ? &b_dense : nullptr, opts, m,
             dec.values, dec.vectors);

    // L_sym = I - B: top of B = bottom of L, already in the right vector order
    dec.values = (1.0 - dec.values.array()).matrix();
    if (std::abs(dec.values[0]) > 1e-8)
        throw NumericalError("eig_sym_laplacian: smallest eigenvalue " +
                             std::to_string(dec.values[0]) +
                             " not 0 (graph disconnected or solver failure)");
    canonical_sign(dec.vectors);
    return dec;
}

}  // namespace lund
