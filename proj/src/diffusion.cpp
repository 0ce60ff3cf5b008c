#include "lund/diffusion.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "lund/errors.hpp"
#include "lund/simd.hpp"
#include "lund/thread_pool.hpp"

namespace lund {
namespace {

// lambda^t in the log domain. exp() underflows to exact 0 below ~-745, which
// is the flush the contract asks for.
double attenuate(double lambda, std::uint64_t t) {
    if (t == 0) return 1.0;
    lambda = std::min(1.0, std::max(-1.0, lambda));  // spectrum is in [-1, 1]
    if (lambda == 0.0) return 0.0;
    const double mag = std::abs(lambda);
    const double e = static_cast<double>(t) * std::log(mag);
    const double a = (e <= -745.0) ? 0.0 : std::exp(e);
    return (lambda < 0.0 && (t & 1ULL)) ? -a : a;
}

}  // namespace

Eigen::VectorXd spectral_attenuation(const Eigen::VectorXd& values, std::uint64_t t) {
    Eigen::VectorXd a(values.size());
    if (values.size() == 0) return a;
    a[0] = 1.0;  // stationary eigenvalue, pinned against solver noise
    for (Eigen::Index l = 1; l < values.size(); ++l) a[l] = attenuate(values[l], t);
    return a;
}

DiffusionOperator::DiffusionOperator(const SpectralDecomposition& dec, std::uint64_t t,
                                     Measure measure)
    : n_(dec.n()), t_(t), measure_(measure) {
    const std::size_t m = dec.m();
    if (m == 0) throw InvalidParameterError("DiffusionOperator: empty decomposition");
    if (measure == Measure::counting && dec.pi.size() == 0)
        throw InvalidParameterError(
            "DiffusionOperator: counting measure needs the chain's pi");

    attenuation_.resize(m);
    attenuation_[0] = 1.0;  // lambda_1 = 1 exactly
    for (std::size_t l = 1; l < m; ++l) attenuation_[l] = attenuate(dec.values[l], t);

    dim_ = m - 1;
    embedding_.assign(n_ * dim_, 0.0);
    if (dim_ == 0) return;

    // coordinates c_l(x) = a_l psi_l(x), l >= 2
    Eigen::MatrixXd c(n_, dim_);
    for (std::size_t l = 1; l < m; ++l)
        c.col(l - 1) = attenuation_[l] * dec.vectors.col(l);

    if (measure_ == Measure::inverse_pi) {
        // psi are orthonormal in l2(pi), so rows of P^t differ exactly by c
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t l = 0; l < dim_; ++l)
                embedding_[i * dim_ + l] = c(i, l);
        return;
    }

    // counting measure: rows of P^t live in the span of b_l = psi_l . pi,
    // which is not orthonormal; fold the Gram factor into the coordinates
    Eigen::MatrixXd b(n_, dim_);
    for (std::size_t l = 1; l < m; ++l)
        b.col(l - 1) = dec.vectors.col(l).cwiseProduct(dec.pi);
    Eigen::MatrixXd gram = b.transpose() * b;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) {
        gram.diagonal().array() += 1e-300;
        llt.compute(gram);
        if (llt.info() != Eigen::Success)
            throw NumericalError("DiffusionOperator: Gram factorization failed");
    }
    const Eigen::MatrixXd e = c * llt.matrixL();  // row x = L^T c(x)
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t l = 0; l < dim_; ++l) embedding_[i * dim_ + l] = e(i, l);
}

double DiffusionOperator::distance(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    return std::sqrt(
        simd::active().sqdist(embedding_row(i), embedding_row(j), dim_));
}

Eigen::MatrixXd pairwise_diffusion(const DiffusionOperator& op,
                                   const std::vector<std::uint32_t>& subset) {
    std::vector<std::uint32_t> idx = subset;
    if (idx.empty()) {
        idx.resize(op.n());
        for (std::size_t i = 0; i < op.n(); ++i) idx[i] = static_cast<std::uint32_t>(i);
    }
    const std::size_t k = idx.size();
    Eigen::MatrixXd d(k, k);
    parallel_for(k, [&](std::size_t a) {
        d(a, a) = 0.0;
        for (std::size_t b = a + 1; b < k; ++b)
            d(a, b) = op.distance(idx[a], idx[b]);
    });
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < a; ++b) d(a, b) = d(b, a);
    return d;
}

Eigen::MatrixXd stochastic_power(const Eigen::MatrixXd& p, std::uint64_t t) {
    if (t > (1ULL << 16))
        throw UnsupportedParameterError("stochastic_power: t > 2^16 (got " +
                                        std::to_string(t) + ")");
    const Eigen::Index n = p.rows();
    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd base = p;
    while (t > 0) {
        if (t & 1ULL) result = (result * base).eval();
        t >>= 1;
        if (t > 0) base = (base * base).eval();
    }
    return result;
}

double diffusion_distance_from_power(const Eigen::MatrixXd& pt, const Eigen::VectorXd& pi,
                                     std::size_t i, std::size_t j, Measure measure) {
    const Eigen::VectorXd diff = (pt.row(i) - pt.row(j)).transpose();
    if (measure == Measure::counting) return diff.norm();
    return std::sqrt((diff.array().square() / pi.array()).sum());
}

double diffusion_distance_oracle(const MarkovChain& chain, std::uint64_t t,
                                 std::size_t i, std::size_t j, Measure measure) {
    const Eigen::MatrixXd pt = stochastic_power(chain.dense_p(), t);
    return diffusion_distance_from_power(pt, chain.pi, i, j, measure);
}

}  // namespace lund
