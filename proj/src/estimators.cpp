#include "ppca/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ppca::est {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd sample_cov(const DataMatrix& x) {
    if (x.rows() < 1 || x.cols() < 1) throw std::invalid_argument("sample_cov: empty data");
    if (!x.allFinite()) throw std::invalid_argument("sample_cov: non-finite data");
    MatrixXd s = MatrixXd::Zero(x.cols(), x.cols());
    s.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), 1.0 / static_cast<double>(x.rows()));
    return s.selfadjointView<Eigen::Lower>();
}

namespace {

VectorXd padded(const VectorXd& head, Index p) {
    VectorXd out = VectorXd::Zero(p);
    out.head(std::min(head.size(), p)) = head.head(std::min(head.size(), p));
    return out;
}

MatrixXd rows_of(const DataMatrix& x, const std::vector<Index>& idx) {
    MatrixXd out(static_cast<Index>(idx.size()), x.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Index>(i)) = x.row(idx[i]);
    return out;
}

}  // namespace

PCAFit pca_fit(const DataMatrix& x, const FitOptions& opts) {
    const Index n = x.rows();
    const Index p = x.cols();
    PCAFit fit;
    if (n < p) {
        // Rank-deficient covariance: work with the thin factor of X.
        if (!x.allFinite()) throw std::invalid_argument("pca_fit: non-finite data");
        auto gf = num::gram_factor(x);
        fit.eigenvalues = padded(gf.singular_values.cwiseAbs2() / static_cast<double>(n), p);
        if (opts.vectors) fit.eigenvectors = num::complete_basis(gf.basis);
        return fit;
    }
    auto eig = num::sym_eig(sample_cov(x), opts.vectors);
    fit.eigenvalues = eig.values.cwiseMax(0.0);
    fit.eigenvectors = std::move(eig.vectors);
    return fit;
}

Partition random_partition(Index n, RngStream& rng) {
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    // Fisher-Yates with rejection sampling so the draw is exactly uniform and
    // independent of the standard library implementation.
    for (Index i = n - 1; i > 0; --i) {
        const std::uint64_t bound = static_cast<std::uint64_t>(i) + 1;
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t r;
        do {
            r = (static_cast<std::uint64_t>(rng()) << 32) | rng();
        } while (r >= limit);
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(r % bound)]);
    }
    const auto half = static_cast<std::ptrdiff_t>(n / 2);
    Partition part;
    part.first.assign(perm.begin(), perm.begin() + half);
    part.second.assign(perm.begin() + half, perm.end());
    std::sort(part.first.begin(), part.first.end());
    std::sort(part.second.begin(), part.second.end());
    return part;
}

void validate_partition(const Partition& part, Index n) {
    const auto n1 = static_cast<Index>(part.first.size());
    const auto n2 = static_cast<Index>(part.second.size());
    if (n1 + n2 != n || std::max(n1, n2) != n - n / 2 || std::min(n1, n2) != n / 2)
        throw std::invalid_argument("partition: halves must have sizes floor(n/2) and ceil(n/2)");
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (const auto* half : {&part.first, &part.second}) {
        for (Index i : *half) {
            if (i < 0 || i >= n || seen[static_cast<std::size_t>(i)])
                throw std::invalid_argument("partition: indices must be a disjoint cover of 0..n-1");
            seen[static_cast<std::size_t>(i)] = 1;
        }
    }
}

namespace {

void fuse(PPCAFit& fit) {
    const Index p = fit.U.rows();
    fit.fused.resize(p, p);
    for (Index j = 0; j < p; ++j) {
        VectorXd s = fit.U.col(j) + fit.V.col(j);
        const double norm = s.norm();
        if (norm < 1e-8) {
            fit.fused.col(j) = fit.U.col(j);
            fit.fusion_fallback.push_back(j);
        } else {
            fit.fused.col(j) = s / norm;
        }
    }
}

// S1^{1/2} S2^{1/2} through thin factors of the halves. With X_k^T X_k / n_k
// = W_k D_k^2 W_k^T the product equals W_1 (D_1 W_1^T W_2 D_2) W_2^T, so its
// nonzero singular triplets come from the small core matrix.
void ppca_low_rank(const MatrixXd& x1, const MatrixXd& x2, Index p, bool vectors, PPCAFit& fit) {
    auto f1 = num::gram_factor(x1);
    auto f2 = num::gram_factor(x2);
    const VectorXd d1 = f1.singular_values / std::sqrt(static_cast<double>(x1.rows()));
    const VectorXd d2 = f2.singular_values / std::sqrt(static_cast<double>(x2.rows()));
    const MatrixXd core = d1.asDiagonal() * (f1.basis.transpose() * f2.basis) * d2.asDiagonal();
    if (core.size() == 0) {
        fit.singular_values = VectorXd::Zero(p);
        if (vectors) {
            fit.U = MatrixXd::Identity(p, p);
            fit.V = MatrixXd::Identity(p, p);
        }
        return;
    }
    auto svd = num::svd_full(core, vectors);
    fit.singular_values = padded(svd.singular_values, p);
    if (!vectors) return;
    fit.U = num::complete_basis(MatrixXd(f1.basis * svd.U));
    fit.V = num::complete_basis(MatrixXd(f2.basis * svd.V));
    for (Index j = 0; j < p; ++j)
        if (num::fix_column_sign(fit.U, j) < 0) fit.V.col(j) *= -1;
}

}  // namespace

PPCAFit ppca_fit(const DataMatrix& x, const Partition& part, const FitOptions& opts) {
    const Index n = x.rows();
    const Index p = x.cols();
    if (n < 4) throw std::invalid_argument("ppca_fit: need at least 4 observations");
    if (!x.allFinite()) throw std::invalid_argument("ppca_fit: non-finite data");
    validate_partition(part, n);

    PPCAFit fit;
    fit.partition = part;
    const MatrixXd x1 = rows_of(x, part.first);
    const MatrixXd x2 = rows_of(x, part.second);
    if (std::max(x1.rows(), x2.rows()) < p) {
        ppca_low_rank(x1, x2, p, opts.vectors, fit);
    } else {
        const MatrixXd r1 = num::psd_sqrt(sample_cov(x1));
        const MatrixXd r2 = num::psd_sqrt(sample_cov(x2));
        auto svd = num::svd_full(MatrixXd(r1 * r2), opts.vectors);
        fit.singular_values = std::move(svd.singular_values);
        fit.U = std::move(svd.U);
        fit.V = std::move(svd.V);
    }
    if (opts.vectors) fuse(fit);
    return fit;
}

PPCAFit ppca_fit(const DataMatrix& x, RngStream& rng, const FitOptions& opts) {
    if (x.rows() < 4) throw std::invalid_argument("ppca_fit: need at least 4 observations");
    return ppca_fit(x, random_partition(x.rows(), rng), opts);
}

namespace {

// -1 / (underline_m(z) * scale) with underline_m(z) = ratio * m(z) + (ratio - 1) / z
// and m(z) the Stieltjes transform of the tail values (squared when `squared`).
double debias(std::span<const double> values, double ratio, std::size_t j, bool squared) {
    const std::size_t p = values.size();
    if (j < 1 || j >= p) throw std::invalid_argument("debias: index must satisfy 1 <= j < p");
    const double lead = values[j - 1];
    if (!(lead > values[j])) throw std::invalid_argument("debias: eigenvalue j is tied with the tail");
    const double z = squared ? lead * lead : lead;
    double tail = 0.0;
    for (std::size_t l = j; l < p; ++l) {
        const double t = squared ? values[l] * values[l] : values[l];
        tail += 1.0 / (t - z);
    }
    tail /= static_cast<double>(p - j);
    const double under = ratio * tail + (ratio - 1.0) / z;
    return -1.0 / (under * (squared ? lead : 1.0));
}

}  // namespace

double debias_ppca(std::span<const double> singular_values, double c, std::size_t j) {
    return debias(singular_values, 2.0 * c, j, true);
}

double debias_pca(std::span<const double> eigenvalues, double c, std::size_t j) {
    return debias(eigenvalues, c, j, false);
}

std::size_t estimate_rank(std::span<const double> values, double edge) {
    return static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [edge](double v) { return v > edge; }));
}

namespace {

void require_orthonormal(const MatrixXd& m, const char* what) {
    const MatrixXd gram = m.transpose() * m;
    if ((gram - MatrixXd::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff() > 1e-6)
        throw std::invalid_argument(std::string("similarity_xi: ") + what + " columns are not orthonormal");
}

}  // namespace

double similarity_xi(const MatrixXd& b, const MatrixXd& g) {
    if (b.rows() != g.rows()) throw std::invalid_argument("similarity_xi: dimension mismatch");
    if (b.cols() < g.cols()) throw std::invalid_argument("similarity_xi: need q >= r");
    if (g.cols() < 1) throw std::invalid_argument("similarity_xi: empty target basis");
    require_orthonormal(b, "B");
    require_orthonormal(g, "G");
    Eigen::JacobiSVD<MatrixXd> svd(b.transpose() * g);
    return svd.singularValues().head(g.cols()).sum() / static_cast<double>(g.cols());
}

MatrixXd orthonormalize(const MatrixXd& m) {
    Eigen::HouseholderQR<MatrixXd> qr(m);
    MatrixXd q = qr.householderQ() * MatrixXd::Identity(m.rows(), m.cols());
    const MatrixXd& r = qr.matrixQR();
    for (Index j = 0; j < m.cols(); ++j)
        if (r(j, j) < 0) q.col(j) *= -1;
    return q;
}

DataMatrix center_columns(const DataMatrix& x) {
    return x.rowwise() - x.colwise().mean();
}

}  // namespace ppca::est
