#ifndef PPCA_NUMKERNEL_HPP
#define PPCA_NUMKERNEL_HPP

// Dense decompositions used by the estimators, templated on the scalar type.
// Every routine returns eigen/singular values in descending order and applies a
// fixed sign convention so that outputs are reproducible bit for bit.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "ppca/random.hpp"

namespace ppca::num {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <typename Scalar>
struct SymEig {
    Vector<Scalar> values;   // descending
    Matrix<Scalar> vectors;  // columns; empty when not requested
};

template <typename Scalar>
struct SvdTriplet {
    Matrix<Scalar> U;
    Vector<Scalar> singular_values;  // descending
    Matrix<Scalar> V;
};

template <typename Derived>
typename Derived::RealScalar symmetry_error(const Eigen::MatrixBase<Derived>& s) {
    const auto norm = s.norm();
    if (norm == 0) return 0;
    return (s - s.transpose()).norm() / norm;
}

/// Flip the sign of column j so that its largest-magnitude entry is positive.
/// Returns the sign that was applied.
template <typename Derived>
typename Derived::Scalar fix_column_sign(Eigen::MatrixBase<Derived>& m, Eigen::Index j) {
    Eigen::Index arg = 0;
    m.col(j).cwiseAbs().maxCoeff(&arg);
    if (m(arg, j) < 0) {
        m.col(j) *= -1;
        return -1;
    }
    return 1;
}

/// Eigendecomposition of a symmetric matrix, eigenvalues descending.
/// Throws std::invalid_argument when the input is not symmetric to 1e-10.
template <typename Derived>
SymEig<typename Derived::Scalar> sym_eig(const Eigen::MatrixBase<Derived>& s,
                                          bool compute_vectors = true) {
    using Scalar = typename Derived::Scalar;
    if (s.rows() != s.cols()) throw std::invalid_argument("sym_eig: matrix not square");
    if (symmetry_error(s) > Scalar(1e-10)) throw std::invalid_argument("sym_eig: matrix not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(
        s, compute_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("sym_eig: solver did not converge");
    SymEig<Scalar> out;
    out.values = es.eigenvalues().reverse();
    if (compute_vectors) {
        out.vectors = es.eigenvectors().rowwise().reverse();
        for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) fix_column_sign(out.vectors, j);
    }
    return out;
}

/// Clamping threshold tau = p * ulp * max|eig| used to decide numerical zeros.
template <typename Scalar>
Scalar zero_tolerance(Eigen::Index p, Scalar max_abs) {
    return static_cast<Scalar>(p) * std::numeric_limits<Scalar>::epsilon() * max_abs;
}

/// Positive square root of a symmetric PSD matrix. Eigenvalues with magnitude
/// at most tau are treated as exact zeros so the rank of the root equals the
/// numerical rank of the input; eigenvalues below -tau are an error.
template <typename Derived>
Matrix<typename Derived::Scalar> psd_sqrt(const Eigen::MatrixBase<Derived>& s) {
    using Scalar = typename Derived::Scalar;
    auto eig = sym_eig(s);
    const Scalar tau = zero_tolerance(s.rows(), eig.values.cwiseAbs().maxCoeff());
    Vector<Scalar> root(eig.values.size());
    for (Eigen::Index i = 0; i < root.size(); ++i) {
        const Scalar v = eig.values(i);
        if (v < -tau) throw std::invalid_argument("psd_sqrt: matrix is indefinite");
        root(i) = v > tau ? std::sqrt(v) : Scalar(0);
    }
    Matrix<Scalar> r = eig.vectors * root.asDiagonal() * eig.vectors.transpose();
    return (r + r.transpose()) / Scalar(2);
}

/// Full SVD A = U diag(s) V^T. Each singular pair (u_j, v_j) is sign-flipped
/// jointly so the largest-magnitude entry of u_j is positive.
template <typename Derived>
SvdTriplet<typename Derived::Scalar> svd_full(const Eigen::MatrixBase<Derived>& a,
                                               bool compute_vectors = true) {
    using Scalar = typename Derived::Scalar;
    if (!a.allFinite()) throw std::invalid_argument("svd_full: non-finite entries");
    SvdTriplet<Scalar> out;
    if (!compute_vectors) {
        Eigen::BDCSVD<Matrix<Scalar>> svd(a);
        out.singular_values = svd.singularValues();
        return out;
    }
    Eigen::BDCSVD<Matrix<Scalar>> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    out.U = svd.matrixU();
    out.V = svd.matrixV();
    out.singular_values = svd.singularValues();
    for (Eigen::Index j = 0; j < out.U.cols(); ++j)
        if (fix_column_sign(out.U, j) < 0 && j < out.V.cols()) out.V.col(j) *= -1;
    return out;
}

/// Orthonormal p x p matrix whose leading columns are the (orthonormal)
/// columns of w. The remaining columns span the orthogonal complement.
template <typename Derived>
Matrix<typename Derived::Scalar> complete_basis(const Eigen::MatrixBase<Derived>& w) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index p = w.rows();
    const Eigen::Index r = w.cols();
    Matrix<Scalar> q(p, p);
    q.leftCols(r) = w;
    if (r == p) return q;
    Eigen::HouseholderQR<Matrix<Scalar>> qr(w);
    Matrix<Scalar> full = qr.householderQ();
    q.rightCols(p - r) = full.rightCols(p - r);
    for (Eigen::Index j = r; j < p; ++j) fix_column_sign(q, j);
    return q;
}

/// Thin factor of the Gram matrix: x^T x = basis * diag(sv^2) * basis^T with
/// basis p x k orthonormal, k = numerical rank of x.
template <typename Scalar>
struct GramFactor {
    Matrix<Scalar> basis;
    Vector<Scalar> singular_values;  // of x, descending, all > tolerance
};

template <typename Derived>
GramFactor<typename Derived::Scalar> gram_factor(const Eigen::MatrixBase<Derived>& x) {
    using Scalar = typename Derived::Scalar;
    Eigen::BDCSVD<Matrix<Scalar>> svd(x, Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const Scalar smax = s.size() ? s(0) : Scalar(0);
    const Scalar tol = zero_tolerance(std::max(x.rows(), x.cols()), smax);
    Eigen::Index k = 0;
    while (k < s.size() && s(k) > tol) ++k;
    GramFactor<Scalar> out;
    out.basis = svd.matrixV().leftCols(k);
    out.singular_values = s.head(k);
    for (Eigen::Index j = 0; j < k; ++j) fix_column_sign(out.basis, j);
    return out;
}

/// Haar-distributed orthogonal matrix: QR of a standard Gaussian matrix with
/// the triangular factor's diagonal forced positive.
template <typename Scalar = double>
Matrix<Scalar> random_orthogonal(Eigen::Index p, RngStream& rng) {
    if (p < 1) throw std::invalid_argument("random_orthogonal: p must be >= 1");
    std::normal_distribution<Scalar> normal(0, 1);
    Matrix<Scalar> g(p, p);
    for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index i = 0; i < p; ++i) g(i, j) = normal(rng);
    Eigen::HouseholderQR<Matrix<Scalar>> qr(g);
    Matrix<Scalar> q = qr.householderQ();
    const Matrix<Scalar>& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < p; ++j)
        if (r(j, j) < 0) q.col(j) *= -1;
    return q;
}

}  // namespace ppca::num

#endif  // PPCA_NUMKERNEL_HPP
