#ifndef PPCA_ESTIMATORS_HPP
#define PPCA_ESTIMATORS_HPP

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "ppca/numkernel.hpp"
#include "ppca/random.hpp"

namespace ppca::est {

/// Observations in rows, n x p, assumed centered (E X = 0).
using DataMatrix = Eigen::MatrixXd;

struct FitOptions {
    /// When false only eigen/singular values are produced.
    bool vectors = true;
};

struct PCAFit {
    Eigen::VectorXd eigenvalues;   // descending, length p
    Eigen::MatrixXd eigenvectors;  // p x p, empty without vectors
};

/// Row indices of the two halves.
struct Partition {
    std::vector<Eigen::Index> first;
    std::vector<Eigen::Index> second;
};

struct PPCAFit {
    Eigen::VectorXd singular_values;  // descending, length p
    Eigen::MatrixXd U, V;             // p x p, empty without vectors
    Eigen::MatrixXd fused;            // gamma_j = (u_j + v_j) / |u_j + v_j|
    Partition partition;
    /// Columns j where |u_j + v_j| < 1e-8 and gamma_j fell back to u_j.
    std::vector<Eigen::Index> fusion_fallback;
};

/// (1/n) X^T X, no mean subtraction.
Eigen::MatrixXd sample_cov(const DataMatrix& x);

PCAFit pca_fit(const DataMatrix& x, const FitOptions& opts = {});

/// Uniformly random split into halves of sizes floor(n/2) and ceil(n/2).
Partition random_partition(Eigen::Index n, RngStream& rng);

/// Throws unless the halves are disjoint, cover 0..n-1 and have sizes
/// floor(n/2), ceil(n/2) in either order.
void validate_partition(const Partition& part, Eigen::Index n);

PPCAFit ppca_fit(const DataMatrix& x, const Partition& part, const FitOptions& opts = {});
PPCAFit ppca_fit(const DataMatrix& x, RngStream& rng, const FitOptions& opts = {});

/// Consistent estimator of the j-th spiked eigenvalue (1-based j) from PPCA
/// singular values, c = p/n.
double debias_ppca(std::span<const double> singular_values, double c, std::size_t j);

/// Bai-Ding consistent estimator from PCA eigenvalues (1-based j).
double debias_pca(std::span<const double> eigenvalues, double c, std::size_t j);

/// Number of values strictly above edge.
std::size_t estimate_rank(std::span<const double> values, double edge);

/// Mean of the r singular values of B^T G, B p x q and G p x r orthonormal.
double similarity_xi(const Eigen::MatrixXd& b, const Eigen::MatrixXd& g);

/// Orthonormal basis of the column span, column by column (Gram-Schmidt
/// order), so leading columns keep nested spans.
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& m);

/// Subtracts column means.
DataMatrix center_columns(const DataMatrix& x);

inline std::span<const double> as_span(const Eigen::VectorXd& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace ppca::est

#endif  // PPCA_ESTIMATORS_HPP
