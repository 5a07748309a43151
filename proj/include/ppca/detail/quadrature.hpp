#ifndef PPCA_DETAIL_QUADRATURE_HPP
#define PPCA_DETAIL_QUADRATURE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace ppca::detail {

/// Gauss-Legendre rule on [-1, 1] via Golub-Welsch.
struct GaussLegendre {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;

    explicit GaussLegendre(int order) {
        Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
        for (int k = 1; k < order; ++k) {
            const double b = k / std::sqrt(4.0 * k * k - 1.0);
            jacobi(k, k - 1) = b;
            jacobi(k - 1, k) = b;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
        nodes = es.eigenvalues();
        weights = 2.0 * es.eigenvectors().row(0).transpose().cwiseAbs2();
    }
};

inline const GaussLegendre& gauss_legendre_10() {
    static const GaussLegendre rule(10);
    return rule;
}

/// Integral of f over [a, b] after the substitution x = a + (b-a)(1-cos th)/2,
/// which removes square-root behaviour at both ends. Composite 10-point
/// Gauss-Legendre on `panels` equal pieces of [0, pi].
template <typename F>
double integrate_edges(F&& f, double a, double b, int panels = 32) {
    if (!(b > a)) return 0.0;
    const auto& rule = gauss_legendre_10();
    const double h = std::numbers::pi / panels;
    double total = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double mid = (k + 0.5) * h;
        for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
            const double th = mid + 0.5 * h * rule.nodes(i);
            const double x = a + 0.5 * (b - a) * (1.0 - std::cos(th));
            total += 0.5 * h * rule.weights(i) * f(x) * 0.5 * (b - a) * std::sin(th);
        }
    }
    return total;
}

}  // namespace ppca::detail

#endif  // PPCA_DETAIL_QUADRATURE_HPP
