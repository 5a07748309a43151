#ifndef PPCA_ROBUSTNESS_HPP
#define PPCA_ROBUSTNESS_HPP

// Population-level outlier model for a simple spiked covariance with one
// signal direction gamma_1 (sigma2 = 1):
//   Sigma_eps = (1 - K eps) Sigma + eps sum_k eta_k nu_k nu_k^T,
// and the product of half-sample square roots it induces for PPCA when
// outlier k lands only in the half given by the assignment.

#include <Eigen/Dense>

#include <cstddef>
#include <utility>
#include <vector>

#include "ppca/random.hpp"

namespace ppca::robust {

class PerturbationScenario {
public:
    /// Throws std::invalid_argument unless eps in [0, 1), K eps < 1,
    /// 2 max(K1, K2) eps < 1, every eta >= 0, K1 <= K, c > 0 and
    /// lambda1 > (1 + c + sqrt(c^2 + 4c))^{1/2}.
    PerturbationScenario(double epsilon, std::vector<double> etas, std::size_t k1, double lambda1, double c);

    double epsilon() const { return epsilon_; }
    const std::vector<double>& etas() const { return etas_; }
    std::size_t K() const { return etas_.size(); }
    std::size_t K1() const { return k1_; }
    std::size_t K2() const { return etas_.size() - k1_; }
    double lambda1() const { return lambda1_; }
    double c() const { return c_; }

private:
    double epsilon_;
    std::vector<double> etas_;
    std::size_t k1_;
    double lambda1_;
    double c_;
};

/// Half (1 or 2) receiving each outlier direction.
struct Assignment {
    std::vector<int> block;

    std::size_t count(int half) const;
};

/// Outliers 0..k1-1 in half 1, the rest in half 2.
Assignment assign_first(std::size_t K, std::size_t k1);

enum class Method { Pca, Ppca };

struct PerturbedSpectrum {
    double signal_eigenvalue;
    std::vector<std::pair<std::size_t, double>> noise_eigenvalues;
    double bulk_level;

    /// All p population values, descending.
    std::vector<double> sorted_values(std::size_t p) const;
};

PerturbedSpectrum pca_perturbed_spectrum(const PerturbationScenario& s);
PerturbedSpectrum ppca_perturbed_spectrum(const PerturbationScenario& s, const Assignment& a);

/// Gamma_1 followed by nu_1..nu_K, exactly orthonormal: the leading K + 1
/// columns of random_orthogonal(p).
Eigen::MatrixXd perturbation_directions(std::size_t K, Eigen::Index p, RngStream& rng);

/// Sigma_eps built from the given directions.
Eigen::MatrixXd build_perturbed_sigma(const PerturbationScenario& s, const Eigen::MatrixXd& directions);
/// Draws fresh directions; throws when p <= K.
Eigen::MatrixXd build_perturbed_sigma(const PerturbationScenario& s, Eigen::Index p, RngStream& rng);

/// Population covariances of the two halves,
///   Sigma_l = (1 - 2 K_l eps) Sigma + 2 eps sum_{k in half l} eta_k nu_k nu_k^T.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> build_half_sigmas(const PerturbationScenario& s, const Assignment& a,
                                                              const Eigen::MatrixXd& directions);

/// Sigma_1^{1/2} Sigma_2^{1/2}.
Eigen::MatrixXd build_ppca_population(const PerturbationScenario& s, const Assignment& a,
                                      const Eigen::MatrixXd& directions);

/// Effect-size threshold above which nu_k becomes a distant spike.
double spike_threshold(const PerturbationScenario& s, std::size_t k, Method m, const Assignment& a);
/// Effect-size threshold above which nu_k outranks gamma_1.
double ordering_threshold(const PerturbationScenario& s, std::size_t k, Method m, const Assignment& a);

bool noise_is_spiked(const PerturbationScenario& s, std::size_t k, Method m, const Assignment& a);
bool ordering_breaks(const PerturbationScenario& s, std::size_t k, Method m, const Assignment& a);

/// 1 + number of outlier directions that become distant spikes.
std::size_t target_rank(const PerturbationScenario& s, Method m, const Assignment& a);

struct ComparativeConditions {
    bool eta_win;        // PPCA needs larger eta_k than PCA to spike, in every occupied half
    bool a_win;          // PPCA needs larger eta_k than PCA to break the ordering, in every occupied half
    bool worst_case_ok;  // both of the above with all outliers in one half
};

ComparativeConditions comparative_conditions(const PerturbationScenario& s, const Assignment& a);

}  // namespace ppca::robust

#endif  // PPCA_ROBUSTNESS_HPP
