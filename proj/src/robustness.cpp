#include "ppca/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ppca/numkernel.hpp"

namespace ppca::robust {

using Eigen::Index;
using Eigen::MatrixXd;

namespace {

double ppca_signal_threshold(double c) { return std::sqrt(1.0 + c + std::sqrt(c * c + 4.0 * c)); }

}  // namespace

PerturbationScenario::PerturbationScenario(double epsilon, std::vector<double> etas, std::size_t k1,
                                           double lambda1, double c)
    : epsilon_(epsilon), etas_(std::move(etas)), k1_(k1), lambda1_(lambda1), c_(c) {
    if (!(epsilon_ >= 0.0 && epsilon_ < 1.0)) throw std::invalid_argument("scenario: need 0 <= epsilon < 1");
    if (!(c_ > 0.0) || !std::isfinite(c_)) throw std::invalid_argument("scenario: need c > 0");
    if (k1_ > etas_.size()) throw std::invalid_argument("scenario: K1 exceeds the number of outliers");
    for (double eta : etas_)
        if (!(eta >= 0.0) || !std::isfinite(eta)) throw std::invalid_argument("scenario: effect sizes must be >= 0");
    const double k = static_cast<double>(K());
    if (!(k * epsilon_ < 1.0)) throw std::invalid_argument("scenario: need K * epsilon < 1");
    if (!(2.0 * static_cast<double>(std::max(K1(), K2())) * epsilon_ < 1.0))
        throw std::invalid_argument("scenario: need 2 * max(K1, K2) * epsilon < 1");
    if (!(lambda1_ > ppca_signal_threshold(c_)))
        throw std::invalid_argument("scenario: lambda1 must exceed the PPCA threshold " +
                                    std::to_string(ppca_signal_threshold(c_)));
}

std::size_t Assignment::count(int half) const {
    return static_cast<std::size_t>(std::count(block.begin(), block.end(), half));
}

Assignment assign_first(std::size_t K, std::size_t k1) {
    if (k1 > K) throw std::invalid_argument("assign_first: k1 > K");
    Assignment a;
    a.block.assign(K, 2);
    std::fill(a.block.begin(), a.block.begin() + static_cast<std::ptrdiff_t>(k1), 1);
    return a;
}

namespace {

void check_assignment(const PerturbationScenario& s, const Assignment& a) {
    if (a.block.size() != s.K()) throw std::invalid_argument("assignment: one half per outlier required");
    for (int b : a.block)
        if (b != 1 && b != 2) throw std::invalid_argument("assignment: halves are labelled 1 and 2");
    if (a.count(1) != s.K1()) throw std::invalid_argument("assignment: half 1 must hold exactly K1 outliers");
}

void check_index(const PerturbationScenario& s, std::size_t k) {
    if (k >= s.K()) throw std::out_of_range("outlier index out of range");
}

// 1 - 2 K_l eps for half l.
double half_scale(const PerturbationScenario& s, int half) {
    const auto kl = half == 1 ? s.K1() : s.K2();
    return 1.0 - 2.0 * static_cast<double>(kl) * s.epsilon();
}

}  // namespace

std::vector<double> PerturbedSpectrum::sorted_values(std::size_t p) const {
    if (p < noise_eigenvalues.size() + 1) throw std::invalid_argument("sorted_values: p too small");
    std::vector<double> out;
    out.reserve(p);
    out.push_back(signal_eigenvalue);
    for (const auto& kv : noise_eigenvalues) out.push_back(kv.second);
    out.resize(p, bulk_level);
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

PerturbedSpectrum pca_perturbed_spectrum(const PerturbationScenario& s) {
    const double base = 1.0 - static_cast<double>(s.K()) * s.epsilon();
    PerturbedSpectrum out;
    out.signal_eigenvalue = base * s.lambda1();
    for (std::size_t k = 0; k < s.K(); ++k) out.noise_eigenvalues.emplace_back(k, base + s.epsilon() * s.etas()[k]);
    out.bulk_level = base;
    return out;
}

PerturbedSpectrum ppca_perturbed_spectrum(const PerturbationScenario& s, const Assignment& a) {
    check_assignment(s, a);
    const double d1 = half_scale(s, 1);
    const double d2 = half_scale(s, 2);
    const double bulk = std::sqrt(d1 * d2);
    PerturbedSpectrum out;
    out.signal_eigenvalue = bulk * s.lambda1();
    for (std::size_t k = 0; k < s.K(); ++k) {
        const double mine = a.block[k] == 1 ? d1 : d2;
        const double other = a.block[k] == 1 ? d2 : d1;
        out.noise_eigenvalues.emplace_back(k, std::sqrt(other * (mine + 2.0 * s.epsilon() * s.etas()[k])));
    }
    out.bulk_level = bulk;
    return out;
}

MatrixXd perturbation_directions(std::size_t K, Index p, RngStream& rng) {
    if (p <= static_cast<Index>(K)) throw std::invalid_argument("perturbation directions: need p > K");
    return num::random_orthogonal<double>(p, rng).leftCols(static_cast<Index>(K) + 1);
}

namespace {

// scale * Sigma + sum_k coef_k nu_k nu_k^T with Sigma = I + (lambda1 - 1) g g^T.
MatrixXd assemble(const PerturbationScenario& s, const MatrixXd& dirs, double scale,
                  const std::vector<double>& coef) {
    if (dirs.cols() != static_cast<Index>(s.K()) + 1)
        throw std::invalid_argument("directions: expected K + 1 columns");
    const Index p = dirs.rows();
    MatrixXd out = scale * MatrixXd::Identity(p, p);
    out.noalias() += scale * (s.lambda1() - 1.0) * dirs.col(0) * dirs.col(0).transpose();
    for (std::size_t k = 0; k < coef.size(); ++k) {
        const auto col = dirs.col(static_cast<Index>(k) + 1);
        if (coef[k] != 0.0) out.noalias() += coef[k] * col * col.transpose();
    }
    return 0.5 * (out + out.transpose());
}

}  // namespace

MatrixXd build_perturbed_sigma(const PerturbationScenario& s, const MatrixXd& directions) {
    std::vector<double> coef;
    for (double eta : s.etas()) coef.push_back(s.epsilon() * eta);
    return assemble(s, directions, 1.0 - static_cast<double>(s.K()) * s.epsilon(), coef);
}

MatrixXd build_perturbed_sigma(const PerturbationScenario& s, Index p, RngStream& rng) {
    return build_perturbed_sigma(s, perturbation_directions(s.K(), p, rng));
}

std::pair<MatrixXd, MatrixXd> build_half_sigmas(const PerturbationScenario& s, const Assignment& a,
                                                const MatrixXd& directions) {
    check_assignment(s, a);
    std::vector<double> c1(s.K(), 0.0);
    std::vector<double> c2(s.K(), 0.0);
    for (std::size_t k = 0; k < s.K(); ++k)
        (a.block[k] == 1 ? c1 : c2)[k] = 2.0 * s.epsilon() * s.etas()[k];
    return {assemble(s, directions, half_scale(s, 1), c1), assemble(s, directions, half_scale(s, 2), c2)};
}

MatrixXd build_ppca_population(const PerturbationScenario& s, const Assignment& a, const MatrixXd& directions) {
    const auto [s1, s2] = build_half_sigmas(s, a, directions);
    return num::psd_sqrt(s1) * num::psd_sqrt(s2);
}

double spike_threshold(const PerturbationScenario& s, std::size_t k, Method m, const Assignment& a) {
    check_index(s, k);
    const double c = s.c();
    const double eps = s.epsilon();
    if (eps == 0.0) return std::numeric_limits<double>::infinity();
    if (m == Method::Pca) return (1.0 - static_cast<double>(s.K()) * eps) / eps * std::sqrt(c);
    check_assignment(s, a);
    return half_scale(s, a.block[k]) / eps * (c + std::sqrt(c * c + 4.0 * c)) / 2.0;
}

double ordering_threshold(const PerturbationScenario& s, std::size_t k, Method m, const Assignment& a) {
    check_index(s, k);
    const double eps = s.epsilon();
    const double l1 = s.lambda1();
    if (eps == 0.0) return std::numeric_limits<double>::infinity();
    if (m == Method::Pca) return (1.0 - static_cast<double>(s.K()) * eps) / eps * (l1 - 1.0);
    check_assignment(s, a);
    return half_scale(s, a.block[k]) / (2.0 * eps) * (l1 * l1 - 1.0);
}

bool noise_is_spiked(const PerturbationScenario& s, std::size_t k, Method m, const Assignment& a) {
    return s.etas()[k] > spike_threshold(s, k, m, a);
}

bool ordering_breaks(const PerturbationScenario& s, std::size_t k, Method m, const Assignment& a) {
    return s.etas()[k] > ordering_threshold(s, k, m, a);
}

std::size_t target_rank(const PerturbationScenario& s, Method m, const Assignment& a) {
    std::size_t r = 1;
    for (std::size_t k = 0; k < s.K(); ++k) r += noise_is_spiked(s, k, m, a) ? 1 : 0;
    return r;
}

ComparativeConditions comparative_conditions(const PerturbationScenario& s, const Assignment& a) {
    check_assignment(s, a);
    const double c = s.c();
    const double eps = s.epsilon();
    const double k = static_cast<double>(s.K());
    const double gain = (std::sqrt(c) + std::sqrt(c + 4.0)) / 2.0;
    const double l1 = s.lambda1();
    ComparativeConditions out{true, true, true};
    for (int half : {1, 2}) {
        if (a.count(half) == 0) continue;
        const double mine = half_scale(s, half);
        const double other = half_scale(s, 3 - half);
        out.eta_win = out.eta_win && mine / (1.0 - k * eps) * gain > 1.0;
        out.a_win = out.a_win && l1 > other / mine;
    }
    if (s.K() > 0) {
        const double worst = 1.0 - 2.0 * k * eps;
        out.worst_case_ok = worst > 0.0 && worst / (1.0 - k * eps) * gain > 1.0 && l1 > 1.0 / worst;
    }
    return out;
}

}  // namespace ppca::robust
