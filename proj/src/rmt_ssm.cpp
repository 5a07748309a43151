#include "ppca/rmt/ssm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ppca/detail/quadrature.hpp"

namespace ppca::rmt {

SsmParams::SsmParams(double c_, double sigma2_) : c(c_), sigma2(sigma2_) {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("SsmParams: need c > 0");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw std::invalid_argument("SsmParams: need sigma2 > 0");
}

SsmConstants ssm_closed_forms(const SsmParams& p) {
    const double c = p.c;
    const double s = p.sigma2;
    const double r = std::sqrt(c * c + 4.0 * c);
    SsmConstants k;
    k.lambda_star = s * std::sqrt(1.0 + c + r);
    k.lambda_prime = s * (1.0 + std::sqrt(c));
    k.a = c < 0.5 ? s * std::sqrt(1.0 + c - r) * (1.0 - (r + c) / 2.0) : 0.0;
    k.b = s * std::sqrt(1.0 + c + r) * (1.0 + (r - c) / 2.0);
    k.a_prime = s * (1.0 - std::sqrt(c)) * (1.0 - std::sqrt(c));
    k.b_prime = s * (1.0 + std::sqrt(c)) * (1.0 + std::sqrt(c));
    const double lead = 2.0 + 10.0 * c - c * c;
    const double disc = std::sqrt(c * std::pow(c + 4.0, 3));
    k.alpha = (lead - disc) / 2.0 * s * s;
    k.beta = (lead + disc) / 2.0 * s * s;
    k.mass0_ppca = std::max(0.0, 1.0 - 1.0 / (2.0 * c));
    k.mass0_pca = std::max(0.0, 1.0 - 1.0 / c);
    return k;
}

namespace {

double two_thirds(double x) {
    const double r = std::cbrt(x);
    return r * r;
}

// sqrt((t^2 - alpha)(beta - t^2)), zero outside the support.
double root_term(const SsmConstants& k, double t) {
    const double t2 = t * t;
    if (t2 < k.alpha || t2 > k.beta) return 0.0;
    return std::sqrt((t2 - k.alpha) * (k.beta - t2));
}

}  // namespace

double ssm_kappa(const SsmParams& p, double t) {
    const double c = p.c;
    const double s = p.sigma2;
    const auto k = ssm_closed_forms(p);
    const double tr = t * root_term(k, t);
    const double shift = (9.0 * (c + 1.0) * s * t * t + std::pow(2.0 * c - 1.0, 3) * s * s * s) /
                         (3.0 * std::sqrt(3.0));
    return two_thirds(tr + shift) + two_thirds(tr - shift) +
           (3.0 * t * t + (2.0 * c - 1.0) * (2.0 * c - 1.0) * s * s) / 3.0;
}

double ssm_g_pdf(const SsmParams& p, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("ssm_g_pdf: need t > 0");
    const auto k = ssm_closed_forms(p);
    const double t2 = t * t;
    if (t2 < k.alpha || t2 > k.beta) return 0.0;
    const double kap = ssm_kappa(p, t);
    if (!(kap > 0.0)) throw std::domain_error("ssm_g_pdf: kappa(t) <= 0 at t = " + std::to_string(t));
    return root_term(k, t) / (kap * std::numbers::pi * p.c * p.sigma2);
}

double ssm_f_pdf(const SsmParams& p, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("ssm_f_pdf: need t > 0");
    const auto k = ssm_closed_forms(p);
    if (t <= k.a_prime || t >= k.b_prime) return 0.0;
    return std::sqrt((t - k.a_prime) * (k.b_prime - t)) / (2.0 * t * std::numbers::pi * p.c * p.sigma2);
}

double ssm_g_cdf(const SsmParams& p, double t) {
    if (t < 0.0) return 0.0;
    const auto k = ssm_closed_forms(p);
    if (t >= k.b) return 1.0;
    const double lo = std::sqrt(std::max(0.0, k.alpha));
    if (t <= lo) return k.mass0_ppca;
    return k.mass0_ppca + detail::integrate_edges([&](double u) { return u > 0.0 ? ssm_g_pdf(p, u) : 0.0; },
                                                  lo, t, 64);
}

double ssm_f_cdf(const SsmParams& p, double t) {
    if (t < 0.0) return 0.0;
    const auto k = ssm_closed_forms(p);
    if (t >= k.b_prime) return 1.0;
    if (t <= k.a_prime) return k.mass0_pca;
    return k.mass0_pca + detail::integrate_edges([&](double u) { return ssm_f_pdf(p, u); }, k.a_prime, t, 64);
}

double ssm_ppca_psi(const SsmParams& p, double lambda) {
    const double s2 = p.sigma2 * p.sigma2;
    return lambda * (1.0 + 2.0 * p.c * s2 / (lambda * lambda - s2));
}

double ssm_pca_psi(const SsmParams& p, double lambda) {
    return lambda * (1.0 + p.c * p.sigma2 / (lambda - p.sigma2));
}

}  // namespace ppca::rmt
