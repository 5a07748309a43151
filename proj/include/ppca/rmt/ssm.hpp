#ifndef PPCA_RMT_SSM_HPP
#define PPCA_RMT_SSM_HPP

// Closed forms for the simple spiked model, where the bulk is a single atom
// at sigma2.

namespace ppca::rmt {

struct SsmParams {
    double c;
    double sigma2;

    SsmParams(double c_, double sigma2_);
};

struct SsmConstants {
    double lambda_star;
    double lambda_prime;
    double a;
    double b;
    double a_prime;
    double b_prime;
    double alpha;
    double beta;
    double mass0_ppca;
    double mass0_pca;
};

SsmConstants ssm_closed_forms(const SsmParams& p);

/// kappa(t) of the PPCA singular-value density, with x^{2/3} read as
/// cbrt(x)^2 on the real line.
double ssm_kappa(const SsmParams& p, double t);

/// Continuous part of the density of G_{c,sigma2}. Throws std::domain_error
/// when kappa(t) <= 0 inside the support.
double ssm_g_pdf(const SsmParams& p, double t);

/// Continuous part of the Marcenko-Pastur density f_{c,sigma2}.
double ssm_f_pdf(const SsmParams& p, double t);

/// Distribution functions including the point masses at zero.
double ssm_g_cdf(const SsmParams& p, double t);
double ssm_f_cdf(const SsmParams& p, double t);

/// Spiked limits psi_j (PPCA) and psi'_j (PCA) for lambda above the
/// respective threshold.
double ssm_ppca_psi(const SsmParams& p, double lambda);
double ssm_pca_psi(const SsmParams& p, double lambda);

}  // namespace ppca::rmt

#endif  // PPCA_RMT_SSM_HPP
