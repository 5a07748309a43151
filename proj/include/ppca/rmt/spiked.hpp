#ifndef PPCA_RMT_SPIKED_HPP
#define PPCA_RMT_SPIKED_HPP

// Phase-transition thresholds and spiked-eigenvalue limits of PCA and PPCA
// under a generalized spiked model with discrete bulk H.

#include "ppca/rmt/law.hpp"
#include "ppca/spectra.hpp"

namespace ppca::rmt {

/// psi_{c,H}(lambda) = lambda (1 + c int t/(lambda-t) dH) for lambda > u_H.
double psi(double c, const DiscreteLaw& h, double lambda);

/// m and m' of F_{c,H} at real x outside its support.
RealStieltjes stieltjes_real(double c, const DiscreteLaw& h, double x);

struct PcaThreshold {
    double lambda_prime;  // separation threshold for PCA
    double b_prime;       // upper bulk edge psi_{c,H}(lambda')
};

struct PpcaThreshold {
    double lambda_star;     // separation threshold for PPCA
    double b;               // upper edge psi_{2c,H^2}(lambda*^2) / lambda*
    double outer_critical;  // psi_{2c,H^2}(lambda*^2)
    double beta;            // upper edge of F_{2c,F_{2c,H^2}}, equals b^2
};

PcaThreshold pca_threshold(double c, const DiscreteLaw& h);
PpcaThreshold ppca_threshold(double c, const DiscreteLaw& h);

/// Edges of the positive part of the PCA limiting law F_{c,H}.
struct PcaSupport {
    double lower;  // a'
    double upper;  // b'
    double zero_mass;
};

/// Edges of the PPCA limiting law G_{c,H} of singular values, together with
/// the edges alpha, beta of the law of their squares F_{2c,F_{2c,H^2}}.
struct PpcaSupport {
    double lower;  // a
    double upper;  // b
    double alpha;
    double beta;
    double zero_mass;
};

PcaSupport pca_support(double c, const DiscreteLaw& h);
PpcaSupport ppca_support(double c, const DiscreteLaw& h);

/// The law F_{2c,H^2} that acts as the bulk of the outer PPCA map.
AtomicMpLaw ppca_inner_law(double c, const DiscreteLaw& h);

struct SpikedLimit {
    enum class Tag { Distant, Stuck };
    Tag tag;
    double value;

    bool distant() const { return tag == Tag::Distant; }
};

SpikedLimit pca_limit(double c, const DiscreteLaw& h, double lambda);
SpikedLimit ppca_limit(double c, const DiscreteLaw& h, double lambda);

struct BiasReport {
    double lambda;
    double psi_ppca;  // psi_j
    double psi_pca;   // psi'_j
    double gap;       // psi'_j - psi_j
};

/// Throws std::invalid_argument unless lambda is distant for both methods.
BiasReport bias_report(double c, const DiscreteLaw& h, double lambda);

/// Gain/loss ratio of PPCA against PCA for the simple spiked model, c >= 0.
double rho(double c);

/// Every constant of the simple-spiked closed forms, computed through the
/// generic routines above.
struct SpectralConstants {
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

SpectralConstants generic_constants(double c, const DiscreteLaw& h);

}  // namespace ppca::rmt

#endif  // PPCA_RMT_SPIKED_HPP
