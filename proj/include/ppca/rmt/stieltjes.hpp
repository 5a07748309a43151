#ifndef PPCA_RMT_STIELTJES_HPP
#define PPCA_RMT_STIELTJES_HPP

#include <complex>
#include <stdexcept>

#include "ppca/spectra.hpp"

namespace ppca::rmt {

using cplx = std::complex<double>;

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

struct SolverTolerances {
    double residual = 1e-10;
    double damping = 0.5;
    int fixed_point_iters = 500;
    int newton_iters = 60;
};

inline constexpr SolverTolerances kDefaultTolerances{};

/// Value of the Stieltjes transform m of F_{c,H} and of the companion
/// transform m_under = c m + (c - 1) / z at a point z of the upper half plane.
struct StieltjesEval {
    cplx z;
    cplx m;
    cplx m_under;
    double residual;
};

/// Residual of the Silverstein equation
///   z = -1/m_under + c * sum_k w_k t_k / (1 + t_k m_under).
cplx silverstein_residual(double c, const DiscreteLaw& h, cplx m_under, cplx z);

/// Solves the Silverstein equation on the branch Im m_under > 0.
/// Damped fixed-point iteration followed by a Newton polish; when that lands
/// off the branch, falls back to continuation from far above the real axis.
/// Throws SolverError when the residual cannot be brought under tolerance.
StieltjesEval stieltjes(double c, const DiscreteLaw& h, cplx z,
                        const SolverTolerances& tol = kDefaultTolerances);

/// Newton from a nearby solution (e.g. the previous point of a sweep), falling
/// back to the full schedule of stieltjes() when it leaves the branch.
StieltjesEval stieltjes_from(double c, const DiscreteLaw& h, cplx z, cplx guess,
                             const SolverTolerances& tol = kDefaultTolerances);

/// Density of F_{c,H} at t > 0 from Im m(t + i eta) / pi, with
/// eta = max(1e-9, 1e-6 t) and one Richardson step between eta and eta/2.
double mp_density(double c, const DiscreteLaw& h, double t);

}  // namespace ppca::rmt

#endif  // PPCA_RMT_STIELTJES_HPP
