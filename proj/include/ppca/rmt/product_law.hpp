#ifndef PPCA_RMT_PRODUCT_LAW_HPP
#define PPCA_RMT_PRODUCT_LAW_HPP

#include <functional>
#include <vector>

#include "ppca/spectra.hpp"

namespace ppca::rmt {

/// Distribution function tabulated on the cosine grid
/// x = lo + (hi - lo)(1 - cos th)/2, th in [0, pi], with F and dF/dth stored
/// at panel boundaries and cubic Hermite interpolation in th between them.
class CdfTable {
public:
    CdfTable() = default;
    /// `density` is called with increasing arguments.
    CdfTable(const std::function<double(double)>& density, double lo, double hi, int panels);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    /// Mass of the tabulated density between lo and x.
    double operator()(double x) const;
    double total() const { return f_.empty() ? 0.0 : f_.back(); }
    /// Smallest x with table(x) = level, for level in [0, total()].
    double quantile(double level) const;

private:
    double theta_of(double x) const;
    double x_of(double th) const;
    double hermite(double th) const;

    double lo_ = 0.0;
    double hi_ = 0.0;
    double step_ = 0.0;
    std::vector<double> f_;
    std::vector<double> df_;
};

/// F_{c,H} with its continuous part tabulated once for cheap cdf() calls.
class TabulatedMpLaw {
public:
    TabulatedMpLaw(double c, const DiscreteLaw& h, int panels = 128);

    double pdf(double t) const;
    double cdf(double t) const;
    double zero_mass() const { return zero_mass_; }
    double lower() const { return table_.lo(); }
    double upper() const { return table_.hi(); }

private:
    double c_;
    DiscreteLaw h_;
    double zero_mass_ = 0.0;
    CdfTable table_;
};

/// Limiting law G_{c,H} of the PPCA singular values, G(t) = F_{2c,F_{2c,H^2}}(t^2).
///
/// The inner law F_{2c,H^2} is replaced by `atoms` equal-weight quantile atoms
/// (levels (j - 1/2)/atoms of its continuous part) together with its point
/// mass at zero, and the result is used as the bulk of the outer Silverstein
/// solve. The outer density is tabulated once so cdf() is cheap.
class ProductPcaLaw {
public:
    ProductPcaLaw(double c, const DiscreteLaw& h, int atoms = 512, int panels = 128);

    double ratio() const { return c_; }
    /// Continuous part of the density of G at t > 0: 2 t f_outer(t^2).
    double pdf(double t) const;
    double cdf(double t) const;
    double zero_mass() const { return zero_mass_; }
    /// Support edges of the continuous part of G.
    double lower() const;
    double upper() const;
    /// The discretized inner law used as the outer bulk.
    const DiscreteLaw& outer_bulk() const { return bulk_; }

private:
    double c_;
    DiscreteLaw bulk_;
    double zero_mass_ = 0.0;
    double lower_ = 0.0;
    double upper_ = 0.0;
    CdfTable outer_;
};

/// One-shot evaluation of G_{c,H}(t). Builds the full nested law on every
/// call, so prefer ProductPcaLaw for more than a handful of points.
double ppca_lsd_cdf(double c, const DiscreteLaw& h, double t);

}  // namespace ppca::rmt

#endif  // PPCA_RMT_PRODUCT_LAW_HPP
