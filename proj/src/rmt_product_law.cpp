#include "ppca/rmt/product_law.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ppca/detail/quadrature.hpp"
#include "ppca/rmt/law.hpp"
#include "ppca/rmt/spiked.hpp"
#include "ppca/rmt/stieltjes.hpp"

namespace ppca::rmt {

CdfTable::CdfTable(const std::function<double(double)>& density, double lo, double hi, int panels)
    : lo_(lo), hi_(hi) {
    if (!(hi > lo) || panels < 1) throw std::invalid_argument("CdfTable: need lo < hi and panels >= 1");
    step_ = std::numbers::pi / panels;
    const auto& rule = detail::gauss_legendre_10();
    const double half_width = 0.5 * (hi_ - lo_);
    // dF/dth = f(x(th)) x'(th). At th = 0 with lo = 0 the density can blow up
    // like x^{-1/2} while the product stays finite, so take the limit from a
    // point just inside.
    auto slope = [&](double th) {
        if (th == 0.0 && lo_ == 0.0) th = 1e-2 * step_;
        const double x = x_of(th);
        const double s = std::sin(th);
        if (s <= 0.0 || x <= 0.0) return 0.0;
        return density(x) * half_width * s;
    };
    f_.assign(static_cast<std::size_t>(panels) + 1, 0.0);
    df_.assign(static_cast<std::size_t>(panels) + 1, 0.0);
    df_[0] = slope(0.0);
    for (int k = 0; k < panels; ++k) {
        const double mid = (k + 0.5) * step_;
        double mass = 0.0;
        for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
            mass += rule.weights(i) * slope(mid + 0.5 * step_ * rule.nodes(i));
        f_[static_cast<std::size_t>(k) + 1] = f_[static_cast<std::size_t>(k)] + 0.5 * step_ * mass;
        df_[static_cast<std::size_t>(k) + 1] = k + 1 == panels ? 0.0 : slope((k + 1) * step_);
    }
}

double CdfTable::x_of(double th) const {
    return lo_ + 0.5 * (hi_ - lo_) * (1.0 - std::cos(th));
}

double CdfTable::theta_of(double x) const {
    const double u = std::clamp(1.0 - 2.0 * (x - lo_) / (hi_ - lo_), -1.0, 1.0);
    return std::acos(u);
}

double CdfTable::hermite(double th) const {
    const auto last = f_.size() - 1;
    auto k = static_cast<std::size_t>(std::floor(th / step_));
    k = std::min(k, last - 1);
    const double u = (th - static_cast<double>(k) * step_) / step_;
    const double u2 = u * u;
    const double u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * f_[k] + (u3 - 2 * u2 + u) * step_ * df_[k] +
           (-2 * u3 + 3 * u2) * f_[k + 1] + (u3 - u2) * step_ * df_[k + 1];
}

double CdfTable::operator()(double x) const {
    if (f_.empty() || x <= lo_) return 0.0;
    if (x >= hi_) return total();
    return hermite(theta_of(x));
}

double CdfTable::quantile(double level) const {
    if (f_.empty()) throw std::logic_error("CdfTable: empty table");
    if (level <= 0.0) return lo_;
    if (level >= total()) return hi_;
    const auto it = std::lower_bound(f_.begin(), f_.end(), level);
    const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - f_.begin()));
    double a = static_cast<double>(k - 1) * step_;
    double b = static_cast<double>(k) * step_;
    for (int it2 = 0; it2 < 100 && b - a > 1e-15; ++it2) {
        const double m = 0.5 * (a + b);
        (hermite(m) < level ? a : b) = m;
    }
    return x_of(0.5 * (a + b));
}

namespace {

// mp_density along an increasing sweep, warm-starting each solve from the
// previous point.
class DensitySweep {
public:
    DensitySweep(double c, const DiscreteLaw& h) : c_(c), h_(h) {}

    double operator()(double t) {
        const double eta = std::max(1e-9, 1e-6 * t);
        const double d1 = solve(t, eta, g1_);
        const double d2 = solve(t, 0.5 * eta, g2_);
        warm_ = true;
        return std::max(0.0, (2.0 * d2 - d1) / std::numbers::pi);
    }

private:
    double solve(double t, double eta, cplx& guess) {
        const cplx z(t, eta);
        const StieltjesEval e = warm_ ? stieltjes_from(c_, h_, z, guess) : stieltjes(c_, h_, z);
        guess = e.m_under;
        return e.m.imag();
    }

    double c_;
    const DiscreteLaw& h_;
    cplx g1_{};
    cplx g2_{};
    bool warm_ = false;
};

}  // namespace

TabulatedMpLaw::TabulatedMpLaw(double c, const DiscreteLaw& h, int panels) : c_(c), h_(h) {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("TabulatedMpLaw: need c > 0");
    const AtomicMpLaw law(c, AtomicBulk(h_));
    zero_mass_ = law.zero_mass();
    DensitySweep density(c, h_);
    table_ = CdfTable(std::ref(density), law.lower(), law.upper(), panels);
}

double TabulatedMpLaw::pdf(double t) const {
    if (!(t > 0.0)) throw std::invalid_argument("TabulatedMpLaw::pdf: need t > 0");
    if (t <= table_.lo() || t >= table_.hi()) return 0.0;
    return mp_density(c_, h_, t);
}

double TabulatedMpLaw::cdf(double t) const {
    if (t < 0.0) return 0.0;
    if (t >= table_.hi()) return 1.0;
    return zero_mass_ + (1.0 - zero_mass_) * table_(t) / table_.total();
}

ProductPcaLaw::ProductPcaLaw(double c, const DiscreteLaw& h, int atoms, int panels) : c_(c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("ProductPcaLaw: need c > 0");
    if (atoms < 1) throw std::invalid_argument("ProductPcaLaw: need at least one atom");

    DiscreteLaw h2 = h;
    for (double& v : h2.values) v *= v;
    const AtomicMpLaw inner(2.0 * c, AtomicBulk(h2));

    DensitySweep inner_density(2.0 * c, h2);
    const CdfTable inner_table(std::ref(inner_density), inner.lower(), inner.upper(), panels);
    const double inner_zero = inner.zero_mass();
    const double positive = 1.0 - inner_zero;
    if (inner_zero > 0.0) {
        bulk_.values.push_back(0.0);
        bulk_.weights.push_back(inner_zero);
    }
    for (int j = 0; j < atoms; ++j) {
        const double level = (j + 0.5) / atoms * inner_table.total();
        const double v = inner_table.quantile(level);
        if (!bulk_.values.empty() && v <= bulk_.values.back()) {
            // Quantiles that coincide in double precision merge into one atom.
            bulk_.weights.back() += positive / atoms;
            continue;
        }
        bulk_.values.push_back(v);
        bulk_.weights.push_back(positive / atoms);
    }

    const AtomicMpLaw outer(2.0 * c, AtomicBulk(bulk_));
    zero_mass_ = outer.zero_mass();
    DensitySweep outer_density(2.0 * c, bulk_);
    outer_ = CdfTable(std::ref(outer_density), outer.lower(), outer.upper(), panels);
    // edges from the undiscretized nested law
    const auto support = ppca_support(c, h);
    lower_ = support.lower;
    upper_ = support.upper;
}

double ProductPcaLaw::lower() const { return lower_; }
double ProductPcaLaw::upper() const { return upper_; }

double ProductPcaLaw::pdf(double t) const {
    if (!(t > 0.0)) throw std::invalid_argument("ProductPcaLaw::pdf: need t > 0");
    const double s = t * t;
    if (s <= outer_.lo() || s >= outer_.hi()) return 0.0;
    return 2.0 * t * mp_density(2.0 * c_, bulk_, s);
}

double ProductPcaLaw::cdf(double t) const {
    if (t < 0.0) return 0.0;
    const double s = t * t;
    if (s >= outer_.hi()) return 1.0;
    // The continuous part carries exactly 1 - zero_mass; rescaling the table
    // removes the quadrature error in its total.
    return zero_mass_ + (1.0 - zero_mass_) * outer_(s) / outer_.total();
}

double ppca_lsd_cdf(double c, const DiscreteLaw& h, double t) {
    return ProductPcaLaw(c, h).cdf(t);
}

}  // namespace ppca::rmt
