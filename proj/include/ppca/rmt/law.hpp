#ifndef PPCA_RMT_LAW_HPP
#define PPCA_RMT_LAW_HPP

// Real-axis machinery of generalized Marcenko-Pastur laws F_{c,B}.
//
// Everything here is written against a "bulk" law B that only has to expose
//   moments(mu)  -> { int t/(mu-t) dB, int t^2/(mu-t)^2 dB }   (mu off supp B)
//   lower()      -> inf of the positive part of supp B
//   upper()      -> sup supp B
//   zero_mass()  -> B({0})
// so the same threshold and edge code runs on a discrete population law and on
// a Marcenko-Pastur law used as the bulk of a second one.
//
// With mu = -1/m_under the Silverstein map becomes
//   psi_{c,B}(mu) = mu (1 + c int t/(mu-t) dB),
// psi' = 1 - c int t^2/(mu-t)^2 dB, and the real branches outside the support
// of F_{c,B} are the intervals where psi is increasing.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <stdexcept>

#include "ppca/detail/roots.hpp"
#include "ppca/spectra.hpp"

namespace ppca::rmt {

struct Moments {
    double first;   // int t / (mu - t) dB(t)
    double second;  // int t^2 / (mu - t)^2 dB(t)
};

template <typename B>
concept BulkLaw = requires(const B& b, double mu) {
    { b.moments(mu) } -> std::same_as<Moments>;
    { b.lower() } -> std::convertible_to<double>;
    { b.upper() } -> std::convertible_to<double>;
    { b.zero_mass() } -> std::convertible_to<double>;
};

/// A discrete law used as a bulk.
class AtomicBulk {
public:
    explicit AtomicBulk(DiscreteLaw law) : law_(std::move(law)) {}

    Moments moments(double mu) const {
        Moments out{0.0, 0.0};
        for (std::size_t k = 0; k < law_.size(); ++k) {
            const double t = law_.values[k];
            if (t == 0.0) continue;
            const double r = t / (mu - t);
            out.first += law_.weights[k] * r;
            out.second += law_.weights[k] * r * r;
        }
        return out;
    }
    double lower() const { return law_.lower_positive(); }
    double upper() const { return law_.upper(); }
    double zero_mass() const { return law_.zero_mass(); }
    double mean() const { return law_.mean(); }
    const DiscreteLaw& law() const { return law_; }

private:
    DiscreteLaw law_;
};

template <BulkLaw B>
double psi(double c, const B& bulk, double mu) {
    return mu * (1.0 + c * bulk.moments(mu).first);
}

template <BulkLaw B>
double psi_prime(double c, const B& bulk, double mu) {
    return 1.0 - c * bulk.moments(mu).second;
}

/// Critical point of psi above supp B: the root of 1 = c int (t/(t-mu))^2 dB.
template <BulkLaw B>
double upper_critical(double c, const B& bulk) {
    const double u = bulk.upper();
    auto f = [&](double mu) { return c * bulk.moments(mu).second - 1.0; };
    const double lo = u * (1.0 + 1e-12) + 1e-300;
    double hi = u * (1.0 + std::sqrt(c)) * 10.0;
    for (int k = 0; f(hi) > 0.0; ++k) {
        if (k > 200) throw std::runtime_error("upper_critical: bracket expansion failed");
        hi *= 2.0;
    }
    if (!(f(lo) > 0.0))
        throw std::runtime_error("upper_critical: no sign change just above the bulk edge " +
                                 std::to_string(u));
    return detail::bisect(f, lo, hi, "upper_critical");
}

/// Mirrored critical point below the positive part of supp B. Lies in
/// (0, inf supp B) when c (1 - B{0}) < 1, at 0 when equal to 1, and on the
/// negative axis otherwise.
template <BulkLaw B>
double lower_critical(double c, const B& bulk) {
    auto f = [&](double mu) {
        if (mu == 0.0) return c * (1.0 - bulk.zero_mass()) - 1.0;
        return c * bulk.moments(mu).second - 1.0;
    };
    const double f0 = f(0.0);
    if (std::abs(f0) <= 1e-12) return 0.0;
    if (f0 < 0.0) {
        const double l = bulk.lower();
        if (!(l > 0.0)) return 0.0;
        const double hi = l * (1.0 - 1e-12);
        if (!(f(hi) > 0.0)) throw std::runtime_error("lower_critical: no sign change below the bulk");
        return detail::bisect(f, 0.0, hi, "lower_critical");
    }
    double lo = -std::max(1.0, bulk.upper());
    for (int k = 0; f(lo) > 0.0; ++k) {
        if (k > 200) throw std::runtime_error("lower_critical: bracket expansion failed");
        lo *= 2.0;
    }
    return detail::bisect(f, lo, 0.0, "lower_critical");
}

/// Real-axis value of the Stieltjes transform of F_{c,B} and its derivative.
struct RealStieltjes {
    double m;
    double m_prime;
    double m_under;
    double mu;  // -1 / m_under, the preimage under psi
};

/// F_{c,B} on the real axis: support edges, point mass at zero, and the
/// Stieltjes transform off the support. Also a BulkLaw itself.
template <BulkLaw B>
class MarchenkoPasturLaw {
public:
    MarchenkoPasturLaw(double c, B bulk) : c_(c), bulk_(std::move(bulk)) {
        if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("MarchenkoPasturLaw: need c > 0");
        mu_hi_ = rmt::upper_critical(c_, bulk_);
        mu_lo_ = rmt::lower_critical(c_, bulk_);
        x_hi_ = rmt::psi(c_, bulk_, mu_hi_);
        x_lo_ = mu_lo_ == 0.0 ? 0.0 : std::max(0.0, rmt::psi(c_, bulk_, mu_lo_));
        zero_mass_ = std::max({0.0, 1.0 - 1.0 / c_, bulk_.zero_mass()});
    }

    double ratio() const { return c_; }
    const B& bulk() const { return bulk_; }
    double upper_critical() const { return mu_hi_; }
    double lower_critical() const { return mu_lo_; }
    /// Upper edge of the support.
    double upper() const { return x_hi_; }
    /// Lower edge of the positive part of the support.
    double lower() const { return x_lo_; }
    double zero_mass() const { return zero_mass_; }

    /// Transform at real x above the support or below its positive part
    /// (x != 0). m' comes from implicit differentiation of the Silverstein
    /// equation: d m_under / dx = 1 / (mu^2 psi'(mu)).
    RealStieltjes stieltjes_real(double x) const {
        double mu;
        auto f = [&](double v) { return rmt::psi(c_, bulk_, v) - x; };
        if (x > x_hi_) {
            mu = detail::bisect(f, mu_hi_, std::max(x, 2.0 * mu_hi_), "stieltjes_real");
        } else if (x < x_lo_ && x != 0.0) {
            double lo = std::min({-1.0, 2.0 * x, 2.0 * mu_lo_});
            for (int k = 0; f(lo) > 0.0; ++k) {
                if (k > 200) throw std::runtime_error("stieltjes_real: bracket expansion failed");
                lo *= 2.0;
            }
            mu = detail::bisect(f, lo, mu_lo_, "stieltjes_real");
        } else {
            throw std::invalid_argument("stieltjes_real: x = " + std::to_string(x) +
                                        " is not outside the support");
        }
        RealStieltjes out;
        out.mu = mu;
        out.m_under = -1.0 / mu;
        out.m = (out.m_under - (c_ - 1.0) / x) / c_;
        const double dunder = 1.0 / (mu * mu * rmt::psi_prime(c_, bulk_, mu));
        out.m_prime = (dunder + (c_ - 1.0) / (x * x)) / c_;
        return out;
    }

    /// int t/(x-t) dF and int t^2/(x-t)^2 dF through
    ///   int t/(t-x) dF = 1 + x m(x),  int (t/(t-x))^2 dF = 1 + 2 x m(x) + x^2 m'(x).
    Moments moments(double x) const {
        if (x == 0.0) return {-(1.0 - zero_mass_), 1.0 - zero_mass_};
        const auto s = stieltjes_real(x);
        return {-(1.0 + x * s.m), 1.0 + 2.0 * x * s.m + x * x * s.m_prime};
    }

private:
    double c_;
    B bulk_;
    double mu_hi_ = 0.0;
    double mu_lo_ = 0.0;
    double x_hi_ = 0.0;
    double x_lo_ = 0.0;
    double zero_mass_ = 0.0;
};

using AtomicMpLaw = MarchenkoPasturLaw<AtomicBulk>;

}  // namespace ppca::rmt

#endif  // PPCA_RMT_LAW_HPP
