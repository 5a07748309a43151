#include "ppca/rmt/spiked.hpp"

#include <cmath>
#include <string>

namespace ppca::rmt {

namespace {

DiscreteLaw squared(const DiscreteLaw& h) {
    DiscreteLaw out = h;
    for (double& v : out.values) v *= v;
    return out;
}

void require_ratio(double c, const char* what) {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument(std::string(what) + ": need c > 0");
}

void require_above_bulk(const DiscreteLaw& h, double lambda, const char* what) {
    if (!(lambda > h.upper()))
        throw std::invalid_argument(std::string(what) + ": lambda = " + std::to_string(lambda) +
                                    " is not above the bulk edge " + std::to_string(h.upper()));
}

using OuterLaw = MarchenkoPasturLaw<AtomicMpLaw>;

}  // namespace

double psi(double c, const DiscreteLaw& h, double lambda) {
    require_above_bulk(h, lambda, "psi");
    return rmt::psi(c, AtomicBulk(h), lambda);
}

RealStieltjes stieltjes_real(double c, const DiscreteLaw& h, double x) {
    require_ratio(c, "stieltjes_real");
    return AtomicMpLaw(c, AtomicBulk(h)).stieltjes_real(x);
}

AtomicMpLaw ppca_inner_law(double c, const DiscreteLaw& h) {
    require_ratio(c, "ppca_inner_law");
    return AtomicMpLaw(2.0 * c, AtomicBulk(squared(h)));
}

PcaThreshold pca_threshold(double c, const DiscreteLaw& h) {
    require_ratio(c, "pca_threshold");
    const AtomicBulk bulk(h);
    const double lp = upper_critical(c, bulk);
    return {lp, rmt::psi(c, bulk, lp)};
}

PpcaThreshold ppca_threshold(double c, const DiscreteLaw& h) {
    const OuterLaw outer(2.0 * c, ppca_inner_law(c, h));
    // x* solves 1 = 2c int (t/(t-x))^2 dF_{2c,H^2}; its preimage under
    // psi_{2c,H^2} is lambda*^2.
    const double x = outer.upper_critical();
    const double s = outer.bulk().stieltjes_real(x).mu;
    PpcaThreshold out;
    out.lambda_star = std::sqrt(s);
    out.outer_critical = x;
    out.b = x / out.lambda_star;
    out.beta = outer.upper();
    return out;
}

PcaSupport pca_support(double c, const DiscreteLaw& h) {
    require_ratio(c, "pca_support");
    const AtomicMpLaw law(c, AtomicBulk(h));
    return {law.lower(), law.upper(), law.zero_mass()};
}

PpcaSupport ppca_support(double c, const DiscreteLaw& h) {
    const OuterLaw outer(2.0 * c, ppca_inner_law(c, h));
    PpcaSupport out;
    out.alpha = outer.lower();
    out.beta = outer.upper();
    out.lower = std::sqrt(out.alpha);
    out.upper = std::sqrt(out.beta);
    out.zero_mass = outer.zero_mass();
    return out;
}

SpikedLimit pca_limit(double c, const DiscreteLaw& h, double lambda) {
    require_above_bulk(h, lambda, "pca_limit");
    if (c == 0.0) return {SpikedLimit::Tag::Distant, lambda};
    const auto th = pca_threshold(c, h);
    if (lambda > th.lambda_prime) return {SpikedLimit::Tag::Distant, psi(c, h, lambda)};
    return {SpikedLimit::Tag::Stuck, th.b_prime};
}

SpikedLimit ppca_limit(double c, const DiscreteLaw& h, double lambda) {
    require_above_bulk(h, lambda, "ppca_limit");
    if (c == 0.0) return {SpikedLimit::Tag::Distant, lambda};
    const auto th = ppca_threshold(c, h);
    if (lambda > th.lambda_star)
        return {SpikedLimit::Tag::Distant, psi(2.0 * c, squared(h), lambda * lambda) / lambda};
    return {SpikedLimit::Tag::Stuck, th.b};
}

BiasReport bias_report(double c, const DiscreteLaw& h, double lambda) {
    const auto pp = ppca_limit(c, h, lambda);
    const auto pc = pca_limit(c, h, lambda);
    if (!pp.distant() || !pc.distant())
        throw std::invalid_argument("bias_report: lambda = " + std::to_string(lambda) +
                                    " is not a distant spike for both methods");
    return {lambda, pp.value, pc.value, pc.value - pp.value};
}

double rho(double c) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("rho: need c >= 0");
    const double r = std::sqrt(c * c + 4.0 * c);
    return (1.0 + std::sqrt(c)) / std::sqrt(2.0) * std::sqrt((2.0 + c + r) / (1.0 + c + r));
}

SpectralConstants generic_constants(double c, const DiscreteLaw& h) {
    const auto pt = pca_threshold(c, h);
    const auto qt = ppca_threshold(c, h);
    const auto ps = pca_support(c, h);
    const auto qs = ppca_support(c, h);
    SpectralConstants k;
    k.lambda_star = qt.lambda_star;
    k.lambda_prime = pt.lambda_prime;
    k.a = qs.lower;
    k.b = qs.upper;
    k.a_prime = ps.lower;
    k.b_prime = ps.upper;
    k.alpha = qs.alpha;
    k.beta = qs.beta;
    k.mass0_ppca = qs.zero_mass;
    k.mass0_pca = ps.zero_mass;
    return k;
}

}  // namespace ppca::rmt
