#ifndef PPCA_TESTS_ORACLES_HPP
#define PPCA_TESTS_ORACLES_HPP

// Independent reference implementations used only by the tests. Nothing here
// calls into the library, so agreement is a genuine cross-check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

/// Stieltjes transform of the Marcenko-Pastur law F_{c,s2} from the quadratic
///   c s2 z m^2 + (z - s2 (1 - c)) m + 1 = 0,
/// taking the root in the upper half plane.
inline cplx mp_stieltjes(double c, double s2, cplx z) {
    const cplx a = c * s2 * z;
    const cplx b = z - s2 * (1.0 - c);
    const cplx disc = std::sqrt(b * b - 4.0 * a);
    const cplx r1 = (-b + disc) / (2.0 * a);
    const cplx r2 = (-b - disc) / (2.0 * a);
    return r1.imag() > r2.imag() ? r1 : r2;
}

/// Same transform at real x above the support: the root with |m| <= 1/(x - b').
inline double mp_stieltjes_real(double c, double s2, double x) {
    const double a = c * s2 * x;
    const double b = x - s2 * (1.0 - c);
    const double disc = std::sqrt(b * b - 4.0 * a);
    const double r1 = (-b + disc) / (2.0 * a);
    const double r2 = (-b - disc) / (2.0 * a);
    return std::abs(r1) < std::abs(r2) ? r1 : r2;
}

/// d m / dx from implicit differentiation of the quadratic.
inline double mp_stieltjes_real_prime(double c, double s2, double x) {
    const double m = mp_stieltjes_real(c, s2, x);
    return -(c * s2 * m * m + m) / (2.0 * c * s2 * x * m + x - s2 * (1.0 - c));
}

inline double mp_lower(double c, double s2) { return s2 * std::pow(1.0 - std::sqrt(c), 2); }
inline double mp_upper(double c, double s2) { return s2 * std::pow(1.0 + std::sqrt(c), 2); }

inline double mp_pdf(double c, double s2, double t) {
    const double lo = mp_lower(c, s2), hi = mp_upper(c, s2);
    if (t <= lo || t >= hi) return 0.0;
    return std::sqrt((t - lo) * (hi - t)) / (2.0 * std::numbers::pi * c * s2 * t);
}

/// Tanh-sinh quadrature on [a, b]; tolerant of integrable endpoint
/// singularities. Abscissae are placed by their distance to the nearer end so
/// points close to an edge keep full precision.
inline double tanh_sinh(const std::function<double(double)>& f, double a, double b, int levels = 10) {
    const double half = 0.5 * (b - a);
    auto term = [&](double t) {
        const double s = 0.5 * std::numbers::pi * std::sinh(t);
        const double ch = std::cosh(s);
        const double w = 0.5 * std::numbers::pi * std::cosh(t) / (ch * ch);
        const double gap = half / (std::exp(std::abs(s)) * ch);  // half * (1 - |tanh s|)
        const double x = s < 0 ? a + gap : b - gap;
        if (!(x > a && x < b)) return 0.0;
        return w * f(x);
    };
    double h = 1.0;
    double sum = term(0.0);
    for (int k = 1; k * h <= 4.0; ++k) sum += term(k * h) + term(-k * h);
    double prev = sum * h * half;
    for (int level = 1; level <= levels; ++level) {
        h *= 0.5;
        for (int k = 1; k * h <= 4.0; k += 2) sum += term(k * h) + term(-k * h);
        const double cur = sum * h * half;
        if (level > 3 && std::abs(cur - prev) < 1e-14 * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

/// Simple-spiked constants, coded straight from their closed forms.
struct Ssm {
    double lambda_star, lambda_prime, a, b, a_prime, b_prime, alpha, beta, mass0_ppca, mass0_pca;
};

inline Ssm ssm(double c, double s2) {
    const double r = std::sqrt(c * c + 4 * c);
    const double s4 = s2 * s2;
    Ssm o{};
    o.lambda_star = s2 * std::sqrt(1 + c + r);
    o.lambda_prime = s2 * (1 + std::sqrt(c));
    o.a = c < 0.5 ? s2 * std::sqrt(1 + c - r) * (1 - (r + c) / 2) : 0.0;
    o.b = s2 * std::sqrt(1 + c + r) * (1 + (r - c) / 2);
    o.a_prime = s2 * std::pow(1 - std::sqrt(c), 2);
    o.b_prime = s2 * std::pow(1 + std::sqrt(c), 2);
    o.alpha = ((2 + 10 * c - c * c) - std::sqrt(c * std::pow(c + 4, 3))) / 2 * s4;
    o.beta = ((2 + 10 * c - c * c) + std::sqrt(c * std::pow(c + 4, 3))) / 2 * s4;
    o.mass0_ppca = std::max(0.0, 1 - 1 / (2 * c));
    o.mass0_pca = std::max(0.0, 1 - 1 / c);
    return o;
}

/// Continuous part of the PPCA singular-value density for the simple model.
inline double ssm_g(double c, double s2, double t) {
    const Ssm k = ssm(c, s2);
    const double t2 = t * t;
    if (t2 <= k.alpha || t2 >= k.beta) return 0.0;
    const double root = std::sqrt((t2 - k.alpha) * (k.beta - t2));
    const double shift = (9 * (c + 1) * s2 * t2 + std::pow(2 * c - 1, 3) * s2 * s2 * s2) / (3 * std::sqrt(3.0));
    auto two_thirds = [](double x) { return std::pow(std::cbrt(x), 2); };
    const double kappa = two_thirds(t * root + shift) + two_thirds(t * root - shift) +
                         (3 * t2 + std::pow(2 * c - 1, 2) * s2 * s2) / 3;
    return root / (kappa * std::numbers::pi * c * s2);
}

/// psi of a discrete law: lambda (1 + c sum w t / (lambda - t)).
inline double psi(double c, const std::vector<double>& t, const std::vector<double>& w, double lambda) {
    double s = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) s += w[k] * t[k] / (lambda - t[k]);
    return lambda * (1 + c * s);
}

/// Debiased PPCA value straight from the estimator's definition (j 1-based).
inline double debias_ppca(const std::vector<double>& s, double c, std::size_t j) {
    const double z = s[j - 1] * s[j - 1];
    double acc = 0.0;
    for (std::size_t l = j; l < s.size(); ++l) acc += 1.0 / (s[l] * s[l] - z);
    const double sj = acc / static_cast<double>(s.size() - j);
    const double under = 2 * c * sj + (2 * c - 1) / z;
    return -1.0 / (under * s[j - 1]);
}

inline double debias_pca(const std::vector<double>& e, double c, std::size_t j) {
    const double z = e[j - 1];
    double acc = 0.0;
    for (std::size_t l = j; l < e.size(); ++l) acc += 1.0 / (e[l] - z);
    const double mj = acc / static_cast<double>(e.size() - j);
    return -1.0 / (c * mj + (c - 1) / z);
}

inline double rho(double c) {
    const double r = std::sqrt(c * c + 4 * c);
    return (1 + std::sqrt(c)) / std::sqrt(2.0) * std::sqrt((2 + c + r) / (1 + c + r));
}

}  // namespace oracle

#endif  // PPCA_TESTS_ORACLES_HPP
