#include "ppca/rmt/stieltjes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace ppca::rmt {

namespace {

struct Eval {
    cplx f;
    cplx df;
    cplx bulk;  // sum_k w_k t_k / (1 + t_k m_under)
};

Eval evaluate(double c, const DiscreteLaw& h, cplx mu, cplx z) {
    cplx s1 = 0.0;
    cplx s2 = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
        const double t = h.values[k];
        const cplx inv = 1.0 / (1.0 + t * mu);
        const cplx term = h.weights[k] * t * inv;
        s1 += term;
        s2 += term * t * inv;
    }
    return {-1.0 / mu + c * s1 - z, 1.0 / (mu * mu) - c * s2, s1};
}

bool on_branch(double c, cplx mu, cplx z) {
    if (!(mu.imag() > 0.0) || !std::isfinite(mu.real()) || !std::isfinite(mu.imag())) return false;
    const cplx m = (mu - (c - 1.0) / z) / c;
    return m.imag() > -1e-12 * std::abs(m);
}

// Newton from mu; returns the root when the residual drops under tol.
std::optional<cplx> newton(double c, const DiscreteLaw& h, cplx mu, cplx z, const SolverTolerances& tol,
                           double* residual) {
    for (int it = 0; it < tol.newton_iters; ++it) {
        const Eval e = evaluate(c, h, mu, z);
        *residual = std::abs(e.f);
        if (*residual <= 1e-3 * tol.residual) break;
        const cplx step = e.f / e.df;
        mu -= step;
        if (!std::isfinite(mu.real()) || !std::isfinite(mu.imag())) return std::nullopt;
        if (std::abs(step) <= 1e-15 * std::abs(mu)) {
            *residual = std::abs(evaluate(c, h, mu, z).f);
            break;
        }
    }
    *residual = std::abs(evaluate(c, h, mu, z).f);
    if (*residual > tol.residual) return std::nullopt;
    return mu;
}

cplx fixed_point(double c, const DiscreteLaw& h, cplx mu, cplx z, const SolverTolerances& tol,
                 double stop) {
    for (int it = 0; it < tol.fixed_point_iters; ++it) {
        const Eval e = evaluate(c, h, mu, z);
        if (std::abs(e.f) <= stop) break;
        const cplx next = -1.0 / (z - c * e.bulk);
        mu = (1.0 - tol.damping) * mu + tol.damping * next;
    }
    return mu;
}

StieltjesEval finish(double c, cplx mu, cplx z, double residual) {
    return {z, (mu - (c - 1.0) / z) / c, mu, residual};
}

}  // namespace

cplx silverstein_residual(double c, const DiscreteLaw& h, cplx m_under, cplx z) {
    return evaluate(c, h, m_under, z).f;
}

StieltjesEval stieltjes(double c, const DiscreteLaw& h, cplx z, const SolverTolerances& tol) {
    if (!(z.imag() > 0.0)) throw std::invalid_argument("stieltjes: need Im z > 0");
    if (!(c > 0.0)) throw std::invalid_argument("stieltjes: need c > 0");

    double residual = 0.0;
    cplx mu = fixed_point(c, h, -1.0 / z, z, tol, 1e-6);
    if (auto root = newton(c, h, mu, z, tol, &residual); root && on_branch(c, *root, z))
        return finish(c, *root, z, residual);

    // Continuation in the imaginary part, tracking the branch from a height
    // where the fixed-point map contracts quickly.
    double height = std::max({1.0, 2.0 * std::abs(z), 4.0 * z.imag()});
    cplx start(z.real(), height);
    mu = fixed_point(c, h, -1.0 / start, start, tol, 1e-3 * tol.residual);
    auto root = newton(c, h, mu, start, tol, &residual);
    if (!root || !on_branch(c, *root, start))
        throw SolverError("stieltjes: no convergence at continuation start", residual);
    mu = *root;
    double ratio = 0.5;
    while (height > z.imag()) {
        const double next_height = std::max(z.imag(), height * ratio);
        const cplx zn(z.real(), next_height);
        auto step = newton(c, h, mu, zn, tol, &residual);
        if (step && on_branch(c, *step, zn)) {
            mu = *step;
            height = next_height;
            ratio = std::max(0.5, ratio * ratio);
        } else {
            ratio = std::sqrt(ratio);
            if (ratio > 0.9999) throw SolverError("stieltjes: continuation stalled", residual);
        }
    }
    return finish(c, mu, z, residual);
}

StieltjesEval stieltjes_from(double c, const DiscreteLaw& h, cplx z, cplx guess, const SolverTolerances& tol) {
    if (!(z.imag() > 0.0)) throw std::invalid_argument("stieltjes: need Im z > 0");
    double residual = 0.0;
    if (auto root = newton(c, h, guess, z, tol, &residual); root && on_branch(c, *root, z))
        return finish(c, *root, z, residual);
    return stieltjes(c, h, z, tol);
}

double mp_density(double c, const DiscreteLaw& h, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("mp_density: need t > 0");
    const double eta = std::max(1e-9, 1e-6 * t);
    const double d1 = stieltjes(c, h, {t, eta}).m.imag();
    const double d2 = stieltjes(c, h, {t, 0.5 * eta}).m.imag();
    return std::max(0.0, (2.0 * d2 - d1) / std::numbers::pi);
}

}  // namespace ppca::rmt
