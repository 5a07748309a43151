// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ppca/numkernel.hpp"
#include "ppca/rmt/product_law.hpp"
#include "ppca/rmt/spiked.hpp"
#include "ppca/rmt/ssm.hpp"
#include "ppca/rmt/stieltjes.hpp"
#include "ppca/robustness.hpp"
#include "ppca/simlab/config.hpp"
#include "ppca/simlab/experiments.hpp"
#include "ppca/spectra.hpp"

using namespace ppca;
using Eigen::MatrixXd;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
    std::printf("%s %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

sim::ExperimentConfig config(const std::string& text) {
    std::istringstream in(text);
    return sim::parse_config(in);
}

double summary_mean(const sim::ExperimentReport& rep, const std::string& metric) {
    const auto& s = rep.summary;
    for (std::size_t i = 0; i < s.labels.size(); ++i)
        if (s.labels[i] == metric) return s.rows[i][0];
    throw std::runtime_error("no summary metric " + metric);
}

DiscreteLaw atom(double s2) { return simple_spectrum(s2).bulk(); }

void spectrum_c04() {
    const auto t0 = std::chrono::steady_clock::now();
    auto cfg = config("n = 2000\np = 800\nreplicates = 1\nseed = 1\n");
    const auto rep = sim::run_spectrum_experiment(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double kp = rep.records.values("ks_ppca")[0];
    const double kc = rep.records.values("ks_pca")[0];
    report(1, kp <= 0.03 && kc <= 0.03 && secs <= 120.0,
           fmt("c=0.4 KS ppca %.4f, pca %.4f (<= 0.03), %.1f s (<= 120)", kp, kc, secs));
}

void spectrum_c2() {
    auto cfg = config("n = 2000\np = 4000\nreplicates = 1\nseed = 2\n");
    const auto rep = sim::run_spectrum_experiment(cfg);
    const double zp = rep.records.values("zero_frac_ppca")[0];
    const double zc = rep.records.values("zero_frac_pca")[0];
    const double kp = rep.records.values("ks_pos_ppca")[0];
    const double kc = rep.records.values("ks_pos_pca")[0];
    report(2, zp == 0.75 && zc == 0.5 && kp <= 0.04 && kc <= 0.04,
           fmt("c=2 zero fractions %.6f, %.6f (exact 0.75, 0.5); positive-part KS %.4f, %.4f (<= 0.04)", zp, zc, kp, kc));
}

void spike_regression() {
    auto cfg = config("n = 2000\np = 800\nspikes = 3\nreplicates = 50\nseed = 3\n");
    const auto rep = sim::run_spike_experiment(cfg);
    const double pp = summary_mean(rep, "ppca_1");
    const double pc = summary_mean(rep, "pca_1");
    const double dp = summary_mean(rep, "ppca_debiased_1");
    const double dc = summary_mean(rep, "pca_debiased_1");
    auto near = [](double v, double target) { return std::abs(v - target) <= 0.02 * target; };
    report(3, near(pp, 3.3) && near(pc, 3.6) && near(dp, 3.0) && near(dc, 3.0),
           fmt("50 reps: ppca %.4f (3.3), pca %.4f (3.6), debiased %.4f, %.4f (3.0), all within 2%%", pp, pc, dp, dc));
}

void master_suite() {
    double worst_const = 0.0, worst_pdf = 0.0, worst_int = 0.0;
    for (double s2 : {0.5, 1.0, 2.0})
        for (double c : {0.1, 0.4, 1.0, 2.0, 5.0}) {
            const auto g = rmt::generic_constants(c, atom(s2));
            const auto o = oracle::ssm(c, s2);
            for (const auto& [x, y] : std::vector<std::pair<double, double>>{{g.lambda_star, o.lambda_star},
                                                                             {g.lambda_prime, o.lambda_prime},
                                                                             {g.a, o.a},
                                                                             {g.b, o.b},
                                                                             {g.a_prime, o.a_prime},
                                                                             {g.b_prime, o.b_prime},
                                                                             {g.alpha, std::max(o.alpha, 0.0)},
                                                                             {g.beta, o.beta},
                                                                             {g.mass0_ppca, o.mass0_ppca},
                                                                             {g.mass0_pca, o.mass0_pca}})
                worst_const = std::max(worst_const, std::abs(x - y));

            const rmt::ProductPcaLaw law(c, atom(s2));
            for (int i = 1; i < 40; ++i) {
                const double t = o.a + (o.b - o.a) * i / 40.0;
                worst_pdf = std::max(worst_pdf, std::abs(law.pdf(t) - oracle::ssm_g(c, s2, t)));
            }
            for (int i = 1; i < 40; ++i) {
                const double t = o.a_prime + (o.b_prime - o.a_prime) * i / 40.0;
                worst_pdf = std::max(worst_pdf, std::abs(rmt::mp_density(c, atom(s2), t) - oracle::mp_pdf(c, s2, t)));
            }
            const rmt::SsmParams p(c, s2);
            const double fi = oracle::tanh_sinh([&](double t) { return rmt::ssm_f_pdf(p, t); }, o.a_prime, o.b_prime);
            const double gi = oracle::tanh_sinh([&](double t) { return rmt::ssm_g_pdf(p, t); },
                                                std::sqrt(std::max(o.alpha, 0.0)), std::sqrt(o.beta));
            worst_int = std::max({worst_int, std::abs(fi - std::min(1.0, 1.0 / c)), std::abs(gi - std::min(1.0, 0.5 / c))});
        }
    report(4, worst_const <= 1e-6 && worst_pdf <= 5e-3 && worst_int <= 1e-6,
           fmt("15 (sigma2, c) cells: constants %.2e (<= 1e-6), densities %.2e (<= 5e-3), integrals %.2e (<= 1e-6)",
               worst_const, worst_pdf, worst_int));
}

void bias_ordering() {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> level(0.2, 3.0);
    std::uniform_real_distribution<double> wt(0.1, 1.0);
    std::uniform_real_distribution<double> ratio(0.05, 5.0);
    std::uniform_real_distribution<double> factor(1.5, 6.0);
    int order_ok = 0, gap_ok = 0;
    const int trials = 200;
    for (int trial = 0; trial < trials; ++trial) {
        const int atoms = 2 + trial % 4;
        std::vector<PopulationSpectrum::Atom> a;
        double total = 0.0, v = 0.0;
        std::vector<double> w;
        for (int k = 0; k < atoms; ++k) total += w.emplace_back(wt(gen));
        for (int k = 0; k < atoms; ++k) a.push_back({v += level(gen), w[static_cast<std::size_t>(k)] / total});
        const DiscreteLaw h = make_spectrum(a).bulk();
        const double c = ratio(gen);
        const double lambda = factor(gen) * rmt::ppca_threshold(c, h).lambda_star;
        const auto b = rmt::bias_report(c, h, lambda);
        if (b.psi_pca > b.psi_ppca && b.psi_ppca > lambda) ++order_ok;
        const double cm = c * h.mean();
        if (b.gap > 0.5 * cm && b.gap < cm) ++gap_ok;
    }
    report(5, order_ok == trials && gap_ok == trials,
           fmt("%g random bulks: psi' > psi > lambda in %g, gap in (c mu/2, c mu) in %g", trials, order_ok, gap_ok));
}

void rho_curve() {
    double low = 0.0, drop = 0.0;
    double prev = rmt::rho(0.0);
    for (int i = 0; i <= 1000; ++i) {
        const double r = rmt::rho(i / 100.0);
        low = std::max(low, (1.0 - 1e-12) - r);
        drop = std::max(drop, prev - r);
        prev = r;
    }
    report(6, low <= 0.0 && drop <= 1e-12,
           fmt("rho on 0:0.01:10: min shortfall below 1 %.2e, largest decrease %.2e (<= 1e-12)", std::max(low, 0.0), drop));
}

void robustness_analytics() {
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> eta(0.0, 300.0);
    std::uniform_real_distribution<double> eps(0.0, 0.05);
    std::uniform_real_distribution<double> lam(2.0, 8.0);
    const int p = 10;
    double worst = 0.0;
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t K = static_cast<std::size_t>(trial % 4);
        std::vector<double> etas;
        for (std::size_t k = 0; k < K; ++k) etas.push_back(eta(gen));
        const std::size_t k1 = K == 0 ? 0 : static_cast<std::size_t>(trial) % (K + 1);
        const robust::PerturbationScenario s(eps(gen), etas, k1, lam(gen), 0.4);
        RngStream rng(9, static_cast<std::uint64_t>(trial));
        const MatrixXd dirs = robust::perturbation_directions(K, p, rng);
        const auto a = robust::assign_first(K, k1);
        const auto ev = num::sym_eig(robust::build_perturbed_sigma(s, dirs), false).values;
        const auto sv = num::svd_full(robust::build_ppca_population(s, a, dirs), false).singular_values;
        const auto want_pca = robust::pca_perturbed_spectrum(s).sorted_values(p);
        const auto want_ppca = robust::ppca_perturbed_spectrum(s, a).sorted_values(p);
        for (int i = 0; i < p; ++i) {
            worst = std::max(worst, std::abs(ev(i) - want_pca[static_cast<std::size_t>(i)]) / std::max(1.0, want_pca[0]));
            worst = std::max(worst, std::abs(sv(i) - want_ppca[static_cast<std::size_t>(i)]) / std::max(1.0, want_ppca[0]));
        }
    }
    const auto split = robust::assign_first(2, 1);
    const robust::PerturbationScenario s70(0.01, {70, 70}, 1, 3.0, 0.4);
    const robust::PerturbationScenario s200(0.01, {200, 200}, 1, 3.0, 0.4);
    const auto rc = robust::target_rank(s70, robust::Method::Pca, split);
    const auto rp = robust::target_rank(s70, robust::Method::Ppca, split);
    const bool pca_breaks = robust::ordering_breaks(s200, 0, robust::Method::Pca, split);
    const bool ppca_breaks = robust::ordering_breaks(s200, 0, robust::Method::Ppca, split);
    report(7, worst <= 1e-8 && rc == 3 && rp == 1 && pca_breaks && !ppca_breaks,
           fmt("matrix oracle error %.2e (<= 1e-8); eta=70 ranks pca %g, ppca %g (3, 1); ", worst,
               static_cast<double>(rc), static_cast<double>(rp)) +
               "eta=200 ordering breaks for pca " + (pca_breaks ? "yes" : "no") + ", ppca " + (ppca_breaks ? "yes" : "no") +
               " (yes, no)");
}

void heavy_tail() {
    auto cfg = config("n = 500\np = 200\nmodel = student_t\nnu = 2.5\nspikes = auto\nreplicates = 100\nseed = 8\n");
    const auto rep = sim::run_robustness_experiment(cfg);
    const double rp = summary_mean(rep, "r_ppca");
    const double rc = summary_mean(rep, "r_pca");
    bool xi_ok = true;
    std::string xi;
    for (int q = 2; q <= 5; ++q) {
        const double a = summary_mean(rep, "xi_ppca_" + std::to_string(q));
        const double b = summary_mean(rep, "xi_pca_" + std::to_string(q));
        xi_ok = xi_ok && a >= b;
        xi += fmt(" q=%g %.3f/%.3f", q, a, b);
    }
    report(8, rp < rc && xi_ok, fmt("t(2.5), 100 reps: mean r ppca %.2f < pca %.2f; xi ppca/pca", rp, rc) + xi);
}

void theory_columns() {
    // the spike runner's theory column against the closed forms
    auto cfg = config("n = 500\np = 200\nspikes = 3\nreplicates = 1\nseed = 4\n");
    const auto rep = sim::run_spike_experiment(cfg);
    const auto o = oracle::ssm(0.4, 1.0);
    double worst = 0.0;
    auto theory = [&](const std::string& m) {
        for (std::size_t i = 0; i < rep.summary.labels.size(); ++i)
            if (rep.summary.labels[i] == m) return rep.summary.rows[i][2];
        throw std::runtime_error("no summary metric " + m);
    };
    for (const auto& [m, v] : std::vector<std::pair<std::string, double>>{{"ppca_1", 3.3},
                                                                        {"pca_1", oracle::psi(0.4, {1.0}, {1.0}, 3.0)},
                                                                        {"ppca_debiased_1", 3.0},
                                                                        {"pca_debiased_1", 3.0},
                                                                        {"ppca_next", o.b},
                                                                        {"ppca_last", o.a},
                                                                        {"pca_next", o.b_prime},
                                                                        {"pca_last", o.a_prime}})
        worst = std::max(worst, std::abs(theory(m) - v));
    report(9, worst <= 1e-6, fmt("printed table not used; theory columns recomputed from the closed forms, max error %.2e", worst));
}

}  // namespace

int main() {
    spectrum_c04();
    spectrum_c2();
    spike_regression();
    master_suite();
    bias_ordering();
    rho_curve();
    robustness_analytics();
    heavy_tail();
    theory_columns();
    std::printf("%s: %d failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
