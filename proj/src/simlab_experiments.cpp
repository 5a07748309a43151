#include "ppca/simlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

#include "ppca/estimators.hpp"
#include "ppca/numkernel.hpp"
#include "ppca/rmt/spiked.hpp"
#include "ppca/rmt/ssm.hpp"

namespace ppca::sim {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Sub-stream tags of one replicate.
enum : std::uint64_t { kRotation = 1, kEntries = 2, kOutliers = 3, kPartition = 4 };

double uniform01(RngStream& rng) {
    const std::uint64_t hi = rng() >> 5;
    const std::uint64_t lo = rng() >> 6;
    return static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
}

// Bulk levels for the p - r non-spiked coordinates, largest remainder
// rounding of the atom weights.
std::vector<double> bulk_levels(const DiscreteLaw& h, Index count) {
    std::vector<Index> take(h.size());
    std::vector<std::pair<double, std::size_t>> rem;
    Index used = 0;
    for (std::size_t k = 0; k < h.size(); ++k) {
        const double exact = h.weights[k] * static_cast<double>(count);
        take[k] = static_cast<Index>(std::floor(exact));
        used += take[k];
        rem.emplace_back(exact - std::floor(exact), k);
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; used < count; ++i, ++used) ++take[rem[i % rem.size()].second];
    std::vector<double> out;
    for (std::size_t k = h.size(); k-- > 0;) out.insert(out.end(), static_cast<std::size_t>(take[k]), h.values[k]);
    return out;
}

}  // namespace

GeneratedData gen_data(const ExperimentConfig& cfg, std::uint64_t replicate) {
    cfg.validate();
    const auto spec = cfg.population();
    const Index n = cfg.n;
    const Index p = cfg.p;
    const auto r = static_cast<Index>(spec.spikes().size());
    const auto n_out = static_cast<Index>(cfg.outlier_etas.size());

    VectorXd lambda(p);
    for (Index j = 0; j < r; ++j) lambda(j) = spec.spikes()[static_cast<std::size_t>(j)];
    const auto levels = bulk_levels(spec.bulk(), p - r);
    for (Index j = r; j < p; ++j) lambda(j) = levels[static_cast<std::size_t>(j - r)];

    const double s = cfg.model == Model::StudentT ? (cfg.nu - 2.0) / cfg.nu : 1.0;
    const RngStream base(cfg.seed, replicate);

    GeneratedData out;
    out.heavy_tail = cfg.model == Model::StudentT && cfg.nu <= 4.0;

    RngStream entries = base.substream(kEntries);
    MatrixXd z(n, p);
    if (cfg.model == Model::Gaussian) {
        std::normal_distribution<double> dist;
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < p; ++j) z(i, j) = dist(entries);
    } else {
        std::student_t_distribution<double> dist(cfg.nu);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < p; ++j) z(i, j) = dist(entries);
    }

    const bool isotropic = (lambda.array() == lambda(0)).all() && n_out == 0;
    MatrixXd gamma;
    if (isotropic) {
        out.x = std::sqrt(s * lambda(0)) * z;
        out.signal = MatrixXd::Identity(p, r);
    } else {
        RngStream rot = base.substream(kRotation);
        gamma = num::random_orthogonal<double>(p, rot);
        const MatrixXd root = gamma * (s * lambda.array()).sqrt().matrix().asDiagonal() * gamma.transpose();
        out.x.noalias() = z * root;
        out.signal = gamma.leftCols(r);
    }

    if (n_out > 0 && cfg.outlier_eps > 0.0) {
        RngStream orng = base.substream(kOutliers);
        std::normal_distribution<double> normal;
        for (Index i = 0; i < n; ++i) {
            const double u = uniform01(orng);
            const double g = normal(orng);
            const auto k = static_cast<Index>(std::floor(u / cfg.outlier_eps));
            if (k < n_out)
                out.x.row(i) = std::sqrt(cfg.outlier_etas[static_cast<std::size_t>(k)]) * g *
                               gamma.col(r + k).transpose();
        }
    }
    return out;
}

std::size_t Table::column(const std::string& name) const {
    const std::size_t offset = labels.empty() ? 0 : 1;
    for (std::size_t k = offset; k < header.size(); ++k)
        if (header[k] == name) return k - offset;
    throw std::out_of_range("table has no column '" + name + "'");
}

std::vector<double> Table::values(const std::string& name) const {
    const auto k = column(name);
    std::vector<double> out;
    for (const auto& row : rows) out.push_back(row[k]);
    return out;
}

void write_csv(std::ostream& out, const Table& t) {
    for (std::size_t k = 0; k < t.header.size(); ++k) out << (k ? "," : "") << t.header[k];
    out << '\n';
    char buf[64];
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        bool first = true;
        if (!t.labels.empty()) {
            out << t.labels[i];
            first = false;
        }
        for (double v : t.rows[i]) {
            std::snprintf(buf, sizeof buf, "%.10g", v);
            out << (first ? "" : ",") << buf;
            first = false;
        }
        out << '\n';
    }
}

void write_csv(const std::string& path, const Table& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_csv(out, t);
    if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<std::string> write_report(const ExperimentReport& r, const std::string& prefix) {
    std::vector<std::string> paths;
    auto emit = [&](const std::string& name, const Table& t) {
        paths.push_back(prefix + name + ".csv");
        write_csv(paths.back(), t);
    };
    emit(r.kind + "_replicates", r.records);
    emit(r.kind + "_summary", r.summary);
    for (const auto& [name, t] : r.extra) emit(name, t);
    return paths;
}

namespace {

double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

}  // namespace

double pairwise_mean(const std::vector<double>& v) {
    if (v.empty()) return kNaN;
    return pairwise_sum(v.data(), v.size()) / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = pairwise_mean(v);
    std::vector<double> sq;
    sq.reserve(v.size());
    for (double x : v) sq.push_back((x - m) * (x - m));
    return std::sqrt(pairwise_sum(sq.data(), sq.size()) / static_cast<double>(v.size() - 1));
}

void parallel_for(long count, long threads, const std::function<void(long)>& body) {
    if (threads <= 1 || count <= 1) {
        for (long i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (long t = 0; t < std::min(threads, count); ++t) {
        pool.emplace_back([&] {
            for (long i; (i = next.fetch_add(1)) < count;) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!failure) failure = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

namespace {

// Mean, SD and theory value for each named record column.
Table summarize(const Table& records, const std::vector<std::pair<std::string, double>>& theory) {
    Table out;
    out.header = {"metric", "mean", "sd", "theory"};
    for (const auto& [name, value] : theory) {
        const auto v = records.values(name);
        out.labels.push_back(name);
        out.rows.push_back({pairwise_mean(v), sample_sd(v), value});
    }
    return out;
}

// KS distance over the sample values, their left limits and a regular grid.
double ks_full(const Esd& e, const std::function<double(double)>& cdf, double hi) {
    std::vector<double> grid = linspace(0.0, hi, 401);
    for (double v : e.values()) {
        grid.push_back(v);
        grid.push_back(std::nextafter(v, -std::numeric_limits<double>::infinity()));
    }
    return ks_distance(e, cdf, grid);
}

ExperimentReport start(const std::string& kind, const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentReport rep;
    rep.kind = kind;
    rep.replicates = cfg.replicates;
    if (cfg.model == Model::StudentT && cfg.nu <= 4.0)
        rep.warnings.push_back("student_t with nu <= 4 has infinite fourth moment");
    return rep;
}

}  // namespace

ExperimentReport run_spectrum_experiment(const ExperimentConfig& cfg) {
    auto rep = start("spectrum", cfg);
    if (!cfg.simple()) throw std::invalid_argument("spectrum experiment needs a single-atom bulk");
    const rmt::SsmParams sp(cfg.ratio(), cfg.sigma2);
    const auto k = rmt::ssm_closed_forms(sp);
    const double hi = 1.1 * std::max(k.b, k.b_prime);
    auto g_cdf = [&](double t) { return rmt::ssm_g_cdf(sp, t); };
    auto f_cdf = [&](double t) { return rmt::ssm_f_cdf(sp, t); };
    auto g_cont = [&](double t) { return (g_cdf(t) - k.mass0_ppca) / (1.0 - k.mass0_ppca); };
    auto f_cont = [&](double t) { return (f_cdf(t) - k.mass0_pca) / (1.0 - k.mass0_pca); };

    const auto bins = static_cast<std::size_t>(cfg.bins);
    const double width = hi / static_cast<double>(bins);
    struct Result {
        std::vector<double> row;
        std::vector<double> hist_ppca, hist_pca;
        double pos_ppca = 0, pos_pca = 0;
    };
    std::vector<Result> results(static_cast<std::size_t>(cfg.replicates));
    parallel_for(cfg.replicates, cfg.threads, [&](long i) {
        const auto data = gen_data(cfg, static_cast<std::uint64_t>(i));
        RngStream part = RngStream(cfg.seed, static_cast<std::uint64_t>(i)).substream(kPartition);
        const auto pf = est::ppca_fit(data.x, part, {false});
        const auto cf = est::pca_fit(data.x, {false});
        const Esd eq(std::vector<double>(pf.singular_values.begin(), pf.singular_values.end()), 1e-12);
        const Esd ec(std::vector<double>(cf.eigenvalues.begin(), cf.eigenvalues.end()), 1e-12);
        const Esd eq_pos(eq.positive_part());
        const Esd ec_pos(ec.positive_part());
        Result& res = results[static_cast<std::size_t>(i)];
        res.row = {static_cast<double>(i),
                   ks_full(eq, g_cdf, hi),
                   ks_full(ec, f_cdf, hi),
                   ks_full(eq_pos, g_cont, hi),
                   ks_full(ec_pos, f_cont, hi),
                   eq.zero_fraction(),
                   ec.zero_fraction()};
        auto fill = [&](const Esd& e, std::vector<double>& h, double& count) {
            h.assign(bins, 0.0);
            for (double v : e.values()) {
                const auto b = static_cast<std::size_t>(v / width);
                if (b < bins) h[b] += 1.0;
            }
            count = static_cast<double>(e.dim());
        };
        fill(eq_pos, res.hist_ppca, res.pos_ppca);
        fill(ec_pos, res.hist_pca, res.pos_pca);
    });

    rep.records.header = {"replicate", "ks_ppca", "ks_pca", "ks_pos_ppca", "ks_pos_pca", "zero_frac_ppca",
                          "zero_frac_pca"};
    for (const auto& r : results) rep.records.rows.push_back(r.row);
    rep.summary = summarize(rep.records, {{"ks_ppca", kNaN},
                                          {"ks_pca", kNaN},
                                          {"ks_pos_ppca", kNaN},
                                          {"ks_pos_pca", kNaN},
                                          {"zero_frac_ppca", k.mass0_ppca},
                                          {"zero_frac_pca", k.mass0_pca}});

    // Pooled histogram of the positive parts, scaled to integrate to the
    // continuous mass so it overlays g and f directly.
    Table hist;
    hist.header = {"bin_lo", "bin_hi", "ppca_density", "pca_density", "g_mid", "f_mid"};
    double total_q = 0, total_c = 0;
    for (const auto& r : results) {
        total_q += r.pos_ppca;
        total_c += r.pos_pca;
    }
    for (std::size_t b = 0; b < bins; ++b) {
        double hq = 0, hc = 0;
        for (const auto& r : results) {
            hq += r.hist_ppca[b];
            hc += r.hist_pca[b];
        }
        const double lo = static_cast<double>(b) * width;
        const double mid = lo + 0.5 * width;
        hist.rows.push_back({lo, lo + width, hq / (total_q * width) * (1.0 - k.mass0_ppca),
                             hc / (total_c * width) * (1.0 - k.mass0_pca), rmt::ssm_g_pdf(sp, mid),
                             rmt::ssm_f_pdf(sp, mid)});
    }
    rep.extra.emplace_back("spectrum_hist", std::move(hist));

    Table overlay;
    overlay.header = {"t", "g", "f"};
    for (double t : linspace(hi / 400.0, hi, 400))
        overlay.rows.push_back({t, rmt::ssm_g_pdf(sp, t), rmt::ssm_f_pdf(sp, t)});
    rep.extra.emplace_back("spectrum_overlay", std::move(overlay));
    return rep;
}

ExperimentReport run_spike_experiment(const ExperimentConfig& cfg) {
    auto rep = start("spike", cfg);
    const auto spec = cfg.population();
    const auto& h = spec.bulk();
    const auto& spikes = spec.spikes();
    const std::size_t r = spikes.size();
    if (r == 0) throw std::invalid_argument("spike experiment needs at least one spike");
    const double c = cfg.ratio();
    const auto p = static_cast<std::size_t>(cfg.p);

    std::vector<std::pair<std::string, double>> theory;
    const auto qs = rmt::ppca_support(c, h);
    const auto ps = rmt::pca_support(c, h);
    for (std::size_t j = 0; j < r; ++j) {
        const auto tag = std::to_string(j + 1);
        theory.emplace_back("ppca_" + tag, rmt::ppca_limit(c, h, spikes[j]).value);
        theory.emplace_back("ppca_debiased_" + tag, spikes[j]);
        theory.emplace_back("pca_" + tag, rmt::pca_limit(c, h, spikes[j]).value);
        theory.emplace_back("pca_debiased_" + tag, spikes[j]);
    }
    theory.emplace_back("ppca_next", qs.upper);
    theory.emplace_back("ppca_last", qs.zero_mass > 0.0 ? 0.0 : qs.lower);
    theory.emplace_back("pca_next", ps.upper);
    theory.emplace_back("pca_last", ps.zero_mass > 0.0 ? 0.0 : ps.lower);

    std::vector<std::vector<double>> rows(static_cast<std::size_t>(cfg.replicates));
    parallel_for(cfg.replicates, cfg.threads, [&](long i) {
        const auto data = gen_data(cfg, static_cast<std::uint64_t>(i));
        RngStream part = RngStream(cfg.seed, static_cast<std::uint64_t>(i)).substream(kPartition);
        const auto pf = est::ppca_fit(data.x, part, {false});
        const auto cf = est::pca_fit(data.x, {false});
        const auto sq = est::as_span(pf.singular_values);
        const auto sc = est::as_span(cf.eigenvalues);
        auto& row = rows[static_cast<std::size_t>(i)];
        row.push_back(static_cast<double>(i));
        for (std::size_t j = 1; j <= r; ++j) {
            row.push_back(sq[j - 1]);
            row.push_back(est::debias_ppca(sq, c, j));
            row.push_back(sc[j - 1]);
            row.push_back(est::debias_pca(sc, c, j));
        }
        row.insert(row.end(), {sq[r], sq[p - 1], sc[r], sc[p - 1]});
    });

    rep.records.header = {"replicate"};
    for (const auto& [name, value] : theory) rep.records.header.push_back(name);
    rep.records.rows = std::move(rows);
    rep.summary = summarize(rep.records, theory);
    return rep;
}

ExperimentReport run_robustness_experiment(const ExperimentConfig& cfg) {
    auto rep = start("robustness", cfg);
    const auto spec = cfg.population();
    const auto r = static_cast<Index>(spec.spikes().size());
    if (r == 0) throw std::invalid_argument("robustness experiment needs at least one spike");
    const Index q_max = std::min<Index>(cfg.q_max, cfg.p);
    if (q_max < r) throw std::invalid_argument("robustness experiment needs q_max >= number of spikes");
    const double c = cfg.ratio();
    const double b = rmt::ppca_support(c, spec.bulk()).upper;
    const double b_prime = rmt::pca_support(c, spec.bulk()).upper;

    std::vector<std::vector<double>> rows(static_cast<std::size_t>(cfg.replicates));
    parallel_for(cfg.replicates, cfg.threads, [&](long i) {
        const auto data = gen_data(cfg, static_cast<std::uint64_t>(i));
        RngStream part = RngStream(cfg.seed, static_cast<std::uint64_t>(i)).substream(kPartition);
        const auto pf = est::ppca_fit(data.x, part);
        const auto cf = est::pca_fit(data.x);
        const MatrixXd fused = est::orthonormalize(pf.fused.leftCols(q_max));
        auto& row = rows[static_cast<std::size_t>(i)];
        row.push_back(static_cast<double>(i));
        row.push_back(static_cast<double>(est::estimate_rank(est::as_span(pf.singular_values), b)));
        row.push_back(static_cast<double>(est::estimate_rank(est::as_span(cf.eigenvalues), b_prime)));
        for (Index q = r; q <= q_max; ++q) row.push_back(est::similarity_xi(fused.leftCols(q), data.signal));
        for (Index q = r; q <= q_max; ++q)
            row.push_back(est::similarity_xi(cf.eigenvectors.leftCols(q), data.signal));
    });

    rep.records.header = {"replicate", "r_ppca", "r_pca"};
    for (const char* m : {"xi_ppca_", "xi_pca_"})
        for (Index q = r; q <= q_max; ++q) rep.records.header.push_back(m + std::to_string(q));
    rep.records.rows = std::move(rows);

    std::vector<std::pair<std::string, double>> theory{{"r_ppca", static_cast<double>(r)},
                                                       {"r_pca", static_cast<double>(r)}};
    for (const char* m : {"xi_ppca_", "xi_pca_"})
        for (Index q = r; q <= q_max; ++q) theory.emplace_back(m + std::to_string(q), 1.0);
    rep.summary = summarize(rep.records, theory);

    Table curves;
    curves.header = {"q", "xi_ppca_mean", "xi_ppca_sd", "xi_pca_mean", "xi_pca_sd"};
    for (Index q = r; q <= q_max; ++q) {
        const auto vq = rep.records.values("xi_ppca_" + std::to_string(q));
        const auto vc = rep.records.values("xi_pca_" + std::to_string(q));
        curves.rows.push_back(
            {static_cast<double>(q), pairwise_mean(vq), sample_sd(vq), pairwise_mean(vc), sample_sd(vc)});
    }
    rep.extra.emplace_back("robustness_curves", std::move(curves));
    return rep;
}

}  // namespace ppca::sim
