#include "ppca/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "ppca/estimators.hpp"
#include "ppca/numkernel.hpp"
#include "ppca/rmt/product_law.hpp"
#include "ppca/rmt/spiked.hpp"
#include "ppca/rmt/ssm.hpp"
#include "ppca/rmt/stieltjes.hpp"
#include "ppca/robustness.hpp"
#include "ppca/simlab/experiments.hpp"

namespace ppca {

namespace {

using json = nlohmann::json;
using Eigen::Index;
using Eigen::MatrixXd;

constexpr const char* kVersion = "0.1.0";

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Grid {
    double lo = 0, hi = 0;
    std::size_t count = 0;
};

std::optional<Grid> parse_grid(const std::string& s) {
    if (s.empty()) return std::nullopt;
    Grid g;
    char tail = 0;
    long count = 0;
    if (std::sscanf(s.c_str(), "%lf:%lf:%ld%c", &g.lo, &g.hi, &count, &tail) != 3 || count < 1 || !(g.hi >= g.lo))
        throw UsageError("grid must look like lo:hi:count with lo <= hi, got '" + s + "'");
    g.count = static_cast<std::size_t>(count);
    return g;
}

// Bulk law and spikes from either --spectrum or --sigma2.
struct ModelArgs {
    double c = 0.0;
    double sigma2 = 1.0;
    std::string spectrum;

    void add(CLI::App* cmd, bool need_c = true) {
        auto* opt = cmd->add_option("--c", c, "aspect ratio p/n");
        if (need_c) opt->required();
        cmd->add_option("--sigma2", sigma2, "bulk level of the simple spiked model")->capture_default_str();
        cmd->add_option("--spectrum", spectrum, "spectrum file (atom/spike lines)");
    }
    PopulationSpectrum population() const {
        if (!spectrum.empty()) return load_spectrum(spectrum);
        return simple_spectrum(sigma2);
    }
    bool simple() const { return spectrum.empty(); }
};

json limit_json(const rmt::SpikedLimit& l) {
    return {{"tag", l.distant() ? "distant" : "stuck"}, {"value", l.value}};
}

std::vector<std::vector<double>> read_csv_numbers(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            while (end && (*end == ' ' || *end == '\t')) ++end;
            if (end == cell.c_str() || (end && *end != '\0')) {
                numeric = false;
                break;
            }
            row.push_back(v);
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue;  // header
            }
            throw std::invalid_argument("non-numeric cell in " + path + ": '" + line + "'");
        }
        first = false;
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::invalid_argument("ragged rows in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("no data rows in " + path);
    return rows;
}

json constants_json(const rmt::SsmConstants& k) {
    return {{"lambda_star", k.lambda_star}, {"lambda_prime", k.lambda_prime}, {"a", k.a},
            {"b", k.b},                     {"a_prime", k.a_prime},           {"b_prime", k.b_prime},
            {"alpha", k.alpha},             {"beta", k.beta},                 {"mass0_ppca", k.mass0_ppca},
            {"mass0_pca", k.mass0_pca}};
}

json report_json(const sim::ExperimentReport& r, const std::vector<std::string>& files) {
    json summary = json::object();
    for (std::size_t i = 0; i < r.summary.rows.size(); ++i) {
        const auto& row = r.summary.rows[i];
        summary[r.summary.labels[i]] = {{"mean", jnum(row[0])}, {"sd", jnum(row[1])}, {"theory", jnum(row[2])}};
    }
    return {{"kind", r.kind}, {"replicates", r.replicates}, {"files", files}, {"summary", summary},
            {"warnings", r.warnings}};
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Product-PCA and PCA for spiked covariance models", "ppca"};
    bool version = false;
    app.add_flag("--version", version, "print version and solver tolerances");

    ModelArgs density_model, const_model, thr_model, lim_model;

    auto* density = app.add_subcommand("density", "limiting density and CDF on a grid (CSV)");
    std::string law = "ppca";
    std::string density_grid;
    bool density_generic = false;
    density->add_option("--law", law, "ppca (singular values, G) or pca (eigenvalues, F)")
        ->check(CLI::IsMember({"ppca", "pca", "g", "f"}))
        ->capture_default_str();
    density_model.add(density);
    density->add_option("--grid", density_grid, "lo:hi:count");
    density->add_flag("--generic", density_generic, "use the Silverstein solver even for a single atom");

    auto* constants = app.add_subcommand("constants", "simple-spiked-model constants (JSON)");
    bool const_generic = false;
    const_model.add(constants);
    constants->add_flag("--generic", const_generic, "compute through the generic solvers");

    auto* thresholds = app.add_subcommand("thresholds", "phase-transition thresholds and bulk edges (JSON)");
    thr_model.add(thresholds);

    auto* limits = app.add_subcommand("limits", "spiked-eigenvalue limits (JSON)");
    std::vector<double> lambdas;
    lim_model.add(limits);
    limits->add_option("--lambda", lambdas, "population spikes (default: spikes of the spectrum file)");

    auto* debias = app.add_subcommand("debias", "debiased leading eigenvalues (CSV)");
    std::string debias_input, debias_method = "ppca";
    double debias_c = 0.0;
    long debias_n = 0;
    std::size_t debias_top = 1;
    debias->add_option("--input", debias_input, "CSV with values in the first column, descending")->required();
    debias->add_option("--method", debias_method, "ppca (singular values) or pca (eigenvalues)")
        ->check(CLI::IsMember({"ppca", "pca"}))
        ->capture_default_str();
    debias->add_option("--c", debias_c, "aspect ratio; default p / n from --n");
    debias->add_option("--n", debias_n, "sample size");
    debias->add_option("--top", debias_top, "number of leading values to debias")->capture_default_str();

    auto* rho = app.add_subcommand("rho", "gain/loss ratio rho(c) on a grid (CSV)");
    std::string rho_grid = "0:10:101";
    rho->add_option("--grid", rho_grid, "lo:hi:count")->capture_default_str();

    auto* robust = app.add_subcommand("robust-analytic", "outlier-model spectra, predicates and ranks (JSON)");
    std::string scenario_path;
    std::uint64_t robust_seed = 0;
    robust->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    auto* robust_seed_opt = robust->add_option("--seed", robust_seed, "seed for the constructed-matrix check (needs \"p\")");

    auto* fit = app.add_subcommand("fit", "fit PCA or PPCA to a data CSV");
    std::string fit_input, fit_output, fit_method = "ppca";
    std::uint64_t fit_seed = 0;
    bool fit_center = false;
    long fit_vectors = 0;
    fit->add_option("--input", fit_input, "CSV, rows = samples, optional header")->required();
    fit->add_option("--output", fit_output, "output CSV (default stdout)");
    fit->add_option("--method", fit_method, "ppca or pca")->check(CLI::IsMember({"ppca", "pca"}))->capture_default_str();
    auto* fit_seed_opt = fit->add_option("--seed", fit_seed, "seed of the random partition (required for ppca)");
    fit->add_flag("--center", fit_center, "subtract column means first");
    fit->add_option("--vectors", fit_vectors, "number of leading eigenvectors to write");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo experiments (CSV reports)");
    std::string sim_kind, sim_config, sim_prefix;
    std::uint64_t sim_seed = 0;
    long sim_threads = 0, sim_replicates = 0;
    simulate->add_option("kind", sim_kind, "spectrum | spike | robustness")
        ->required()
        ->check(CLI::IsMember({"spectrum", "spike", "robustness"}));
    simulate->add_option("--config", sim_config, "config file")->required();
    simulate->add_option("--seed", sim_seed, "master seed")->required();
    simulate->add_option("--out-prefix", sim_prefix, "output prefix (overrides out_prefix)");
    simulate->add_option("--threads", sim_threads, "worker threads (overrides threads)");
    simulate->add_option("--replicates", sim_replicates, "replicate count (overrides replicates)");

    std::vector<std::string> argv_store{"ppca"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    auto fail = [&](const std::string& kind, const std::string& message, int code) {
        err << json{{"error", kind}, {"message", message}}.dump() << '\n';
        return code;
    };

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }

    try {
        if (version) {
            const rmt::SolverTolerances tol;
            out << "ppca " << kVersion << '\n'
                << "silverstein residual tolerance " << fmt(tol.residual) << '\n'
                << "fixed-point damping " << fmt(tol.damping) << ", at most " << tol.fixed_point_iters
                << " iterations\n"
                << "newton iterations " << tol.newton_iters << '\n'
                << "density offset eta = max(1e-9, 1e-6 t) with one Richardson step\n"
                << "nested law quantile atoms 512\n";
            return 0;
        }

        if (*density) {
            const auto spec = density_model.population();
            const auto& h = spec.bulk();
            const double c = density_model.c;
            const bool ppca_law = law == "ppca" || law == "g";
            const bool closed = density_model.simple() && !density_generic;
            std::function<double(double)> pdf, cdf;
            double edge = 0.0;
            std::optional<rmt::SsmParams> sp;
            std::optional<rmt::ProductPcaLaw> gl;
            std::optional<rmt::TabulatedMpLaw> fl;
            if (closed) {
                sp.emplace(c, density_model.sigma2);
                const auto k = rmt::ssm_closed_forms(*sp);
                edge = ppca_law ? k.b : k.b_prime;
                if (ppca_law) {
                    pdf = [&](double t) { return rmt::ssm_g_pdf(*sp, t); };
                    cdf = [&](double t) { return rmt::ssm_g_cdf(*sp, t); };
                } else {
                    pdf = [&](double t) { return rmt::ssm_f_pdf(*sp, t); };
                    cdf = [&](double t) { return rmt::ssm_f_cdf(*sp, t); };
                }
            } else if (ppca_law) {
                gl.emplace(c, h);
                edge = gl->upper();
                pdf = [&](double t) { return gl->pdf(t); };
                cdf = [&](double t) { return gl->cdf(t); };
            } else {
                fl.emplace(c, h);
                edge = fl->upper();
                pdf = [&](double t) { return fl->pdf(t); };
                cdf = [&](double t) { return fl->cdf(t); };
            }
            const auto grid = parse_grid(density_grid).value_or(Grid{0.0, 1.1 * edge, 200});
            out << "t,pdf,cdf\n";
            for (double t : linspace(grid.lo, grid.hi, grid.count))
                out << fmt(t) << ',' << fmt(t > 0.0 ? pdf(t) : 0.0) << ',' << fmt(cdf(t)) << '\n';
            return 0;
        }

        if (*constants) {
            const double c = const_model.c;
            json j;
            if (const_generic || !const_model.simple()) {
                const auto k = rmt::generic_constants(c, const_model.population().bulk());
                j = constants_json({k.lambda_star, k.lambda_prime, k.a, k.b, k.a_prime, k.b_prime, k.alpha, k.beta,
                                    k.mass0_ppca, k.mass0_pca});
                j["method"] = "generic";
            } else {
                j = constants_json(rmt::ssm_closed_forms({c, const_model.sigma2}));
                j["method"] = "closed_form";
            }
            j["c"] = c;
            if (const_model.simple()) j["sigma2"] = const_model.sigma2;
            out << j.dump(2) << '\n';
            return 0;
        }

        if (*thresholds) {
            const auto h = thr_model.population().bulk();
            const double c = thr_model.c;
            const auto pt = rmt::pca_threshold(c, h);
            const auto qt = rmt::ppca_threshold(c, h);
            const auto ps = rmt::pca_support(c, h);
            const auto qs = rmt::ppca_support(c, h);
            json j = {{"c", c},
                      {"pca",
                       {{"lambda_prime", pt.lambda_prime},
                        {"b_prime", pt.b_prime},
                        {"a_prime", ps.lower},
                        {"mass0", ps.zero_mass}}},
                      {"ppca",
                       {{"lambda_star", qt.lambda_star},
                        {"b", qt.b},
                        {"a", qs.lower},
                        {"alpha", qs.alpha},
                        {"beta", qs.beta},
                        {"outer_critical", qt.outer_critical},
                        {"mass0", qs.zero_mass}}}};
            out << j.dump(2) << '\n';
            return 0;
        }

        if (*limits) {
            const auto spec = lim_model.population();
            const double c = lim_model.c;
            if (lambdas.empty()) lambdas = spec.spikes();
            if (lambdas.empty()) throw UsageError("limits: give --lambda or a spectrum file with spikes");
            json arr = json::array();
            for (double l : lambdas) {
                const auto pp = rmt::ppca_limit(c, spec.bulk(), l);
                const auto pc = rmt::pca_limit(c, spec.bulk(), l);
                json e = {{"lambda", l}, {"ppca", limit_json(pp)}, {"pca", limit_json(pc)}};
                if (pp.distant() && pc.distant()) e["gap"] = pc.value - pp.value;
                arr.push_back(e);
            }
            out << json{{"c", c}, {"limits", arr}}.dump(2) << '\n';
            return 0;
        }

        if (*debias) {
            const auto rows = read_csv_numbers(debias_input);
            std::vector<double> values;
            for (const auto& r : rows) values.push_back(r.front());
            for (std::size_t i = 1; i < values.size(); ++i)
                if (values[i] > values[i - 1]) throw std::invalid_argument("debias: values must be descending");
            double c = debias_c;
            if (!(c > 0.0)) {
                if (debias_n <= 0) throw UsageError("debias: give --c or --n");
                c = static_cast<double>(values.size()) / static_cast<double>(debias_n);
            }
            out << "j,value,debiased\n";
            for (std::size_t j = 1; j <= debias_top; ++j) {
                const double d = debias_method == "ppca" ? est::debias_ppca(values, c, j) : est::debias_pca(values, c, j);
                out << j << ',' << fmt(values[j - 1]) << ',' << fmt(d) << '\n';
            }
            return 0;
        }

        if (*rho) {
            const auto g = *parse_grid(rho_grid);
            out << "c,rho\n";
            for (double c : linspace(g.lo, g.hi, g.count)) out << fmt(c) << ',' << fmt(rmt::rho(c)) << '\n';
            return 0;
        }

        if (*robust) {
            std::ifstream in(scenario_path);
            if (!in) throw std::runtime_error("cannot open " + scenario_path);
            const json sj = json::parse(in);
            const auto etas = sj.at("etas").get<std::vector<double>>();
            const auto k1 = sj.value("K1", static_cast<std::size_t>(0));
            const robust::PerturbationScenario s(sj.at("epsilon").get<double>(), etas, k1,
                                                 sj.at("lambda1").get<double>(), sj.at("c").get<double>());
            robust::Assignment a = robust::assign_first(s.K(), s.K1());
            if (sj.contains("assignment")) a.block = sj.at("assignment").get<std::vector<int>>();

            const auto sp_pca = robust::pca_perturbed_spectrum(s);
            const auto sp_ppca = robust::ppca_perturbed_spectrum(s, a);
            auto spectrum_json = [](const robust::PerturbedSpectrum& p) {
                json noise = json::array();
                for (const auto& [k, v] : p.noise_eigenvalues) noise.push_back(json{{"k", k}, {"value", v}});
                return json{{"signal", p.signal_eigenvalue}, {"noise", noise}, {"bulk", p.bulk_level}};
            };
            json outliers = json::array();
            for (std::size_t k = 0; k < s.K(); ++k) {
                using robust::Method;
                outliers.push_back(json{{"k", k},
                                    {"eta", s.etas()[k]},
                                    {"half", a.block[k]},
                                    {"pca_spiked", robust::noise_is_spiked(s, k, Method::Pca, a)},
                                    {"ppca_spiked", robust::noise_is_spiked(s, k, Method::Ppca, a)},
                                    {"pca_ordering_breaks", robust::ordering_breaks(s, k, Method::Pca, a)},
                                    {"ppca_ordering_breaks", robust::ordering_breaks(s, k, Method::Ppca, a)},
                                    {"pca_spike_threshold", jnum(robust::spike_threshold(s, k, Method::Pca, a))},
                                    {"ppca_spike_threshold", jnum(robust::spike_threshold(s, k, Method::Ppca, a))}});
            }
            const auto cc = robust::comparative_conditions(s, a);
            json j = {{"pca_spectrum", spectrum_json(sp_pca)},
                      {"ppca_spectrum", spectrum_json(sp_ppca)},
                      {"outliers", outliers},
                      {"r_pca", robust::target_rank(s, robust::Method::Pca, a)},
                      {"r_ppca", robust::target_rank(s, robust::Method::Ppca, a)},
                      {"eta_win", cc.eta_win},
                      {"a_win", cc.a_win},
                      {"worst_case_ok", cc.worst_case_ok}};
            if (sj.contains("p")) {
                const auto p = sj.at("p").get<Index>();
                RngStream rng(robust_seed_opt->count() ? robust_seed : sj.value("seed", std::uint64_t{0}), 0);
                const MatrixXd dirs = robust::perturbation_directions(s.K(), p, rng);
                const auto eig = num::sym_eig(robust::build_perturbed_sigma(s, dirs), false).values;
                const auto sv = num::svd_full(robust::build_ppca_population(s, a, dirs), false).singular_values;
                const auto want_pca = sp_pca.sorted_values(static_cast<std::size_t>(p));
                const auto want_ppca = sp_ppca.sorted_values(static_cast<std::size_t>(p));
                double e1 = 0, e2 = 0;
                for (Index i = 0; i < p; ++i) {
                    e1 = std::max(e1, std::abs(eig(i) - want_pca[static_cast<std::size_t>(i)]));
                    e2 = std::max(e2, std::abs(sv(i) - want_ppca[static_cast<std::size_t>(i)]));
                }
                j["matrix_check"] = {{"p", p}, {"pca_max_error", e1}, {"ppca_max_error", e2}};
            }
            out << j.dump(2) << '\n';
            return 0;
        }

        if (*fit) {
            const auto rows = read_csv_numbers(fit_input);
            MatrixXd x(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
            for (Index i = 0; i < x.rows(); ++i)
                for (Index j = 0; j < x.cols(); ++j) x(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (fit_center) x = est::center_columns(x);
            const Index p = x.cols();
            const Index k = std::min<Index>(std::max<long>(fit_vectors, 0), p);
            Eigen::VectorXd values;
            MatrixXd vectors;
            if (fit_method == "ppca") {
                if (!fit_seed_opt->count()) throw UsageError("fit: --seed is required for ppca");
                RngStream rng(fit_seed, 0);
                auto f = est::ppca_fit(x, rng, {k > 0});
                values = f.singular_values;
                if (k > 0) vectors = f.fused.leftCols(k);
            } else {
                auto f = est::pca_fit(x, {k > 0});
                values = f.eigenvalues;
                if (k > 0) vectors = f.eigenvectors.leftCols(k);
            }
            std::ofstream file;
            if (!fit_output.empty()) {
                file.open(fit_output, std::ios::binary);
                if (!file) throw std::runtime_error("cannot write " + fit_output);
            }
            std::ostream& dst = fit_output.empty() ? out : file;
            dst << "j,value";
            for (Index v = 0; v < k; ++v) dst << ",vector_" << v + 1;
            dst << '\n';
            for (Index i = 0; i < p; ++i) {
                dst << i + 1 << ',' << fmt(values(i));
                for (Index v = 0; v < k; ++v) dst << ',' << fmt(vectors(i, v));
                dst << '\n';
            }
            return 0;
        }

        if (*simulate) {
            auto cfg = sim::load_config(sim_config);
            cfg.seed = sim_seed;
            if (!sim_prefix.empty()) cfg.out_prefix = sim_prefix;
            if (sim_threads > 0) cfg.threads = sim_threads;
            if (sim_replicates > 0) cfg.replicates = sim_replicates;
            cfg.validate();
            sim::ExperimentReport rep;
            if (sim_kind == "spectrum") rep = sim::run_spectrum_experiment(cfg);
            else if (sim_kind == "spike") rep = sim::run_spike_experiment(cfg);
            else rep = sim::run_robustness_experiment(cfg);
            const auto files = sim::write_report(rep, cfg.out_prefix);
            out << report_json(rep, files).dump(2) << '\n';
            return 0;
        }

        out << app.help();
        return 2;
    } catch (const UsageError& e) {
        return fail("usage", e.what(), 2);
    } catch (const sim::ConfigError& e) {
        return fail("config", e.what(), 1);
    } catch (const rmt::SolverError& e) {
        return fail("numeric", std::string(e.what()) + " (residual " + fmt(e.residual()) + ")", 1);
    } catch (const num::NumericError& e) {
        return fail("numeric", e.what(), 1);
    } catch (const json::exception& e) {
        return fail("json", e.what(), 1);
    } catch (const std::invalid_argument& e) {
        return fail("invalid_argument", e.what(), 1);
    } catch (const std::exception& e) {
        return fail("error", e.what(), 1);
    }
}

}  // namespace ppca
