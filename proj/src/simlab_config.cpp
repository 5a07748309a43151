#include "ppca/simlab/config.hpp"

#include <cmath>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ppca/rmt/spiked.hpp"

namespace ppca::sim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (res.ec != std::errc() || res.ptr != end || !std::isfinite(out))
        throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
    return out;
}

long to_long(const std::string& key, const std::string& v) {
    long out = 0;
    const auto* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (res.ec != std::errc() || res.ptr != end)
        throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
    return out;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("config: empty entry in list for key '" + key + "'");
        out.push_back(to_double(key, item));
    }
    return out;
}

}  // namespace

PopulationSpectrum ExperimentConfig::population() const {
    std::vector<PopulationSpectrum::Atom> atoms = bulk;
    if (atoms.empty()) atoms.push_back({sigma2, 1.0});
    std::vector<double> s = spikes;
    if (auto_spikes) {
        const auto h = make_spectrum(atoms).bulk();
        const double ls = rmt::ppca_threshold(ratio(), h).lambda_star;
        s = {10.0 * ls, 5.0 * ls};
    }
    return make_spectrum(std::move(atoms), std::move(s));
}

void ExperimentConfig::validate() const {
    if (n < 4) throw ConfigError("config: need n >= 4");
    if (p < 1) throw ConfigError("config: need p >= 1");
    if (replicates < 1) throw ConfigError("config: need replicates >= 1");
    if (threads < 1) throw ConfigError("config: need threads >= 1");
    if (bins < 1) throw ConfigError("config: need bins >= 1");
    if (q_max < 1) throw ConfigError("config: need q_max >= 1");
    if (!(sigma2 > 0.0)) throw ConfigError("config: need sigma2 > 0");
    if (model == Model::StudentT && !(nu > 2.0))
        throw ConfigError("config: variance-normalized student_t needs nu > 2");
    if (!(outlier_eps >= 0.0) || outlier_eps * static_cast<double>(outlier_etas.size()) >= 1.0)
        throw ConfigError("config: need 0 <= outlier_eps and K * outlier_eps < 1");
    for (double e : outlier_etas)
        if (!(e >= 0.0)) throw ConfigError("config: outlier effect sizes must be >= 0");
    try {
        const auto spec = population();
        // Spikes, outlier directions and one bulk direction must fit.
        if (spec.spikes().size() + outlier_etas.size() >= static_cast<std::size_t>(p))
            throw ConfigError("config: p too small for the spikes and outlier directions");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

ExperimentConfig parse_config(std::istream& in, const std::string& base_dir) {
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    bool have_p = false;
    bool have_spikes = false;
    double c = 0.0;
    std::vector<double> file_spikes;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty value for " + key);
        if (key == "n") {
            cfg.n = to_long(key, value);
        } else if (key == "p") {
            cfg.p = to_long(key, value);
            have_p = true;
        } else if (key == "c") {
            c = to_double(key, value);
        } else if (key == "model") {
            if (value == "gaussian") cfg.model = Model::Gaussian;
            else if (value == "student_t" || value == "t") cfg.model = Model::StudentT;
            else throw ConfigError("config: model must be gaussian or student_t");
        } else if (key == "nu") {
            cfg.nu = to_double(key, value);
        } else if (key == "sigma2") {
            cfg.sigma2 = to_double(key, value);
        } else if (key == "spectrum") {
            std::filesystem::path path(value);
            if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
            const auto spec = load_spectrum(path.string());
            cfg.bulk.clear();
            for (std::size_t k = 0; k < spec.bulk().size(); ++k)
                cfg.bulk.push_back({spec.bulk().values[k], spec.bulk().weights[k]});
            file_spikes = spec.spikes();
        } else if (key == "spikes") {
            have_spikes = true;
            cfg.auto_spikes = value == "auto";
            cfg.spikes = cfg.auto_spikes || value == "none" ? std::vector<double>{} : to_list(key, value);
        } else if (key == "replicates") {
            cfg.replicates = to_long(key, value);
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(to_long(key, value));
        } else if (key == "out_prefix") {
            cfg.out_prefix = value;
        } else if (key == "q_max") {
            cfg.q_max = to_long(key, value);
        } else if (key == "bins") {
            cfg.bins = to_long(key, value);
        } else if (key == "threads") {
            cfg.threads = to_long(key, value);
        } else if (key == "outlier_eps") {
            cfg.outlier_eps = to_double(key, value);
        } else if (key == "outlier_etas") {
            cfg.outlier_etas = to_list(key, value);
        } else {
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    if (!have_p) {
        if (!(c > 0.0)) throw ConfigError("config: give p or c");
        cfg.p = std::lround(c * static_cast<double>(cfg.n));
    }
    if (!have_spikes) cfg.spikes = file_spikes;
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    return parse_config(in, std::filesystem::path(path).parent_path().string().empty()
                                ? "."
                                : std::filesystem::path(path).parent_path().string());
}

}  // namespace ppca::sim
