#include "ppca/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ppca {

double DiscreteLaw::mean() const {
    double s = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) s += values[k] * weights[k];
    return s;
}

double DiscreteLaw::lower_positive() const {
    for (double v : values)
        if (v > 0.0) return v;
    return 0.0;
}

double DiscreteLaw::zero_mass() const {
    return (!values.empty() && values.front() == 0.0) ? weights.front() : 0.0;
}

PopulationSpectrum make_spectrum(std::vector<PopulationSpectrum::Atom> atoms,
                                 std::vector<double> spikes) {
    if (atoms.empty()) throw std::invalid_argument("spectrum: empty atom list");
    double total = 0.0;
    for (const auto& a : atoms) {
        if (!std::isfinite(a.value) || a.value < 0.0)
            throw std::invalid_argument("spectrum: atom values must be finite and nonnegative");
        if (!(a.weight > 0.0) || !std::isfinite(a.weight))
            throw std::invalid_argument("spectrum: atom weights must be positive");
        total += a.weight;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("spectrum: atom weights sum to " + std::to_string(total));

    std::sort(atoms.begin(), atoms.end(),
              [](const auto& x, const auto& y) { return x.value < y.value; });
    PopulationSpectrum h;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        if (k > 0 && !(atoms[k].value > atoms[k - 1].value))
            throw std::invalid_argument("spectrum: duplicated atom value");
        h.bulk_.values.push_back(atoms[k].value);
        h.bulk_.weights.push_back(atoms[k].weight / total);
    }
    if (h.bulk_.upper() <= 0.0)
        throw std::invalid_argument("spectrum: bulk must have a positive atom");

    std::sort(spikes.begin(), spikes.end(), std::greater<>());
    for (double s : spikes) {
        if (!std::isfinite(s) || !(s > h.bulk_.upper()))
            throw std::invalid_argument("spectrum: spike must exceed the largest bulk atom");
    }
    h.spikes_ = std::move(spikes);
    return h;
}

PopulationSpectrum simple_spectrum(double sigma2, std::vector<double> spikes) {
    return make_spectrum({{sigma2, 1.0}}, std::move(spikes));
}

PopulationSpectrum square_spectrum(const PopulationSpectrum& h) {
    std::vector<PopulationSpectrum::Atom> atoms;
    for (std::size_t k = 0; k < h.bulk().size(); ++k)
        atoms.push_back({h.bulk().values[k] * h.bulk().values[k], h.bulk().weights[k]});
    std::vector<double> spikes;
    for (double s : h.spikes()) spikes.push_back(s * s);
    return make_spectrum(std::move(atoms), std::move(spikes));
}

PopulationSpectrum parse_spectrum(std::istream& in) {
    std::vector<PopulationSpectrum::Atom> atoms;
    std::vector<double> spikes;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind)) continue;
        auto fail = [&] {
            throw std::invalid_argument("spectrum: malformed line " + std::to_string(lineno));
        };
        if (kind == "atom") {
            double v, w;
            if (!(ls >> v >> w)) fail();
            atoms.push_back({v, w});
        } else if (kind == "spike") {
            double v;
            if (!(ls >> v)) fail();
            spikes.push_back(v);
        } else {
            fail();
        }
        std::string rest;
        if (ls >> rest) fail();
    }
    return make_spectrum(std::move(atoms), std::move(spikes));
}

PopulationSpectrum load_spectrum(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("spectrum: cannot open " + path);
    return parse_spectrum(in);
}

AspectRatio::AspectRatio(double value) : c(value) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw std::invalid_argument("aspect ratio must be positive and finite");
}

Esd::Esd(std::vector<double> values, double negative_tol) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("esd: no values");
    for (double& v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("esd: non-finite value");
        if (v < 0.0) {
            if (v < -negative_tol) throw std::invalid_argument("esd: negative value");
            v = 0.0;
        }
    }
    std::sort(values_.begin(), values_.end(), std::greater<>());
}

double Esd::cdf(double t) const {
    // values_ is descending; count entries <= t.
    auto it = std::lower_bound(values_.begin(), values_.end(), t, std::greater<>());
    // [begin, it) holds values > t.
    auto above = static_cast<double>(it - values_.begin());
    return 1.0 - above / static_cast<double>(values_.size());
}

double Esd::zero_threshold() const {
    return static_cast<double>(values_.size()) * std::numeric_limits<double>::epsilon() * max();
}

double Esd::zero_fraction() const { return cdf(zero_threshold()); }

std::vector<double> Esd::positive_part() const {
    const double tol = zero_threshold();
    std::vector<double> out;
    for (double v : values_)
        if (v > tol) out.push_back(v);
    return out;
}

double esd_cdf(const Esd& e, double t) { return e.cdf(t); }

double ks_distance(const Esd& e, const std::function<double(double)>& cdf,
                   std::span<const double> grid) {
    if (grid.empty()) throw std::invalid_argument("ks_distance: empty grid");
    double d = 0.0;
    for (double t : grid) d = std::max(d, std::abs(e.cdf(t) - cdf(t)));
    return d;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

}  // namespace ppca
