#ifndef PPCA_SPECTRA_HPP
#define PPCA_SPECTRA_HPP

#include <functional>
#include <istream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ppca {

/// A finitely supported probability law on [0, inf): strictly increasing
/// atom values with positive weights summing to one.
struct DiscreteLaw {
    std::vector<double> values;
    std::vector<double> weights;

    std::size_t size() const { return values.size(); }
    double mean() const;
    /// Largest atom (u_H).
    double upper() const { return values.back(); }
    /// Smallest strictly positive atom.
    double lower_positive() const;
    /// Weight carried by an atom at exactly zero.
    double zero_mass() const;
};

/// Bulk law H together with the spiked population eigenvalues.
class PopulationSpectrum {
public:
    struct Atom {
        double value;
        double weight;
    };

    const DiscreteLaw& bulk() const { return bulk_; }
    const std::vector<double>& spikes() const { return spikes_; }

    double mean() const { return bulk_.mean(); }
    double upper() const { return bulk_.upper(); }
    bool is_simple() const { return bulk_.size() == 1; }

    friend PopulationSpectrum make_spectrum(std::vector<Atom> atoms, std::vector<double> spikes);

private:
    PopulationSpectrum() = default;
    DiscreteLaw bulk_;
    std::vector<double> spikes_;
};

/// Validates and normalizes a spectrum. Atoms are sorted; spikes are sorted
/// descending. Weights off from unit total by at most 1e-9 are renormalized.
/// Throws std::invalid_argument on empty atoms, non-positive weights, negative
/// or duplicated atom values, or a spike not above the largest atom.
PopulationSpectrum make_spectrum(std::vector<PopulationSpectrum::Atom> atoms,
                                 std::vector<double> spikes = {});

/// Single-atom bulk at sigma2 with the given spikes.
PopulationSpectrum simple_spectrum(double sigma2, std::vector<double> spikes = {});

/// Pushforward of t -> t^2 on atoms and spikes.
PopulationSpectrum square_spectrum(const PopulationSpectrum& h);

/// Parses the line-oriented spectrum format:
///   atom <value> <weight>
///   spike <value>
/// with '#' starting a comment.
PopulationSpectrum parse_spectrum(std::istream& in);
PopulationSpectrum load_spectrum(const std::string& path);

struct AspectRatio {
    double c;
    explicit AspectRatio(double value);
    operator double() const { return c; }
};

/// Empirical spectral distribution: values sorted descending, nonnegative.
class Esd {
public:
    /// Sorts descending. Values in [-tol, 0) are snapped to 0; anything more
    /// negative is rejected.
    explicit Esd(std::vector<double> values, double negative_tol = 0.0);

    std::span<const double> values() const { return values_; }
    std::size_t dim() const { return values_.size(); }
    double max() const { return values_.front(); }
    double min() const { return values_.back(); }

    /// Fraction of values <= t.
    double cdf(double t) const;
    /// Fraction of values <= p * eps * max (numerically zero).
    double zero_fraction() const;
    double zero_threshold() const;
    /// Values above the zero threshold, still descending.
    std::vector<double> positive_part() const;

private:
    std::vector<double> values_;
};

double esd_cdf(const Esd& e, double t);

/// max over the grid of |F_esd(t) - cdf(t)|. Throws on an empty grid.
double ks_distance(const Esd& e, const std::function<double(double)>& cdf,
                   std::span<const double> grid);

/// n evenly spaced points covering [lo, hi].
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace ppca

#endif  // PPCA_SPECTRA_HPP
