#ifndef PPCA_SIMLAB_CONFIG_HPP
#define PPCA_SIMLAB_CONFIG_HPP

// Experiment configuration: a `key = value` text file.
//
//   n, p           sample size and dimension (p may be replaced by c, giving p = round(c n))
//   model          gaussian | student_t
//   nu             degrees of freedom for student_t (default 30)
//   sigma2         bulk level of the simple spiked model (default 1)
//   spectrum       path to a spectrum file; replaces sigma2 as the bulk
//   spikes         comma-separated list, or `auto` for (10 lambda*, 5 lambda*)
//   replicates     default 1
//   seed           master seed (the CLI requires --seed and overrides this)
//   out_prefix     prefix of every output file name
//   q_max          largest subspace dimension for xi_q (default 10)
//   bins           histogram bins (default 60)
//   threads        worker threads (default 1)
//   outlier_eps    contamination proportion of planted outliers (default 0)
//   outlier_etas   comma-separated effect sizes, one per outlier direction

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppca/spectra.hpp"

namespace ppca::sim {

enum class Model { Gaussian, StudentT };

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    long n = 0;
    long p = 0;
    Model model = Model::Gaussian;
    double nu = 30.0;
    double sigma2 = 1.0;
    std::vector<PopulationSpectrum::Atom> bulk;  // empty: single atom at sigma2
    bool auto_spikes = false;
    std::vector<double> spikes;
    long replicates = 1;
    std::uint64_t seed = 0;
    std::string out_prefix;
    long q_max = 10;
    long bins = 60;
    long threads = 1;
    double outlier_eps = 0.0;
    std::vector<double> outlier_etas;

    double ratio() const { return static_cast<double>(p) / static_cast<double>(n); }
    bool simple() const { return bulk.empty(); }
    /// Population spectrum with `auto` spikes resolved at c = p / n.
    PopulationSpectrum population() const;
    /// Throws ConfigError on inconsistent settings.
    void validate() const;
};

/// Parses the key-value format. Unknown keys and malformed values throw
/// ConfigError. Relative spectrum paths resolve against `base_dir`.
ExperimentConfig parse_config(std::istream& in, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

}  // namespace ppca::sim

#endif  // PPCA_SIMLAB_CONFIG_HPP
