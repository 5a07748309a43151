#ifndef PPCA_SIMLAB_EXPERIMENTS_HPP
#define PPCA_SIMLAB_EXPERIMENTS_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "ppca/simlab/config.hpp"

namespace ppca::sim {

struct GeneratedData {
    Eigen::MatrixXd x;       // n x p
    Eigen::MatrixXd signal;  // p x r population eigenvectors of the spikes
    bool heavy_tail = false; // nu <= 4: fourth moment infinite
};

/// X_i = (s Sigma)^{1/2} Z_i with Sigma = Gamma Lambda Gamma^T, s = (nu - 2)/nu
/// for Student-t entries and 1 for Gaussian ones. Planted outliers, when
/// configured, replace a row by sqrt(eta_k) z nu_k with probability eps each.
/// Deterministic in (cfg.seed, replicate).
GeneratedData gen_data(const ExperimentConfig& cfg, std::uint64_t replicate);

/// Numeric table with an optional leading text column.
struct Table {
    std::vector<std::string> header;
    std::vector<std::string> labels;  // empty, or one per row
    std::vector<std::vector<double>> rows;

    /// Index of a named numeric column (labels excluded). Throws when absent.
    std::size_t column(const std::string& name) const;
    std::vector<double> values(const std::string& name) const;
};

/// UTF-8, LF line endings, header row, %.10g numbers.
void write_csv(std::ostream& out, const Table& t);
void write_csv(const std::string& path, const Table& t);

struct ExperimentReport {
    std::string kind;
    long replicates = 0;
    Table records;  // one row per replicate
    Table summary;  // aggregates over the records
    std::vector<std::pair<std::string, Table>> extra;
    std::vector<std::string> warnings;
};

/// Writes <prefix><kind>_replicates.csv, <prefix><kind>_summary.csv and every
/// extra table as <prefix><name>.csv. Returns the paths written.
std::vector<std::string> write_report(const ExperimentReport& r, const std::string& prefix);

/// Mean and sample SD by pairwise summation.
double pairwise_mean(const std::vector<double>& v);
double sample_sd(const std::vector<double>& v);

/// Runs body(i) for i in [0, count) on `threads` workers. Results must be
/// stored by index; the caller reduces them in order afterwards.
void parallel_for(long count, long threads, const std::function<void(long)>& body);

/// ESDs of PPCA and PCA against G_{c,sigma2} and F_{c,sigma2}: KS distances,
/// zero fractions, KS of the positive parts against the normalized continuous
/// components, pooled histogram and density overlay.
ExperimentReport run_spectrum_experiment(const ExperimentConfig& cfg);

/// Raw and debiased leading eigenvalues, the first non-spiked one and the
/// smallest one for both methods, each paired with its limit.
ExperimentReport run_spike_experiment(const ExperimentConfig& cfg);

/// xi_q for q = 2..q_max and the estimated ranks #{lambda_hat > b},
/// #{lambda_tilde > b'} with edges of the uncontaminated model.
ExperimentReport run_robustness_experiment(const ExperimentConfig& cfg);

}  // namespace ppca::sim

#endif  // PPCA_SIMLAB_EXPERIMENTS_HPP
