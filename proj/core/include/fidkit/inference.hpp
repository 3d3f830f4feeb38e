#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fidkit/afc.hpp"

namespace fidkit {

/// Marginal empirical distributions of a fiducial sample set, one sorted
/// sample vector per parameter coordinate.
class EmpiricalGFD {
public:
    /// Columns of `samples` (p x n) are parameter draws.
    explicit EmpiricalGFD(const Matrix& samples);
    /// Accepted draws of an AFC run.
    explicit EmpiricalGFD(const FiducialSampleSet& set) : EmpiricalGFD(set.accepted_samples()) {}

    int param_dim() const { return static_cast<int>(sorted_.size()); }
    int n_fid() const { return n_; }
    const std::vector<double>& sorted(int coord) const { return sorted_.at(coord); }

    /// Right-continuous empirical CDF of one marginal.
    double cdf(int coord, double value) const;

private:
    std::vector<std::vector<double>> sorted_;
    int n_ = 0;
};

/// Empirical quantile by order-statistic interpolation (needs n >= 2 for a
/// nondegenerate sample; n = 1 returns the sample).
double quantile(const EmpiricalGFD& gfd, int coord, double p);

/// Equal-tailed interval from the (1-alpha)/2 and (1+alpha)/2 quantiles.
std::pair<double, double> confidence_interval(const EmpiricalGFD& gfd, int coord, double alpha);

/// (arithmetic mean, interpolated median) of one marginal.
std::pair<double, double> point_estimates(const EmpiricalGFD& gfd, int coord);

struct GridSpec {
    int n_points = 512;
    /// Fraction of the sample range added on each side.
    double margin_fraction = 0.05;
    /// Explicit range overriding the sample-derived one.
    std::optional<std::pair<double, double>> range;
};

/// 2|R(mu) - 0.5| evaluated on a grid: all two-sided equal-tailed intervals
/// stacked; touches zero at the fiducial median.
struct ConfidenceCurve {
    std::vector<double> grid;
    std::vector<double> cc_values;
    double median = 0.0;
    /// Equal-tailed intervals at the standard ladder of levels.
    std::map<double, std::pair<double, double>> intervals;
};

ConfidenceCurve confidence_curve(const EmpiricalGFD& gfd, int coord, const GridSpec& spec = {});

// ---------------------------------------------------------------------------
// Monte Carlo coverage study

struct CoverageConfig {
    std::vector<Vector> true_params;
    int n_datasets = 200;
    double alpha = 0.9;
    /// Sampler settings per dataset; target_n is the fiducial sample count.
    /// epsilon = +inf with auto_threshold = false gives the plain
    /// (unconditional) fiducial sampler.
    AfcConfig afc;
};

/// Outcome of one replicated dataset; interval statistics per coordinate.
struct ReplicateRecord {
    int truth_index = 0;
    int replicate = 0;
    Vector lower, upper;
    std::vector<char> covered;
    Vector ci_length, mean, median;
    long long proposals_used = 0;
    double epsilon = 0.0;
    bool failed = false;
    std::string error;
};

/// Per-truth, per-coordinate aggregates over replicates.
struct CoverageRow {
    int truth_index = 0;
    int coord = 0;
    std::string param_name;
    double truth = 0.0;
    double coverage = 0.0;
    double expected_ci_length = 0.0;
    double expected_mean = 0.0;
    double expected_median = 0.0;
    int n_replicates = 0;
    int n_failed = 0;
};

struct CoverageReport {
    std::vector<CoverageRow> rows;
    std::vector<ReplicateRecord> replicates;
    int n_failed() const;
};

/// For each true parameter: simulate n_datasets observations, run the
/// sampler on each, and aggregate interval coverage, expected CI length and
/// expected fiducial mean/median. Replicates are independent jobs on
/// substreams keyed by (truth, replicate); results are bit-identical for
/// every n_threads. Replicates whose sampler fails (no acceptances) are
/// recorded and skipped; a truth with zero successful replicates throws.
CoverageReport coverage_study(const DataGeneratingModel& model, const FiducialInverse& inverse,
                              const CoverageConfig& config, const RandomSource& rng,
                              int n_threads = 1);

}  // namespace fidkit
