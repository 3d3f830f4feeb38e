#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "fidkit/model.hpp"

namespace fidkit {

enum class DistanceKind { L2 };

/// dist(x, x*) used in the acceptance test; the L2 norm of the difference
/// (the Frobenius norm coincides for vectors).
double distance(const Vector& a, const Vector& b, DistanceKind kind = DistanceKind::L2);

/// Inverse map g(x, z): exact where available, otherwise a trained encoder.
class FiducialInverse {
public:
    virtual ~FiducialInverse() = default;
    virtual Vector invert(const Vector& x, const Vector& z) const = 0;
    /// Batch fast path; columns of Z are independent noise proposals.
    virtual Matrix invert_batch(const Vector& x, const Matrix& Z) const;
};

/// Adapter for plain callables.
class FunctionInverse final : public FiducialInverse {
public:
    using Fn = std::function<Vector(const Vector&, const Vector&)>;
    explicit FunctionInverse(Fn fn) : fn_(std::move(fn)) {}
    Vector invert(const Vector& x, const Vector& z) const override { return fn_(x, z); }

private:
    Fn fn_;
};

/// The model's analytic inverse.
class AnalyticInverse final : public FiducialInverse {
public:
    explicit AnalyticInverse(const DataGeneratingModel& model) : model_(model) {}
    Vector invert(const Vector& x, const Vector& z) const override {
        return model_.analytic_inverse(x, z);
    }

private:
    const DataGeneratingModel& model_;
};

struct AfcConfig {
    double epsilon = std::numeric_limits<double>::infinity();
    int target_n = 1000;          // desired accepted samples N
    long long max_itr = -1;       // proposal budget; -1 -> default rule
    DistanceKind distance = DistanceKind::L2;

    /// Pilot-batch threshold selection: epsilon is set to this empirical
    /// quantile of unconditional proposal distances (acceptance rate is
    /// then approximately threshold_quantile).
    bool auto_threshold = false;
    double threshold_quantile = 0.05;
    int pilot_size = 10000;

    bool keep_rejected = false;   // retain rejects for threshold sweeps
    bool sort_noise = false;      // order-preprocess x and every proposal
    int block_size = 1024;        // proposals per stream block

    void validate() const;
    /// 100 * target_n / threshold_quantile, capped at 1e8.
    long long resolved_max_itr() const;
};

/// Accepted parameter draws plus acceptance metadata; the empirical GFD.
struct FiducialSampleSet {
    Matrix samples;                           // p x n_kept, in proposal order
    std::vector<double> distances;            // dist(x, x*) per kept sample
    std::vector<char> accepted;               // flags (all 1 unless rejects kept)
    std::vector<long long> proposal_index;    // global proposal counter values
    std::vector<std::uint64_t> stream_id;     // block substream per sample
    long long proposals_used = 0;
    double acceptance_rate = 0.0;
    double epsilon = std::numeric_limits<double>::infinity();

    int n_kept() const { return static_cast<int>(samples.cols()); }
    int n_accepted() const;
    /// p x n_accepted matrix of the accepted draws only.
    Matrix accepted_samples() const;
    /// Re-filter a keep_rejected run at a smaller threshold (shared-pool
    /// sweeps); strict subset semantics, no new proposals.
    FiducialSampleSet filtered(double new_epsilon) const;
};

/// Raised when the proposal budget is exhausted with zero acceptances.
class AfcNoAcceptError : public Error {
public:
    AfcNoAcceptError(const std::string& msg, std::vector<double> distance_sample)
        : Error(msg), observed_distances(std::move(distance_sample)) {}
    /// Distances seen while proposing, for threshold diagnostics.
    std::vector<double> observed_distances;
};

/// Algorithm: repeatedly draw Z* ~ F0, set mu* = g(x, Z*), re-simulate
/// x* = f(Z*, mu*), and accept iff dist(x, x*) < epsilon, until target_n
/// acceptances or the proposal budget runs out.
///
/// Proposals are generated in fixed-size blocks, one RNG substream per
/// block, and merged in block order; results are bit-identical for every
/// n_threads value.
FiducialSampleSet afc_run(const DataGeneratingModel& model, const FiducialInverse& inverse,
                          const Vector& x, const AfcConfig& config, const RandomSource& rng,
                          int n_threads = 1);

/// Pilot-batch threshold: runs pilot_size unconditional proposals and
/// returns the threshold_quantile empirical quantile of their distances.
double select_threshold(const DataGeneratingModel& model, const FiducialInverse& inverse,
                        const Vector& x, const AfcConfig& config, const RandomSource& rng,
                        int n_threads = 1);

/// select_threshold (when config.auto_threshold) followed by afc_run, on
/// disjoint substreams of rng.
FiducialSampleSet afc_sample(const DataGeneratingModel& model, const FiducialInverse& inverse,
                             const Vector& x, const AfcConfig& config, const RandomSource& rng,
                             int n_threads = 1);

}  // namespace fidkit
