#include "fidkit/afc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fidkit/parallel.hpp"
#include "fidkit/quantile.hpp"

namespace fidkit {

namespace {

// Stream salt separating the pilot batch from the main proposal blocks.
constexpr std::uint64_t kPilotStreamSalt = 0x70696C6F74ULL;  // "pilot"

struct BlockResult {
    Matrix mus;                   // p x count
    std::vector<double> dists;    // dist(x, x*) per proposal, +inf if invalid
};

BlockResult evaluate_block(const DataGeneratingModel& model, const FiducialInverse& inverse,
                           const Vector& x, const AfcConfig& config, RandomSource rng,
                           int count) {
    const int m = model.data_dim();
    Matrix Z(m, count);
    for (int j = 0; j < count; ++j) {
        Vector z = model.sample_noise(rng);
        if (config.sort_noise) std::sort(z.data(), z.data() + z.size());
        Z.col(j) = z;
    }

    BlockResult result;
    result.mus = inverse.invert_batch(x, Z);
    result.dists.resize(count);
    for (int j = 0; j < count; ++j) {
        const Vector mu = result.mus.col(j);
        double d = std::numeric_limits<double>::infinity();
        if (mu.allFinite() && model.param_domain().contains(mu)) {
            d = distance(x, model.forward(mu, Z.col(j)), config.distance);
        }
        result.dists[j] = d;
    }
    return result;
}

}  // namespace

double distance(const Vector& a, const Vector& b, DistanceKind) {
    if (a.size() != b.size()) throw DimensionError("distance: vector lengths differ");
    return (a - b).norm();
}

Matrix FiducialInverse::invert_batch(const Vector& x, const Matrix& Z) const {
    Matrix out;
    for (int j = 0; j < Z.cols(); ++j) {
        const Vector mu = invert(x, Z.col(j));
        if (j == 0) out.resize(mu.size(), Z.cols());
        out.col(j) = mu;
    }
    return out;
}

void AfcConfig::validate() const {
    if (target_n < 1) throw ConfigError("afc: target_n must be >= 1");
    if (!(epsilon >= 0.0)) throw ConfigError("afc: epsilon must be nonnegative");
    if (max_itr >= 0 && max_itr < target_n) {
        throw ConfigError("afc: max_itr must be >= target_n");
    }
    if (!(threshold_quantile > 0.0 && threshold_quantile <= 1.0)) {
        throw ConfigError("afc: threshold_quantile must lie in (0, 1]");
    }
    if (auto_threshold && pilot_size < 100) {
        throw ConfigError("afc: pilot_size must be >= 100 for threshold selection");
    }
    if (block_size < 1) throw ConfigError("afc: block_size must be >= 1");
}

long long AfcConfig::resolved_max_itr() const {
    if (max_itr >= 0) return max_itr;
    const double v = 100.0 * static_cast<double>(target_n) / threshold_quantile;
    return static_cast<long long>(std::min(v, 1e8));
}

int FiducialSampleSet::n_accepted() const {
    int n = 0;
    for (char f : accepted) n += (f != 0);
    return n;
}

Matrix FiducialSampleSet::accepted_samples() const {
    const int n = n_accepted();
    Matrix out(samples.rows(), n);
    int k = 0;
    for (int j = 0; j < n_kept(); ++j) {
        if (accepted[j]) out.col(k++) = samples.col(j);
    }
    return out;
}

FiducialSampleSet FiducialSampleSet::filtered(double new_epsilon) const {
    FiducialSampleSet out;
    out.epsilon = new_epsilon;
    out.proposals_used = proposals_used;
    std::vector<int> keep;
    for (int j = 0; j < n_kept(); ++j) {
        if (distances[j] < new_epsilon) keep.push_back(j);
    }
    out.samples.resize(samples.rows(), static_cast<int>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        const int j = keep[k];
        out.samples.col(static_cast<int>(k)) = samples.col(j);
        out.distances.push_back(distances[j]);
        out.accepted.push_back(1);
        out.proposal_index.push_back(proposal_index[j]);
        out.stream_id.push_back(stream_id[j]);
    }
    out.acceptance_rate =
        proposals_used > 0 ? static_cast<double>(keep.size()) / static_cast<double>(proposals_used)
                           : 0.0;
    return out;
}

FiducialSampleSet afc_run(const DataGeneratingModel& model, const FiducialInverse& inverse,
                          const Vector& x, const AfcConfig& config, const RandomSource& rng,
                          int n_threads) {
    config.validate();
    model.check_data(x);

    Vector x_eff = x;
    if (config.sort_noise) std::sort(x_eff.data(), x_eff.data() + x_eff.size());

    const long long budget = config.resolved_max_itr();
    const long long block = config.block_size;
    const long long n_blocks = (budget + block - 1) / block;
    // Fixed round width: scheduling may vary with n_threads, results may not.
    const int round_blocks = 8;

    FiducialSampleSet set;
    set.epsilon = config.epsilon;
    std::vector<Vector> kept;
    long long n_accepted = 0;
    std::vector<double> diag_distances;  // bounded sample for diagnostics
    bool done = false;

    for (long long round = 0; round * round_blocks < n_blocks && !done; ++round) {
        const long long first = round * round_blocks;
        const int nb = static_cast<int>(std::min<long long>(round_blocks, n_blocks - first));
        std::vector<BlockResult> results(nb);
        run_indexed_jobs(nb, n_threads, [&](int i) {
            const long long b = first + i;
            const int count = static_cast<int>(std::min<long long>(block, budget - b * block));
            results[i] =
                evaluate_block(model, inverse, x_eff, config, rng.substream(b), count);
        });

        for (int i = 0; i < nb && !done; ++i) {
            const long long b = first + i;
            const std::uint64_t sid = rng.substream(b).stream_id();
            const auto& r = results[i];
            for (std::size_t j = 0; j < r.dists.size(); ++j) {
                const long long global = b * block + static_cast<long long>(j);
                const double d = r.dists[j];
                const bool accept = d < config.epsilon;
                if (diag_distances.size() < 10000) diag_distances.push_back(d);
                if (accept || config.keep_rejected) {
                    kept.push_back(r.mus.col(static_cast<int>(j)));
                    set.distances.push_back(d);
                    set.accepted.push_back(accept ? 1 : 0);
                    set.proposal_index.push_back(global);
                    set.stream_id.push_back(sid);
                }
                if (accept) {
                    ++n_accepted;
                    if (n_accepted >= config.target_n) {
                        set.proposals_used = global + 1;
                        done = true;
                        break;
                    }
                }
            }
        }
    }
    if (!done) set.proposals_used = budget;

    if (n_accepted == 0) {
        std::sort(diag_distances.begin(), diag_distances.end());
        std::ostringstream os;
        os << "afc: no proposal within epsilon = " << config.epsilon << " after "
           << set.proposals_used << " proposals";
        if (!diag_distances.empty()) {
            os << " (observed distances: min " << diag_distances.front() << ", median "
               << interpolated_quantile(diag_distances, 0.5) << ", max "
               << diag_distances.back() << ")";
        }
        throw AfcNoAcceptError(os.str(), std::move(diag_distances));
    }

    set.samples.resize(model.param_dim(), static_cast<int>(kept.size()));
    for (std::size_t j = 0; j < kept.size(); ++j) {
        set.samples.col(static_cast<int>(j)) = kept[j];
    }
    set.acceptance_rate =
        static_cast<double>(n_accepted) / static_cast<double>(set.proposals_used);
    return set;
}

double select_threshold(const DataGeneratingModel& model, const FiducialInverse& inverse,
                        const Vector& x, const AfcConfig& config, const RandomSource& rng,
                        int n_threads) {
    if (config.pilot_size < 100) {
        throw ConfigError("afc: pilot_size must be >= 100 for threshold selection");
    }
    AfcConfig pilot = config;
    pilot.epsilon = std::numeric_limits<double>::infinity();
    pilot.auto_threshold = false;
    pilot.keep_rejected = false;
    pilot.target_n = config.pilot_size;
    pilot.max_itr = config.pilot_size;
    const FiducialSampleSet batch =
        afc_run(model, inverse, x, pilot, rng.substream(kPilotStreamSalt), n_threads);
    std::vector<double> dists = batch.distances;
    std::sort(dists.begin(), dists.end());
    return interpolated_quantile(dists, config.threshold_quantile);
}

FiducialSampleSet afc_sample(const DataGeneratingModel& model, const FiducialInverse& inverse,
                             const Vector& x, const AfcConfig& config, const RandomSource& rng,
                             int n_threads) {
    AfcConfig run = config;
    if (config.auto_threshold) {
        run.epsilon = select_threshold(model, inverse, x, config, rng, n_threads);
        run.auto_threshold = false;
    }
    FiducialSampleSet set = afc_run(model, inverse, x, run, rng, n_threads);
    return set;
}

}  // namespace fidkit
