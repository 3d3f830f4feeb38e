#include "fidkit/inference.hpp"

#include <algorithm>
#include <cmath>

#include "fidkit/parallel.hpp"
#include "fidkit/quantile.hpp"

namespace fidkit {

EmpiricalGFD::EmpiricalGFD(const Matrix& samples) {
    n_ = static_cast<int>(samples.cols());
    if (n_ < 1) throw Error("gfd: empty sample set");
    sorted_.resize(samples.rows());
    for (int c = 0; c < samples.rows(); ++c) {
        auto& v = sorted_[c];
        v.resize(n_);
        for (int j = 0; j < n_; ++j) v[j] = samples(c, j);
        std::sort(v.begin(), v.end());
    }
}

double EmpiricalGFD::cdf(int coord, double value) const {
    const auto& v = sorted_.at(coord);
    const auto it = std::upper_bound(v.begin(), v.end(), value);
    return static_cast<double>(it - v.begin()) / static_cast<double>(n_);
}

double quantile(const EmpiricalGFD& gfd, int coord, double p) {
    return interpolated_quantile(gfd.sorted(coord), p);
}

std::pair<double, double> confidence_interval(const EmpiricalGFD& gfd, int coord, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error("confidence_interval: alpha must lie in (0, 1)");
    }
    return {quantile(gfd, coord, (1.0 - alpha) / 2.0), quantile(gfd, coord, (1.0 + alpha) / 2.0)};
}

std::pair<double, double> point_estimates(const EmpiricalGFD& gfd, int coord) {
    const auto& v = gfd.sorted(coord);
    double sum = 0.0;
    for (double x : v) sum += x;
    return {sum / static_cast<double>(v.size()), interpolated_quantile(v, 0.5)};
}

ConfidenceCurve confidence_curve(const EmpiricalGFD& gfd, int coord, const GridSpec& spec) {
    if (spec.n_points < 1) throw Error("confidence_curve: empty grid");
    const auto& v = gfd.sorted(coord);

    double lo, hi;
    if (spec.range) {
        lo = spec.range->first;
        hi = spec.range->second;
    } else {
        const double vmin = v.front();
        const double vmax = v.back();
        double margin = spec.margin_fraction * (vmax - vmin);
        if (margin <= 0.0) margin = 0.05 * std::max(1.0, std::abs(vmin));
        lo = vmin - margin;
        hi = vmax + margin;
    }

    ConfidenceCurve curve;
    curve.grid.resize(spec.n_points);
    curve.cc_values.resize(spec.n_points);
    const double step = spec.n_points > 1 ? (hi - lo) / (spec.n_points - 1) : 0.0;
    for (int i = 0; i < spec.n_points; ++i) {
        const double t = lo + step * i;
        curve.grid[i] = t;
        curve.cc_values[i] = 2.0 * std::abs(gfd.cdf(coord, t) - 0.5);
    }
    curve.median = interpolated_quantile(v, 0.5);
    for (double alpha : {0.5, 0.8, 0.9, 0.95, 0.99}) {
        curve.intervals[alpha] = confidence_interval(gfd, coord, alpha);
    }
    return curve;
}

int CoverageReport::n_failed() const {
    int n = 0;
    for (const auto& r : replicates) n += r.failed ? 1 : 0;
    return n;
}

CoverageReport coverage_study(const DataGeneratingModel& model, const FiducialInverse& inverse,
                              const CoverageConfig& config, const RandomSource& rng,
                              int n_threads) {
    if (config.true_params.empty()) throw ConfigError("coverage: no true parameters given");
    if (config.n_datasets < 1) throw ConfigError("coverage: n_datasets must be >= 1");
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
        throw ConfigError("coverage: alpha must lie in (0, 1)");
    }
    config.afc.validate();
    for (const auto& truth : config.true_params) model.check_param(truth);

    const int p = model.param_dim();
    const int n_truths = static_cast<int>(config.true_params.size());
    const int total = n_truths * config.n_datasets;

    CoverageReport report;
    report.replicates.resize(total);

    run_indexed_jobs(total, n_threads, [&](int job) {
        const int t = job / config.n_datasets;
        const int k = job % config.n_datasets;
        const Vector& truth = config.true_params[t];

        // Disjoint stream tree: truth -> replicate -> {data, sampler}.
        RandomSource rep_rng = rng.substream(t).substream(k);
        RandomSource data_rng = rep_rng.substream(0);

        ReplicateRecord rec;
        rec.truth_index = t;
        rec.replicate = k;
        const Vector z = model.sample_noise(data_rng);
        const Vector x = model.forward(truth, z);
        try {
            const FiducialSampleSet set =
                afc_sample(model, inverse, x, config.afc, rep_rng.substream(1), 1);
            const EmpiricalGFD gfd(set);
            rec.lower.resize(p);
            rec.upper.resize(p);
            rec.ci_length.resize(p);
            rec.mean.resize(p);
            rec.median.resize(p);
            rec.covered.resize(p);
            for (int c = 0; c < p; ++c) {
                const auto [lo, hi] = confidence_interval(gfd, c, config.alpha);
                rec.lower[c] = lo;
                rec.upper[c] = hi;
                rec.ci_length[c] = hi - lo;
                // Closed interval: a truth on the endpoint counts as covered.
                rec.covered[c] = (truth[c] >= lo && truth[c] <= hi) ? 1 : 0;
                const auto [mean, median] = point_estimates(gfd, c);
                rec.mean[c] = mean;
                rec.median[c] = median;
            }
            rec.proposals_used = set.proposals_used;
            rec.epsilon = set.epsilon;
        } catch (const AfcNoAcceptError& e) {
            rec.failed = true;
            rec.error = e.what();
        }
        report.replicates[job] = std::move(rec);
    });

    for (int t = 0; t < n_truths; ++t) {
        std::vector<const ReplicateRecord*> ok;
        int failed = 0;
        for (int k = 0; k < config.n_datasets; ++k) {
            const auto& rec = report.replicates[t * config.n_datasets + k];
            if (rec.failed) {
                ++failed;
            } else {
                ok.push_back(&rec);
            }
        }
        if (ok.empty()) {
            throw Error("coverage: all " + std::to_string(config.n_datasets) +
                        " replicates failed for truth index " + std::to_string(t));
        }
        for (int c = 0; c < p; ++c) {
            CoverageRow row;
            row.truth_index = t;
            row.coord = c;
            row.param_name = model.param_names()[c];
            row.truth = config.true_params[t][c];
            row.n_replicates = static_cast<int>(ok.size());
            row.n_failed = failed;
            double cover = 0, len = 0, mean = 0, median = 0;
            for (const auto* rec : ok) {
                cover += rec->covered[c];
                len += rec->ci_length[c];
                mean += rec->mean[c];
                median += rec->median[c];
            }
            const double n = static_cast<double>(ok.size());
            row.coverage = cover / n;
            row.expected_ci_length = len / n;
            row.expected_mean = mean / n;
            row.expected_median = median / n;
            report.rows.push_back(row);
        }
    }
    return report;
}

}  // namespace fidkit
