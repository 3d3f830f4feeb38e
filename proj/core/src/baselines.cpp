#include "fidkit/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fidkit/parallel.hpp"
#include "fidkit/quantile.hpp"

namespace fidkit {

double jacobian_factor(const DataGeneratingModel& model, const Vector& x, const Vector& mu) {
    model.check_data(x);
    model.check_param(mu);
    if (!model.param_domain().interior(mu)) {
        throw DomainError("jacobian_factor: mu must lie in the domain interior");
    }
    const Vector z = model.implied_noise(x, mu);
    const Matrix A = model.param_gradient(mu, z);
    const double det = (A.transpose() * A).determinant();
    return det > 0.0 ? std::sqrt(det) : 0.0;
}

double log_likelihood(const DataGeneratingModel& model, const Vector& x, const Vector& mu) {
    model.check_data(x);
    model.check_param(mu);
    if (!model.param_domain().interior(mu)) {
        throw DomainError("log_likelihood: mu must lie in the domain interior");
    }
    const Vector z = model.implied_noise(x, mu);
    return model.noise_log_density(z) - model.noise_jacobian_log_det(mu);
}

double fiducial_log_density(const DataGeneratingModel& model, const Vector& x, const Vector& mu) {
    if (mu.size() != model.param_dim() || !mu.allFinite() ||
        !model.param_domain().interior(mu)) {
        return -std::numeric_limits<double>::infinity();
    }
    const double j = jacobian_factor(model, x, mu);
    if (!(j > 0.0)) return -std::numeric_limits<double>::infinity();
    return log_likelihood(model, x, mu) + std::log(j);
}

// ---------------------------------------------------------------------------
// Grid quadrature

namespace {

std::vector<double> linspace(const GridAxis& axis) {
    if (axis.n < 2) throw ConfigError("density grid: each axis needs >= 2 points");
    if (!(axis.hi > axis.lo)) throw ConfigError("density grid: axis hi must exceed lo");
    std::vector<double> pts(axis.n);
    const double step = (axis.hi - axis.lo) / (axis.n - 1);
    for (int i = 0; i < axis.n; ++i) pts[i] = axis.lo + step * i;
    return pts;
}

double trapezoid_weight(int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; }

}  // namespace

double DensityGrid::value_at(int i, int j) const {
    if (dim() == 1) return values[i];
    return values[i * static_cast<int>(axes[1].size()) + j];
}

double DensityGrid::total_mass() const {
    const int n0 = static_cast<int>(axes[0].size());
    double mass = 0.0;
    if (dim() == 1) {
        for (int i = 0; i < n0; ++i) mass += trapezoid_weight(i, n0) * values[i];
    } else {
        const int n1 = static_cast<int>(axes[1].size());
        for (int i = 0; i < n0; ++i) {
            for (int j = 0; j < n1; ++j) {
                mass += trapezoid_weight(i, n0) * trapezoid_weight(j, n1) * value_at(i, j);
            }
        }
    }
    return mass * cell_measure;
}

std::vector<double> DensityGrid::marginal(int axis) const {
    const int n0 = static_cast<int>(axes[0].size());
    if (dim() == 1) return values;
    const int n1 = static_cast<int>(axes[1].size());
    const int keep = axis == 0 ? n0 : n1;
    const int drop = axis == 0 ? n1 : n0;
    const double step_drop = (axis == 0 ? axes[1][1] - axes[1][0] : axes[0][1] - axes[0][0]);
    std::vector<double> out(keep, 0.0);
    for (int i = 0; i < keep; ++i) {
        double sum = 0.0;
        for (int j = 0; j < drop; ++j) {
            const double v = axis == 0 ? value_at(i, j) : value_at(j, i);
            sum += trapezoid_weight(j, drop) * v;
        }
        out[i] = sum * step_drop;
    }
    return out;
}

std::vector<double> DensityGrid::marginal_cdf(int axis) const {
    const std::vector<double> dens = marginal(axis);
    const auto& pts = axes[axis];
    const int n = static_cast<int>(pts.size());
    std::vector<double> cdf(n, 0.0);
    for (int i = 1; i < n; ++i) {
        cdf[i] = cdf[i - 1] + 0.5 * (dens[i] + dens[i - 1]) * (pts[i] - pts[i - 1]);
    }
    const double total = cdf[n - 1];
    if (!(total > 0.0)) throw Error("density grid: zero marginal mass");
    for (double& v : cdf) v /= total;
    return cdf;
}

double DensityGrid::marginal_quantile(int axis, double p) const {
    const std::vector<double> cdf = marginal_cdf(axis);
    const auto& pts = axes[axis];
    if (p <= 0.0) return pts.front();
    if (p >= 1.0) return pts.back();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), p);
    const int i = static_cast<int>(it - cdf.begin());
    if (i == 0) return pts.front();
    const double c0 = cdf[i - 1], c1 = cdf[i];
    const double w = c1 > c0 ? (p - c0) / (c1 - c0) : 0.0;
    return pts[i - 1] + w * (pts[i] - pts[i - 1]);
}

DensityGrid fiducial_density_grid(const DataGeneratingModel& model, const Vector& x,
                                  const std::vector<GridAxis>& axes) {
    if (axes.size() != static_cast<std::size_t>(model.param_dim()) ||
        (axes.size() != 1 && axes.size() != 2)) {
        throw ConfigError("density grid: axis count must match param_dim (1 or 2)");
    }

    DensityGrid grid;
    grid.cell_measure = 1.0;
    for (const auto& axis : axes) {
        grid.axes.push_back(linspace(axis));
        grid.cell_measure *= (axis.hi - axis.lo) / (axis.n - 1);
    }

    const int n0 = static_cast<int>(grid.axes[0].size());
    const int n1 = grid.dim() == 2 ? static_cast<int>(grid.axes[1].size()) : 1;

    // Evaluate in log space, shift by the max for stable exponentiation.
    std::vector<double> logs(static_cast<std::size_t>(n0) * n1);
    double log_max = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n0; ++i) {
        for (int j = 0; j < n1; ++j) {
            Vector mu(model.param_dim());
            mu[0] = grid.axes[0][i];
            if (grid.dim() == 2) mu[1] = grid.axes[1][j];
            const double lp = fiducial_log_density(model, x, mu);
            logs[i * n1 + j] = lp;
            log_max = std::max(log_max, lp);
        }
    }
    // Underflow everywhere means the grid missed the effective support.
    if (!std::isfinite(log_max) || log_max < std::log(std::numeric_limits<double>::min())) {
        throw Error("density grid: density is zero on the whole grid");
    }

    grid.values.resize(logs.size());
    double raw_integral = 0.0;
    for (int i = 0; i < n0; ++i) {
        for (int j = 0; j < n1; ++j) {
            const double v = std::exp(logs[i * n1 + j] - log_max);
            grid.values[i * n1 + j] = v;
            const double w = grid.dim() == 2
                                 ? trapezoid_weight(i, n0) * trapezoid_weight(j, n1)
                                 : trapezoid_weight(i, n0);
            raw_integral += w * v;
        }
    }
    raw_integral *= grid.cell_measure;
    if (!(raw_integral > 0.0)) {
        throw Error("density grid: zero integral over the grid");
    }
    for (double& v : grid.values) v /= raw_integral;
    grid.normalization = raw_integral;
    return grid;
}

// ---------------------------------------------------------------------------
// Random-walk Metropolis

FiducialSampleSet metropolis_sample(const LogDensityFn& target, const MetropolisConfig& config,
                                    RandomSource& rng) {
    if (config.chain_length <= config.burn_in || config.burn_in < 0) {
        throw ConfigError("metropolis: need chain_length > burn_in >= 0");
    }
    const int p = static_cast<int>(config.initial.size());
    if (config.step_scale.size() != p) {
        throw ConfigError("metropolis: step_scale and initial dimensions differ");
    }

    Vector current = config.initial;
    double current_lp = target(current);
    if (!std::isfinite(current_lp)) {
        throw Error("metropolis: target not finite at the initial point");
    }

    const long long kept_n = config.chain_length - config.burn_in;
    FiducialSampleSet set;
    set.samples.resize(p, kept_n);
    set.distances.assign(kept_n, std::numeric_limits<double>::quiet_NaN());
    set.accepted.assign(kept_n, 1);
    set.proposal_index.resize(kept_n);
    set.stream_id.assign(kept_n, rng.stream_id());

    long long accepted_moves = 0;
    long long post_burn_moves = 0;
    for (long long it = 0; it < config.chain_length; ++it) {
        Vector proposal = current;
        for (int c = 0; c < p; ++c) proposal[c] += config.step_scale[c] * rng.normal();
        const double lp = target(proposal);
        const double log_u = std::log(rng.uniform());
        if (std::isfinite(lp) && log_u < lp - current_lp) {
            current = proposal;
            current_lp = lp;
            ++accepted_moves;
            if (it >= config.burn_in) ++post_burn_moves;
        }
        if (it >= config.burn_in) {
            const long long k = it - config.burn_in;
            set.samples.col(k) = current;
            set.proposal_index[k] = it;
        }
    }
    if (post_burn_moves == 0) {
        std::ostringstream os;
        os << "metropolis: zero acceptances after burn-in (step scale";
        for (int c = 0; c < p; ++c) os << ' ' << config.step_scale[c];
        os << ")";
        throw Error(os.str());
    }
    set.proposals_used = config.chain_length;
    set.acceptance_rate =
        static_cast<double>(accepted_moves) / static_cast<double>(config.chain_length);
    return set;
}

Vector default_step_scale(const DensityGrid& grid) {
    const int p = grid.dim();
    Vector scale(p);
    for (int axis = 0; axis < p; ++axis) {
        const std::vector<double> dens = grid.marginal(axis);
        const auto& pts = grid.axes[axis];
        const int n = static_cast<int>(pts.size());
        double mass = 0.0, mean = 0.0, second = 0.0;
        for (int i = 0; i < n; ++i) {
            const double w = trapezoid_weight(i, n) * dens[i];
            mass += w;
            mean += w * pts[i];
            second += w * pts[i] * pts[i];
        }
        mean /= mass;
        const double var = std::max(second / mass - mean * mean, 0.0);
        scale[axis] = 2.4 / std::sqrt(static_cast<double>(p)) * std::sqrt(var);
    }
    return scale;
}

// ---------------------------------------------------------------------------
// Parametric bootstrap

BootstrapRun parametric_bootstrap(const DataGeneratingModel& model, const Vector& x, int n_boot,
                                  const RandomSource& rng, int n_threads) {
    if (n_boot < 1) throw ConfigError("bootstrap: n_boot must be >= 1");
    const PilotResult fit = nls_pilot_estimate(model, x);
    if (!fit.converged) {
        std::ostringstream os;
        os << "bootstrap: least-squares fit on the data did not converge (gradient norm "
           << fit.gradient_norm << ")";
        throw Error(os.str());
    }

    const int p = model.param_dim();
    std::vector<Vector> refits(n_boot);
    std::vector<char> ok(n_boot, 0);
    run_indexed_jobs(n_boot, n_threads, [&](int b) {
        RandomSource boot_rng = rng.substream(b);
        const Vector z = model.sample_noise(boot_rng);
        const Vector xb = model.forward(fit.params, z);
        const PilotResult refit = nls_pilot_estimate(model, xb, fit.params, PilotOptions{});
        if (refit.converged) {
            refits[b] = refit.params;
            ok[b] = 1;
        }
    });

    BootstrapRun run;
    run.estimate = fit.params;
    int n_ok = 0;
    for (char f : ok) n_ok += (f != 0);
    run.n_dropped = n_boot - n_ok;
    if (n_ok == 0) throw Error("bootstrap: every bootstrap refit failed to converge");

    run.cloud.samples.resize(p, n_ok);
    int k = 0;
    for (int b = 0; b < n_boot; ++b) {
        if (!ok[b]) continue;
        run.cloud.samples.col(k) = refits[b];
        run.cloud.distances.push_back(std::numeric_limits<double>::quiet_NaN());
        run.cloud.accepted.push_back(1);
        run.cloud.proposal_index.push_back(b);
        run.cloud.stream_id.push_back(rng.substream(b).stream_id());
        ++k;
    }
    run.cloud.proposals_used = n_boot;
    run.cloud.acceptance_rate = static_cast<double>(n_ok) / static_cast<double>(n_boot);
    return run;
}

}  // namespace fidkit
