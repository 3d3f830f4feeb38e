#pragma once

#include <functional>

#include "fidkit/afc.hpp"
#include "fidkit/pilot.hpp"

namespace fidkit {

/// D(A) = sqrt(det(A'A)) of the parameter gradient evaluated at the noise
/// implied by (x, mu); the data-dependent weight of the fiducial density.
double jacobian_factor(const DataGeneratingModel& model, const Vector& x, const Vector& mu);

/// Exact log density of the data under the model, via the implied noise and
/// the known noise-to-data change of variables. Requires mu in the domain
/// interior.
double log_likelihood(const DataGeneratingModel& model, const Vector& x, const Vector& mu);

/// Unnormalized fiducial log density log L + log J; -inf outside the
/// domain interior.
double fiducial_log_density(const DataGeneratingModel& model, const Vector& x, const Vector& mu);

struct GridAxis {
    double lo = 0.0;
    double hi = 1.0;
    int n = 400;
};

/// Normalized density on a tensor grid (1-D or 2-D), trapezoid-rule scheme.
struct DensityGrid {
    std::vector<std::vector<double>> axes;  // grid coordinates per axis
    std::vector<double> values;             // normalized density, row-major
    double normalization = 0.0;             // integral of the raw values
    double cell_measure = 0.0;              // product of axis steps

    int dim() const { return static_cast<int>(axes.size()); }
    double value_at(int i, int j = 0) const;
    /// Integral of the normalized density (trapezoid); 1 by construction.
    double total_mass() const;
    /// Marginal density on one axis (other axis integrated out).
    std::vector<double> marginal(int axis) const;
    /// CDF of the marginal on the axis grid points.
    std::vector<double> marginal_cdf(int axis) const;
    double marginal_quantile(int axis, double p) const;
};

/// Evaluate exp(log L + log J) on the grid and normalize. Throws when the
/// density is zero everywhere (grid misses the support).
DensityGrid fiducial_density_grid(const DataGeneratingModel& model, const Vector& x,
                                  const std::vector<GridAxis>& axes);

struct MetropolisConfig {
    Vector step_scale;        // per-coordinate Gaussian proposal sd
    long long chain_length = 50000;
    long long burn_in = 5000;
    Vector initial;
};

using LogDensityFn = std::function<double(const Vector&)>;

/// Random-walk Metropolis with a symmetric Gaussian proposal; returns the
/// post-burn-in draws. Throws when no proposal is accepted after burn-in.
FiducialSampleSet metropolis_sample(const LogDensityFn& target, const MetropolisConfig& config,
                                    RandomSource& rng);

/// 2.4/sqrt(p) times the marginal standard deviations of a density grid -
/// the usual random-walk scaling.
Vector default_step_scale(const DensityGrid& grid);

struct BootstrapRun {
    Vector estimate;          // the least-squares fit on the data
    FiducialSampleSet cloud;  // refit parameters, one per converged replicate
    int n_dropped = 0;        // replicates whose refit did not converge
};

/// Parametric bootstrap: fit mu_hat by least squares, simulate n_boot
/// datasets from f(z, mu_hat), refit each.
BootstrapRun parametric_bootstrap(const DataGeneratingModel& model, const Vector& x, int n_boot,
                                  const RandomSource& rng, int n_threads = 1);

}  // namespace fidkit
