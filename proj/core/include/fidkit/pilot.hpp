#pragma once

#include "fidkit/model.hpp"

namespace fidkit {

struct PilotResult {
    Vector params;
    bool converged = false;
    int iterations = 0;
    double gradient_norm = 0.0;
    double residual_norm = 0.0;
};

struct PilotOptions {
    int max_iterations = 200;
    double gradient_tolerance = 1e-10;
    double initial_damping = 1e-3;
    double damping_up = 10.0;
    double damping_down = 0.1;
};

/// Least-squares fit of mu to the observation with the noise pinned at
/// zero: argmin over the parameter domain of ||x - f(0, mu)||^2, by
/// Gauss-Newton with Levenberg-style damping. Non-convergence is reported
/// through the result (best iterate attached), not thrown.
PilotResult nls_pilot_estimate(const DataGeneratingModel& model, const Vector& x,
                               const PilotOptions& options = {});

/// Same fit from an explicit starting point.
PilotResult nls_pilot_estimate(const DataGeneratingModel& model, const Vector& x,
                               const Vector& init, const PilotOptions& options);

}  // namespace fidkit
