#include "fidkit/pilot.hpp"

#include <cmath>

namespace fidkit {

namespace {

double objective(const DataGeneratingModel& model, const Vector& x, const Vector& z,
                 const Vector& mu) {
    return (x - model.forward(mu, z)).squaredNorm();
}

// Keep iterates strictly usable: boundary coordinates (e.g. mu = 0 where the
// gradient is undefined) are nudged just inside.
Vector project_inside(const DataGeneratingModel& model, const Vector& mu) {
    const ParamDomain& d = model.param_domain();
    Vector out = d.project(mu);
    for (int i = 0; i < out.size(); ++i) {
        const double width = std::isfinite(d.upper[i]) && std::isfinite(d.lower[i])
                                 ? d.upper[i] - d.lower[i]
                                 : 1.0;
        const double nudge = 1e-12 * std::max(1.0, width);
        if (out[i] <= d.lower[i]) out[i] = d.lower[i] + nudge;
        if (out[i] >= d.upper[i]) out[i] = d.upper[i] - nudge;
    }
    return out;
}

}  // namespace

PilotResult nls_pilot_estimate(const DataGeneratingModel& model, const Vector& x,
                               const PilotOptions& options) {
    return nls_pilot_estimate(model, x, model.pilot_init(), options);
}

PilotResult nls_pilot_estimate(const DataGeneratingModel& model, const Vector& x,
                               const Vector& init, const PilotOptions& options) {
    model.check_data(x);
    const int p = model.param_dim();
    const Vector z = Vector::Zero(model.data_dim());

    Vector mu = project_inside(model, init);
    double sse = objective(model, x, z, mu);
    double damping = options.initial_damping;

    PilotResult result;
    result.params = mu;
    result.residual_norm = std::sqrt(sse);

    for (int it = 0; it < options.max_iterations; ++it) {
        result.iterations = it + 1;
        const Vector r = x - model.forward(mu, z);
        const Matrix J = model.param_gradient(mu, z);
        const Vector g = J.transpose() * r;  // -1/2 gradient of the SSE

        result.gradient_norm = 2.0 * g.norm();
        if (result.gradient_norm <= options.gradient_tolerance) {
            result.converged = true;
            break;
        }

        const Matrix JtJ = J.transpose() * J;
        const Vector step =
            (JtJ + damping * Matrix::Identity(p, p)).ldlt().solve(g);
        const Vector candidate = project_inside(model, mu + step);
        const double candidate_sse = objective(model, x, z, candidate);

        // Ties within roundoff count as acceptance; rejecting them freezes
        // the damping loop just short of the gradient tolerance.
        if (std::isfinite(candidate_sse) && candidate_sse <= sse + 1e-15 * (1.0 + sse)) {
            mu = candidate;
            sse = candidate_sse;
            damping = std::max(damping * options.damping_down, 1e-14);
        } else {
            damping *= options.damping_up;
            if (damping > 1e14) break;  // stalled against the boundary
        }

        result.params = mu;
        result.residual_norm = std::sqrt(sse);
    }

    // Final gradient check in case the loop exited by budget right after an
    // accepted step.
    if (!result.converged) {
        const Vector r = x - model.forward(mu, z);
        const Matrix J = model.param_gradient(mu, z);
        result.gradient_norm = 2.0 * (J.transpose() * r).norm();
        result.converged = result.gradient_norm <= options.gradient_tolerance;
    }
    result.params = mu;
    result.residual_norm = std::sqrt(sse);
    return result;
}

}  // namespace fidkit
