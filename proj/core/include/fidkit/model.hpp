#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fidkit/random.hpp"
#include "fidkit/types.hpp"

namespace fidkit {

/// Per-coordinate closed parameter bounds; +-infinity for unbounded sides.
struct ParamDomain {
    Vector lower;
    Vector upper;

    bool contains(const Vector& mu) const;
    /// Strictly inside every bound (where gradients and likelihoods live).
    bool interior(const Vector& mu) const;
    /// Clip onto the box (used by constrained optimizers).
    Vector project(const Vector& mu) const;
};

/// A data-generating algorithm x = f(z, mu): the forward map from parameter
/// and noise to data, its parameter gradient, the noise distribution F0,
/// and (when available) the analytic inverse g(x, z).
///
/// All member functions are pure and safe for concurrent invocation;
/// RandomSource arguments carry the only mutable state.
class DataGeneratingModel {
public:
    virtual ~DataGeneratingModel() = default;

    virtual const std::string& name() const = 0;
    virtual int param_dim() const = 0;
    virtual int data_dim() const = 0;
    virtual const ParamDomain& param_domain() const = 0;
    /// Coordinate names used in CSV headers and reports.
    virtual const std::vector<std::string>& param_names() const = 0;

    /// x = f(z, mu). Throws DomainError/DimensionError on bad input.
    virtual Vector forward(const Vector& mu, const Vector& z) const = 0;

    /// d f / d mu, an m x p matrix evaluated at (z, mu); requires mu in the
    /// domain interior.
    virtual Matrix param_gradient(const Vector& mu, const Vector& z) const = 0;

    /// One i.i.d. draw of the noise vector from F0.
    virtual Vector sample_noise(RandomSource& rng) const = 0;

    virtual bool has_analytic_inverse() const { return false; }

    /// Exact minimizer of ||x - f(z, .)|| when one is known in closed form.
    virtual Vector analytic_inverse(const Vector& x, const Vector& z) const;

    /// Solve x = f(z, mu) for z at fixed mu (unique for all models here).
    virtual Vector implied_noise(const Vector& x, const Vector& mu) const = 0;

    /// log density of z under F0 (summed over coordinates).
    virtual double noise_log_density(const Vector& z) const = 0;

    /// log |det d f / d z| at mu; together with noise_log_density and
    /// implied_noise this yields the exact data likelihood.
    virtual double noise_jacobian_log_det(const Vector& mu) const = 0;

    /// Starting point for least-squares fits. Defaults to the midpoint of
    /// the domain box; models with unbounded coordinates override.
    virtual Vector pilot_init() const;

    void check_param(const Vector& mu) const;
    void check_noise(const Vector& z) const;
    void check_data(const Vector& x) const;
};

/// Model selection by name plus a constants table. Built-in names:
/// "laplace" (constants: m), "nonlinear-q" (constants: q, m),
/// "bod" (constants: sigma; design vector).
struct ModelConfig {
    std::string name;
    std::map<std::string, double> constants;
    std::vector<double> design;  // BOD design points; empty -> model default
};

std::unique_ptr<DataGeneratingModel> make_model(const ModelConfig& config);

/// Registration hook for user-defined models.
using ModelFactory = std::function<std::unique_ptr<DataGeneratingModel>(const ModelConfig&)>;
void register_model_factory(const std::string& name, ModelFactory factory);

}  // namespace fidkit
