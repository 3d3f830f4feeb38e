#pragma once

#include <utility>

#include "fidkit/model.hpp"

namespace fidkit {

/// x = theta * 1 + sigma * z with z_i i.i.d. standard Laplace.
/// Parameters (theta, sigma); analytic least-squares inverse available.
class LaplaceLocationScale final : public DataGeneratingModel {
public:
    explicit LaplaceLocationScale(int m = 100);

    const std::string& name() const override;
    int param_dim() const override { return 2; }
    int data_dim() const override { return m_; }
    const ParamDomain& param_domain() const override { return domain_; }
    const std::vector<std::string>& param_names() const override;

    Vector forward(const Vector& mu, const Vector& z) const override;
    Matrix param_gradient(const Vector& mu, const Vector& z) const override;
    Vector sample_noise(RandomSource& rng) const override;
    bool has_analytic_inverse() const override { return true; }
    Vector analytic_inverse(const Vector& x, const Vector& z) const override;
    Vector implied_noise(const Vector& x, const Vector& mu) const override;
    double noise_log_density(const Vector& z) const override;
    double noise_jacobian_log_det(const Vector& mu) const override;
    Vector pilot_init() const override;

private:
    int m_;
    ParamDomain domain_;
};

/// x = mu * 1 + mu^{q/2} * z with z_i i.i.d. standard normal and q/2 known.
/// Scalar parameter mu >= 0; q = 3 gives the genuinely nonlinear case.
class NonlinearPower final : public DataGeneratingModel {
public:
    explicit NonlinearPower(double q = 3.0, int m = 3);

    const std::string& name() const override;
    int param_dim() const override { return 1; }
    int data_dim() const override { return m_; }
    const ParamDomain& param_domain() const override { return domain_; }
    const std::vector<std::string>& param_names() const override;

    Vector forward(const Vector& mu, const Vector& z) const override;
    Matrix param_gradient(const Vector& mu, const Vector& z) const override;
    Vector sample_noise(RandomSource& rng) const override;
    Vector implied_noise(const Vector& x, const Vector& mu) const override;
    double noise_log_density(const Vector& z) const override;
    double noise_jacobian_log_det(const Vector& mu) const override;
    Vector pilot_init() const override;

    double exponent() const { return q_ / 2.0; }

private:
    double q_;
    int m_;
    ParamDomain domain_;
};

/// Saturation-growth regression y_i = t1 (1 - exp(-t2 d_i)) + z_i at fixed
/// design points d, with z_i i.i.d. N(0, sigma^2) and sigma a fixed
/// constant (not a parameter). Parameters (t1, t2), both positive.
class BodModel final : public DataGeneratingModel {
public:
    explicit BodModel(std::vector<double> design = {2, 4, 6, 8, 10}, double sigma = 0.015);

    const std::string& name() const override;
    int param_dim() const override { return 2; }
    int data_dim() const override { return static_cast<int>(design_.size()); }
    const ParamDomain& param_domain() const override { return domain_; }
    const std::vector<std::string>& param_names() const override;

    Vector forward(const Vector& mu, const Vector& z) const override;
    Matrix param_gradient(const Vector& mu, const Vector& z) const override;
    Vector sample_noise(RandomSource& rng) const override;
    Vector implied_noise(const Vector& x, const Vector& mu) const override;
    double noise_log_density(const Vector& z) const override;
    double noise_jacobian_log_det(const Vector& mu) const override;
    Vector pilot_init() const override;

    double sigma() const { return sigma_; }
    const std::vector<double>& design() const { return design_; }

private:
    Vector mean_response(const Vector& mu) const;

    std::vector<double> design_;
    double sigma_;
    ParamDomain domain_;
};

/// Exact least-squares inverse of the location-scale map: regress x on
/// (1, z). Returns (theta*, sigma*). Requires m >= 2 and non-constant z.
Vector laplace_inverse(const Vector& x, const Vector& z);

/// Sort both vectors ascending, independently. Idempotent.
std::pair<Vector, Vector> sort_preprocess(Vector x, Vector z);

}  // namespace fidkit
