#include "fidkit/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fidkit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogTwo = 0.6931471805599453;
constexpr double kHalfLogTwoPi = 0.9189385332046727;
}  // namespace

// ---------------------------------------------------------------------------
// Laplace location-scale

LaplaceLocationScale::LaplaceLocationScale(int m) : m_(m) {
    domain_.lower = Vector(2);
    domain_.upper = Vector(2);
    domain_.lower << -kInf, 0.0;
    domain_.upper << kInf, kInf;
}

const std::string& LaplaceLocationScale::name() const {
    static const std::string n = "laplace";
    return n;
}

const std::vector<std::string>& LaplaceLocationScale::param_names() const {
    static const std::vector<std::string> names = {"theta", "sigma"};
    return names;
}

Vector LaplaceLocationScale::forward(const Vector& mu, const Vector& z) const {
    check_param(mu);
    check_noise(z);
    return Vector::Constant(m_, mu[0]) + mu[1] * z;
}

Matrix LaplaceLocationScale::param_gradient(const Vector& mu, const Vector& z) const {
    check_param(mu);
    check_noise(z);
    Matrix g(m_, 2);
    g.col(0).setOnes();
    g.col(1) = z;
    return g;
}

Vector LaplaceLocationScale::sample_noise(RandomSource& rng) const {
    Vector z(m_);
    for (int i = 0; i < m_; ++i) z[i] = rng.laplace();
    return z;
}

Vector LaplaceLocationScale::analytic_inverse(const Vector& x, const Vector& z) const {
    check_data(x);
    check_noise(z);
    return laplace_inverse(x, z);
}

Vector LaplaceLocationScale::implied_noise(const Vector& x, const Vector& mu) const {
    check_data(x);
    check_param(mu);
    if (!(mu[1] > 0)) throw DomainError("laplace: implied noise undefined at sigma <= 0");
    return (x.array() - mu[0]) / mu[1];
}

double LaplaceLocationScale::noise_log_density(const Vector& z) const {
    return -z.array().abs().sum() - m_ * kLogTwo;
}

double LaplaceLocationScale::noise_jacobian_log_det(const Vector& mu) const {
    check_param(mu);
    if (!(mu[1] > 0)) throw DomainError("laplace: sigma must be positive");
    return m_ * std::log(mu[1]);
}

Vector LaplaceLocationScale::pilot_init() const {
    Vector init(2);
    init << 0.0, 1.0;
    return init;
}

// ---------------------------------------------------------------------------
// Nonlinear power model

NonlinearPower::NonlinearPower(double q, int m) : q_(q), m_(m) {
    domain_.lower = Vector::Constant(1, 0.0);
    domain_.upper = Vector::Constant(1, kInf);
}

const std::string& NonlinearPower::name() const {
    static const std::string n = "nonlinear-q";
    return n;
}

const std::vector<std::string>& NonlinearPower::param_names() const {
    static const std::vector<std::string> names = {"mu"};
    return names;
}

Vector NonlinearPower::forward(const Vector& mu, const Vector& z) const {
    check_param(mu);
    check_noise(z);
    const double scale = std::pow(mu[0], exponent());
    return Vector::Constant(m_, mu[0]) + scale * z;
}

Matrix NonlinearPower::param_gradient(const Vector& mu, const Vector& z) const {
    check_param(mu);
    check_noise(z);
    if (!(mu[0] > 0)) {
        throw DomainError("nonlinear-q: gradient undefined at the mu = 0 boundary");
    }
    const double dscale = exponent() * std::pow(mu[0], exponent() - 1.0);
    Matrix g(m_, 1);
    g.col(0) = Vector::Constant(m_, 1.0) + dscale * z;
    return g;
}

Vector NonlinearPower::sample_noise(RandomSource& rng) const {
    Vector z(m_);
    for (int i = 0; i < m_; ++i) z[i] = rng.normal();
    return z;
}

Vector NonlinearPower::implied_noise(const Vector& x, const Vector& mu) const {
    check_data(x);
    check_param(mu);
    if (!(mu[0] > 0)) throw DomainError("nonlinear-q: implied noise undefined at mu <= 0");
    return (x.array() - mu[0]) / std::pow(mu[0], exponent());
}

double NonlinearPower::noise_log_density(const Vector& z) const {
    return -0.5 * z.squaredNorm() - m_ * kHalfLogTwoPi;
}

double NonlinearPower::noise_jacobian_log_det(const Vector& mu) const {
    check_param(mu);
    if (!(mu[0] > 0)) throw DomainError("nonlinear-q: mu must be positive");
    return m_ * exponent() * std::log(mu[0]);
}

Vector NonlinearPower::pilot_init() const { return Vector::Constant(1, 1.0); }

// ---------------------------------------------------------------------------
// BOD saturation model

BodModel::BodModel(std::vector<double> design, double sigma)
    : design_(std::move(design)), sigma_(sigma) {
    domain_.lower = Vector::Constant(2, 0.0);
    domain_.upper = Vector::Constant(2, kInf);
}

const std::string& BodModel::name() const {
    static const std::string n = "bod";
    return n;
}

const std::vector<std::string>& BodModel::param_names() const {
    static const std::vector<std::string> names = {"t1", "t2"};
    return names;
}

Vector BodModel::mean_response(const Vector& mu) const {
    const int m = data_dim();
    Vector mean(m);
    for (int i = 0; i < m; ++i) {
        mean[i] = mu[0] * (1.0 - std::exp(-mu[1] * design_[i]));
    }
    return mean;
}

Vector BodModel::forward(const Vector& mu, const Vector& z) const {
    check_param(mu);
    check_noise(z);
    return mean_response(mu) + z;
}

Matrix BodModel::param_gradient(const Vector& mu, const Vector& z) const {
    check_param(mu);
    check_noise(z);
    const int m = data_dim();
    Matrix g(m, 2);
    for (int i = 0; i < m; ++i) {
        const double e = std::exp(-mu[1] * design_[i]);
        g(i, 0) = 1.0 - e;
        g(i, 1) = mu[0] * design_[i] * e;
    }
    return g;
}

Vector BodModel::sample_noise(RandomSource& rng) const {
    const int m = data_dim();
    Vector z(m);
    for (int i = 0; i < m; ++i) z[i] = sigma_ * rng.normal();
    return z;
}

Vector BodModel::implied_noise(const Vector& x, const Vector& mu) const {
    check_data(x);
    check_param(mu);
    return x - mean_response(mu);
}

double BodModel::noise_log_density(const Vector& z) const {
    const int m = data_dim();
    return -0.5 * z.squaredNorm() / (sigma_ * sigma_) - m * (kHalfLogTwoPi + std::log(sigma_));
}

double BodModel::noise_jacobian_log_det(const Vector& mu) const {
    check_param(mu);
    return 0.0;  // df/dz is the identity; sigma lives in F0
}

Vector BodModel::pilot_init() const {
    Vector init(2);
    init << 1.0, 0.5;
    return init;
}

// ---------------------------------------------------------------------------
// Free operations

Vector laplace_inverse(const Vector& x, const Vector& z) {
    const auto m = x.size();
    if (z.size() != m) throw DimensionError("laplace_inverse: x and z lengths differ");
    if (m < 2) throw DegenerateInputError("laplace_inverse: need at least two observations");
    const double zbar = z.mean();
    const double xbar = x.mean();
    const Vector zc = z.array() - zbar;
    const double denom = zc.squaredNorm();
    // Relative test: rounding noise around the mean must not pass for spread.
    if (denom <= 1e-24 * std::max(1.0, z.squaredNorm())) {
        throw DegenerateInputError("laplace_inverse: constant noise vector, slope undefined");
    }
    const double sigma = zc.dot(x - Vector::Constant(m, xbar)) / denom;
    Vector mu(2);
    mu << xbar - sigma * zbar, sigma;
    return mu;
}

std::pair<Vector, Vector> sort_preprocess(Vector x, Vector z) {
    std::sort(x.data(), x.data() + x.size());
    std::sort(z.data(), z.data() + z.size());
    return {std::move(x), std::move(z)};
}

}  // namespace fidkit
