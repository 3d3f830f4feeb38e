#include "fidkit/model.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "fidkit/models.hpp"

namespace fidkit {

bool ParamDomain::contains(const Vector& mu) const {
    for (int i = 0; i < mu.size(); ++i) {
        if (!(mu[i] >= lower[i] && mu[i] <= upper[i])) return false;
    }
    return true;
}

bool ParamDomain::interior(const Vector& mu) const {
    for (int i = 0; i < mu.size(); ++i) {
        if (!(mu[i] > lower[i] && mu[i] < upper[i])) return false;
    }
    return true;
}

Vector ParamDomain::project(const Vector& mu) const {
    Vector out = mu;
    for (int i = 0; i < mu.size(); ++i) {
        out[i] = std::min(std::max(out[i], lower[i]), upper[i]);
    }
    return out;
}

Vector DataGeneratingModel::analytic_inverse(const Vector&, const Vector&) const {
    throw Error("model '" + name() + "' has no analytic inverse");
}

Vector DataGeneratingModel::pilot_init() const {
    const ParamDomain& d = param_domain();
    Vector init(param_dim());
    for (int i = 0; i < param_dim(); ++i) {
        if (std::isfinite(d.lower[i]) && std::isfinite(d.upper[i])) {
            init[i] = 0.5 * (d.lower[i] + d.upper[i]);
        } else {
            throw Error("model '" + name() +
                        "' has an unbounded domain and must override pilot_init()");
        }
    }
    return init;
}

void DataGeneratingModel::check_param(const Vector& mu) const {
    if (mu.size() != param_dim()) {
        std::ostringstream os;
        os << name() << ": parameter vector has length " << mu.size() << ", expected "
           << param_dim();
        throw DimensionError(os.str());
    }
    if (!mu.allFinite()) throw DomainError(name() + ": non-finite parameter value");
    if (!param_domain().contains(mu)) {
        std::ostringstream os;
        os << name() << ": parameter (";
        for (int i = 0; i < mu.size(); ++i) os << (i ? ", " : "") << mu[i];
        os << ") outside the parameter domain";
        throw DomainError(os.str());
    }
}

void DataGeneratingModel::check_noise(const Vector& z) const {
    if (z.size() != data_dim()) {
        std::ostringstream os;
        os << name() << ": noise vector has length " << z.size() << ", expected " << data_dim();
        throw DimensionError(os.str());
    }
}

void DataGeneratingModel::check_data(const Vector& x) const {
    if (x.size() != data_dim()) {
        std::ostringstream os;
        os << name() << ": data vector has length " << x.size() << ", expected " << data_dim();
        throw DimensionError(os.str());
    }
}

namespace {

double constant_or(const ModelConfig& cfg, const std::string& key, double fallback) {
    auto it = cfg.constants.find(key);
    return it == cfg.constants.end() ? fallback : it->second;
}

std::map<std::string, ModelFactory>& registry() {
    static std::map<std::string, ModelFactory> factories;
    return factories;
}

std::mutex& registry_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

void register_model_factory(const std::string& name, ModelFactory factory) {
    std::lock_guard<std::mutex> lock(registry_mutex());
    registry()[name] = std::move(factory);
}

std::unique_ptr<DataGeneratingModel> make_model(const ModelConfig& config) {
    {
        std::lock_guard<std::mutex> lock(registry_mutex());
        auto it = registry().find(config.name);
        if (it != registry().end()) return it->second(config);
    }
    if (config.name == "laplace") {
        const int m = static_cast<int>(constant_or(config, "m", 100));
        if (m < 1) throw ConfigError("laplace: data dimension m must be >= 1");
        return std::make_unique<LaplaceLocationScale>(m);
    }
    if (config.name == "nonlinear-q") {
        const double q = constant_or(config, "q", 3.0);
        const int m = static_cast<int>(constant_or(config, "m", 3));
        if (m < 1) throw ConfigError("nonlinear-q: data dimension m must be >= 1");
        return std::make_unique<NonlinearPower>(q, m);
    }
    if (config.name == "bod") {
        const double sigma = constant_or(config, "sigma", 0.015);
        if (!(sigma > 0)) throw ConfigError("bod: sigma must be positive");
        std::vector<double> design = config.design;
        if (design.empty()) design = {2, 4, 6, 8, 10};
        return std::make_unique<BodModel>(std::move(design), sigma);
    }
    throw ConfigError("unknown model '" + config.name + "'");
}

}  // namespace fidkit
