#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace fidkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Aliases documenting which role a vector plays; dimensions are checked by
// the owning model, not the type.
using ParamVector = Vector;
using NoiseVector = Vector;
using DataVector = Vector;

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Vector/matrix shape does not match the model's declared dimensions.
class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

/// Parameter outside the model's domain, or evaluation at a boundary where
/// the requested quantity is undefined.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// Input that makes an operation ill-posed (e.g. constant noise vector in
/// the location-scale inverse).
class DegenerateInputError : public Error {
public:
    explicit DegenerateInputError(const std::string& msg) : Error(msg) {}
};

/// Invalid or internally inconsistent configuration; rejected before any
/// compute starts.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Non-finite values encountered during training.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& msg, int epoch) : Error(msg), epoch(epoch) {}
    int epoch;
};

}  // namespace fidkit
