#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fidkit/afc.hpp"
#include "fidkit/model.hpp"

namespace fidkit {

/// Keeps encoder outputs inside the parameter domain; softplus for
/// coordinates bounded below, identity otherwise.
enum class OutputTransform { kIdentity, kSoftplus };

struct EncoderSpec {
    int input_dim = 0;                               // data and noise concatenated (2m)
    std::vector<int> hidden_layers;                  // rectifier layer widths
    int output_dim = 0;                              // parameter dimension p
    std::vector<OutputTransform> output_transform;   // one per output coordinate

    void validate() const;
    /// Number of affine maps (hidden layers + output layer).
    int n_affine() const { return static_cast<int>(hidden_layers.size()) + 1; }
    /// Node-layer count: input + hidden + output.
    int n_node_layers() const { return static_cast<int>(hidden_layers.size()) + 2; }

    /// Spec matching a model's dimensions and domain, with the given hidden
    /// widths.
    static EncoderSpec for_model(const DataGeneratingModel& model, std::vector<int> hidden);
};

struct EncoderWeights {
    std::vector<Matrix> W;
    std::vector<Vector> b;
    /// Per-coordinate affine input standardization, frozen from the
    /// training set and stored with the weights so inference is
    /// self-contained. Identity (0, 1) until training sets it.
    Vector input_mean, input_scale;

    bool finite() const;
};

/// Scaled-variance (sqrt(2/fan_in)) rectifier initialization, zero biases.
EncoderWeights init_weights(const EncoderSpec& spec, RandomSource& rng);

/// Forward pass on a batch of inputs (columns). Inputs are the raw (x, z)
/// concatenation; standardization happens inside.
Matrix encode_batch(const EncoderSpec& spec, const EncoderWeights& weights, const Matrix& inputs);

/// mu_hat = encoder(x, z).
Vector encode(const EncoderSpec& spec, const EncoderWeights& weights, const Vector& x,
              const Vector& z);

// ---------------------------------------------------------------------------
// Training

/// Uniform box over the parameter space (the training distribution).
struct ParamBoxSampler {
    Vector lo, hi;
};

/// Box centered at a pilot estimate: pilot +- relative_width per
/// coordinate, clipped to the domain.
ParamBoxSampler pilot_box(const Vector& pilot, double relative_width, const ParamDomain& domain);

struct TrainConfig {
    double w1 = 1.0;   // weight of the ||x - x_hat||^2 reconstruction term
    double w2 = 1.0;   // weight of the ||mu - mu_hat||^2 term
    int epochs = 10;
    int batch_size = 128;
    double learning_rate = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double train_fraction = 0.8;
    int n_train_params = 100000;
    ParamBoxSampler param_sampler;

    void validate(const DataGeneratingModel& model) const;
};

/// Simulated (x_k, z_k, mu_k) triples, x_k = f(z_k, mu_k) exactly, plus a
/// reproducible train/validation index split.
struct TrainingSet {
    Matrix mu;  // p x n
    Matrix z;   // m x n
    Matrix x;   // m x n
    std::vector<int> train_indices;
    std::vector<int> val_indices;

    int size() const { return static_cast<int>(mu.cols()); }
};

TrainingSet generate_training_set(const DataGeneratingModel& model, const TrainConfig& config,
                                  RandomSource& rng);

struct LossTerms {
    double total = 0.0;
    double x_term = 0.0;   // mean ||x - f(z, mu_hat)||^2
    double mu_term = 0.0;  // mean ||mu - mu_hat||^2
};

/// Composite loss w1 * x_term + w2 * mu_term over a batch (columns).
/// x_hat is produced by routing mu_hat and the same z through the exact
/// data-generating algorithm.
LossTerms fae_loss(const DataGeneratingModel& model, const EncoderSpec& spec,
                   const EncoderWeights& weights, const Matrix& x, const Matrix& z,
                   const Matrix& mu, double w1, double w2);

struct GradientSet {
    std::vector<Matrix> dW;
    std::vector<Vector> db;
    LossTerms loss;
};

/// Exact gradient of fae_loss in every weight and bias, with the decoder
/// chain rule through the model's parameter gradient.
GradientSet fae_gradient(const DataGeneratingModel& model, const EncoderSpec& spec,
                         const EncoderWeights& weights, const Matrix& x, const Matrix& z,
                         const Matrix& mu, double w1, double w2);

struct EpochStats {
    int epoch = 0;
    double train_total = 0.0, train_x = 0.0, train_mu = 0.0;
    double val_total = 0.0, val_x = 0.0, val_mu = 0.0;
};

struct TrainReport {
    /// Validation loss of the initial weights, before any update.
    double initial_val_total = 0.0;
    double initial_val_x = 0.0;
    double initial_val_mu = 0.0;
    std::vector<EpochStats> epochs;
    double final_val_total = 0.0;
};

/// Mini-batch Adam on the composite loss. Single-threaded with a fixed
/// accumulation order: (seed -> weights) is a pure function. Non-finite
/// losses abort with the epoch index.
std::pair<EncoderWeights, TrainReport> train(const DataGeneratingModel& model,
                                             const EncoderSpec& spec, const TrainConfig& config,
                                             const TrainingSet& dataset, RandomSource& rng);

// ---------------------------------------------------------------------------
// Persistence and sampling adapter

/// Self-describing JSON document: spec, standardization constants and
/// per-layer arrays, all doubles rendered so they round-trip bit-exactly.
void save_encoder(const std::string& path, const EncoderSpec& spec,
                  const EncoderWeights& weights);

struct LoadedEncoder {
    EncoderSpec spec;
    EncoderWeights weights;
};

LoadedEncoder load_encoder(const std::string& path);

/// Trained encoder as the inverse function g(x, z) for AFC.
class EncoderInverse final : public FiducialInverse {
public:
    EncoderInverse(EncoderSpec spec, EncoderWeights weights)
        : spec_(std::move(spec)), weights_(std::move(weights)) {}

    Vector invert(const Vector& x, const Vector& z) const override;
    Matrix invert_batch(const Vector& x, const Matrix& Z) const override;

private:
    EncoderSpec spec_;
    EncoderWeights weights_;
};

}  // namespace fidkit
