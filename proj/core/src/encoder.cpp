#include "fidkit/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace fidkit {

namespace {

double softplus(double u) {
    if (u > 30.0) return u;
    // Floor at the smallest normal double so the image stays strictly
    // positive even when exp underflows.
    if (u < -30.0) return std::max(std::exp(u), std::numeric_limits<double>::min());
    return std::log1p(std::exp(u));
}

double softplus_derivative(double u) {
    if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
    const double e = std::exp(u);
    return e / (1.0 + e);
}

std::vector<int> layer_widths(const EncoderSpec& spec) {
    std::vector<int> widths;
    widths.push_back(spec.input_dim);
    widths.insert(widths.end(), spec.hidden_layers.begin(), spec.hidden_layers.end());
    widths.push_back(spec.output_dim);
    return widths;
}

void apply_output_transform(const EncoderSpec& spec, Matrix& u) {
    for (int c = 0; c < u.rows(); ++c) {
        if (spec.output_transform[c] == OutputTransform::kSoftplus) {
            for (int j = 0; j < u.cols(); ++j) u(c, j) = softplus(u(c, j));
        }
    }
}

struct ForwardCache {
    std::vector<Matrix> pre;   // pre[l] = W_l a_{l-1} + b_l
    std::vector<Matrix> act;   // act[0] = standardized input, act[l] = relu(pre[l])
    Matrix mu_hat;             // transform(pre.back())
};

Matrix standardized(const EncoderWeights& w, const Matrix& inputs) {
    return w.input_scale.cwiseInverse().asDiagonal() * (inputs.colwise() - w.input_mean);
}

ForwardCache forward_pass(const EncoderSpec& spec, const EncoderWeights& w,
                          const Matrix& inputs) {
    const int L = spec.n_affine();
    ForwardCache cache;
    cache.pre.resize(L);
    cache.act.resize(L);  // act[l] is the input of affine map l
    cache.act[0] = standardized(w, inputs);
    for (int l = 0; l < L; ++l) {
        cache.pre[l] = (w.W[l] * cache.act[l]).colwise() + w.b[l];
        if (l + 1 < L) {
            cache.act[l + 1] = cache.pre[l].cwiseMax(0.0);
        }
    }
    cache.mu_hat = cache.pre[L - 1];
    apply_output_transform(spec, cache.mu_hat);
    return cache;
}

}  // namespace

void EncoderSpec::validate() const {
    if (input_dim < 1) throw ConfigError("encoder: input_dim must be >= 1");
    if (output_dim < 1) throw ConfigError("encoder: output_dim must be >= 1");
    if (hidden_layers.empty()) throw ConfigError("encoder: hidden_layers must be non-empty");
    for (int wdt : hidden_layers) {
        if (wdt < 1) throw ConfigError("encoder: hidden layer width must be >= 1");
    }
    if (output_transform.size() != static_cast<std::size_t>(output_dim)) {
        throw ConfigError("encoder: output_transform size must equal output_dim");
    }
}

EncoderSpec EncoderSpec::for_model(const DataGeneratingModel& model, std::vector<int> hidden) {
    EncoderSpec spec;
    spec.input_dim = 2 * model.data_dim();
    spec.output_dim = model.param_dim();
    spec.hidden_layers = std::move(hidden);
    const ParamDomain& d = model.param_domain();
    for (int c = 0; c < model.param_dim(); ++c) {
        const bool below = std::isfinite(d.lower[c]);
        const bool above = std::isfinite(d.upper[c]);
        if (below && above) {
            throw ConfigError("encoder: two-sided bounded coordinates are not supported");
        }
        spec.output_transform.push_back(below ? OutputTransform::kSoftplus
                                              : OutputTransform::kIdentity);
    }
    spec.validate();
    return spec;
}

bool EncoderWeights::finite() const {
    for (const auto& m : W) {
        if (!m.allFinite()) return false;
    }
    for (const auto& v : b) {
        if (!v.allFinite()) return false;
    }
    return input_mean.allFinite() && input_scale.allFinite();
}

EncoderWeights init_weights(const EncoderSpec& spec, RandomSource& rng) {
    spec.validate();
    const auto widths = layer_widths(spec);
    EncoderWeights w;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const int fan_in = widths[l];
        const int fan_out = widths[l + 1];
        const double scale = std::sqrt(2.0 / fan_in);
        Matrix m(fan_out, fan_in);
        for (int c = 0; c < fan_in; ++c) {
            for (int r = 0; r < fan_out; ++r) m(r, c) = scale * rng.normal();
        }
        w.W.push_back(std::move(m));
        w.b.push_back(Vector::Zero(fan_out));
    }
    w.input_mean = Vector::Zero(spec.input_dim);
    w.input_scale = Vector::Ones(spec.input_dim);
    return w;
}

Matrix encode_batch(const EncoderSpec& spec, const EncoderWeights& weights,
                    const Matrix& inputs) {
    if (inputs.rows() != spec.input_dim) {
        throw DimensionError("encode: input rows do not match spec.input_dim");
    }
    return forward_pass(spec, weights, inputs).mu_hat;
}

Vector encode(const EncoderSpec& spec, const EncoderWeights& weights, const Vector& x,
              const Vector& z) {
    if (x.size() + z.size() != spec.input_dim) {
        throw DimensionError("encode: (x, z) length does not match spec.input_dim");
    }
    Matrix input(spec.input_dim, 1);
    input.col(0).head(x.size()) = x;
    input.col(0).tail(z.size()) = z;
    return encode_batch(spec, weights, input).col(0);
}

// ---------------------------------------------------------------------------

ParamBoxSampler pilot_box(const Vector& pilot, double relative_width,
                          const ParamDomain& domain) {
    if (!(relative_width > 0.0)) throw ConfigError("pilot_box: relative width must be > 0");
    ParamBoxSampler box;
    box.lo = pilot;
    box.hi = pilot;
    for (int c = 0; c < pilot.size(); ++c) {
        const double half = relative_width * std::abs(pilot[c]);
        box.lo[c] = std::max(pilot[c] - half, domain.lower[c]);
        box.hi[c] = std::min(pilot[c] + half, domain.upper[c]);
        if (!(box.hi[c] > box.lo[c])) {
            throw ConfigError("pilot_box: degenerate box; pilot coordinate too close to zero");
        }
    }
    return box;
}

void TrainConfig::validate(const DataGeneratingModel& model) const {
    if (!(w1 >= 0.0 && w2 >= 0.0 && w1 + w2 > 0.0)) {
        throw ConfigError("train: need w1, w2 >= 0 with w1 + w2 > 0");
    }
    if (epochs < 0) throw ConfigError("train: epochs must be >= 0");
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("train: train_fraction must lie in (0, 1)");
    }
    if (n_train_params < 2) throw ConfigError("train: n_train_params must be >= 2");
    const int p = model.param_dim();
    if (param_sampler.lo.size() != p || param_sampler.hi.size() != p) {
        throw ConfigError("train: param_sampler bounds must have length param_dim");
    }
    for (int c = 0; c < p; ++c) {
        if (!(param_sampler.hi[c] > param_sampler.lo[c])) {
            throw ConfigError("train: param_sampler box is empty");
        }
        if (param_sampler.lo[c] < model.param_domain().lower[c] ||
            param_sampler.hi[c] > model.param_domain().upper[c]) {
            throw ConfigError("train: param_sampler box leaves the parameter domain");
        }
    }
}

TrainingSet generate_training_set(const DataGeneratingModel& model, const TrainConfig& config,
                                  RandomSource& rng) {
    config.validate(model);
    const int n = config.n_train_params;
    const int p = model.param_dim();
    const int m = model.data_dim();

    TrainingSet set;
    set.mu.resize(p, n);
    set.z.resize(m, n);
    set.x.resize(m, n);
    for (int k = 0; k < n; ++k) {
        for (int c = 0; c < p; ++c) {
            set.mu(c, k) = rng.uniform(config.param_sampler.lo[c], config.param_sampler.hi[c]);
        }
        const Vector z = model.sample_noise(rng);
        set.z.col(k) = z;
        set.x.col(k) = model.forward(set.mu.col(k), z);
    }

    // Reproducible random split: Fisher-Yates on the index list.
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
        std::swap(order[i], order[j]);
    }
    const int n_train = std::max(1, static_cast<int>(std::lround(config.train_fraction * n)));
    set.train_indices.assign(order.begin(), order.begin() + n_train);
    set.val_indices.assign(order.begin() + n_train, order.end());
    if (set.val_indices.empty()) {  // degenerate fraction on a tiny set
        set.val_indices.push_back(set.train_indices.back());
        set.train_indices.pop_back();
    }
    return set;
}

// ---------------------------------------------------------------------------
// Loss and gradient

namespace {

Matrix stack_inputs(const Matrix& x, const Matrix& z) {
    Matrix inputs(x.rows() + z.rows(), x.cols());
    inputs.topRows(x.rows()) = x;
    inputs.bottomRows(z.rows()) = z;
    return inputs;
}

LossTerms loss_from_mu_hat(const DataGeneratingModel& model, const Matrix& x, const Matrix& z,
                           const Matrix& mu, const Matrix& mu_hat, double w1, double w2) {
    const int B = static_cast<int>(x.cols());
    LossTerms terms;
    for (int j = 0; j < B; ++j) {
        const Vector x_hat = model.forward(mu_hat.col(j), z.col(j));
        terms.x_term += (x.col(j) - x_hat).squaredNorm();
        terms.mu_term += (mu.col(j) - mu_hat.col(j)).squaredNorm();
    }
    terms.x_term /= B;
    terms.mu_term /= B;
    terms.total = w1 * terms.x_term + w2 * terms.mu_term;
    return terms;
}

}  // namespace

LossTerms fae_loss(const DataGeneratingModel& model, const EncoderSpec& spec,
                   const EncoderWeights& weights, const Matrix& x, const Matrix& z,
                   const Matrix& mu, double w1, double w2) {
    if (x.cols() == 0) throw Error("fae_loss: empty batch");
    const Matrix mu_hat = encode_batch(spec, weights, stack_inputs(x, z));
    return loss_from_mu_hat(model, x, z, mu, mu_hat, w1, w2);
}

GradientSet fae_gradient(const DataGeneratingModel& model, const EncoderSpec& spec,
                         const EncoderWeights& weights, const Matrix& x, const Matrix& z,
                         const Matrix& mu, double w1, double w2) {
    if (x.cols() == 0) throw Error("fae_gradient: empty batch");
    const int B = static_cast<int>(x.cols());
    const int L = spec.n_affine();
    const int p = spec.output_dim;

    const ForwardCache cache = forward_pass(spec, weights, stack_inputs(x, z));
    const Matrix& mu_hat = cache.mu_hat;

    GradientSet grads;
    grads.loss = loss_from_mu_hat(model, x, z, mu, mu_hat, w1, w2);
    if (!std::isfinite(grads.loss.total)) {
        throw DivergenceError("fae_gradient: non-finite loss", -1);
    }

    // d total / d mu_hat, column per batch element.
    Matrix g_mu(p, B);
    for (int j = 0; j < B; ++j) {
        const Vector x_hat = model.forward(mu_hat.col(j), z.col(j));
        const Matrix A = model.param_gradient(mu_hat.col(j), z.col(j));  // m x p
        const Vector e = x.col(j) - x_hat;
        g_mu.col(j) =
            (-2.0 * w1 / B) * (A.transpose() * e) + (2.0 * w2 / B) * (mu_hat.col(j) - mu.col(j));
    }

    // Through the output transform.
    Matrix delta = g_mu;
    const Matrix& u = cache.pre[L - 1];
    for (int c = 0; c < p; ++c) {
        if (spec.output_transform[c] == OutputTransform::kSoftplus) {
            for (int j = 0; j < B; ++j) delta(c, j) *= softplus_derivative(u(c, j));
        }
    }

    grads.dW.resize(L);
    grads.db.resize(L);
    for (int l = L - 1; l >= 0; --l) {
        const Matrix& prev = cache.act[l];
        grads.dW[l] = delta * prev.transpose();
        grads.db[l] = delta.rowwise().sum();
        if (l > 0) {
            delta = ((weights.W[l].transpose() * delta).array() *
                     (cache.pre[l - 1].array() > 0.0).cast<double>())
                        .matrix();
        }
    }

    for (const auto& m : grads.dW) {
        if (!m.allFinite()) throw DivergenceError("fae_gradient: non-finite gradient", -1);
    }
    return grads;
}

// ---------------------------------------------------------------------------
// Adam training loop

namespace {

struct AdamState {
    std::vector<Matrix> mW, vW;
    std::vector<Vector> mb, vb;
    long long t = 0;
};

AdamState make_adam_state(const EncoderWeights& w) {
    AdamState s;
    for (const auto& m : w.W) {
        s.mW.push_back(Matrix::Zero(m.rows(), m.cols()));
        s.vW.push_back(Matrix::Zero(m.rows(), m.cols()));
    }
    for (const auto& v : w.b) {
        s.mb.push_back(Vector::Zero(v.size()));
        s.vb.push_back(Vector::Zero(v.size()));
    }
    return s;
}

void adam_step(EncoderWeights& w, AdamState& s, const GradientSet& g, const TrainConfig& cfg) {
    ++s.t;
    const double b1 = cfg.adam_beta1;
    const double b2 = cfg.adam_beta2;
    const double correction1 = 1.0 - std::pow(b1, static_cast<double>(s.t));
    const double correction2 = 1.0 - std::pow(b2, static_cast<double>(s.t));
    for (std::size_t l = 0; l < w.W.size(); ++l) {
        s.mW[l] = b1 * s.mW[l] + (1.0 - b1) * g.dW[l];
        s.vW[l] = b2 * s.vW[l] + (1.0 - b2) * g.dW[l].cwiseProduct(g.dW[l]);
        const Matrix mhat = s.mW[l] / correction1;
        const Matrix vhat = s.vW[l] / correction2;
        w.W[l] -= cfg.learning_rate *
                  (mhat.array() / (vhat.array().sqrt() + cfg.adam_epsilon)).matrix();

        s.mb[l] = b1 * s.mb[l] + (1.0 - b1) * g.db[l];
        s.vb[l] = b2 * s.vb[l] + (1.0 - b2) * g.db[l].cwiseProduct(g.db[l]);
        const Vector mbh = s.mb[l] / correction1;
        const Vector vbh = s.vb[l] / correction2;
        w.b[l] -= cfg.learning_rate *
                  (mbh.array() / (vbh.array().sqrt() + cfg.adam_epsilon)).matrix();
    }
}

Matrix gather(const Matrix& src, const std::vector<int>& idx, int begin, int count) {
    Matrix out(src.rows(), count);
    for (int j = 0; j < count; ++j) out.col(j) = src.col(idx[begin + j]);
    return out;
}

LossTerms evaluate_split(const DataGeneratingModel& model, const EncoderSpec& spec,
                         const EncoderWeights& w, const TrainingSet& data,
                         const std::vector<int>& idx, double w1, double w2) {
    // Chunked so the activations of a 100k-sample set never materialize at once.
    const int chunk = 8192;
    const int n = static_cast<int>(idx.size());
    LossTerms sum;
    for (int begin = 0; begin < n; begin += chunk) {
        const int count = std::min(chunk, n - begin);
        const LossTerms t = fae_loss(model, spec, w, gather(data.x, idx, begin, count),
                                     gather(data.z, idx, begin, count),
                                     gather(data.mu, idx, begin, count), w1, w2);
        sum.x_term += t.x_term * count;
        sum.mu_term += t.mu_term * count;
    }
    sum.x_term /= n;
    sum.mu_term /= n;
    sum.total = w1 * sum.x_term + w2 * sum.mu_term;
    return sum;
}

}  // namespace

std::pair<EncoderWeights, TrainReport> train(const DataGeneratingModel& model,
                                             const EncoderSpec& spec, const TrainConfig& config,
                                             const TrainingSet& dataset, RandomSource& rng) {
    spec.validate();
    config.validate(model);
    if (dataset.train_indices.empty() || dataset.val_indices.empty()) {
        throw ConfigError("train: dataset has an empty split");
    }
    if (spec.input_dim != 2 * model.data_dim() || spec.output_dim != model.param_dim()) {
        throw ConfigError("train: encoder spec does not match the model's dimensions");
    }

    RandomSource init_rng = rng.substream(0);
    RandomSource shuffle_rng = rng.substream(1);

    EncoderWeights weights = init_weights(spec, init_rng);

    // Freeze input standardization from the training split.
    const int d = spec.input_dim;
    const int m = model.data_dim();
    Vector mean = Vector::Zero(d);
    Vector second = Vector::Zero(d);
    for (int idx : dataset.train_indices) {
        Vector input(d);
        input.head(m) = dataset.x.col(idx);
        input.tail(m) = dataset.z.col(idx);
        mean += input;
        second += input.cwiseProduct(input);
    }
    const double n_train = static_cast<double>(dataset.train_indices.size());
    mean /= n_train;
    weights.input_mean = mean;
    weights.input_scale.resize(d);
    for (int c = 0; c < d; ++c) {
        const double var = std::max(second[c] / n_train - mean[c] * mean[c], 0.0);
        const double sd = std::sqrt(var);
        weights.input_scale[c] = sd > 1e-12 ? sd : 1.0;
    }

    TrainReport report;
    {
        const LossTerms v = evaluate_split(model, spec, weights, dataset, dataset.val_indices,
                                           config.w1, config.w2);
        report.initial_val_total = v.total;
        report.initial_val_x = v.x_term;
        report.initial_val_mu = v.mu_term;
        report.final_val_total = v.total;
    }

    AdamState adam = make_adam_state(weights);
    std::vector<int> order = dataset.train_indices;
    const int n = static_cast<int>(order.size());

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        RandomSource epoch_rng = shuffle_rng.substream(epoch);
        for (int i = n - 1; i > 0; --i) {
            const int j =
                static_cast<int>(epoch_rng.next_u64() % static_cast<std::uint64_t>(i + 1));
            std::swap(order[i], order[j]);
        }

        double sum_x = 0.0, sum_mu = 0.0;
        for (int begin = 0; begin < n; begin += config.batch_size) {
            const int count = std::min(config.batch_size, n - begin);
            GradientSet g;
            try {
                g = fae_gradient(model, spec, weights, gather(dataset.x, order, begin, count),
                                 gather(dataset.z, order, begin, count),
                                 gather(dataset.mu, order, begin, count), config.w1, config.w2);
            } catch (const DivergenceError& e) {
                throw DivergenceError(std::string(e.what()) + " at epoch " +
                                          std::to_string(epoch),
                                      epoch);
            }
            adam_step(weights, adam, g, config);
            sum_x += g.loss.x_term * count;
            sum_mu += g.loss.mu_term * count;
        }
        if (!weights.finite()) {
            throw DivergenceError("train: weights diverged at epoch " + std::to_string(epoch),
                                  epoch);
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_x = sum_x / n;
        stats.train_mu = sum_mu / n;
        stats.train_total = config.w1 * stats.train_x + config.w2 * stats.train_mu;
        const LossTerms v = evaluate_split(model, spec, weights, dataset, dataset.val_indices,
                                           config.w1, config.w2);
        stats.val_total = v.total;
        stats.val_x = v.x_term;
        stats.val_mu = v.mu_term;
        if (!std::isfinite(stats.val_total)) {
            throw DivergenceError("train: validation loss diverged at epoch " +
                                      std::to_string(epoch),
                                  epoch);
        }
        report.epochs.push_back(stats);
        report.final_val_total = stats.val_total;
    }
    return {std::move(weights), std::move(report)};
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

const char* transform_name(OutputTransform t) {
    return t == OutputTransform::kSoftplus ? "softplus" : "identity";
}

OutputTransform transform_from_name(const std::string& s) {
    if (s == "softplus") return OutputTransform::kSoftplus;
    if (s == "identity") return OutputTransform::kIdentity;
    throw ConfigError("encoder file: unknown output transform '" + s + "'");
}

}  // namespace

void save_encoder(const std::string& path, const EncoderSpec& spec,
                  const EncoderWeights& weights) {
    spec.validate();
    nlohmann::json doc;
    doc["format"] = "fidkit-encoder";
    doc["version"] = 1;
    doc["spec"]["input_dim"] = spec.input_dim;
    doc["spec"]["hidden_layers"] = spec.hidden_layers;
    doc["spec"]["output_dim"] = spec.output_dim;
    std::vector<std::string> transforms;
    for (auto t : spec.output_transform) transforms.emplace_back(transform_name(t));
    doc["spec"]["output_transform"] = transforms;

    doc["standardization"]["mean"] =
        std::vector<double>(weights.input_mean.data(), weights.input_mean.data() + weights.input_mean.size());
    doc["standardization"]["scale"] = std::vector<double>(
        weights.input_scale.data(), weights.input_scale.data() + weights.input_scale.size());

    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < weights.W.size(); ++l) {
        const Matrix& W = weights.W[l];
        nlohmann::json layer;
        layer["rows"] = W.rows();
        layer["cols"] = W.cols();
        std::vector<double> flat;
        flat.reserve(static_cast<std::size_t>(W.size()));
        for (int r = 0; r < W.rows(); ++r) {
            for (int c = 0; c < W.cols(); ++c) flat.push_back(W(r, c));
        }
        layer["W"] = flat;
        layer["b"] = std::vector<double>(weights.b[l].data(),
                                         weights.b[l].data() + weights.b[l].size());
        layers.push_back(std::move(layer));
    }
    doc["layers"] = std::move(layers);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("encoder file: cannot open '" + path + "' for writing");
    out << doc.dump(1) << '\n';
    if (!out) throw Error("encoder file: write failed for '" + path + "'");
}

LoadedEncoder load_encoder(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("encoder file: cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error("encoder file: parse error in '" + path + "': " + e.what());
    }
    if (doc.value("format", "") != "fidkit-encoder") {
        throw Error("encoder file: '" + path + "' is not a fidkit encoder document");
    }

    LoadedEncoder result;
    result.spec.input_dim = doc["spec"]["input_dim"].get<int>();
    result.spec.hidden_layers = doc["spec"]["hidden_layers"].get<std::vector<int>>();
    result.spec.output_dim = doc["spec"]["output_dim"].get<int>();
    for (const auto& t : doc["spec"]["output_transform"]) {
        result.spec.output_transform.push_back(transform_from_name(t.get<std::string>()));
    }
    result.spec.validate();

    const auto mean = doc["standardization"]["mean"].get<std::vector<double>>();
    const auto scale = doc["standardization"]["scale"].get<std::vector<double>>();
    result.weights.input_mean = Eigen::Map<const Vector>(mean.data(), mean.size());
    result.weights.input_scale = Eigen::Map<const Vector>(scale.data(), scale.size());

    for (const auto& layer : doc["layers"]) {
        const int rows = layer["rows"].get<int>();
        const int cols = layer["cols"].get<int>();
        const auto flat = layer["W"].get<std::vector<double>>();
        if (static_cast<int>(flat.size()) != rows * cols) {
            throw Error("encoder file: layer size mismatch");
        }
        Matrix W(rows, cols);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) W(r, c) = flat[r * cols + c];
        }
        const auto bias = layer["b"].get<std::vector<double>>();
        result.weights.W.push_back(std::move(W));
        result.weights.b.push_back(Eigen::Map<const Vector>(bias.data(), bias.size()));
    }
    if (result.weights.W.size() != static_cast<std::size_t>(result.spec.n_affine())) {
        throw Error("encoder file: layer count does not match the spec");
    }
    return result;
}

Vector EncoderInverse::invert(const Vector& x, const Vector& z) const {
    return encode(spec_, weights_, x, z);
}

Matrix EncoderInverse::invert_batch(const Vector& x, const Matrix& Z) const {
    Matrix inputs(spec_.input_dim, Z.cols());
    inputs.topRows(x.size()).colwise() = x;
    inputs.bottomRows(Z.rows()) = Z;
    return encode_batch(spec_, weights_, inputs);
}

}  // namespace fidkit
