#include <filesystem>
#include <fstream>

#include "cli.hpp"

namespace fidkit::cli {

using nlohmann::json;

namespace {

Vector to_vector(const json& arr) {
    Vector v(static_cast<int>(arr.size()));
    int i = 0;
    for (const auto& x : arr) v[i++] = x.get<double>();
    return v;
}

json from_vector(const Vector& v) {
    json arr = json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
    ExperimentConfig cfg;
    if (!doc.contains("model") || !doc["model"].contains("name")) {
        throw ConfigError("config: missing model.name");
    }
    cfg.model.name = doc["model"]["name"].get<std::string>();
    if (doc["model"].contains("constants")) {
        for (const auto& [key, value] : doc["model"]["constants"].items()) {
            cfg.model.constants[key] = value.get<double>();
        }
    }
    if (doc["model"].contains("design")) {
        cfg.model.design = doc["model"]["design"].get<std::vector<double>>();
    }

    cfg.mode = doc.value("mode", "");
    if (doc.contains("seed")) {
        cfg.seed = doc["seed"].get<std::uint64_t>();
        cfg.has_seed = true;
    }
    cfg.out = doc.value("out", cfg.out);
    cfg.threads = doc.value("threads", cfg.threads);
    cfg.inverse = doc.value("inverse", cfg.inverse);
    cfg.weights_file = doc.value("weights_file", cfg.weights_file);

    if (doc.contains("encoder") && doc["encoder"].contains("hidden_layers")) {
        cfg.encoder_hidden = doc["encoder"]["hidden_layers"].get<std::vector<int>>();
    }

    if (doc.contains("train")) {
        const json& t = doc["train"];
        cfg.train.w1 = t.value("w1", cfg.train.w1);
        cfg.train.w2 = t.value("w2", cfg.train.w2);
        cfg.train.epochs = t.value("epochs", cfg.train.epochs);
        cfg.train.batch_size = t.value("batch_size", cfg.train.batch_size);
        cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
        cfg.train.adam_beta1 = t.value("adam_beta1", cfg.train.adam_beta1);
        cfg.train.adam_beta2 = t.value("adam_beta2", cfg.train.adam_beta2);
        cfg.train.adam_epsilon = t.value("adam_epsilon", cfg.train.adam_epsilon);
        cfg.train.train_fraction = t.value("train_fraction", cfg.train.train_fraction);
        cfg.train.n_train_params = t.value("n_train_params", cfg.train.n_train_params);
        if (t.contains("sampler")) {
            const json& s = t["sampler"];
            cfg.sampler.kind = s.value("kind", cfg.sampler.kind);
            if (s.contains("lo")) cfg.sampler.lo = to_vector(s["lo"]);
            if (s.contains("hi")) cfg.sampler.hi = to_vector(s["hi"]);
            cfg.sampler.relative_width = s.value("relative_width", cfg.sampler.relative_width);
        }
    }

    if (doc.contains("afc")) {
        const json& a = doc["afc"];
        cfg.afc_enabled = a.value("enabled", false);
        if (a.contains("epsilon") && !a["epsilon"].is_null()) {
            cfg.afc.epsilon = a["epsilon"].get<double>();
        }
        cfg.afc.auto_threshold = a.value("auto_threshold", cfg.afc.auto_threshold);
        cfg.afc.threshold_quantile = a.value("threshold_quantile", cfg.afc.threshold_quantile);
        cfg.afc.pilot_size = a.value("pilot_size", cfg.afc.pilot_size);
        cfg.afc.target_n = a.value("target_n", cfg.afc.target_n);
        if (a.contains("max_itr") && !a["max_itr"].is_null()) {
            cfg.afc.max_itr = a["max_itr"].get<long long>();
        }
        cfg.afc.sort_noise = a.value("sort_noise", cfg.afc.sort_noise);
        cfg.afc.keep_rejected = a.value("keep_rejected", cfg.afc.keep_rejected);
        cfg.afc.block_size = a.value("block_size", cfg.afc.block_size);
    }

    if (doc.contains("inference")) {
        const json& inf = doc["inference"];
        cfg.inference.alpha = inf.value("alpha", cfg.inference.alpha);
        cfg.inference.grid_points = inf.value("grid_points", cfg.inference.grid_points);
        cfg.inference.margin_fraction =
            inf.value("margin_fraction", cfg.inference.margin_fraction);
    }

    if (doc.contains("coverage")) {
        const json& c = doc["coverage"];
        if (c.contains("true_params")) {
            for (const auto& row : c["true_params"]) {
                cfg.coverage_truths.push_back(to_vector(row));
            }
        }
        cfg.n_datasets = c.value("n_datasets", cfg.n_datasets);
    }

    if (doc.contains("sweep")) {
        const json& s = doc["sweep"];
        if (s.contains("epsilons")) cfg.sweep.epsilons = s["epsilons"].get<std::vector<double>>();
        if (s.contains("quantiles")) {
            cfg.sweep.quantiles = s["quantiles"].get<std::vector<double>>();
        }
        cfg.sweep.pool = s.value("pool", cfg.sweep.pool);
    }

    if (doc.contains("bod")) {
        const json& b = doc["bod"];
        auto axis = [](const json& spec, GridAxis fallback) {
            if (spec.is_null()) return fallback;
            GridAxis a;
            a.lo = spec.at(0).get<double>();
            a.hi = spec.at(1).get<double>();
            a.n = spec.at(2).get<int>();
            return a;
        };
        if (b.contains("grid")) {
            cfg.bod.t1 = axis(b["grid"].value("t1", json()), cfg.bod.t1);
            cfg.bod.t2 = axis(b["grid"].value("t2", json()), cfg.bod.t2);
        }
        cfg.bod.n_boot = b.value("n_boot", cfg.bod.n_boot);
        cfg.bod.chain_length = b.value("chain_length", cfg.bod.chain_length);
        cfg.bod.burn_in = b.value("burn_in", cfg.bod.burn_in);
    }

    if (doc.contains("observation")) {
        const json& o = doc["observation"];
        if (o.contains("values")) cfg.observation_values = o["values"].get<std::vector<double>>();
        cfg.observation_file = o.value("file", "");
        if (o.contains("simulate_from")) {
            cfg.simulate_from = o["simulate_from"].get<std::vector<double>>();
        }
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("config: parse error in '" + path + "': " + e.what());
    }
    return parse_config(doc);
}

// ---------------------------------------------------------------------------
// Presets: one per reproduced experiment.

namespace {

json laplace_common() {
    json doc;
    doc["model"] = {{"name", "laplace"}, {"constants", {{"m", 100}}}};
    doc["mode"] = "coverage";
    doc["seed"] = 20260809;
    doc["inverse"] = "analytic";
    doc["afc"] = {{"enabled", false},      {"auto_threshold", false},
                  {"threshold_quantile", 0.05}, {"pilot_size", 10000},
                  {"target_n", 1000},      {"sort_noise", true}};
    doc["inference"] = {{"alpha", 0.9}, {"grid_points", 512}, {"margin_fraction", 0.05}};
    doc["coverage"] = {{"true_params", {{0.0, 1.0}}}, {"n_datasets", 200}};
    return doc;
}

json nonlinear_common() {
    json doc;
    doc["model"] = {{"name", "nonlinear-q"}, {"constants", {{"q", 3}, {"m", 3}}}};
    doc["seed"] = 20260809;
    doc["inverse"] = "encoder";
    doc["weights_file"] = "encoder.json";
    doc["encoder"] = {{"hidden_layers", {64, 64, 64, 64, 64, 64, 64, 64, 64}}};
    doc["train"] = {{"w1", 1.0},
                    {"w2", 1.0},
                    {"epochs", 10},
                    {"batch_size", 128},
                    {"learning_rate", 1e-3},
                    {"train_fraction", 0.8},
                    {"n_train_params", 100000},
                    {"sampler", {{"kind", "uniform"}, {"lo", {0.0}}, {"hi", {6.0}}}}};
    doc["afc"] = {{"enabled", false},      {"auto_threshold", false},
                  {"threshold_quantile", 0.05}, {"pilot_size", 10000},
                  {"target_n", 1000},      {"sort_noise", false}};
    doc["inference"] = {{"alpha", 0.9}, {"grid_points", 512}, {"margin_fraction", 0.05}};
    doc["coverage"] = {{"true_params", {{1.0}, {2.0}, {3.0}, {4.0}}}, {"n_datasets", 200}};
    return doc;
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& preset_list() {
    static const std::vector<std::pair<std::string, std::string>> presets = {
        {"laplace-noafc",
         "Location-scale Laplace coverage study, analytic inverse, plain fiducial sampling"},
        {"laplace-afc",
         "Location-scale Laplace coverage study with AFC (pilot-selected threshold)"},
        {"nonlinear-train",
         "Train the fully connected encoder for the nonlinear model (uniform(0,6) parameters)"},
        {"nonlinear-noafc",
         "Nonlinear-model coverage study over truths 1..4, trained encoder, no AFC"},
        {"nonlinear-afc",
         "Nonlinear-model coverage study over truths 1..4, trained encoder with AFC"},
        {"nonlinear-sweep",
         "Threshold sweep at a fixed nonlinear observation (true mu = 3.5)"},
        {"bod-compare",
         "BOD data: encoder+AFC vs Metropolis on the fiducial density vs bootstrap"},
    };
    return presets;
}

json preset_json(const std::string& name) {
    if (name == "laplace-noafc") {
        json doc = laplace_common();
        doc["out"] = "out/laplace-noafc";
        return doc;
    }
    if (name == "laplace-afc") {
        json doc = laplace_common();
        doc["afc"]["enabled"] = true;
        doc["afc"]["auto_threshold"] = true;
        doc["out"] = "out/laplace-afc";
        return doc;
    }
    if (name == "nonlinear-train") {
        json doc = nonlinear_common();
        doc["mode"] = "train";
        doc["out"] = "out/nonlinear-train";
        doc.erase("coverage");
        return doc;
    }
    if (name == "nonlinear-noafc") {
        json doc = nonlinear_common();
        doc["mode"] = "coverage";
        doc["out"] = "out/nonlinear-noafc";
        return doc;
    }
    if (name == "nonlinear-afc") {
        json doc = nonlinear_common();
        doc["mode"] = "coverage";
        doc["afc"]["enabled"] = true;
        doc["afc"]["auto_threshold"] = true;
        doc["out"] = "out/nonlinear-afc";
        return doc;
    }
    if (name == "nonlinear-sweep") {
        json doc = nonlinear_common();
        doc["mode"] = "sweep";
        doc["out"] = "out/nonlinear-sweep";
        doc.erase("coverage");
        doc["observation"] = {{"simulate_from", {3.5}}};
        doc["sweep"] = {{"quantiles", {0.5, 0.2, 0.1, 0.05}}, {"pool", 100000}};
        doc["afc"]["enabled"] = true;
        doc["afc"]["keep_rejected"] = true;
        return doc;
    }
    if (name == "bod-compare") {
        json doc;
        doc["model"] = {{"name", "bod"},
                        {"constants", {{"sigma", 0.015}}},
                        {"design", {2, 4, 6, 8, 10}}};
        doc["mode"] = "bod-compare";
        doc["seed"] = 20260809;
        doc["out"] = "out/bod-compare";
        doc["inverse"] = "encoder";
        doc["encoder"] = {{"hidden_layers", {64, 64, 64}}};
        doc["train"] = {{"w1", 1.0},
                        {"w2", 1.0},
                        {"epochs", 10},
                        {"batch_size", 128},
                        {"learning_rate", 1e-3},
                        {"train_fraction", 0.8},
                        {"n_train_params", 40000},
                        {"sampler", {{"kind", "pilot-box"}, {"relative_width", 0.5}}}};
        doc["afc"] = {{"enabled", true},        {"auto_threshold", true},
                      {"threshold_quantile", 0.05}, {"pilot_size", 10000},
                      {"target_n", 1000},      {"sort_noise", false}};
        doc["inference"] = {{"alpha", 0.9}, {"grid_points", 512}, {"margin_fraction", 0.05}};
        doc["observation"] = {{"values", {0.152, 0.296, 0.413, 0.482, 0.567}}};
        doc["bod"] = {{"grid", {{"t1", {0.5, 2.5, 400}}, {"t2", {0.02, 0.3, 400}}}},
                      {"n_boot", 1000},
                      {"chain_length", 55000},
                      {"burn_in", 5000}};
        return doc;
    }
    throw ConfigError("unknown preset '" + name + "'");
}

ExperimentConfig load_preset(const std::string& name) { return parse_config(preset_json(name)); }

// ---------------------------------------------------------------------------
// Validation

void validate_for_mode(ExperimentConfig& cfg, const std::string& mode) {
    if (!cfg.mode.empty() && cfg.mode != mode) {
        throw ConfigError("config: mode '" + cfg.mode + "' does not match subcommand '" + mode +
                          "'");
    }
    cfg.mode = mode;
    if (!cfg.has_seed) {
        throw ConfigError("config: master seed is required (set \"seed\" or pass --seed)");
    }
    if (cfg.threads < 1) throw ConfigError("config: threads must be >= 1");
    if (cfg.inverse != "analytic" && cfg.inverse != "encoder") {
        throw ConfigError("config: inverse must be 'analytic' or 'encoder'");
    }

    // Dimensional consistency, checked before any compute.
    const auto model = make_model(cfg.model);
    const int p = model->param_dim();
    const int m = model->data_dim();

    if (cfg.inverse == "analytic" && !model->has_analytic_inverse()) {
        throw ConfigError("config: model '" + cfg.model.name + "' has no analytic inverse");
    }

    if (!cfg.observation_values.empty() &&
        static_cast<int>(cfg.observation_values.size()) != m) {
        throw ConfigError("config: observation length does not match the model data dimension");
    }
    if (!cfg.simulate_from.empty() && static_cast<int>(cfg.simulate_from.size()) != p) {
        throw ConfigError("config: simulate_from length does not match param_dim");
    }
    for (const auto& truth : cfg.coverage_truths) {
        if (truth.size() != p) {
            throw ConfigError("config: coverage truth length does not match param_dim");
        }
    }
    if (cfg.sampler.kind == "uniform" && cfg.sampler.lo.size() > 0 &&
        (cfg.sampler.lo.size() != p || cfg.sampler.hi.size() != p)) {
        throw ConfigError("config: sampler bounds length does not match param_dim");
    }
    for (int w : cfg.encoder_hidden) {
        if (w < 1) throw ConfigError("config: encoder hidden widths must be positive");
    }
    cfg.afc.validate();
    if (!(cfg.inference.alpha > 0 && cfg.inference.alpha < 1)) {
        throw ConfigError("config: alpha must lie in (0, 1)");
    }
    if (cfg.inference.grid_points < 2) throw ConfigError("config: grid_points must be >= 2");

    const bool needs_weights = cfg.inverse == "encoder" &&
                               (mode == "sample" || mode == "sweep" || mode == "coverage");
    if (needs_weights) {
        if (cfg.weights_file.empty()) {
            throw ConfigError("config: inverse 'encoder' requires weights_file");
        }
        if (!std::filesystem::exists(cfg.weights_file)) {
            throw ConfigError("config: weights file '" + cfg.weights_file + "' does not exist");
        }
    }
    if (mode == "coverage" && cfg.coverage_truths.empty()) {
        throw ConfigError("config: coverage requires at least one true parameter");
    }
    if (mode == "sweep" && cfg.sweep.epsilons.empty() && cfg.sweep.quantiles.empty()) {
        throw ConfigError("config: sweep requires epsilons or quantiles");
    }
    if ((mode == "sample" || mode == "sweep") && cfg.observation_values.empty() &&
        cfg.observation_file.empty() && cfg.simulate_from.empty()) {
        throw ConfigError("config: " + mode + " requires an observation");
    }
    if (mode == "bod-compare") {
        if (cfg.model.name != "bod") throw ConfigError("config: bod-compare requires the bod model");
        if (cfg.observation_values.empty()) {
            throw ConfigError("config: bod-compare requires observation values");
        }
    }
    if (mode == "train" || (mode == "bod-compare" && cfg.inverse == "encoder")) {
        if (cfg.sampler.kind != "uniform" && cfg.sampler.kind != "pilot-box") {
            throw ConfigError("config: sampler kind must be 'uniform' or 'pilot-box'");
        }
        if (cfg.sampler.kind == "uniform" &&
            (cfg.sampler.lo.size() != p || cfg.sampler.hi.size() != p)) {
            throw ConfigError("config: uniform sampler requires lo/hi of length param_dim");
        }
    }
}

nlohmann::json resolved_json(const ExperimentConfig& cfg, const std::string& mode) {
    json doc;
    doc["model"] = {{"name", cfg.model.name}};
    doc["model"]["constants"] = cfg.model.constants;
    if (!cfg.model.design.empty()) doc["model"]["design"] = cfg.model.design;
    doc["mode"] = mode;
    doc["seed"] = cfg.seed;
    doc["out"] = cfg.out;
    doc["threads"] = cfg.threads;
    doc["inverse"] = cfg.inverse;
    if (!cfg.weights_file.empty()) doc["weights_file"] = cfg.weights_file;
    doc["encoder"] = {{"hidden_layers", cfg.encoder_hidden}};
    doc["train"] = {{"w1", cfg.train.w1},
                    {"w2", cfg.train.w2},
                    {"epochs", cfg.train.epochs},
                    {"batch_size", cfg.train.batch_size},
                    {"learning_rate", cfg.train.learning_rate},
                    {"adam_beta1", cfg.train.adam_beta1},
                    {"adam_beta2", cfg.train.adam_beta2},
                    {"adam_epsilon", cfg.train.adam_epsilon},
                    {"train_fraction", cfg.train.train_fraction},
                    {"n_train_params", cfg.train.n_train_params}};
    json sampler = {{"kind", cfg.sampler.kind}};
    if (cfg.sampler.lo.size() > 0) {
        sampler["lo"] = from_vector(cfg.sampler.lo);
        sampler["hi"] = from_vector(cfg.sampler.hi);
    }
    sampler["relative_width"] = cfg.sampler.relative_width;
    doc["train"]["sampler"] = sampler;
    doc["afc"] = {{"enabled", cfg.afc_enabled},
                  {"epsilon", cfg.afc.epsilon},
                  {"auto_threshold", cfg.afc.auto_threshold},
                  {"threshold_quantile", cfg.afc.threshold_quantile},
                  {"pilot_size", cfg.afc.pilot_size},
                  {"target_n", cfg.afc.target_n},
                  {"max_itr", cfg.afc.resolved_max_itr()},
                  {"sort_noise", cfg.afc.sort_noise},
                  {"keep_rejected", cfg.afc.keep_rejected},
                  {"block_size", cfg.afc.block_size}};
    doc["inference"] = {{"alpha", cfg.inference.alpha},
                        {"grid_points", cfg.inference.grid_points},
                        {"margin_fraction", cfg.inference.margin_fraction}};
    if (!cfg.coverage_truths.empty()) {
        json truths = json::array();
        for (const auto& t : cfg.coverage_truths) truths.push_back(from_vector(t));
        doc["coverage"] = {{"true_params", truths}, {"n_datasets", cfg.n_datasets}};
    }
    if (!cfg.sweep.epsilons.empty() || !cfg.sweep.quantiles.empty()) {
        doc["sweep"] = {{"epsilons", cfg.sweep.epsilons},
                        {"quantiles", cfg.sweep.quantiles},
                        {"pool", cfg.sweep.pool}};
    }
    if (mode == "bod-compare") {
        doc["bod"] = {{"grid",
                       {{"t1", {cfg.bod.t1.lo, cfg.bod.t1.hi, cfg.bod.t1.n}},
                        {"t2", {cfg.bod.t2.lo, cfg.bod.t2.hi, cfg.bod.t2.n}}}},
                      {"n_boot", cfg.bod.n_boot},
                      {"chain_length", cfg.bod.chain_length},
                      {"burn_in", cfg.bod.burn_in}};
    }
    if (!cfg.observation_values.empty()) {
        doc["observation"]["values"] = cfg.observation_values;
    } else if (!cfg.observation_file.empty()) {
        doc["observation"]["file"] = cfg.observation_file;
    } else if (!cfg.simulate_from.empty()) {
        doc["observation"]["simulate_from"] = cfg.simulate_from;
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Manifest

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("manifest: cannot open '" + path + "' for checksumming");
    std::uint64_t hash = 1469598103934665603ULL;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 1099511628211ULL;
        }
        if (!in) break;
    }
    return hash;
}

RunManifest::RunManifest(std::string out_dir, nlohmann::json config_snapshot)
    : out_dir_(std::move(out_dir)), config_(std::move(config_snapshot)) {
    std::filesystem::create_directories(out_dir_);
}

void RunManifest::add_timing(const std::string& stage, double milliseconds) {
    timings_.emplace_back(stage, milliseconds);
}

void RunManifest::add_output(const std::string& path) { files_.push_back(path); }

void RunManifest::add_note(const std::string& note) { notes_.push_back(note); }

void RunManifest::write(const std::string& command) const {
    json doc;
    doc["tool"] = "fidkit";
    doc["version"] = kToolVersion;
    doc["command"] = command;
    doc["config"] = config_;
    json timings = json::object();
    for (const auto& [stage, ms] : timings_) timings[stage] = ms;
    doc["timings_ms"] = timings;
    json outputs = json::array();
    for (const auto& f : files_) {
        char hex[32];
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(fnv1a64_file(f)));
        outputs.push_back({{"file", f},
                           {"bytes", std::filesystem::file_size(f)},
                           {"fnv1a64", std::string(hex)}});
    }
    doc["outputs"] = outputs;
    if (!notes_.empty()) doc["notes"] = notes_;

    std::ofstream out(std::filesystem::path(out_dir_) / "manifest.json", std::ios::binary);
    out << doc.dump(1) << '\n';
}

}  // namespace fidkit::cli
