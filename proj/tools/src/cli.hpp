#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fidkit/afc.hpp"
#include "fidkit/baselines.hpp"
#include "fidkit/encoder.hpp"
#include "fidkit/inference.hpp"
#include "fidkit/model.hpp"

namespace fidkit::cli {

inline constexpr const char* kToolVersion = "0.1.0";

struct TrainSampler {
    std::string kind = "uniform";  // "uniform" | "pilot-box"
    Vector lo, hi;                 // uniform box bounds
    double relative_width = 0.5;   // pilot-box half width, relative
};

struct InferenceSettings {
    double alpha = 0.9;
    int grid_points = 512;
    double margin_fraction = 0.05;
};

struct SweepSettings {
    std::vector<double> epsilons;   // explicit thresholds, or
    std::vector<double> quantiles;  // pilot-batch quantiles resolved at run time
    long long pool = 200000;        // shared retained proposal pool size
};

struct BodSettings {
    GridAxis t1{0.5, 2.5, 400};
    GridAxis t2{0.02, 0.3, 400};
    int n_boot = 1000;
    long long chain_length = 55000;
    long long burn_in = 5000;
};

/// One experiment, fully described: model, sampler, inference and output
/// settings. Loaded from a JSON config file or a shipped preset.
struct ExperimentConfig {
    ModelConfig model;
    std::string mode;  // optional; must match the invoked subcommand when set

    bool has_seed = false;
    std::uint64_t seed = 0;
    std::string out = "out";
    int threads = 1;

    std::string inverse = "analytic";  // "analytic" | "encoder"
    std::string weights_file;

    std::vector<int> encoder_hidden = {64, 64, 64};
    TrainConfig train;
    TrainSampler sampler;

    bool afc_enabled = false;
    AfcConfig afc;

    InferenceSettings inference;

    std::vector<Vector> coverage_truths;
    int n_datasets = 200;

    SweepSettings sweep;
    BodSettings bod;

    std::vector<double> observation_values;
    std::string observation_file;
    std::vector<double> simulate_from;  // draw the observation at this truth
};

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config_file(const std::string& path);

const std::vector<std::pair<std::string, std::string>>& preset_list();
nlohmann::json preset_json(const std::string& name);
ExperimentConfig load_preset(const std::string& name);

/// Full consistency check for the given subcommand; throws ConfigError
/// before any compute starts. Fills mode when empty.
void validate_for_mode(ExperimentConfig& config, const std::string& mode);

/// The fully resolved configuration (every default explicit), as echoed
/// into the run manifest.
nlohmann::json resolved_json(const ExperimentConfig& config, const std::string& mode);

std::uint64_t fnv1a64_file(const std::string& path);

/// Collects per-stage timings and output checksums; written as
/// <out>/manifest.json at the end of every command.
class RunManifest {
public:
    RunManifest(std::string out_dir, nlohmann::json config_snapshot);
    void add_timing(const std::string& stage, double milliseconds);
    void add_output(const std::string& path);
    void add_note(const std::string& note);
    void write(const std::string& command) const;
    const std::vector<std::string>& outputs() const { return files_; }

private:
    std::string out_dir_;
    nlohmann::json config_;
    std::vector<std::pair<std::string, double>> timings_;
    std::vector<std::string> files_;
    std::vector<std::string> notes_;
};

// Subcommand entry points. All throw ConfigError for invalid configuration
// and fidkit::Error subclasses for runtime failures; main() maps these to
// exit codes 2 and 3.
void run_train(ExperimentConfig config);
void run_sample(ExperimentConfig config);
void run_sweep(ExperimentConfig config);
void run_coverage(ExperimentConfig config);
void run_bod_compare(ExperimentConfig config);

}  // namespace fidkit::cli
