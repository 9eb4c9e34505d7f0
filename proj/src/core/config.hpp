#pragma once

#include "core/backends.hpp"
#include "core/pipeline.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ctiler {

/// How one classifier or segmenter slot is filled.
///   kind: heuristic | oracle | fixed | external          (classifiers)
///         heuristic | oracle | external | empty          (segmenters)
/// oracle kinds read the ground-truth mask named by RunConfig::truth_mask.
struct BackendSpec {
    std::string kind = "heuristic";
    double rho = 0.002;                // heuristic: hatch response threshold
    double confidence = 1.0;           // fixed: constant confidence
    std::vector<std::string> command;  // external: argv prefix
};

struct StitchOptions {
    int connectivity = 8;
    long long min_area = -1; // -1 = resolve by segmenter kind (oracle 0, else 6)
};

/// The run configuration document (JSON, schema_version 1). Paths are
/// resolved relative to the config file's directory.
struct RunConfig {
    int schema_version = 1;
    uint64_t seed = 0;
    int pad_value = 255;
    int workers = 0; // 0 = auto
    LevelSchedule schedule = {{1792, 768}, {256, 256}};
    // One threshold per schedule level. Empty = defaults: 0.5 everywhere
    // except the final classifier level, which uses 0.35 to bias against
    // false negatives.
    std::vector<double> thresholds;
    BackendSpec classifier;                // used for every level...
    std::vector<BackendSpec> classifiers;  // ...unless overridden per level
    bool classify = true;                  // false = segment everything
    BackendSpec segmenter;
    std::string truth_mask; // PNG path for oracle backends
    ErrorModel error_model; // oracle classifier error injection (seed from `seed`)
    StitchOptions stitch;
};

RunConfig default_run_config();

RunConfig parse_run_config(const std::string& json_text,
                           const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// Canonical JSON rendering (used by --print-config and the run manifest).
std::string run_config_to_json(const RunConfig& cfg);

/// Per-level thresholds with defaults applied.
std::vector<double> resolved_thresholds(const RunConfig& cfg);

long long resolved_min_area(const RunConfig& cfg);

/// Instantiate backends and assemble the cascade. External backends exchange
/// files under work_dir.
CascadeConfig build_cascade_config(const RunConfig& cfg, const std::filesystem::path& work_dir);

} // namespace ctiler
