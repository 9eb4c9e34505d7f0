#pragma once

#include "core/config.hpp"
#include "core/stitch.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ctiler {

struct RunOptions {
    bool overlay = false;          // also write overlay.png
    bool include_timings = false;  // wall-clock fields in stats.json (non-reproducible)
    int workers_override = -1;     // -1 = use config
};

struct RunArtifacts {
    std::vector<Detection> detections;
    RunStats stats;
    std::filesystem::path geojson_path;
    std::filesystem::path csv_path;
    std::filesystem::path stats_path;
    std::filesystem::path manifest_path;
    std::filesystem::path overlay_path; // empty unless requested
};

/// Full `run` flow: load the map (plus world-file sidecar when present),
/// run the cascade, stitch, extract detections and write every output file
/// under out_dir. Deterministic for fixed config/seed at any worker count.
RunArtifacts run_pipeline(const std::filesystem::path& map_path, const RunConfig& cfg,
                          const std::filesystem::path& out_dir, const RunOptions& opts = {});

} // namespace ctiler
