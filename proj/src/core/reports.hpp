#pragma once

#include "core/config.hpp"
#include "core/eval.hpp"
#include "core/pipeline.hpp"
#include "core/stitch.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ctiler {

// Detections GeoJSON: FeatureCollection of Point features with properties
// {area_px, region_id}. Coordinates are world units when geo is present,
// otherwise pixel units with a top-level `crs: "pixel"` marker.
std::string detections_to_geojson(const std::vector<Detection>& dets, bool world);
void write_detections_geojson(const std::filesystem::path& path,
                              const std::vector<Detection>& dets, bool world);

// Detections CSV, header: x,y,world_x,world_y,area_px,region_id
// world columns are empty when no affine is attached.
std::string detections_to_csv(const std::vector<Detection>& dets);
void write_detections_csv(const std::filesystem::path& path, const std::vector<Detection>& dets);

/// Reads .csv or .geojson/.json detection files (by extension).
std::vector<Detection> read_detections(const std::filesystem::path& path);

/// Stats JSON. Wall-clock fields (wall_ms, estimated_A) are null unless
/// include_timings is set: they vary run to run, and default output is
/// byte-reproducible.
std::string stats_to_json(const RunStats& stats, bool include_timings);
void write_stats_json(const std::filesystem::path& path, const RunStats& stats,
                      bool include_timings);

/// Run manifest: resolved config, input hashes, seeds, tool version,
/// per-level stats and output paths. Carries no timestamps, so a rerun with
/// identical inputs reproduces it byte for byte.
struct ManifestInput {
    std::string role; // "map", "world_file", "truth_mask", ...
    std::filesystem::path path;
};
std::string build_manifest(const RunConfig& cfg, const std::vector<ManifestInput>& inputs,
                           const RunStats& stats, const std::vector<std::filesystem::path>& outputs);
void write_manifest(const std::filesystem::path& path, const std::string& manifest_json);

/// Evaluation report: one row per (truth, detections) pair plus totals.
struct EvalRow {
    std::string name;
    MatchResult result;
};
std::string eval_report_json(const std::vector<EvalRow>& rows, double radius);
std::string eval_report_text(const std::vector<EvalRow>& rows, double radius);

std::string change_report_json(const ChangeReport& report, double radius, double cluster_dist);
std::string change_report_csv(const ChangeReport& report);
std::string change_report_text(const ChangeReport& report);

/// Cost table (text or CSV) for n = 0..n_max plus the asymptote.
std::string cost_table_text(double pass_fraction, double cost_ratio, int n_max);
std::string cost_table_csv(double pass_fraction, double cost_ratio, int n_max);

/// Map with detection centroids drawn as 3 px red dots.
void write_overlay_png(const std::filesystem::path& path, const Raster& map,
                       const std::vector<Detection>& dets);

} // namespace ctiler
