#include "core/runner.hpp"

#include "core/errors.hpp"
#include "core/reports.hpp"

#include <fstream>

namespace ctiler {

RunArtifacts run_pipeline(const std::filesystem::path& map_path, const RunConfig& cfg_in,
                          const std::filesystem::path& out_dir, const RunOptions& opts) {
    RunConfig cfg = cfg_in;
    if (opts.workers_override >= 0) cfg.workers = opts.workers_override;

    const Raster map = load_png_with_sidecar(map_path);

    std::filesystem::create_directories(out_dir);
    const auto work_dir = out_dir / "work";

    const CascadeConfig cascade = build_cascade_config(cfg, work_dir);
    CascadeResult result = run_cascade(map, cascade);

    const auto regions = grow_regions(result.masks, result.grid);
    const auto detections =
        extract_detections(regions, map.geo, resolved_min_area(cfg), cfg.stitch.connectivity);

    RunArtifacts artifacts;
    artifacts.detections = detections;
    artifacts.stats = result.stats;
    artifacts.geojson_path = out_dir / "detections.geojson";
    artifacts.csv_path = out_dir / "detections.csv";
    artifacts.stats_path = out_dir / "stats.json";
    artifacts.manifest_path = out_dir / "run_manifest.json";

    write_detections_geojson(artifacts.geojson_path, detections, map.geo.has_value());
    write_detections_csv(artifacts.csv_path, detections);
    write_stats_json(artifacts.stats_path, result.stats, opts.include_timings);

    std::vector<std::filesystem::path> outputs = {artifacts.geojson_path, artifacts.csv_path,
                                                  artifacts.stats_path};
    if (opts.overlay) {
        artifacts.overlay_path = out_dir / "overlay.png";
        write_overlay_png(artifacts.overlay_path, map, detections);
        outputs.push_back(artifacts.overlay_path);
    }

    std::vector<ManifestInput> inputs = {{"map", map_path}};
    const auto wld = world_file_path(map_path);
    if (std::filesystem::exists(wld)) inputs.push_back({"world_file", wld});
    if (!cfg.truth_mask.empty() && std::filesystem::exists(cfg.truth_mask)) {
        inputs.push_back({"truth_mask", cfg.truth_mask});
    }
    // Output paths go in relative to the manifest's own directory, so two
    // identical runs into different directories produce identical bytes.
    std::vector<std::filesystem::path> relative_outputs;
    for (const auto& o : outputs) relative_outputs.push_back(o.filename());
    write_manifest(artifacts.manifest_path,
                   build_manifest(cfg, inputs, result.stats, relative_outputs));

    std::error_code ec;
    std::filesystem::remove_all(work_dir, ec); // batch scratch, empty unless external backends ran

    return artifacts;
}

} // namespace ctiler
