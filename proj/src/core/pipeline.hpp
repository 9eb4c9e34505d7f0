#pragma once

#include "core/backends.hpp"
#include "core/costmodel.hpp"
#include "core/pyramid.hpp"
#include "core/raster.hpp"
#include "core/stitch.hpp"
#include "core/synthmap.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace ctiler {

/// Full cascade configuration. `schedule` lists the classified tile sizes,
/// largest first; its final entry is also the tile size handed to the
/// segmenter. With no classifiers the single schedule entry is just the
/// segmentation tile size (the segment-everything case).
struct CascadeConfig {
    LevelSchedule schedule;
    std::vector<std::shared_ptr<Classifier>> classifiers; // one per schedule entry; may be empty
    std::shared_ptr<Segmenter> segmenter;
    uint8_t pad_value = 255;
    int workers = 0; // 0 = auto; CASCADE_TILER_THREADS overrides either way

    int depth() const { return static_cast<int>(classifiers.size()); }
};

void validate_config(const CascadeConfig& cfg);

struct LevelStats {
    int level = 0;
    Extent tile;
    long long tiles_in = 0;
    long long tiles_passed = 0;
    double pass_fraction = 0.0; // 0 when tiles_in == 0
    double wall_ms = 0.0;
    long long pixels = 0; // classified pixels, tiles_in * tile area
};

struct RunStats {
    std::vector<LevelStats> levels;
    long long segmenter_calls = 0;
    long long segment_pixels = 0;
    double segment_wall_ms = 0.0;
};

struct CascadeResult {
    TileMasks masks; // final-level survivors only
    RunStats stats;
    FinalGrid grid;
};

/// The pipeline: tile, classify, filter, repeat; segment the survivors.
/// A tile rejected at level i is never touched at deeper levels. Masks are
/// merged in tile-index order, so results do not depend on worker count.
CascadeResult run_cascade(const Raster& map, const CascadeConfig& cfg);

/// Baseline with no filtering: every tile of the grid is segmented.
CascadeResult segment_everything(const Raster& map, Extent tile_dims,
                                 const std::shared_ptr<Segmenter>& segmenter,
                                 uint8_t pad_value = 255, int workers = 0);

struct TradeoffRow {
    int depth = 0; // number of classifier levels
    double predicted_time = 0.0;
    double measured_seconds = 0.0;
    double f1 = 0.0;
    int tp = 0;
    int fp = 0;
    int fn = 0;
};

struct TradeoffOptions {
    CostParams cost;           // parameters for the predicted-time column
    double match_radius = 48;  // generous: partially segmented buildings still match
    Extent baseline_dims{256, 256};
    bool include_baseline = true; // emit the depth-0 segment-everything row
    uint8_t pad_value = 255;
    int workers = 0;
};

/// One row per schedule: run the cascade with error-injected oracle
/// classifiers and an exact oracle segmenter, score detections against the
/// ground truth. Error draws hash (seed, level, row, col), so deepening the
/// cascade only ever removes surviving tiles; F1 is non-increasing row to row
/// when schedules share a prefix.
std::vector<TradeoffRow> tradeoff_sweep(const Raster& map,
                                        const std::shared_ptr<const GroundTruth>& truth,
                                        const std::vector<LevelSchedule>& schedules,
                                        const ErrorModel& em, const TradeoffOptions& opts = {});

} // namespace ctiler
