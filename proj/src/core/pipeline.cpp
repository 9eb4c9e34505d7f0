#include "core/pipeline.hpp"

#include "core/errors.hpp"
#include "core/eval.hpp"
#include "core/parallel.hpp"

#include <chrono>
#include <stdexcept>

namespace ctiler {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<Raster> extract_all(const Raster& map, const std::vector<TileRef>& tiles,
                                uint8_t pad_value, int workers) {
    std::vector<Raster> out(tiles.size());
    parallel_for(tiles.size(), workers, [&](size_t i) {
        out[i] = extract(map, tiles[i], pad_value);
    });
    return out;
}

std::vector<Verdict> classify_level(const Classifier& classifier,
                                    const std::vector<Raster>& rasters,
                                    const std::vector<TileRef>& tiles, int workers) {
    if (classifier.prefers_batch()) {
        return classifier.classify_batch(rasters, tiles);
    }
    std::vector<Verdict> verdicts(tiles.size());
    parallel_for(tiles.size(), workers, [&](size_t i) {
        try {
            verdicts[i] = classifier.classify(rasters[i], tiles[i]);
        } catch (const std::exception& e) {
            throw BackendError("classifying tile " + tile_id(tiles[i]) + ": " + e.what());
        }
    });
    return verdicts;
}

std::vector<BinaryMask> segment_level(const Segmenter& segmenter,
                                      const std::vector<Raster>& rasters,
                                      const std::vector<TileRef>& tiles, int workers) {
    if (segmenter.prefers_batch()) {
        return segmenter.segment_batch(rasters, tiles);
    }
    std::vector<BinaryMask> masks(tiles.size());
    parallel_for(tiles.size(), workers, [&](size_t i) {
        try {
            masks[i] = segmenter.segment(rasters[i], tiles[i]);
        } catch (const std::exception& e) {
            throw BackendError("segmenting tile " + tile_id(tiles[i]) + ": " + e.what());
        }
    });
    return masks;
}

} // namespace

void validate_config(const CascadeConfig& cfg) {
    validate_schedule(cfg.schedule);
    if (!cfg.segmenter) throw std::invalid_argument("cascade needs exactly one segmenter");
    if (!cfg.classifiers.empty() && cfg.classifiers.size() != cfg.schedule.size()) {
        throw std::invalid_argument("cascade needs one classifier per schedule level (or none)");
    }
    for (const auto& c : cfg.classifiers) {
        if (!c) throw std::invalid_argument("null classifier in cascade config");
    }
}

CascadeResult run_cascade(const Raster& map, const CascadeConfig& cfg) {
    validate_config(cfg);
    if (map.width < 1 || map.height < 1) throw std::invalid_argument("empty map");

    const int workers = resolve_workers(cfg.workers);
    const int depth = cfg.depth();
    const Extent first = cfg.schedule.front();
    const Extent final_dims = cfg.schedule.back();
    const PixelRect map_rect{0, 0, map.width, map.height};

    CascadeResult result;
    result.grid = {grid_rows(map.height, final_dims.h), grid_cols(map.width, final_dims.w),
                   final_dims.w, final_dims.h, map.width, map.height};

    std::vector<TileRef> tiles;
    if (depth == 0) {
        tiles = tile_grid(map.width, map.height, final_dims.w, final_dims.h);
    } else {
        tiles = tile_grid(map.width, map.height, first.w, first.h);
        int grid_r = grid_rows(map.height, first.h);
        int grid_c = grid_cols(map.width, first.w);

        for (int lvl = 0; lvl < depth; ++lvl) {
            const auto start = Clock::now();
            LevelStats stats;
            stats.level = lvl + 1;
            stats.tile = cfg.schedule[static_cast<size_t>(lvl)];
            stats.tiles_in = static_cast<long long>(tiles.size());
            stats.pixels = stats.tiles_in * static_cast<long long>(stats.tile.w) * stats.tile.h;

            const auto rasters = extract_all(map, tiles, cfg.pad_value, workers);
            const auto verdicts =
                classify_level(*cfg.classifiers[static_cast<size_t>(lvl)], rasters, tiles, workers);

            std::vector<TileRef> survivors;
            for (size_t i = 0; i < tiles.size(); ++i) {
                if (verdicts[i].label == Label::buildings) survivors.push_back(tiles[i]);
            }
            stats.tiles_passed = static_cast<long long>(survivors.size());
            stats.pass_fraction =
                stats.tiles_in > 0
                    ? static_cast<double>(stats.tiles_passed) / static_cast<double>(stats.tiles_in)
                    : 0.0;
            stats.wall_ms = ms_since(start);
            result.stats.levels.push_back(stats);

            if (lvl + 1 < depth) {
                const Extent next = cfg.schedule[static_cast<size_t>(lvl) + 1];
                std::vector<TileRef> children;
                for (const auto& parent : survivors) {
                    for (auto& child : subdivide(parent, next)) {
                        // Children in the padded fringe of an edge parent can
                        // fall entirely outside the map; they hold no pixels
                        // and are dropped.
                        if (child.rect.intersects(map_rect)) children.push_back(child);
                    }
                }
                tiles = std::move(children);
                grid_r = grid_r * ((cfg.schedule[static_cast<size_t>(lvl)].h + next.h - 1) / next.h);
                grid_c = grid_c * ((cfg.schedule[static_cast<size_t>(lvl)].w + next.w - 1) / next.w);
            } else {
                tiles = std::move(survivors);
            }
        }
        result.grid.rows = grid_r;
        result.grid.cols = grid_c;
    }

    const auto seg_start = Clock::now();
    const auto rasters = extract_all(map, tiles, cfg.pad_value, workers);
    auto masks = segment_level(*cfg.segmenter, rasters, tiles, workers);
    for (size_t i = 0; i < tiles.size(); ++i) {
        if (masks[i].width != tiles[i].rect.w || masks[i].height != tiles[i].rect.h) {
            throw BackendError("segmenter returned a " + std::to_string(masks[i].width) + "x" +
                               std::to_string(masks[i].height) + " mask for tile " +
                               tile_id(tiles[i]));
        }
        result.masks.emplace(tiles[i], std::move(masks[i]));
    }
    result.stats.segmenter_calls = static_cast<long long>(tiles.size());
    result.stats.segment_pixels = static_cast<long long>(tiles.size()) *
                                  static_cast<long long>(final_dims.w) * final_dims.h;
    result.stats.segment_wall_ms = ms_since(seg_start);
    return result;
}

CascadeResult segment_everything(const Raster& map, Extent tile_dims,
                                 const std::shared_ptr<Segmenter>& segmenter, uint8_t pad_value,
                                 int workers) {
    CascadeConfig cfg;
    cfg.schedule = {tile_dims};
    cfg.segmenter = segmenter;
    cfg.pad_value = pad_value;
    cfg.workers = workers;
    return run_cascade(map, cfg);
}

std::vector<TradeoffRow> tradeoff_sweep(const Raster& map,
                                        const std::shared_ptr<const GroundTruth>& truth,
                                        const std::vector<LevelSchedule>& schedules,
                                        const ErrorModel& em, const TradeoffOptions& opts) {
    if (!truth) throw std::invalid_argument("tradeoff sweep needs ground truth");

    std::vector<Point> truth_centroids;
    for (const auto& b : truth->buildings) {
        truth_centroids.emplace_back(b.centroid_x, b.centroid_y);
    }

    auto score = [&](const CascadeResult& res, TradeoffRow& row) {
        const auto regions = grow_regions(res.masks, res.grid);
        const auto detections = extract_detections(regions, map.geo, 0, 8);
        const auto m = match(detections, truth_centroids, opts.match_radius);
        row.tp = m.tp;
        row.fp = m.fp;
        row.fn = m.fn;
        row.f1 = f1_score(m.tp, m.fp, m.fn);
    };

    std::vector<TradeoffRow> rows;
    if (opts.include_baseline) {
        TradeoffRow row;
        row.depth = 0;
        row.predicted_time = normalized_time(0, opts.cost.pass_fraction, opts.cost.cost_ratio);
        const auto start = std::chrono::steady_clock::now();
        const auto res = segment_everything(map, opts.baseline_dims,
                                            std::make_shared<OracleSegmenter>(truth),
                                            opts.pad_value, opts.workers);
        row.measured_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        score(res, row);
        rows.push_back(row);
    }

    for (const auto& schedule : schedules) {
        CascadeConfig cfg;
        cfg.schedule = schedule;
        cfg.pad_value = opts.pad_value;
        cfg.workers = opts.workers;
        for (size_t i = 0; i < schedule.size(); ++i) {
            cfg.classifiers.push_back(std::make_shared<OracleClassifier>(truth, em));
        }
        cfg.segmenter = std::make_shared<OracleSegmenter>(truth);

        TradeoffRow row;
        row.depth = static_cast<int>(schedule.size());
        row.predicted_time =
            normalized_time(row.depth, opts.cost.pass_fraction, opts.cost.cost_ratio);
        const auto start = std::chrono::steady_clock::now();
        const auto res = run_cascade(map, cfg);
        row.measured_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        score(res, row);
        rows.push_back(row);
    }
    return rows;
}

} // namespace ctiler
