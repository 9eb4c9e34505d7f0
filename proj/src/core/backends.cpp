#include "core/backends.hpp"

#include "core/errors.hpp"
#include "core/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace ctiler {

void validate_error_model(const ErrorModel& em) {
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(em.fp_rate) || !in_unit(em.fn_base) || !in_unit(em.edge_penalty) ||
        !in_unit(em.frac_floor)) {
        throw std::invalid_argument("error model probabilities must lie in [0, 1]");
    }
}

std::vector<Verdict> Classifier::classify_batch(const std::vector<Raster>& tiles,
                                                const std::vector<TileRef>& refs) const {
    std::vector<Verdict> out(tiles.size());
    for (size_t i = 0; i < tiles.size(); ++i) out[i] = classify(tiles[i], refs[i]);
    return out;
}

std::vector<BinaryMask> Segmenter::segment_batch(const std::vector<Raster>& tiles,
                                                 const std::vector<TileRef>& refs) const {
    std::vector<BinaryMask> out(tiles.size());
    for (size_t i = 0; i < tiles.size(); ++i) out[i] = segment(tiles[i], refs[i]);
    return out;
}

void Classifier::check_dims(const Raster& tile, const TileRef& ref) const {
    auto dims = expected_dims();
    if (dims && (tile.width != dims->w || tile.height != dims->h)) {
        throw BackendError("classifier expects " + std::to_string(dims->w) + "x" +
                           std::to_string(dims->h) + " tiles, got " + std::to_string(tile.width) +
                           "x" + std::to_string(tile.height) + " for tile " + tile_id(ref));
    }
}

void Segmenter::check_dims(const Raster& tile, const TileRef& ref) const {
    auto dims = expected_dims();
    if (dims && (tile.width != dims->w || tile.height != dims->h)) {
        throw BackendError("segmenter expects " + std::to_string(dims->w) + "x" +
                           std::to_string(dims->h) + " tiles, got " + std::to_string(tile.width) +
                           "x" + std::to_string(tile.height) + " for tile " + tile_id(ref));
    }
}

namespace {

constexpr uint8_t kDark = 128; // strictly below is ink

inline bool dark(const Raster& t, int x, int y) {
    return t.at(x, y) < kDark;
}

// Out-of-bounds neighbours count as paper.
inline bool dark_safe(const Raster& t, int x, int y) {
    return x >= 0 && y >= 0 && x < t.width && y < t.height && dark(t, x, y);
}

inline bool crosshatch_pixel(const Raster& t, int x, int y) {
    if (!dark(t, x, y)) return false;
    const bool horiz = dark_safe(t, x - 1, y) || dark_safe(t, x - 2, y) ||
                       dark_safe(t, x + 1, y) || dark_safe(t, x + 2, y);
    if (!horiz) return false;
    return dark_safe(t, x, y - 1) || dark_safe(t, x, y - 2) || dark_safe(t, x, y + 1) ||
           dark_safe(t, x, y + 2);
}

} // namespace

double hatch_response(const Raster& tile) {
    if (tile.width <= 4 || tile.height <= 4) return 0.0;
    long long hits = 0;
    for (int y = 2; y < tile.height - 2; ++y) {
        for (int x = 2; x < tile.width - 2; ++x) {
            if (crosshatch_pixel(tile, x, y)) ++hits;
        }
    }
    const long long interior =
        static_cast<long long>(tile.width - 4) * (tile.height - 4);
    return static_cast<double>(hits) / static_cast<double>(interior);
}

BinaryMask hatch_segment(const Raster& tile) {
    const int w = tile.width;
    const int h = tile.height;
    BinaryMask marked(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            marked.set(x, y, crosshatch_pixel(tile, x, y));
        }
    }

    // Closing: dilate then erode, both with a full 3x3 kernel. Erosion treats
    // out-of-bounds as set so building halves cut at tile seams keep their
    // boundary pixels and reassemble cleanly in the mosaic.
    BinaryMask dilated(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool v = false;
            for (int dy = -1; dy <= 1 && !v; ++dy) {
                for (int dx = -1; dx <= 1 && !v; ++dx) {
                    const int nx = x + dx;
                    const int ny = y + dy;
                    if (nx >= 0 && ny >= 0 && nx < w && ny < h && marked.at(nx, ny)) v = true;
                }
            }
            dilated.set(x, y, v);
        }
    }
    BinaryMask closed(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool v = true;
            for (int dy = -1; dy <= 1 && v; ++dy) {
                for (int dx = -1; dx <= 1 && v; ++dx) {
                    const int nx = x + dx;
                    const int ny = y + dy;
                    if (nx >= 0 && ny >= 0 && nx < w && ny < h && !dilated.at(nx, ny)) v = false;
                }
            }
            closed.set(x, y, v);
        }
    }
    return closed;
}

HeuristicClassifier::HeuristicClassifier(double tau, double rho, std::optional<Extent> dims)
    : tau_(tau), rho_(rho), dims_(dims) {
    if (rho <= 0.0) throw std::invalid_argument("rho must be positive");
}

Verdict HeuristicClassifier::classify(const Raster& tile, const TileRef& ref) const {
    check_dims(tile, ref);
    const double response = hatch_response(tile);
    const double confidence = std::min(1.0, response / (2.0 * rho_));
    return make_verdict(confidence, tau_);
}

BinaryMask HeuristicSegmenter::segment(const Raster& tile, const TileRef& ref) const {
    check_dims(tile, ref);
    return hatch_segment(tile);
}

OracleClassifier::OracleClassifier(std::shared_ptr<const GroundTruth> truth, ErrorModel em)
    : truth_(std::move(truth)), em_(em) {
    if (!truth_) throw std::invalid_argument("oracle classifier needs ground truth");
    validate_error_model(em_);
}

Verdict OracleClassifier::classify(const Raster& /*tile*/, const TileRef& ref) const {
    const bool positive = truth_tile_label(*truth_, ref);
    double pass_prob;
    if (positive) {
        double miss = em_.fn_base;
        if (em_.edge_penalty > 0.0) {
            long long building_px = 0;
            const auto& mask = truth_->truth_mask;
            const int x0 = std::max(ref.rect.x0, 0);
            const int y0 = std::max(ref.rect.y0, 0);
            const int x1 = std::min(ref.rect.x1(), mask.width);
            const int y1 = std::min(ref.rect.y1(), mask.height);
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) {
                    if (mask.at(x, y)) ++building_px;
                }
            }
            const double fraction =
                static_cast<double>(building_px) / static_cast<double>(ref.rect.area());
            if (fraction < em_.frac_floor) miss += em_.edge_penalty;
        }
        pass_prob = std::clamp(1.0 - miss, 0.0, 1.0);
    } else {
        pass_prob = em_.fp_rate;
    }
    const double u = stable_tile_uniform(em_.seed, ref.level, ref.row, ref.col);
    const bool pass = u < pass_prob;
    return {pass ? Label::buildings : Label::no_buildings, pass ? 1.0 : 0.0};
}

OracleSegmenter::OracleSegmenter(std::shared_ptr<const GroundTruth> truth)
    : truth_(std::move(truth)) {
    if (!truth_) throw std::invalid_argument("oracle segmenter needs ground truth");
}

BinaryMask OracleSegmenter::segment(const Raster& tile, const TileRef& ref) const {
    BinaryMask out(tile.width, tile.height);
    const auto& mask = truth_->truth_mask;
    const int x0 = std::max(ref.rect.x0, 0);
    const int y0 = std::max(ref.rect.y0, 0);
    const int x1 = std::min(ref.rect.x1(), mask.width);
    const int y1 = std::min(ref.rect.y1(), mask.height);
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            if (mask.at(x, y)) out.set(x - ref.rect.x0, y - ref.rect.y0, true);
        }
    }
    return out;
}

} // namespace ctiler
