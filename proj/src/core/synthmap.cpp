#include "core/synthmap.hpp"

#include "core/errors.hpp"
#include "core/rng.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

namespace ctiler {

namespace {

// Stream tags, one per object class.
constexpr uint64_t kTagBuildings = 0x6275696C64ULL;
constexpr uint64_t kTagFieldLines = 0x6669656C64ULL;
constexpr uint64_t kTagWetland = 0x7765746C61ULL;
constexpr uint64_t kTagSpecks = 0x737065636BULL;

constexpr uint8_t kInkBuilding = 30;
constexpr uint8_t kInkFieldLine = 90;
constexpr uint8_t kInkWetland = 60;
constexpr uint8_t kInkSpeck = 40;
constexpr uint8_t kPaper = 255;

// Cross-hatch line spacing. 3 keeps every gap pixel within chebyshev
// distance 1 of an inked pixel, which the heuristic segmenter's 3x3 closing
// relies on to reconstruct solid rects.
constexpr int kHatchSpacing = 3;

// Clearance kept between a building rect and anything else (other buildings,
// distractor ink) so truth components never merge.
constexpr int kClearance = 6;

bool inside_any(const std::vector<PixelRect>& rects, int x, int y, int margin) {
    for (const auto& r : rects) {
        if (x >= r.x0 - margin && x < r.x1() + margin && y >= r.y0 - margin &&
            y < r.y1() + margin) {
            return true;
        }
    }
    return false;
}

void draw_building(Raster& img, BinaryMask& truth, const PixelRect& r) {
    for (int y = r.y0; y < r.y1(); ++y) {
        for (int x = r.x0; x < r.x1(); ++x) {
            truth.set(x, y, true);
            const bool border = (y == r.y0 || y == r.y1() - 1 || x == r.x0 || x == r.x1() - 1);
            // Hatch phase uses map coordinates so the pattern is continuous
            // across tile cuts.
            const bool hatch = ((x - y) % kHatchSpacing + kHatchSpacing) % kHatchSpacing == 0 ||
                               (x + y) % kHatchSpacing == 0;
            if (border || hatch) img.set(x, y, kInkBuilding);
        }
    }
}

void draw_field_lines(Raster& img, const std::vector<PixelRect>& keep_out, SplitMix64& rng,
                      int count) {
    // Straight 1px boundary lines spanning the sheet. A lone line never fires
    // the cross-hatch predicate; crossings do, in small clusters, which is the
    // realistic amount of noise the min-area filter exists for.
    for (int i = 0; i < count; ++i) {
        const bool horizontal = rng.next_below(2) == 0;
        const int span = horizontal ? img.width : img.height;
        const int offset = static_cast<int>(
            rng.next_below(static_cast<uint64_t>(horizontal ? img.height : img.width)));
        for (int t = 0; t < span; ++t) {
            const int x = horizontal ? t : offset;
            const int y = horizontal ? offset : t;
            if (!inside_any(keep_out, x, y, kClearance)) img.set(x, y, kInkFieldLine);
        }
    }
}

void draw_wetland(Raster& img, const std::vector<PixelRect>& keep_out, SplitMix64& rng,
                  int count) {
    for (int i = 0; i < count; ++i) {
        const int w = static_cast<int>(rng.next_range(30, 80));
        const int h = static_cast<int>(rng.next_range(20, 60));
        if (img.width <= w + 2 || img.height <= h + 2) continue;
        const int x0 = static_cast<int>(rng.next_below(static_cast<uint64_t>(img.width - w)));
        const int y0 = static_cast<int>(rng.next_below(static_cast<uint64_t>(img.height - h)));
        // Closely spaced verticals read as hatch texture to the heuristics;
        // that is the point of this distractor.
        for (int x = x0; x < x0 + w; x += 2) {
            for (int y = y0; y < y0 + h; ++y) {
                if (!inside_any(keep_out, x, y, kClearance)) img.set(x, y, kInkWetland);
            }
        }
    }
}

void draw_specks(Raster& img, const std::vector<PixelRect>& keep_out, SplitMix64& rng,
                 int count) {
    for (int i = 0; i < count; ++i) {
        const int w = static_cast<int>(rng.next_range(1, 3));
        const int h = static_cast<int>(rng.next_range(1, 2));
        const int x0 = static_cast<int>(rng.next_below(static_cast<uint64_t>(img.width)));
        const int y0 = static_cast<int>(rng.next_below(static_cast<uint64_t>(img.height)));
        for (int y = y0; y < std::min(y0 + h, img.height); ++y) {
            for (int x = x0; x < std::min(x0 + w, img.width); ++x) {
                if (!inside_any(keep_out, x, y, kClearance)) img.set(x, y, kInkSpeck);
            }
        }
    }
}

} // namespace

bool GroundTruth::tile_label(const TileRef& tile) const {
    return truth_tile_label(*this, tile);
}

bool truth_tile_label(const GroundTruth& truth, const TileRef& tile) {
    if (!truth.buildings.empty()) {
        // Rect intersection is equivalent to scanning the mask: every building
        // rect pixel is positive and nothing else is.
        for (const auto& b : truth.buildings) {
            if (b.rect.intersects(tile.rect)) return true;
        }
        return false;
    }
    // Truth loaded from a bare mask (no building list): scan the pixels.
    const auto& mask = truth.truth_mask;
    const int x0 = std::max(tile.rect.x0, 0);
    const int y0 = std::max(tile.rect.y0, 0);
    const int x1 = std::min(tile.rect.x1(), mask.width);
    const int y1 = std::min(tile.rect.y1(), mask.height);
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            if (mask.at(x, y)) return true;
        }
    }
    return false;
}

std::pair<Raster, GroundTruth> generate(const SynthParams& params) {
    if (params.width < 1 || params.height < 1) {
        throw std::invalid_argument("synth map dimensions must be >= 1");
    }
    if (params.building_min_side < 1 || params.building_max_side < params.building_min_side) {
        throw std::invalid_argument("invalid building size range");
    }
    if (params.building_max_side > params.width || params.building_max_side > params.height) {
        throw std::invalid_argument("building size range exceeds map dimensions");
    }
    if (params.building_count_mean < 0 || params.field_line_density < 0 ||
        params.wetland_density < 0 || params.speck_density < 0) {
        throw std::invalid_argument("densities must be >= 0");
    }

    Raster img(params.width, params.height, kPaper);
    GroundTruth truth;
    truth.truth_mask = BinaryMask(params.width, params.height, false);

    SplitMix64 b_rng = split_stream(params.seed, kTagBuildings);
    const int requested =
        params.building_count_mean > 0 ? b_rng.next_poisson(params.building_count_mean) : 0;
    truth.requested_count = requested;

    std::vector<PixelRect> placed;
    for (int i = 0; i < requested; ++i) {
        bool ok = false;
        for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
            const int w = static_cast<int>(
                b_rng.next_range(params.building_min_side, params.building_max_side));
            const int h = static_cast<int>(
                b_rng.next_range(params.building_min_side, params.building_max_side));
            int x0, y0;
            if (i == 0 && params.ensure_straddle && params.width > params.straddle_tile) {
                // Centre the first building on a tile boundary so at least one
                // component is always split across final tiles.
                const int nb = (params.width - 1) / params.straddle_tile;
                const int boundary =
                    params.straddle_tile * static_cast<int>(b_rng.next_range(1, nb));
                x0 = std::clamp(boundary - w / 2, 0, params.width - w);
                y0 = static_cast<int>(b_rng.next_below(static_cast<uint64_t>(params.height - h + 1)));
            } else {
                x0 = static_cast<int>(b_rng.next_below(static_cast<uint64_t>(params.width - w + 1)));
                y0 = static_cast<int>(b_rng.next_below(static_cast<uint64_t>(params.height - h + 1)));
            }
            const PixelRect cand{x0, y0, w, h};
            const PixelRect inflated{x0 - kClearance, y0 - kClearance, w + 2 * kClearance,
                                     h + 2 * kClearance};
            bool collides = false;
            for (const auto& other : placed) {
                if (inflated.intersects(other)) {
                    collides = true;
                    break;
                }
            }
            if (!collides) {
                placed.push_back(cand);
                ok = true;
            }
        }
        // When a building cannot be placed it is simply dropped;
        // requested_count still records what was asked for.
    }

    for (const auto& r : placed) {
        draw_building(img, truth.truth_mask, r);
        truth.buildings.push_back(
            {r, r.x0 + (r.w - 1) / 2.0, r.y0 + (r.h - 1) / 2.0});
    }

    const double megapixels = static_cast<double>(params.width) * params.height / 1e6;
    {
        SplitMix64 rng = split_stream(params.seed, kTagFieldLines);
        draw_field_lines(img, placed, rng,
                         static_cast<int>(params.field_line_density * megapixels));
    }
    {
        SplitMix64 rng = split_stream(params.seed, kTagWetland);
        draw_wetland(img, placed, rng, static_cast<int>(params.wetland_density * megapixels));
    }
    {
        SplitMix64 rng = split_stream(params.seed, kTagSpecks);
        draw_specks(img, placed, rng, static_cast<int>(params.speck_density * megapixels));
    }

    return {std::move(img), std::move(truth)};
}

namespace {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace

SynthOutputs write_synth_outputs(const std::filesystem::path& dir, const std::string& stem,
                                 const Raster& map, const GroundTruth& truth,
                                 const AffineGeo& geo) {
    std::filesystem::create_directories(dir);
    SynthOutputs out;
    out.map_png = dir / (stem + ".png");
    out.truth_png = dir / (stem + "_truth.png");
    out.truth_csv = dir / (stem + "_truth.csv");
    out.world_file = dir / (stem + ".wld");

    save_png(out.map_png, map);
    save_mask_png(out.truth_png, truth.truth_mask);
    write_world_file(out.world_file, geo);

    std::ofstream csv(out.truth_csv, std::ios::trunc);
    if (!csv) throw IoError("cannot write truth csv: " + out.truth_csv.string());
    csv << "x0,y0,w,h,cx,cy\n";
    for (const auto& b : truth.buildings) {
        csv << b.rect.x0 << ',' << b.rect.y0 << ',' << b.rect.w << ',' << b.rect.h << ','
            << format_double(b.centroid_x) << ',' << format_double(b.centroid_y) << '\n';
    }
    if (!csv) throw IoError("error writing truth csv: " + out.truth_csv.string());
    return out;
}

std::vector<Building> read_truth_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open truth csv: " + path.string());
    std::vector<Building> out;
    std::string line;
    if (!std::getline(in, line)) return out; // empty file == no buildings
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        double v[6];
        for (int i = 0; i < 6; ++i) {
            if (!std::getline(ss, field, ',')) {
                throw IoError("malformed truth csv line: " + line);
            }
            try {
                v[i] = std::stod(field);
            } catch (const std::exception&) {
                throw IoError("malformed truth csv value '" + field + "' in: " + path.string());
            }
        }
        Building b;
        b.rect = {static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2]),
                  static_cast<int>(v[3])};
        b.centroid_x = v[4];
        b.centroid_y = v[5];
        out.push_back(b);
    }
    return out;
}

} // namespace ctiler
