#pragma once

#include "core/pyramid.hpp"
#include "core/raster.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace ctiler {

/// One synthetic building: an axis-aligned rect of cross-hatched ink. Every
/// pixel of the rect is positive in the truth mask; the centroid is the
/// centre of mass of those pixels (== rect centre).
struct Building {
    PixelRect rect;
    double centroid_x = 0.0;
    double centroid_y = 0.0;
};

struct GroundTruth {
    std::vector<Building> buildings;
    BinaryMask truth_mask;
    int requested_count = 0; // placement can fall short; buildings.size() is what landed

    bool tile_label(const TileRef& tile) const;
};

/// Knobs for the generator. Defaults are calibrated so that, averaged over
/// many seeds, roughly 40% of 1792x768 tiles of a 7168x2304 map contain at
/// least one building pixel.
struct SynthParams {
    int width = 7168;
    int height = 2304;
    double building_count_mean = 6.0; // Poisson mean per map
    int building_min_side = 12;
    int building_max_side = 60;
    double field_line_density = 1.2;  // lines per megapixel
    double wetland_density = 0.08;    // hatched patches per megapixel
    double speck_density = 3.0;       // text-like specks per megapixel
    bool ensure_straddle = true;      // force one building across a 256px tile boundary
    int straddle_tile = 256;
    uint64_t seed = 0;
};

/// Deterministic for a fixed seed, bit for bit. Buildings are solid-bordered
/// rectangles filled with diagonal cross-hatching; distractors are field
/// boundary lines, wetland hatching (closely spaced vertical strokes) and
/// small text-like specks. Distractors never touch building rects and never
/// appear in the truth mask.
std::pair<Raster, GroundTruth> generate(const SynthParams& params);

/// True iff the truth mask has at least one positive pixel inside the tile rect.
bool truth_tile_label(const GroundTruth& truth, const TileRef& tile);

/// Corpus artefacts: map PNG, truth-mask PNG, per-building CSV and the affine
/// sidecar. Returns the map path.
struct SynthOutputs {
    std::filesystem::path map_png;
    std::filesystem::path truth_png;
    std::filesystem::path truth_csv;
    std::filesystem::path world_file;
};
SynthOutputs write_synth_outputs(const std::filesystem::path& dir, const std::string& stem,
                                 const Raster& map, const GroundTruth& truth,
                                 const AffineGeo& geo);

std::vector<Building> read_truth_csv(const std::filesystem::path& path);

} // namespace ctiler
