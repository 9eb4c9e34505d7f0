#pragma once

#include "core/geo.hpp"
#include "core/pyramid.hpp"
#include "core/raster.hpp"

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace ctiler {

/// Geometry of the final tile level: lattice dimensions plus the map extent,
/// needed to decide which neighbour tiles exist.
struct FinalGrid {
    int rows = 0;
    int cols = 0;
    int tile_w = 0;
    int tile_h = 0;
    int map_w = 0;
    int map_h = 0;
};

using TileMasks = std::map<TileRef, BinaryMask>;

/// A cluster of mask-positive tiles plus its ring of featureless halo tiles,
/// mosaicked into one mask so components split across tiles are read whole.
struct Region {
    std::vector<TileRef> tiles; // positives + halo, sorted by (row, col)
    BinaryMask mosaic;          // over the bounding rect of `tiles`
    int offset_x = 0;           // map coordinates of mosaic pixel (0, 0)
    int offset_y = 0;
};

/// One reported building.
struct Detection {
    double centroid_x = 0.0; // map pixel coordinates
    double centroid_y = 0.0;
    std::optional<std::pair<double, double>> world;
    long long area_px = 0;
    int region_id = 0;
};

/// Grow regions from every mask-positive tile: the tile's 8 neighbours are
/// pulled in, positives among them keep growing, and the empty frontier is
/// retained as the halo. Regions sharing any tile are merged, so the result
/// is tile-disjoint. Tiles absent from `masks` (never segmented) act as empty.
std::vector<Region> grow_regions(const TileMasks& masks, const FinalGrid& grid);

/// Maximal connected pixel sets under 4- or 8-adjacency, in deterministic
/// scan order. Coordinates are mask-local.
std::vector<std::vector<std::pair<int, int>>> connected_components(const BinaryMask& mask,
                                                                   int connectivity);

/// Unweighted centre of mass; every pixel counts 1. Component must be non-empty.
std::pair<double, double> centroid(const std::vector<std::pair<int, int>>& component);

/// Components of every region mosaic, filtered by min_area, offset into map
/// pixel coordinates, world coordinates attached when geo is present.
/// Sorted by (y, x).
std::vector<Detection> extract_detections(const std::vector<Region>& regions,
                                          const std::optional<AffineGeo>& geo,
                                          long long min_area = 0, int connectivity = 8);

} // namespace ctiler
