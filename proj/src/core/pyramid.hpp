#pragma once

#include "core/raster.hpp"

#include <compare>
#include <cstdint>
#include <vector>

namespace ctiler {

/// Tile dimensions in pixels.
struct Extent {
    int w = 0;
    int h = 0;
    friend bool operator==(const Extent&, const Extent&) = default;
};

/// Pixel rectangle in map coordinates.
struct PixelRect {
    int x0 = 0;
    int y0 = 0;
    int w = 0;
    int h = 0;

    int x1() const { return x0 + w; } // exclusive
    int y1() const { return y0 + h; } // exclusive
    long long area() const { return static_cast<long long>(w) * h; }
    bool intersects(const PixelRect& o) const {
        return x0 < o.x1() && o.x0 < x1() && y0 < o.y1() && o.y0 < y1();
    }
    friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

/// A tile in the cascade: (level, row, col) addresses it uniquely, rect is its
/// pixel footprint on the map (edge tiles may extend past the map into padding).
struct TileRef {
    int level = 1;
    int row = 0;
    int col = 0;
    PixelRect rect;

    friend bool operator==(const TileRef& a, const TileRef& b) {
        return a.level == b.level && a.row == b.row && a.col == b.col;
    }
    friend std::strong_ordering operator<=>(const TileRef& a, const TileRef& b) {
        if (auto c = a.level <=> b.level; c != 0) return c;
        if (auto c = a.row <=> b.row; c != 0) return c;
        return a.col <=> b.col;
    }
};

/// Per-level tile sizes, largest first; the final entry is also the tile size
/// the segmenter sees. Dimensions never grow from one level to the next.
using LevelSchedule = std::vector<Extent>;

void validate_schedule(const LevelSchedule& schedule);

/// Partition a width x height pixel area into a grid of tile_w x tile_h tiles,
/// row-major. Edge tiles keep full size; the grid covers the ceil-padded
/// extent, so count == ceil(width/tile_w) * ceil(height/tile_h).
std::vector<TileRef> tile_grid(int width, int height, int tile_w, int tile_h, int level = 1);

/// Children covering the parent rect (ceil-padded inside the parent), at
/// level+1. Child (row, col) addresses are global: every parent at a level has
/// the same rect size, so children index into a virtual grid of
/// parent_index * children_per_parent + local_index.
std::vector<TileRef> subdivide(const TileRef& tile, Extent next);

/// Crop the tile out of the map; pixels outside the map are filled with
/// pad_value. The tile must overlap the map somewhere.
Raster extract(const Raster& map, const TileRef& tile, uint8_t pad_value = 255);

int grid_cols(int width, int tile_w);
int grid_rows(int height, int tile_h);

} // namespace ctiler
