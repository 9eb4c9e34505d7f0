#include "core/pyramid.hpp"

#include "core/errors.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ctiler {

namespace {

int ceil_div(int a, int b) {
    return (a + b - 1) / b;
}

} // namespace

int grid_cols(int width, int tile_w) {
    return ceil_div(width, tile_w);
}

int grid_rows(int height, int tile_h) {
    return ceil_div(height, tile_h);
}

void validate_schedule(const LevelSchedule& schedule) {
    if (schedule.empty()) throw std::invalid_argument("schedule must have at least one level");
    for (size_t i = 0; i < schedule.size(); ++i) {
        if (schedule[i].w < 1 || schedule[i].h < 1) {
            throw std::invalid_argument("schedule tile dimensions must be >= 1");
        }
        if (i > 0 && (schedule[i].w > schedule[i - 1].w || schedule[i].h > schedule[i - 1].h)) {
            throw std::invalid_argument("schedule tile dimensions must not grow level to level");
        }
    }
}

std::vector<TileRef> tile_grid(int width, int height, int tile_w, int tile_h, int level) {
    if (width < 1 || height < 1 || tile_w < 1 || tile_h < 1) {
        throw std::invalid_argument("tile_grid arguments must be >= 1");
    }
    const int cols = ceil_div(width, tile_w);
    const int rows = ceil_div(height, tile_h);
    std::vector<TileRef> tiles;
    tiles.reserve(static_cast<size_t>(cols) * rows);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            tiles.push_back({level, r, c, {c * tile_w, r * tile_h, tile_w, tile_h}});
        }
    }
    return tiles;
}

std::vector<TileRef> subdivide(const TileRef& tile, Extent next) {
    if (next.w < 1 || next.h < 1) throw std::invalid_argument("child tile dimensions must be >= 1");
    if (next.w > tile.rect.w || next.h > tile.rect.h) {
        throw std::invalid_argument("child tile dimensions exceed parent rect");
    }
    const int cols = ceil_div(tile.rect.w, next.w);
    const int rows = ceil_div(tile.rect.h, next.h);
    std::vector<TileRef> children;
    children.reserve(static_cast<size_t>(cols) * rows);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            children.push_back({tile.level + 1,
                                tile.row * rows + r,
                                tile.col * cols + c,
                                {tile.rect.x0 + c * next.w, tile.rect.y0 + r * next.h,
                                 next.w, next.h}});
        }
    }
    return children;
}

Raster extract(const Raster& map, const TileRef& tile, uint8_t pad_value) {
    const PixelRect map_rect{0, 0, map.width, map.height};
    if (!tile.rect.intersects(map_rect)) {
        throw std::invalid_argument("tile (level " + std::to_string(tile.level) + ", row " +
                                    std::to_string(tile.row) + ", col " + std::to_string(tile.col) +
                                    ") lies entirely outside the map");
    }
    Raster out(tile.rect.w, tile.rect.h, pad_value);
    const int sx0 = std::max(tile.rect.x0, 0);
    const int sy0 = std::max(tile.rect.y0, 0);
    const int sx1 = std::min(tile.rect.x1(), map.width);
    const int sy1 = std::min(tile.rect.y1(), map.height);
    for (int y = sy0; y < sy1; ++y) {
        const uint8_t* src = map.pixels.data() + static_cast<size_t>(y) * map.width + sx0;
        uint8_t* dst = out.pixels.data() +
                       static_cast<size_t>(y - tile.rect.y0) * out.width + (sx0 - tile.rect.x0);
        std::copy(src, src + (sx1 - sx0), dst);
    }
    return out;
}

} // namespace ctiler
