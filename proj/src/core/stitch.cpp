#include "core/stitch.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

namespace ctiler {

namespace {

struct GridPos {
    int row;
    int col;
    friend auto operator<=>(const GridPos&, const GridPos&) = default;
};

PixelRect lattice_rect(const FinalGrid& grid, int row, int col) {
    return {col * grid.tile_w, row * grid.tile_h, grid.tile_w, grid.tile_h};
}

bool tile_exists(const FinalGrid& grid, int row, int col) {
    if (row < 0 || col < 0 || row >= grid.rows || col >= grid.cols) return false;
    return lattice_rect(grid, row, col).intersects({0, 0, grid.map_w, grid.map_h});
}

} // namespace

std::vector<Region> grow_regions(const TileMasks& masks, const FinalGrid& grid) {
    // Positive tiles, keyed by lattice position.
    std::map<GridPos, const TileRef*> positive;
    for (const auto& [ref, mask] : masks) {
        if (mask.any()) positive.emplace(GridPos{ref.row, ref.col}, &ref);
    }

    std::vector<Region> regions;
    std::set<GridPos> visited;

    for (const auto& [seed, seed_ref] : positive) {
        if (visited.contains(seed)) continue;

        // Breadth-first over positive tiles; positives within chebyshev
        // distance 2 share a halo tile, which merges their regions.
        std::vector<GridPos> cluster;
        std::deque<GridPos> frontier{seed};
        visited.insert(seed);
        while (!frontier.empty()) {
            const GridPos p = frontier.front();
            frontier.pop_front();
            cluster.push_back(p);
            for (int dr = -2; dr <= 2; ++dr) {
                for (int dc = -2; dc <= 2; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    const GridPos q{p.row + dr, p.col + dc};
                    if (visited.contains(q)) continue;
                    if (positive.contains(q)) {
                        visited.insert(q);
                        frontier.push_back(q);
                    }
                }
            }
        }

        // Region tiles: every cluster positive plus its existing 8 neighbours.
        const int level = seed_ref->level;
        std::map<GridPos, TileRef> tiles;
        for (const GridPos& p : cluster) {
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    const GridPos q{p.row + dr, p.col + dc};
                    if (!tile_exists(grid, q.row, q.col)) continue;
                    if (tiles.contains(q)) continue;
                    auto it = positive.find(q);
                    if (it != positive.end()) {
                        tiles.emplace(q, *it->second);
                    } else {
                        // Halo or rejected tile: reconstruct from the lattice.
                        tiles.emplace(
                            q, TileRef{level, q.row, q.col, lattice_rect(grid, q.row, q.col)});
                    }
                }
            }
        }

        Region region;
        int x0 = INT32_MAX, y0 = INT32_MAX, x1 = INT32_MIN, y1 = INT32_MIN;
        for (const auto& [pos, ref] : tiles) {
            region.tiles.push_back(ref);
            x0 = std::min(x0, ref.rect.x0);
            y0 = std::min(y0, ref.rect.y0);
            x1 = std::max(x1, ref.rect.x1());
            y1 = std::max(y1, ref.rect.y1());
        }
        region.offset_x = x0;
        region.offset_y = y0;
        region.mosaic = BinaryMask(x1 - x0, y1 - y0);
        for (const auto& [pos, ref] : tiles) {
            auto it = masks.find(ref);
            if (it == masks.end()) continue;
            const BinaryMask& m = it->second;
            for (int y = 0; y < m.height; ++y) {
                for (int x = 0; x < m.width; ++x) {
                    if (m.at(x, y)) {
                        region.mosaic.set(ref.rect.x0 - x0 + x, ref.rect.y0 - y0 + y, true);
                    }
                }
            }
        }
        regions.push_back(std::move(region));
    }
    return regions;
}

std::vector<std::vector<std::pair<int, int>>> connected_components(const BinaryMask& mask,
                                                                   int connectivity) {
    if (connectivity != 4 && connectivity != 8) {
        throw std::invalid_argument("connectivity must be 4 or 8");
    }
    const int w = mask.width;
    const int h = mask.height;
    std::vector<uint8_t> seen(static_cast<size_t>(w) * h, 0);
    std::vector<std::vector<std::pair<int, int>>> components;

    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t idx = static_cast<size_t>(y) * w + x;
            if (!mask.bits[idx] || seen[idx]) continue;
            std::vector<std::pair<int, int>> component;
            stack.clear();
            stack.emplace_back(x, y);
            seen[idx] = 1;
            while (!stack.empty()) {
                const auto [cx, cy] = stack.back();
                stack.pop_back();
                component.emplace_back(cx, cy);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        if (connectivity == 4 && dx != 0 && dy != 0) continue;
                        const int nx = cx + dx;
                        const int ny = cy + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                        const size_t nidx = static_cast<size_t>(ny) * w + nx;
                        if (!mask.bits[nidx] || seen[nidx]) continue;
                        seen[nidx] = 1;
                        stack.emplace_back(nx, ny);
                    }
                }
            }
            components.push_back(std::move(component));
        }
    }
    return components;
}

std::pair<double, double> centroid(const std::vector<std::pair<int, int>>& component) {
    if (component.empty()) throw std::invalid_argument("centroid of empty component");
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& [x, y] : component) {
        sx += x;
        sy += y;
    }
    const double n = static_cast<double>(component.size());
    return {sx / n, sy / n};
}

std::vector<Detection> extract_detections(const std::vector<Region>& regions,
                                          const std::optional<AffineGeo>& geo, long long min_area,
                                          int connectivity) {
    std::vector<Detection> out;
    for (size_t region_id = 0; region_id < regions.size(); ++region_id) {
        const Region& region = regions[region_id];
        if (region.mosaic.width == 0) continue;
        for (const auto& component : connected_components(region.mosaic, connectivity)) {
            if (static_cast<long long>(component.size()) < min_area) continue;
            auto [cx, cy] = centroid(component);
            Detection det;
            det.centroid_x = cx + region.offset_x;
            det.centroid_y = cy + region.offset_y;
            det.area_px = static_cast<long long>(component.size());
            det.region_id = static_cast<int>(region_id);
            if (geo) det.world = pixel_to_world(*geo, det.centroid_x, det.centroid_y);
            out.push_back(det);
        }
    }
    std::sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
        if (a.centroid_y != b.centroid_y) return a.centroid_y < b.centroid_y;
        if (a.centroid_x != b.centroid_x) return a.centroid_x < b.centroid_x;
        return a.region_id < b.region_id;
    });
    return out;
}

} // namespace ctiler
