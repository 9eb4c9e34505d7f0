#pragma once

#include <filesystem>
#include <utility>

namespace ctiler {

/// Affine georeferencing for a north-up raster: world position of pixel (x, y)
/// is origin + (x * px_size_x, y * px_size_y). px_size_y is negative for
/// north-up imagery. One affine per map; no projections.
struct AffineGeo {
    double origin_x = 0.0;
    double origin_y = 0.0;
    double px_size_x = 1.0;
    double px_size_y = -1.0;
};

std::pair<double, double> pixel_to_world(const AffineGeo& geo, double x, double y);
std::pair<double, double> world_to_pixel(const AffineGeo& geo, double wx, double wy);

// Plain-text sidecar, four lines: px_size_x, px_size_y, origin_x, origin_y.
AffineGeo read_world_file(const std::filesystem::path& path);
void write_world_file(const std::filesystem::path& path, const AffineGeo& geo);

/// Sidecar path for a raster: same stem, ".wld" extension.
std::filesystem::path world_file_path(const std::filesystem::path& raster_path);

} // namespace ctiler
