#include "core/geo.hpp"

#include "core/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

namespace ctiler {

std::pair<double, double> pixel_to_world(const AffineGeo& geo, double x, double y) {
    return {geo.origin_x + x * geo.px_size_x, geo.origin_y + y * geo.px_size_y};
}

std::pair<double, double> world_to_pixel(const AffineGeo& geo, double wx, double wy) {
    return {(wx - geo.origin_x) / geo.px_size_x, (wy - geo.origin_y) / geo.px_size_y};
}

AffineGeo read_world_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open world file: " + path.string());
    double v[4];
    for (int i = 0; i < 4; ++i) {
        std::string line;
        if (!std::getline(in, line)) {
            throw IoError("world file truncated (expected 4 lines): " + path.string());
        }
        try {
            v[i] = std::stod(line);
        } catch (const std::exception&) {
            throw IoError("world file line " + std::to_string(i + 1) +
                          " is not a number: " + path.string());
        }
    }
    AffineGeo geo{v[2], v[3], v[0], v[1]};
    if (geo.px_size_x == 0.0 || geo.px_size_y == 0.0) {
        throw IoError("world file has zero pixel size: " + path.string());
    }
    return geo;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace

void write_world_file(const std::filesystem::path& path, const AffineGeo& geo) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write world file: " + path.string());
    out << format_double(geo.px_size_x) << '\n'
        << format_double(geo.px_size_y) << '\n'
        << format_double(geo.origin_x) << '\n'
        << format_double(geo.origin_y) << '\n';
    if (!out) throw IoError("error writing world file: " + path.string());
}

std::filesystem::path world_file_path(const std::filesystem::path& raster_path) {
    std::filesystem::path p = raster_path;
    p.replace_extension(".wld");
    return p;
}

} // namespace ctiler
