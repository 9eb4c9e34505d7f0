// Test stand-in for an external model process. Speaks the batch protocol:
// reads `tile_id<TAB>png_path` lines from the manifest and writes the
// response for the selected mode.
//
//   stub_backend allpos <manifest> <response>        label 1, confidence 0.99
//   stub_backend allneg <manifest> <response>        label 0, confidence 0.01
//   stub_backend conf:<v> <manifest> <response>      label from v >= 0.5
//   stub_backend dark <manifest> <response>          classify by mean intensity < 192
//   stub_backend segment-dark <manifest> <response>  masks: pixel < 128
//   stub_backend segment-empty <manifest> <response> all-empty masks
//   stub_backend drop-first <manifest> <response>    omits the first tile (protocol error)
//   stub_backend garbage <manifest> <response>       writes a malformed line
//   stub_backend fail <manifest> <response>          exits nonzero

#include "core/raster.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace ctiler;

int main(int argc, char** argv) {
    if (argc != 4) {
        std::cerr << "usage: stub_backend <mode> <manifest> <response>\n";
        return 64;
    }
    const std::string mode = argv[1];
    const std::filesystem::path manifest_path = argv[2];
    const std::filesystem::path response_path = argv[3];

    if (mode == "fail") return 3;

    std::ifstream manifest(manifest_path);
    if (!manifest) {
        std::cerr << "cannot open manifest " << manifest_path << "\n";
        return 65;
    }
    std::vector<std::pair<std::string, std::string>> tiles;
    std::string line;
    while (std::getline(manifest, line)) {
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            std::cerr << "manifest line without tab: " << line << "\n";
            return 65;
        }
        tiles.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }

    std::ofstream response(response_path, std::ios::trunc);
    if (!response) {
        std::cerr << "cannot write response " << response_path << "\n";
        return 66;
    }

    if (mode == "garbage") {
        response << "this is not a protocol line\n";
        return 0;
    }

    bool first = true;
    for (const auto& [id, png] : tiles) {
        if (mode == "drop-first" && first) {
            first = false;
            continue;
        }
        first = false;
        if (mode == "allpos") {
            response << id << "\t1\t0.99\n";
        } else if (mode == "allneg" || mode == "drop-first") {
            response << id << "\t0\t0.01\n";
        } else if (mode.rfind("conf:", 0) == 0) {
            const double v = std::stod(mode.substr(5));
            response << id << '\t' << (v >= 0.5 ? 1 : 0) << '\t' << mode.substr(5) << '\n';
        } else if (mode == "dark") {
            const Raster tile = load_png(png);
            long long sum = 0;
            for (uint8_t p : tile.pixels) sum += p;
            const double mean = static_cast<double>(sum) / static_cast<double>(tile.size());
            response << id << '\t' << (mean < 192 ? 1 : 0) << '\t' << (mean < 192 ? "0.9" : "0.1")
                     << '\n';
        } else if (mode == "segment-empty" || mode == "segment-dark") {
            const Raster tile = load_png(png);
            BinaryMask mask(tile.width, tile.height);
            if (mode == "segment-dark") {
                for (size_t i = 0; i < tile.pixels.size(); ++i) {
                    mask.bits[i] = tile.pixels[i] < 128 ? 1 : 0;
                }
            }
            const auto mask_path =
                response_path.parent_path() / (id + "_mask.png");
            save_mask_png(mask_path, mask);
            response << id << '\t' << mask_path.string() << '\n';
        } else {
            std::cerr << "unknown mode " << mode << "\n";
            return 64;
        }
    }
    return 0;
}
