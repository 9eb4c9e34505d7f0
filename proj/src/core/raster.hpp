#pragma once

#include "core/geo.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace ctiler {

/// 8-bit grayscale pixel grid, row-major. 0 is black ink, 255 blank paper.
/// Immutable by convention once built; all transforms return new rasters.
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels;
    std::optional<AffineGeo> geo;

    Raster() = default;
    Raster(int w, int h, uint8_t fill = 255);

    uint8_t at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
    void set(int x, int y, uint8_t v) { pixels[static_cast<size_t>(y) * width + x] = v; }
    size_t size() const { return pixels.size(); }
};

/// One boolean per pixel (stored as 0/1 bytes), tied to the raster region it
/// annotates. Positive means "building".
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> bits;

    BinaryMask() = default;
    BinaryMask(int w, int h, bool fill = false);

    bool at(int x, int y) const { return bits[static_cast<size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }
    size_t count() const;
    bool any() const;
};

enum class Dihedral {
    identity,
    hflip,
    vflip,
    rot180,
    rot180_hflip, // rot180 after hflip; equals vflip on any image
    rot180_vflip, // rot180 after vflip; equals hflip on any image
};

constexpr std::array<Dihedral, 4> kBaseTransforms = {
    Dihedral::identity, Dihedral::hflip, Dihedral::vflip, Dihedral::rot180};

const char* dihedral_name(Dihedral t);

/// Apply a transform. Output keeps the input's dimensions; geo metadata is
/// dropped (the affine no longer describes flipped pixels).
Raster dihedral(const Raster& img, Dihedral t);

/// The fixed six-variant augmentation set, in order:
/// identity, hflip, vflip, rot180, rot180∘hflip, rot180∘vflip.
/// The last two duplicate vflip/hflip; they are emitted anyway so one input
/// always yields exactly six outputs.
std::array<Raster, 6> augment_set(const Raster& img);
std::array<Dihedral, 6> augment_transforms();

// Lossless PNG I/O. Loading converts multi-channel images to grayscale by
// channel average (rounded to nearest); alpha is ignored. Masks are stored
// as 0/255 grayscale PNGs.
Raster load_png(const std::filesystem::path& path);
void save_png(const std::filesystem::path& path, const Raster& img);

/// load_png plus world-file sidecar discovery (<stem>.wld next to the image).
Raster load_png_with_sidecar(const std::filesystem::path& path);

BinaryMask load_mask_png(const std::filesystem::path& path);
void save_mask_png(const std::filesystem::path& path, const BinaryMask& mask);

/// RGB overlay output (used for diagnostic centroid rendering).
void save_rgb_png(const std::filesystem::path& path, int width, int height,
                  const std::vector<uint8_t>& interleaved_rgb);

} // namespace ctiler
