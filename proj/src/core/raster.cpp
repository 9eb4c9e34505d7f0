#include "core/raster.hpp"

#include "core/errors.hpp"

#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <numeric>
#include <stdexcept>

namespace ctiler {

Raster::Raster(int w, int h, uint8_t fill) : width(w), height(h) {
    if (w < 1 || h < 1) throw std::invalid_argument("raster dimensions must be >= 1");
    pixels.assign(static_cast<size_t>(w) * h, fill);
}

BinaryMask::BinaryMask(int w, int h, bool fill) : width(w), height(h) {
    if (w < 1 || h < 1) throw std::invalid_argument("mask dimensions must be >= 1");
    bits.assign(static_cast<size_t>(w) * h, fill ? 1 : 0);
}

size_t BinaryMask::count() const {
    return std::accumulate(bits.begin(), bits.end(), size_t{0});
}

bool BinaryMask::any() const {
    for (uint8_t b : bits)
        if (b) return true;
    return false;
}

const char* dihedral_name(Dihedral t) {
    switch (t) {
        case Dihedral::identity: return "identity";
        case Dihedral::hflip: return "hflip";
        case Dihedral::vflip: return "vflip";
        case Dihedral::rot180: return "rot180";
        case Dihedral::rot180_hflip: return "rot180_hflip";
        case Dihedral::rot180_vflip: return "rot180_vflip";
    }
    return "?";
}

Raster dihedral(const Raster& img, Dihedral t) {
    Raster out(img.width, img.height);
    const int w = img.width;
    const int h = img.height;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int sx = x;
            int sy = y;
            switch (t) {
                case Dihedral::identity: break;
                case Dihedral::hflip: sx = w - 1 - x; break;
                case Dihedral::vflip: sy = h - 1 - y; break;
                case Dihedral::rot180:
                    sx = w - 1 - x;
                    sy = h - 1 - y;
                    break;
                case Dihedral::rot180_hflip: sy = h - 1 - y; break; // == vflip
                case Dihedral::rot180_vflip: sx = w - 1 - x; break; // == hflip
            }
            out.set(x, y, img.at(sx, sy));
        }
    }
    return out;
}

std::array<Dihedral, 6> augment_transforms() {
    return {Dihedral::identity,     Dihedral::hflip,        Dihedral::vflip,
            Dihedral::rot180,       Dihedral::rot180_hflip, Dihedral::rot180_vflip};
}

std::array<Raster, 6> augment_set(const Raster& img) {
    std::array<Raster, 6> out;
    auto ts = augment_transforms();
    for (size_t i = 0; i < ts.size(); ++i) out[i] = dihedral(img, ts[i]);
    return out;
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors via longjmp; the handler stashes the message here so
// a proper exception can be thrown once control is back in C++ land.
struct PngErrorCapture {
    char message[256] = {0};
};

void png_error_capture(png_structp png, png_const_charp msg) {
    auto* cap = static_cast<PngErrorCapture*>(png_get_error_ptr(png));
    if (cap) std::snprintf(cap->message, sizeof(cap->message), "%s", msg);
    longjmp(png_jmpbuf(png), 1);
}

void png_warning_ignore(png_structp, png_const_charp) {}

uint8_t channel_average(const uint8_t* px, int channels) {
    // Alpha (if present) is the last channel and is not luminance.
    int color = (channels == 2 || channels == 4) ? channels - 1 : channels;
    int sum = 0;
    for (int c = 0; c < color; ++c) sum += px[c];
    return static_cast<uint8_t>(std::lround(static_cast<double>(sum) / color));
}

} // namespace

Raster load_png(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw IoError("cannot open image: " + path.string());

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8) != 0) {
        throw IoError("not a PNG file: " + path.string());
    }

    PngErrorCapture cap;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &cap,
                                             png_error_capture, png_warning_ignore);
    if (!png) throw IoError("png reader allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png info allocation failed");
    }

    // Declared before setjmp so they are destroyed normally when we rethrow.
    std::vector<uint8_t> interleaved;
    std::vector<png_bytep> rows;
    int width = 0;
    int height = 0;
    int channels = 0;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("png decode failed (" + std::string(cap.message) + "): " + path.string());
    }

    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    if (width < 1 || height < 1) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("zero-dimension image: " + path.string());
    }

    // Normalize every input to 8-bit channels.
    png_byte color_type = png_get_color_type(png, info);
    png_byte bit_depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (bit_depth == 16) png_set_strip_16(png);
    png_read_update_info(png, info);

    channels = png_get_channels(png, info);
    size_t rowbytes = png_get_rowbytes(png, info);
    interleaved.resize(rowbytes * static_cast<size_t>(height));
    rows.resize(static_cast<size_t>(height));
    for (int y = 0; y < height; ++y) {
        rows[static_cast<size_t>(y)] = interleaved.data() + rowbytes * static_cast<size_t>(y);
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Raster out(width, height);
    if (channels == 1) {
        std::memcpy(out.pixels.data(), interleaved.data(), out.pixels.size());
    } else {
        const size_t stride = static_cast<size_t>(width) * channels;
        for (int y = 0; y < height; ++y) {
            const uint8_t* row = interleaved.data() + stride * static_cast<size_t>(y);
            for (int x = 0; x < width; ++x) {
                out.set(x, y, channel_average(row + static_cast<size_t>(x) * channels, channels));
            }
        }
    }
    return out;
}

namespace {

void write_png_impl(const std::filesystem::path& path, int width, int height,
                    const uint8_t* data, int color_type) {
    if (width < 1 || height < 1) throw std::invalid_argument("image dimensions must be >= 1");
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw IoError("cannot write image: " + path.string());

    PngErrorCapture cap;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &cap,
                                              png_error_capture, png_warning_ignore);
    if (!png) throw IoError("png writer allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png info allocation failed");
    }

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png encode failed (" + std::string(cap.message) + "): " + path.string());
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 8, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    // Pinned filter/level keep output bytes reproducible run to run.
    png_set_filter(png, 0, PNG_FILTER_NONE);
    png_set_compression_level(png, 6);
    png_write_info(png, info);

    const size_t stride = static_cast<size_t>(width) * (color_type == PNG_COLOR_TYPE_RGB ? 3 : 1);
    for (int y = 0; y < height; ++y) {
        png_write_row(png, const_cast<png_bytep>(data + stride * static_cast<size_t>(y)));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace

void save_png(const std::filesystem::path& path, const Raster& img) {
    write_png_impl(path, img.width, img.height, img.pixels.data(), PNG_COLOR_TYPE_GRAY);
}

Raster load_png_with_sidecar(const std::filesystem::path& path) {
    Raster img = load_png(path);
    auto wld = world_file_path(path);
    if (std::filesystem::exists(wld)) img.geo = read_world_file(wld);
    return img;
}

BinaryMask load_mask_png(const std::filesystem::path& path) {
    Raster img = load_png(path);
    BinaryMask mask(img.width, img.height);
    for (size_t i = 0; i < img.pixels.size(); ++i) mask.bits[i] = img.pixels[i] >= 128 ? 1 : 0;
    return mask;
}

void save_mask_png(const std::filesystem::path& path, const BinaryMask& mask) {
    Raster img(mask.width, mask.height, 0);
    for (size_t i = 0; i < mask.bits.size(); ++i) img.pixels[i] = mask.bits[i] ? 255 : 0;
    save_png(path, img);
}

void save_rgb_png(const std::filesystem::path& path, int width, int height,
                  const std::vector<uint8_t>& interleaved_rgb) {
    if (interleaved_rgb.size() != static_cast<size_t>(width) * height * 3) {
        throw std::invalid_argument("rgb buffer size does not match dimensions");
    }
    write_png_impl(path, width, height, interleaved_rgb.data(), PNG_COLOR_TYPE_RGB);
}

} // namespace ctiler
