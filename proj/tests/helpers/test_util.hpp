#pragma once

#include "core/raster.hpp"
#include "core/rng.hpp"

#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <string>

namespace ctiler::testutil {

/// Self-deleting scratch directory under the system temp dir.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<uint64_t> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("ctiler_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Deterministic noise image (all intensities, no symmetry).
inline Raster random_raster(int w, int h, uint64_t seed) {
    Raster img(w, h);
    SplitMix64 rng(seed);
    for (auto& p : img.pixels) p = static_cast<uint8_t>(rng.next_below(256));
    return img;
}

inline std::string env_or_fail(const char* name) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : std::string();
}

} // namespace ctiler::testutil
