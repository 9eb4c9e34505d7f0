#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace ctiler {

/// SHA-256 (FIPS 180-4) of a byte buffer, lowercase hex.
std::string sha256_hex(const void* data, size_t len);
std::string sha256_file_hex(const std::filesystem::path& path);

} // namespace ctiler
