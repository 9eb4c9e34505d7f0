#pragma once

namespace ctiler {

inline constexpr const char* kToolName = "cascade-tiler";
inline constexpr const char* kToolVersion = "1.0.0";

} // namespace ctiler
