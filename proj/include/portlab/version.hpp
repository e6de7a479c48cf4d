#pragma once

namespace portlab {

inline constexpr const char* kToolName = "portlab";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace portlab
