#pragma once

namespace randsum {

inline constexpr const char* library_name = "randsum";
inline constexpr const char* library_version = "0.1.0";

}  // namespace randsum
