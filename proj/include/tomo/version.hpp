#pragma once

#include <string_view>

namespace tomo {

inline constexpr std::string_view kToolName = "lattice-tomo";
inline constexpr std::string_view kToolVersion = "1.0.0";

}  // namespace tomo
