#pragma once

#include <string_view>

namespace ffdg {

inline constexpr std::string_view kToolVersion = "ffdg 0.1.0";

}  // namespace ffdg
