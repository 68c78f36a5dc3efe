#pragma once

#include <string_view>

namespace bipartite_lens {

inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace bipartite_lens
