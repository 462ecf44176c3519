#pragma once

namespace cevi {

inline constexpr const char* version = "0.1.0";

}  // namespace cevi
