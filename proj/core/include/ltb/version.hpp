#pragma once

namespace ltb {

inline constexpr const char* version = "0.1.0";

}  // namespace ltb
