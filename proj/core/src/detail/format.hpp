#pragma once

#include <charconv>
#include <string>

namespace ltb::detail {

/// Shortest round-trip decimal representation; deterministic across runs.
inline std::string format_double(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

}  // namespace ltb::detail
