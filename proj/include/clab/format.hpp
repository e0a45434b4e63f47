#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace clab {

/// Shortest decimal that reads back to the same double; "inf", "-inf", "nan"
/// for non-finite values.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace clab
