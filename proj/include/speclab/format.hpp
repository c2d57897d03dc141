#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace speclab {

/// Locale-free rendering with 17 significant digits; "nan"/"inf" for
/// non-finite values.
inline std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                 std::chars_format::general, 17);
  return std::string(buffer, end);
}

/// Shortest representation that round-trips; used for config echoes.
inline std::string format_shortest(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

}  // namespace speclab
