// String-to-value helpers shared by filter parameters and the world format.
#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "math.hpp"

namespace itflow {

inline std::vector<std::string> split_ws(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < text.size() && text[i] != ' ' && text[i] != '\t') ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

inline double parse_double(std::string_view text, const std::string& what) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    fail(Err::InvalidParam, what + ": '" + std::string(text) + "' is not a number");
  return value;
}

inline long parse_int(std::string_view text, const std::string& what) {
  long value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    fail(Err::InvalidParam, what + ": '" + std::string(text) + "' is not an integer");
  return value;
}

inline bool parse_bool(std::string_view text, const std::string& what) {
  if (text == "true") return true;
  if (text == "false") return false;
  fail(Err::InvalidParam, what + ": expected 'true' or 'false', got '" + std::string(text) + "'");
}

inline math::Vec3 parse_vec3(std::string_view text, const std::string& what) {
  const auto parts = split_ws(text);
  if (parts.size() != 3)
    fail(Err::InvalidParam, what + ": expected three numbers, got '" + std::string(text) + "'");
  return {parse_double(parts[0], what), parse_double(parts[1], what), parse_double(parts[2], what)};
}

// Inputs already within 1e-9 of unit length pass through untouched so
// round-trips are exact; anything else is normalized.
inline math::Quat sanitize_quat(math::Quat q, const std::string& what) {
  const double n = q.norm();
  if (n < 1e-12) fail(Err::InvalidParam, what + ": quaternion has zero norm");
  if (std::abs(n - 1.0) <= 1e-9) return q;
  return q.normalized();
}

// Accepts "w x y z" and returns a unit quaternion.
inline math::Quat parse_quat(std::string_view text, const std::string& what) {
  const auto parts = split_ws(text);
  if (parts.size() != 4)
    fail(Err::InvalidParam, what + ": expected four numbers, got '" + std::string(text) + "'");
  return sanitize_quat({parse_double(parts[0], what), parse_double(parts[1], what),
                        parse_double(parts[2], what), parse_double(parts[3], what)},
                       what);
}

}  // namespace itflow
