#pragma once

// Small text helpers shared by the readers and writers.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "linkassess/error.hpp"

namespace linkassess::text {

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

/// Split on any character in `delims`, collapsing runs and dropping empty tokens.
inline std::vector<std::string_view> tokenize(std::string_view s, std::string_view delims) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    i = s.find_first_not_of(delims, i);
    if (i == std::string_view::npos) break;
    auto j = s.find_first_of(delims, i);
    if (j == std::string_view::npos) j = s.size();
    out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

/// Split on a single delimiter, keeping empty fields.
inline std::vector<std::string_view> split(std::string_view s, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto j = s.find(delim, start);
    if (j == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, j - start));
    start = j + 1;
  }
}

/// Shortest representation that parses back to the identical double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw Error("cannot format number");
  return std::string(buf, ptr);
}

/// Fixed 3-decimal rendering for human-readable tables.
inline std::string format_fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline double parse_double(std::string_view s, std::size_t line = 0) {
  s = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError("expected a number, got '" + std::string(s) + "'", line);
  }
  return v;
}

inline long long parse_int(std::string_view s, std::size_t line = 0) {
  s = trim(s);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError("expected an integer, got '" + std::string(s) + "'", line);
  }
  return v;
}

}  // namespace linkassess::text
