#pragma once

// Deterministic text output: shortest round-trip formatting for doubles.

#include <charconv>
#include <ostream>
#include <string>

namespace nullfront {

inline std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline void put_csv_value(std::ostream& os, double v, bool first) {
  if (!first) os << ',';
  os << format_double(v);
}

}  // namespace nullfront
