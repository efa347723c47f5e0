#pragma once

#include <cstdio>
#include <string>

namespace hrm {

// Formats a real with 6 significant digits, the fixed precision used by the
// tree file format and all CSV output.
inline std::string format_g6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

}  // namespace hrm
