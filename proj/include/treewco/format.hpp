#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace treewco {

/// %.12g, the precision used in every report.
inline std::string format_real(double x) {
  if (x == 0.0) x = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace treewco
