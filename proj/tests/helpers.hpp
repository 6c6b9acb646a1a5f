#pragma once

#include <cmath>
#include <string>

#include "doctest.h"
#include "offo/core.hpp"

namespace testing {

// |a - b| <= rel * max(1, |a|, |b|)
inline bool close(double a, double b, double rel = 1e-12) {
  if (a == b) return true;
  const double scale = std::fmax(1.0, std::fmax(std::fabs(a), std::fabs(b)));
  return std::fabs(a - b) <= rel * scale;
}

inline void check_vec(offo::ConstSpan a, offo::ConstSpan b, double rel = 1e-12) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    INFO("component " << i << ": " << a[i] << " vs " << b[i]);
    CHECK(close(a[i], b[i], rel));
  }
}

}  // namespace testing
