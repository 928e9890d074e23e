// Copyright 2026 The infconv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace infconv {

// Extended reals: finite doubles plus +infinity. Neither -infinity nor NaN is
// ever a legal value; seeing one means a bug upstream.
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_extended(double v) {
  return !std::isnan(v) && v != -kInf;
}

inline double ext_add(double a, double b) {
  if (a == kInf || b == kInf) return kInf;
  return a + b;
}

// Comparison tolerance: absolute below scale 1, relative above.
inline double tol_at(double scale, double tol = 1e-9) {
  return tol * std::max(1.0, std::fabs(scale));
}

struct ConvexityError : std::invalid_argument {
  ConvexityError(const std::string& msg, std::size_t index)
      : std::invalid_argument(msg), breakpoint_index(index) {}
  std::size_t breakpoint_index;
};

struct ImproperError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Thrown when a generalized inverse cannot reach the requested level on the
// represented span; the caller has to widen the grid.
struct LevelUnreachableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace infconv
