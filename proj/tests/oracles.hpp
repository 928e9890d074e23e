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

// Brute-force oracles for the test suites. Everything here is deliberately
// independent of the library's transform implementations: plain grid
// maximization / minimization and direct series summation only.

#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "infconv/grid_function.hpp"
#include "infconv/rng.hpp"

namespace oracle {

// sup_x { x*y - f(x) } over a fine grid.
inline double conjugate_at(const std::function<double(double)>& f, double y,
                           double lo, double hi, std::size_t n = 200001) {
  double best = -infconv::kInf;
  for (std::size_t i = 0; i < n; ++i) {
    double x = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    double v = f(x);
    if (v < infconv::kInf) best = std::max(best, x * y - v);
  }
  return best;
}

// inf_y { f(y) + g(x - y) } over a fine grid.
inline double infconv_at(const std::function<double(double)>& f,
                         const std::function<double(double)>& g, double x,
                         double lo, double hi, std::size_t n = 200001) {
  double best = infconv::kInf;
  for (std::size_t i = 0; i < n; ++i) {
    double y = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    best = std::min(best, infconv::ext_add(f(y), g(x - y)));
  }
  return best;
}

// Random convex piecewise-linear function: strictly increasing breakpoints,
// values integrated from sorted slopes.
inline infconv::GridFunction random_convex_pl(std::mt19937_64& gen,
                                              std::size_t max_breakpoints = 64,
                                              double span_limit = 100.0,
                                              bool allow_linear_ext = true) {
  std::uniform_int_distribution<std::size_t> nd(3, max_breakpoints);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  std::size_t n = nd(gen);

  double lo = -span_limit + 2.0 * span_limit * 0.45 * ud(gen);
  double hi = span_limit - 2.0 * span_limit * 0.45 * ud(gen);
  if (lo > hi) std::swap(lo, hi);
  if (hi - lo < 1.0) hi = lo + 1.0;

  std::vector<double> xs(n);
  xs.front() = lo;
  xs.back() = hi;
  for (std::size_t i = 1; i + 1 < n; ++i) xs[i] = lo + (hi - lo) * ud(gen);
  std::sort(xs.begin(), xs.end());
  for (std::size_t i = 1; i < n; ++i)
    if (xs[i] - xs[i - 1] < 1e-6) xs[i] = xs[i - 1] + 1e-3 * (1.0 + ud(gen));

  std::vector<double> slopes(n - 1);
  for (auto& s : slopes) s = -40.0 + 80.0 * ud(gen);
  std::sort(slopes.begin(), slopes.end());
  for (std::size_t i = 1; i < slopes.size(); ++i)
    if (slopes[i] - slopes[i - 1] < 1e-9) slopes[i] = slopes[i - 1] + 1e-6;

  std::vector<double> vs(n);
  vs[0] = -10.0 + 20.0 * ud(gen);
  for (std::size_t i = 1; i < n; ++i)
    vs[i] = vs[i - 1] + slopes[i - 1] * (xs[i] - xs[i - 1]);

  auto ext = [&](void) {
    return (allow_linear_ext && ud(gen) < 0.5) ? infconv::Extension::kLinear
                                               : infconv::Extension::kPlusInfinity;
  };
  return infconv::GridFunction(std::move(xs), std::move(vs), ext(), ext());
}

// Bounded-below variant (slopes straddle zero, usable as an ICI test
// function).
inline infconv::GridFunction random_convex_bounded_below(std::mt19937_64& gen,
                                                         std::size_t max_bp = 64,
                                                         double span = 40.0) {
  for (;;) {
    infconv::GridFunction f = random_convex_pl(gen, max_bp, span, true);
    bool left_ok = f.left_extension() == infconv::Extension::kPlusInfinity ||
                   f.left_slope() <= 0;
    bool right_ok = f.right_extension() == infconv::Extension::kPlusInfinity ||
                    f.right_slope() >= 0;
    if (left_ok && right_ok) return f;
  }
}

}  // namespace oracle
