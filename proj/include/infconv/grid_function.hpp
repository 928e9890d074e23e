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

#include <algorithm>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "infconv/extended.hpp"

namespace infconv {

// Behaviour outside the breakpoint span: jump to +infinity, or continue the
// edge segment's slope.
enum class Extension { kPlusInfinity, kLinear };

// A closed proper convex extended-real function sampled at strictly increasing
// breakpoints. Evaluation between breakpoints is linear interpolation; a
// segment with a +infinity endpoint is +infinity on its open interior, which
// is how a closed bounded effective domain is encoded. The finite values must
// form one contiguous breakpoint range.
class GridFunction {
 public:
  GridFunction() = default;

  GridFunction(std::vector<double> xs, std::vector<double> vs,
               Extension left = Extension::kPlusInfinity,
               Extension right = Extension::kPlusInfinity)
      : xs_(std::move(xs)), vs_(std::move(vs)), left_(left), right_(right) {
    validate();
  }

  static GridFunction sample(const std::function<double(double)>& f,
                             std::vector<double> xs,
                             Extension left = Extension::kPlusInfinity,
                             Extension right = Extension::kPlusInfinity) {
    std::vector<double> vs(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) vs[i] = f(xs[i]);
    return GridFunction(std::move(xs), std::move(vs), left, right);
  }

  // Indicator-style function: v0 at x0, +infinity elsewhere.
  static GridFunction point(double x0, double v0 = 0.0) {
    return GridFunction({x0}, {v0});
  }

  std::size_t size() const { return xs_.size(); }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& values() const { return vs_; }
  Extension left_extension() const { return left_; }
  Extension right_extension() const { return right_; }

  std::size_t finite_lo() const { return lo_; }
  std::size_t finite_hi() const { return hi_; }
  std::size_t finite_count() const { return hi_ - lo_ + 1; }

  // Edges of the effective domain (-inf/+inf when a side extends linearly).
  double domain_lo() const {
    return (lo_ > 0 || left_ == Extension::kPlusInfinity) ? xs_[lo_] : -kInf;
  }
  double domain_hi() const {
    return (hi_ + 1 < xs_.size() || right_ == Extension::kPlusInfinity)
               ? xs_[hi_]
               : kInf;
  }

  double left_slope() const {
    return slope_between(lo_, lo_ + 1);
  }
  double right_slope() const {
    return slope_between(hi_ - 1, hi_);
  }

  double operator()(double x) const {
    if (x < xs_.front()) {
      if (left_ == Extension::kPlusInfinity) {
        // Conjugation recovers domain edges from difference quotients, so an
        // edge can sit a few ulps off; treat the closure tightly.
        return (xs_.front() - x <= tol_at(xs_.front(), 1e-11)) ? vs_.front()
                                                               : kInf;
      }
      return vs_.front() + left_slope() * (x - xs_.front());
    }
    if (x > xs_.back()) {
      if (right_ == Extension::kPlusInfinity) {
        return (x - xs_.back() <= tol_at(xs_.back(), 1e-11)) ? vs_.back()
                                                             : kInf;
      }
      return vs_.back() + right_slope() * (x - xs_.back());
    }
    auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs_.begin());
    if (xs_[i] == x) return vs_[i];
    // x lies strictly inside segment (i-1, i).
    double v0 = vs_[i - 1], v1 = vs_[i];
    if (v0 == kInf || v1 == kInf) return kInf;
    double t = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
    return v0 + t * (v1 - v0);
  }

  double min_value() const {
    double m = kInf;
    for (std::size_t i = lo_; i <= hi_; ++i) m = std::min(m, vs_[i]);
    return m;
  }

  bool is_convex(std::size_t* bad_index = nullptr, double tol = 1e-9) const {
    if (finite_count() < 3) return true;
    // A difference quotient over a segment of width dx carries slope noise of
    // order eps * |v| / dx from value rounding alone; account for it so that
    // near-duplicate breakpoints cannot raise false alarms.
    constexpr double eps = 2.3e-16;
    auto seg_noise = [&](std::size_t i) {
      double v = std::max({1.0, std::fabs(vs_[i]), std::fabs(vs_[i + 1])});
      return 2.0 * eps * v / (xs_[i + 1] - xs_[i]);
    };
    double prev = slope_between(lo_, lo_ + 1);
    double prev_noise = seg_noise(lo_);
    for (std::size_t i = lo_ + 1; i < hi_; ++i) {
      double s = slope_between(i, i + 1);
      double noise = seg_noise(i);
      double slack =
          tol_at(std::max(std::fabs(s), std::fabs(prev)), tol) + prev_noise + noise;
      if (s < prev - slack) {
        if (bad_index) *bad_index = i;
        return false;
      }
      if (s > prev) {
        prev = s;
        prev_noise = noise;
      }
    }
    return true;
  }

  void require_convex(double tol = 1e-9) const {
    std::size_t bad = 0;
    if (!is_convex(&bad, tol)) {
      throw ConvexityError(
          "grid function is not convex at breakpoint index " +
              std::to_string(bad) + " (x = " + std::to_string(xs_[bad]) + ")",
          bad);
    }
  }

 private:
  double slope_between(std::size_t i, std::size_t j) const {
    return (vs_[j] - vs_[i]) / (xs_[j] - xs_[i]);
  }

  void validate() {
    require(!xs_.empty(), "grid function needs at least one breakpoint");
    require(xs_.size() == vs_.size(),
            "breakpoint/value arrays differ in length");
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      require(std::isfinite(xs_[i]), "breakpoints must be finite");
      require(is_extended(vs_[i]),
              "values must be finite or +inf (no NaN, no -inf)");
      if (i > 0) require(xs_[i] > xs_[i - 1], "breakpoints must be strictly increasing");
    }
    // Locate the finite range and check contiguity (proper + closed).
    std::size_t n = xs_.size();
    lo_ = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (vs_[i] < kInf) {
        lo_ = i;
        break;
      }
    }
    require(lo_ < n, "improper grid function: all values are +inf");
    hi_ = lo_;
    while (hi_ + 1 < n && vs_[hi_ + 1] < kInf) ++hi_;
    for (std::size_t i = hi_ + 1; i < n; ++i) {
      require(vs_[i] == kInf, "finite values must form a contiguous range");
    }
    if (left_ == Extension::kLinear) {
      require(lo_ == 0, "linear left extension requires a finite left edge value");
      require(finite_count() >= 2, "linear extension needs at least two finite points");
    }
    if (right_ == Extension::kLinear) {
      require(hi_ + 1 == n, "linear right extension requires a finite right edge value");
      require(finite_count() >= 2, "linear extension needs at least two finite points");
    }
  }

  std::vector<double> xs_;
  std::vector<double> vs_;
  Extension left_ = Extension::kPlusInfinity;
  Extension right_ = Extension::kPlusInfinity;
  std::size_t lo_ = 0, hi_ = 0;
};

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  require(n >= 2 && hi > lo, "uniform_grid needs n >= 2 and hi > lo");
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i)
    xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  xs.front() = lo;
  xs.back() = hi;
  return xs;
}

inline std::vector<double> symmetric_grid(double span, std::size_t n) {
  return uniform_grid(-span, span, n);
}

}  // namespace infconv
