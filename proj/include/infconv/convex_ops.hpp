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
#include <cmath>
#include <optional>
#include <vector>

#include "infconv/extended.hpp"
#include "infconv/grid_function.hpp"

namespace infconv {

// Legendre transform Lf(y) = sup_x { x*y - f(x) } of a piecewise-linear
// convex function, computed exactly on the representation class. The sup over
// a PL convex function is attained at a breakpoint or escapes to +inf; escape
// is decided from the extreme slopes, never from grid values. The output's
// vertices sit at the distinct slopes of f; on a compact side of dom f one
// extra vertex encodes the linear tail of the conjugate.
inline GridFunction conjugate(const GridFunction& f) {
  f.require_convex();
  const auto& xs = f.xs();
  const auto& vs = f.values();
  const std::size_t lo = f.finite_lo(), hi = f.finite_hi();

  const bool compact_left = lo > 0 || f.left_extension() == Extension::kPlusInfinity;
  const bool compact_right =
      hi + 1 < xs.size() || f.right_extension() == Extension::kPlusInfinity;

  // Coalesce near-duplicate breakpoints first: a difference quotient over a
  // micro segment is rounding noise, and one corrupted slope would poison the
  // whole monotone slope sequence.
  std::vector<std::size_t> keep;
  keep.reserve(hi - lo + 1);
  keep.push_back(lo);
  for (std::size_t k = lo + 1; k <= hi; ++k) {
    if (xs[k] - xs[keep.back()] <= tol_at(xs[k], 5e-13)) {
      if (vs[k] < vs[keep.back()]) keep.back() = k;
    } else {
      keep.push_back(k);
    }
  }

  // Sup of x*y - f(x) over the kept finite vertices.
  auto sup_at = [&](double y) {
    double best = -kInf;
    for (std::size_t k : keep) best = std::max(best, xs[k] * y - vs[k]);
    return best;
  };

  if (keep.size() == 1) {
    if (f.finite_count() >= 2 && !(compact_left && compact_right)) {
      keep = {lo, hi};  // keep the ext slope anchored, however degenerate
    } else {
      // Conjugate of a single point is the full line y -> x0*y - v0.
      double x0 = xs[keep[0]], v0 = vs[keep[0]];
      return GridFunction({0.0, 1.0}, {-v0, x0 - v0}, Extension::kLinear,
                          Extension::kLinear);
    }
  }

  std::vector<double> slopes;
  slopes.reserve(keep.size() - 1);
  double prev = -kInf;
  for (std::size_t k = 0; k + 1 < keep.size(); ++k) {
    double s = (vs[keep[k + 1]] - vs[keep[k]]) / (xs[keep[k + 1]] - xs[keep[k]]);
    s = std::max(s, prev);  // monotone within the convexity tolerance
    if (s > prev) slopes.push_back(s);
    prev = s;
  }

  std::vector<double> ys;
  ys.reserve(slopes.size() + 2);
  // Sentinel step sized so it stays representable next to huge slopes.
  auto step = [](double s) { return std::max(1.0, std::fabs(s) * 1e-9); };
  if (compact_left) ys.push_back(slopes.front() - step(slopes.front()));
  ys.insert(ys.end(), slopes.begin(), slopes.end());
  if (compact_right) ys.push_back(slopes.back() + step(slopes.back()));

  std::vector<double> gv(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) gv[i] = sup_at(ys[i]);

  Extension gl = compact_left ? Extension::kLinear : Extension::kPlusInfinity;
  Extension gr = compact_right ? Extension::kLinear : Extension::kPlusInfinity;
  if (ys.size() == 1) gl = gr = Extension::kPlusInfinity;
  return GridFunction(std::move(ys), std::move(gv), gl, gr);
}

// Restriction of a function to a caller-supplied grid. Values are exact; the
// extension flags are carried over, so outside a covering grid the restriction
// still encodes the right +inf structure.
inline GridFunction resample(const GridFunction& f, std::vector<double> xs) {
  std::vector<double> vs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) vs[i] = f(xs[i]);
  return GridFunction(std::move(xs), std::move(vs), f.left_extension(),
                      f.right_extension());
}

inline GridFunction legendre_transform(const GridFunction& f,
                                       std::vector<double> out_breakpoints) {
  return resample(conjugate(f), std::move(out_breakpoints));
}

// Pointwise f + g. The effective domain is the intersection; disjoint domains
// make the sum improper, which is rejected.
inline GridFunction add(const GridFunction& f, const GridFunction& g) {
  double lo = std::max(f.domain_lo(), g.domain_lo());
  double hi = std::min(f.domain_hi(), g.domain_hi());
  if (lo > hi) throw ImproperError("sum of grid functions has empty domain");
  if (lo == hi) {
    double v = ext_add(f(lo), g(lo));
    if (v == kInf) throw ImproperError("sum of grid functions has empty domain");
    return GridFunction::point(lo, v);
  }

  std::vector<double> xs;
  xs.reserve(f.size() + g.size() + 2);
  if (std::isfinite(lo)) xs.push_back(lo);
  for (double x : f.xs())
    if (x >= lo && x <= hi) xs.push_back(x);
  for (double x : g.xs())
    if (x >= lo && x <= hi) xs.push_back(x);
  if (std::isfinite(hi)) xs.push_back(hi);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::vector<double> vs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) vs[i] = ext_add(f(xs[i]), g(xs[i]));

  Extension el = (f.left_extension() == Extension::kLinear &&
                  g.left_extension() == Extension::kLinear && !std::isfinite(lo))
                     ? Extension::kLinear
                     : Extension::kPlusInfinity;
  Extension er = (f.right_extension() == Extension::kLinear &&
                  g.right_extension() == Extension::kLinear && !std::isfinite(hi))
                     ? Extension::kLinear
                     : Extension::kPlusInfinity;
  return GridFunction(std::move(xs), std::move(vs), el, er);
}

// Infimum convolution via the conjugacy identity f # g = L(Lf + Lg), exact on
// the PL convex class.
inline GridFunction inf_convolution(const GridFunction& f, const GridFunction& g) {
  return conjugate(add(conjugate(f), conjugate(g)));
}

// Direct evaluation of (f # g)(x): the inner minimum of the convex function
// y -> f(y) + g(x - y) is attained at a kink, i.e. at a breakpoint of f or at
// x minus a breakpoint of g. Kept as an independent route for cross-checking
// the conjugacy identity.
inline double inf_convolution_at(const GridFunction& f, const GridFunction& g,
                                 double x) {
  double best = kInf;
  for (double y : f.xs()) best = std::min(best, ext_add(f(y), g(x - y)));
  for (double t : g.xs()) best = std::min(best, ext_add(f(x - t), g(t)));
  return best;
}

inline GridFunction inf_convolution_sweep(const GridFunction& f,
                                          const GridFunction& g,
                                          const std::vector<double>& out_xs) {
  std::vector<double> vs(out_xs.size());
  for (std::size_t i = 0; i < out_xs.size(); ++i)
    vs[i] = inf_convolution_at(f, g, out_xs[i]);
  return GridFunction(out_xs, std::move(vs));
}

// Generalized inverse inf{ x >= 0 : g(x) >= y } for g non-decreasing on
// dom g intersected with [0, inf). At a jump (the edge of the effective
// domain) the left endpoint is returned, matching the infimum literally.
inline double generalized_inverse(const GridFunction& g, double y) {
  require(is_extended(y), "level must be finite or +inf");
  if (g(0.0) >= y) return 0.0;

  const auto& xs = g.xs();
  const auto& vs = g.values();
  const std::size_t hi = g.finite_hi();
  double px = 0.0, pv = g(0.0);
  for (std::size_t i = 0; i <= hi; ++i) {
    if (xs[i] <= 0.0) continue;
    double v = vs[i];
    if (v >= y) {
      double slope = (v - pv) / (xs[i] - px);
      return px + (y - pv) / slope;
    }
    px = xs[i];
    pv = v;
  }
  // Level not reached on the finite part right of 0.
  double edge = g.domain_hi();
  if (std::isfinite(edge)) return edge;  // jump to +inf at the domain edge
  double slope = g.right_slope();
  if (slope > 0.0 && y < kInf) return px + (y - pv) / slope;
  throw LevelUnreachableError("level " + std::to_string(y) +
                              " unreachable on grid (widen the grid)");
}

// Fast repeated generalized inverses of one non-decreasing right half.
// Prepares the monotone arrays once; queries are a binary search.
class MonotoneInverse {
 public:
  explicit MonotoneInverse(const GridFunction& g) {
    xs_.push_back(0.0);
    vs_.push_back(g(0.0));
    const auto& xs = g.xs();
    const auto& vs = g.values();
    for (std::size_t i = 0; i <= g.finite_hi(); ++i) {
      if (xs[i] <= 0.0) continue;
      xs_.push_back(xs[i]);
      vs_.push_back(vs[i]);
    }
    double edge = g.domain_hi();
    compact_ = std::isfinite(edge);
    edge_ = compact_ ? edge : xs_.back();
    slope_ = (!compact_ && g.finite_count() >= 2) ? g.right_slope() : 0.0;
    for (std::size_t i = 1; i < vs_.size(); ++i)
      vs_[i] = std::max(vs_[i], vs_[i - 1]);
  }

  double operator()(double y) const {
    if (vs_.front() >= y) return 0.0;
    auto it = std::lower_bound(vs_.begin(), vs_.end(), y);
    if (it != vs_.end()) {
      std::size_t i = static_cast<std::size_t>(it - vs_.begin());
      double slope = (vs_[i] - vs_[i - 1]) / (xs_[i] - xs_[i - 1]);
      return xs_[i - 1] + (y - vs_[i - 1]) / slope;
    }
    if (compact_) return edge_;
    if (slope_ > 0.0 && y < kInf)
      return xs_.back() + (y - vs_.back()) / slope_;
    throw LevelUnreachableError("level " + std::to_string(y) +
                                " unreachable on grid (widen the grid)");
  }

 private:
  std::vector<double> xs_, vs_;
  bool compact_ = false;
  double edge_ = 0.0;
  double slope_ = 0.0;
};

namespace detail {

// Crossing of the extension lines of f and g beyond one side of the merged
// span, if the lines cross there.
inline std::optional<double> extension_crossing(double x_edge, double fv,
                                                double fs, double gv, double gs,
                                                bool left_side) {
  if (fs == gs) return std::nullopt;
  // Lines through (x_edge, fv) slope fs and (x_edge, gv) slope gs.
  double x = x_edge + (gv - fv) / (fs - gs);
  if (left_side ? x < x_edge : x > x_edge) return x;
  return std::nullopt;
}

}  // namespace detail

// Pointwise maximum of two convex functions, with segment crossings inserted
// so the result is exact on the PL class.
inline GridFunction pointwise_max(const GridFunction& f, const GridFunction& g) {
  std::vector<double> xs;
  xs.reserve(f.size() + g.size() + 8);
  xs.insert(xs.end(), f.xs().begin(), f.xs().end());
  xs.insert(xs.end(), g.xs().begin(), g.xs().end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  const bool lin_left = f.left_extension() == Extension::kLinear &&
                        g.left_extension() == Extension::kLinear;
  const bool lin_right = f.right_extension() == Extension::kLinear &&
                         g.right_extension() == Extension::kLinear;
  if (lin_left) {
    double e = xs.front();
    auto cross = detail::extension_crossing(e, f(e), f.left_slope(), g(e),
                                            g.left_slope(), true);
    double anchor = cross ? *cross - 1.0 : e - 1.0;
    std::vector<double> pre{anchor};
    if (cross) pre.push_back(*cross);
    xs.insert(xs.begin(), pre.begin(), pre.end());
  }
  if (lin_right) {
    double e = xs.back();
    auto cross = detail::extension_crossing(e, f(e), f.right_slope(), g(e),
                                            g.right_slope(), false);
    if (cross) xs.push_back(*cross);
    xs.push_back((cross ? *cross : xs.back()) + 1.0);
  }

  // Insert interior crossings of f - g, skipping ones that collapse onto an
  // existing breakpoint (those would create pure-noise micro segments).
  std::vector<double> full;
  full.reserve(xs.size() * 2);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) {
      double p = xs[i - 1], q = xs[i];
      double dp = f(p) - g(p), dq = f(q) - g(q);
      if (std::isfinite(dp) && std::isfinite(dq) && dp * dq < 0.0) {
        double x = p + (q - p) * dp / (dp - dq);
        if (x - p > tol_at(p, 1e-12) && q - x > tol_at(q, 1e-12))
          full.push_back(x);
      }
    }
    full.push_back(xs[i]);
  }

  std::vector<double> vs(full.size());
  for (std::size_t i = 0; i < full.size(); ++i)
    vs[i] = std::max(f(full[i]), g(full[i]));
  return GridFunction(std::move(full), std::move(vs),
                      lin_left ? Extension::kLinear : Extension::kPlusInfinity,
                      lin_right ? Extension::kLinear : Extension::kPlusInfinity);
}

// x -> f(c*x) for c != 0.
inline GridFunction scale_arg(const GridFunction& f, double c) {
  require(c != 0.0 && std::isfinite(c), "scale_arg needs a finite nonzero factor");
  std::vector<double> xs(f.size()), vs(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    xs[i] = f.xs()[i] / c;
    vs[i] = f.values()[i];
  }
  Extension l = f.left_extension(), r = f.right_extension();
  if (c < 0.0) {
    std::reverse(xs.begin(), xs.end());
    std::reverse(vs.begin(), vs.end());
    std::swap(l, r);
  }
  return GridFunction(std::move(xs), std::move(vs), l, r);
}

// x -> c * f(x) for c > 0.
inline GridFunction scale_val(const GridFunction& f, double c) {
  require(c > 0.0 && std::isfinite(c), "scale_val needs a positive finite factor");
  std::vector<double> vs(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) vs[i] = c * f.values()[i];
  return GridFunction(f.xs(), std::move(vs), f.left_extension(),
                      f.right_extension());
}

inline bool even_part_check(const GridFunction& f, double tol = 1e-9) {
  for (double x : f.xs()) {
    double a = f(x), b = f(-x);
    if (a == kInf && b == kInf) continue;
    if (a == kInf || b == kInf) return false;
    if (std::fabs(a - b) > tol_at(std::max(std::fabs(a), std::fabs(b)), tol))
      return false;
  }
  return true;
}

}  // namespace infconv
