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
#include <string>
#include <vector>

#include "infconv/extended.hpp"

namespace infconv {

struct Atom {
  double t;     // |X| value carrying the atom
  double mass;  // P(|X| = t)
};

// Tail exponent N(t) = -ln P(|X| >= t) of a symmetric law: N(0) = 0,
// non-decreasing, left-continuous. Supports four base shapes plus two
// modifiers: an argument scale (law of lambda*X) and regularization floors
// N v eps*t and N v (eps*t)^2. Jumps of N are atoms of |X| and are kept
// exact; the dyadic plateau law is the only non-log-concave shape.
class TailFunction {
 public:
  enum class Kind { kPiecewiseLinear, kPower, kFiniteSupport, kDyadic };

  // N(t) = c * t^r with c > 0, r >= 1.
  static TailFunction power(double c, double r) {
    require(c > 0 && std::isfinite(c), "power tail needs c > 0");
    require(r >= 1 && std::isfinite(r), "power tail needs r >= 1");
    TailFunction n;
    n.kind_ = Kind::kPower;
    n.c_ = c;
    n.r_ = r;
    return n;
  }

  static TailFunction exponential() { return power(1.0, 1.0); }

  // N = 0 on [0, a], +inf beyond: the whole mass sits in an atom at a.
  static TailFunction finite_support(double a) {
    require(a > 0 && std::isfinite(a), "finite support needs a > 0");
    TailFunction n;
    n.kind_ = Kind::kFiniteSupport;
    n.a_ = a;
    return n;
  }

  static TailFunction rademacher() { return finite_support(1.0); }

  // Piecewise-linear N through (ts, ns), linearly extended past the last
  // knot, jumping to +inf after `endpoint` when that is finite.
  static TailFunction piecewise_linear(std::vector<double> ts,
                                       std::vector<double> ns,
                                       double endpoint = kInf) {
    require(ts.size() >= 2 && ts.size() == ns.size(),
            "piecewise tail needs matching knot/value lists (>= 2 knots)");
    require(ts.front() == 0.0 && ns.front() == 0.0,
            "tail exponent must start at N(0) = 0");
    for (std::size_t i = 1; i < ts.size(); ++i) {
      require(ts[i] > ts[i - 1], "tail knots must be strictly increasing");
      require(std::isfinite(ns[i]) && ns[i] >= ns[i - 1],
              "tail exponent must be finite and non-decreasing");
    }
    require(endpoint >= ts.back(), "endpoint must not precede the last knot");
    TailFunction n;
    n.kind_ = Kind::kPiecewiseLinear;
    n.ts_ = std::move(ts);
    n.ns_ = std::move(ns);
    n.a_ = endpoint;
    return n;
  }

  // P(|X| > t) = 1 on [0,2) and e^{-2^k} on [2^k, 2^{k+1}); purely atomic at
  // the powers of two, 3-regular moments, not log-concave.
  static TailFunction dyadic_plateau() {
    TailFunction n;
    n.kind_ = Kind::kDyadic;
    return n;
  }

  TailFunction with_linear_floor(double eps) const {
    require(eps > 0 && std::isfinite(eps), "floor eps must be positive");
    TailFunction n = *this;
    n.lin_eps_ = std::max(n.lin_eps_, eps);
    return n;
  }

  TailFunction with_quadratic_floor(double eps) const {
    require(eps > 0 && std::isfinite(eps), "floor eps must be positive");
    TailFunction n = *this;
    n.quad_eps_ = std::max(n.quad_eps_, eps);
    return n;
  }

  // Tail of lambda * X: N'(t) = N(t / lambda); floors keep their meaning in
  // the new units.
  TailFunction scaled_arg(double lambda) const {
    require(lambda > 0 && std::isfinite(lambda), "scale must be positive");
    TailFunction n = *this;
    n.scale_ *= lambda;
    n.lin_eps_ /= lambda;
    n.quad_eps_ /= lambda;
    return n;
  }

  Kind kind() const { return kind_; }
  double floor_linear() const { return lin_eps_; }
  double floor_quadratic() const { return quad_eps_; }
  double arg_scale() const { return scale_; }

  double floors_at(double t) const {
    double v = 0.0;
    if (lin_eps_ > 0) v = lin_eps_ * t;
    if (quad_eps_ > 0) v = std::max(v, quad_eps_ * quad_eps_ * t * t);
    return v;
  }

  // N(t), left-continuous.
  double operator()(double t) const {
    if (t <= 0) return 0.0;
    return std::max(base_left(t / scale_), floors_at(t));
  }

  // Right-sided limit N(t+); differs from N(t) exactly at jumps.
  double right_limit(double t) const {
    if (t < 0) return 0.0;
    return std::max(base_right(t / scale_), floors_at(t));
  }

  double tail(double t) const { return std::exp(-(*this)(t)); }         // P(|X| >= t)
  double tail_strict(double t) const { return std::exp(-right_limit(t)); }  // P(|X| > t)

  // a = inf{t : N(t) = +inf}; +inf when N is finite everywhere.
  double endpoint() const {
    switch (kind_) {
      case Kind::kPower:
      case Kind::kDyadic:
        return kInf;
      default:
        return a_ * scale_;
    }
  }

  double endpoint_left_value() const {
    double a = endpoint();
    if (!std::isfinite(a)) return kInf;
    return std::max(base_left(a / scale_), floors_at(a));
  }

  bool has_atom_at_endpoint() const {
    double a = endpoint();
    return std::isfinite(a) && std::isfinite(endpoint_left_value());
  }

  bool log_concave() const {
    switch (kind_) {
      case Kind::kPower:
      case Kind::kFiniteSupport:
        return true;
      case Kind::kDyadic:
        return false;
      case Kind::kPiecewiseLinear: {
        double prev = 0.0;
        for (std::size_t i = 1; i < ts_.size(); ++i) {
          double s = (ns_[i] - ns_[i - 1]) / (ts_[i] - ts_[i - 1]);
          if (s < prev - 1e-12) return false;
          prev = s;
        }
        return true;
      }
    }
    return false;
  }

  // Strictly increasing on the finite part of (0, a]?
  bool strictly_increasing() const {
    bool floored = lin_eps_ > 0 || quad_eps_ > 0;
    switch (kind_) {
      case Kind::kPower:
        return true;
      case Kind::kFiniteSupport:
        return floored;
      case Kind::kDyadic:
        return false;  // plateaus dominate any reasonable floor
      case Kind::kPiecewiseLinear: {
        if (floored) return true;
        for (std::size_t i = 1; i < ts_.size(); ++i)
          if (ns_[i] <= ns_[i - 1]) return false;
        return true;
      }
    }
    return false;
  }

  // liminf of N(t)/t for t -> inf; the cumulant generating function is finite
  // exactly on |s| strictly below this (the equality case diverges).
  double asymptotic_slope() const {
    double s;
    switch (kind_) {
      case Kind::kPower:
        s = (r_ > 1.0) ? kInf : c_;
        break;
      case Kind::kFiniteSupport:
        s = kInf;
        break;
      case Kind::kDyadic:
        s = 0.5;
        break;
      case Kind::kPiecewiseLinear:
      default:
        if (std::isfinite(a_)) {
          s = kInf;
        } else {
          s = (ns_.back() - ns_[ns_.size() - 2]) /
              (ts_.back() - ts_[ts_.size() - 2]);
        }
        break;
    }
    if (std::isfinite(s)) s /= scale_;
    if (quad_eps_ > 0) return kInf;
    if (lin_eps_ > 0) s = std::max(s, lin_eps_);
    return s;
  }

  // sup{ t >= 0 : N(t) <= y }.
  double sup_level_inverse(double y) const {
    require(is_extended(y) && y >= 0, "level must be >= 0");
    if (y == kInf) return kInf;
    double t = scale_ * base_sup_inverse(y);
    if (lin_eps_ > 0) t = std::min(t, y / lin_eps_);
    if (quad_eps_ > 0) t = std::min(t, std::sqrt(y) / quad_eps_);
    return t;
  }

  // inf{ t >= 0 : N(t+) >= y }.
  double right_level_inverse(double y) const {
    require(is_extended(y) && y >= 0, "level must be >= 0");
    if (y == 0) return 0.0;
    double t = scale_ * base_right_inverse(y);
    if (lin_eps_ > 0 && y < kInf) t = std::min(t, y / lin_eps_);
    if (quad_eps_ > 0 && y < kInf) t = std::min(t, std::sqrt(y) / quad_eps_);
    return t;
  }

  // Jump points of N (atoms of |X|) with their masses; zero-mass jumps that a
  // floor has swallowed are dropped. Masses below ~1e-320 vanish in double
  // precision, which truncates the dyadic list at a dozen atoms.
  std::vector<Atom> atoms() const {
    std::vector<Atom> out;
    auto push = [&](double t_base) {
      double t = t_base * scale_;
      double nl = std::max(base_left(t_base), floors_at(t));
      double nr = std::max(base_right(t_base), floors_at(t));
      double mass = std::exp(-nl) - std::exp(-nr);
      if (mass > 0) out.push_back({t, mass});
    };
    switch (kind_) {
      case Kind::kPower:
        break;
      case Kind::kFiniteSupport:
        push(a_);
        break;
      case Kind::kPiecewiseLinear:
        if (std::isfinite(a_)) push(a_);
        break;
      case Kind::kDyadic:
        for (int k = 1; k < 64; ++k) {
          double t = std::ldexp(1.0, k);
          push(t);
          if (std::exp(-(*this)(t * scale_)) == 0.0) break;
        }
        break;
    }
    return out;
  }

  // Points in (0, t_max) where the integrand of a tail integral loses
  // smoothness: representation kinks, jumps, and floor crossings.
  std::vector<double> integration_knots(double t_max) const {
    std::vector<double> ks;
    switch (kind_) {
      case Kind::kPower:
        break;
      case Kind::kFiniteSupport:
        ks.push_back(a_ * scale_);
        break;
      case Kind::kPiecewiseLinear:
        for (double t : ts_) ks.push_back(t * scale_);
        if (std::isfinite(a_)) ks.push_back(a_ * scale_);
        break;
      case Kind::kDyadic:
        for (int k = 1; k < 64; ++k) {
          double t = std::ldexp(1.0, k) * scale_;
          if (t >= t_max) break;
          ks.push_back(t);
        }
        break;
    }
    if (lin_eps_ > 0 || quad_eps_ > 0) {
      // Probe for floor/base switch-overs and bisect each sign change.
      auto diff = [&](double t) {
        double b = base_left(t / scale_);
        if (b == kInf) return kInf;
        return b - floors_at(t);
      };
      double lo = t_max * 1e-9;
      std::vector<double> probes;
      for (double t = lo; t < t_max; t *= 1.35) probes.push_back(t);
      for (std::size_t i = 1; i < probes.size(); ++i) {
        double p = probes[i - 1], q = probes[i];
        double dp = diff(p), dq = diff(q);
        if (dp == kInf || dq == kInf) break;
        if ((dp < 0) != (dq < 0)) {
          for (int it = 0; it < 80; ++it) {
            double m = 0.5 * (p + q);
            ((diff(m) < 0) == (dp < 0) ? p : q) = m;
          }
          ks.push_back(0.5 * (p + q));
        }
      }
    }
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    std::vector<double> out;
    for (double k : ks)
      if (k > 0 && k < t_max) out.push_back(k);
    return out;
  }

  std::string describe() const {
    std::string s;
    switch (kind_) {
      case Kind::kPower:
        s = "power(c=" + std::to_string(c_) + ",r=" + std::to_string(r_) + ")";
        break;
      case Kind::kFiniteSupport:
        s = "finite_support(a=" + std::to_string(a_) + ")";
        break;
      case Kind::kPiecewiseLinear:
        s = "piecewise_linear(" + std::to_string(ts_.size()) + " knots)";
        break;
      case Kind::kDyadic:
        s = "dyadic";
        break;
    }
    if (scale_ != 1.0) s += " scaled(" + std::to_string(scale_) + ")";
    if (lin_eps_ > 0) s += " lin_floor(" + std::to_string(lin_eps_) + ")";
    if (quad_eps_ > 0) s += " quad_floor(" + std::to_string(quad_eps_) + ")";
    return s;
  }

 private:
  TailFunction() = default;

  // Left-continuous base value at u (base units, scale removed).
  double base_left(double u) const {
    switch (kind_) {
      case Kind::kPower:
        return c_ * std::pow(u, r_);
      case Kind::kFiniteSupport:
        return u <= a_ ? 0.0 : kInf;
      case Kind::kDyadic: {
        if (u <= 2.0) return 0.0;
        double p = 2.0;  // N = 2^k on (2^k, 2^{k+1}]
        while (2.0 * p < u) p *= 2.0;
        return p;
      }
      case Kind::kPiecewiseLinear:
      default: {
        if (u > a_) return kInf;
        if (u <= ts_.back()) {
          auto it = std::lower_bound(ts_.begin(), ts_.end(), u);
          std::size_t i = static_cast<std::size_t>(it - ts_.begin());
          if (ts_[i] == u) return ns_[i];
          double w = (u - ts_[i - 1]) / (ts_[i] - ts_[i - 1]);
          return ns_[i - 1] + w * (ns_[i] - ns_[i - 1]);
        }
        double slope = (ns_.back() - ns_[ns_.size() - 2]) /
                       (ts_.back() - ts_[ts_.size() - 2]);
        return ns_.back() + slope * (u - ts_.back());
      }
    }
  }

  double base_right(double u) const {
    switch (kind_) {
      case Kind::kPower:
        return c_ * std::pow(u, r_);
      case Kind::kFiniteSupport:
        return u < a_ ? 0.0 : kInf;
      case Kind::kDyadic: {
        if (u < 2.0) return 0.0;
        double p = 2.0;  // N+ = 2^k on [2^k, 2^{k+1})
        while (2.0 * p <= u) p *= 2.0;
        return p;
      }
      case Kind::kPiecewiseLinear:
      default:
        if (u >= a_) return kInf;
        return base_left(u);
    }
  }

  double base_sup_inverse(double y) const {
    switch (kind_) {
      case Kind::kPower:
        return std::pow(y / c_, 1.0 / r_);
      case Kind::kFiniteSupport:
        return a_;
      case Kind::kDyadic: {
        if (y < 2.0) return 2.0;
        double p = 2.0;
        while (2.0 * p <= y) p *= 2.0;
        return 2.0 * p;  // N <= y up to the end of the last admissible plateau
      }
      case Kind::kPiecewiseLinear:
      default: {
        if (y >= ns_.back()) {
          double slope = (ns_.back() - ns_[ns_.size() - 2]) /
                         (ts_.back() - ts_[ts_.size() - 2]);
          if (slope <= 0) return a_;
          return std::min(a_, ts_.back() + (y - ns_.back()) / slope);
        }
        std::size_t i = 1;
        while (ns_[i] <= y) ++i;
        double slope = (ns_[i] - ns_[i - 1]) / (ts_[i] - ts_[i - 1]);
        return ts_[i - 1] + (y - ns_[i - 1]) / slope;
      }
    }
  }

  double base_right_inverse(double y) const {
    switch (kind_) {
      case Kind::kPower:
        return y == kInf ? kInf : std::pow(y / c_, 1.0 / r_);
      case Kind::kFiniteSupport:
        return a_;
      case Kind::kDyadic: {
        if (y == kInf) return kInf;
        double p = 2.0;
        while (p < y) p *= 2.0;
        return p;  // first plateau whose level reaches y
      }
      case Kind::kPiecewiseLinear:
      default: {
        if (y > ns_.back()) {
          double slope = (ns_.back() - ns_[ns_.size() - 2]) /
                         (ts_.back() - ts_[ts_.size() - 2]);
          if (slope <= 0 || y == kInf) return a_;
          return std::min(a_, ts_.back() + (y - ns_.back()) / slope);
        }
        std::size_t i = 0;
        while (ns_[i] < y) ++i;
        if (ns_[i] == y || i == 0) return ts_[i];
        double slope = (ns_[i] - ns_[i - 1]) / (ts_[i] - ts_[i - 1]);
        return ts_[i - 1] + (y - ns_[i - 1]) / slope;
      }
    }
  }

  Kind kind_ = Kind::kPower;
  double c_ = 1.0, r_ = 1.0;           // power parameters
  double a_ = kInf;                    // endpoint (finite support / pw cutoff)
  std::vector<double> ts_, ns_;        // piecewise-linear knots
  double scale_ = 1.0;                 // law of scale_ * X
  double lin_eps_ = 0.0, quad_eps_ = 0.0;
};

}  // namespace infconv
