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
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "infconv/convex_ops.hpp"
#include "infconv/extended.hpp"
#include "infconv/grid_function.hpp"
#include "infconv/rng.hpp"
#include "infconv/tail_function.hpp"

namespace infconv {

inline double log_cosh(double z) {
  z = std::fabs(z);
  return z + std::log1p(std::exp(-2.0 * z)) - std::log(2.0);
}

inline double logsumexp(const std::vector<double>& ls) {
  double m = -kInf;
  for (double l : ls) m = std::max(m, l);
  if (m == -kInf) return -kInf;
  double s = 0.0;
  for (double l : ls) s += std::exp(l - m);
  return m + std::log(s);
}

// Adaptive Gauss-Kronrod over [a, b] split at the supplied interior knots.
inline double integrate_piecewise(const std::function<double(double)>& f,
                                  double a, double b,
                                  const std::vector<double>& knots,
                                  double rel_tol = 1e-12) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  std::vector<double> cuts{a};
  for (double k : knots)
    if (k > a && k < b) cuts.push_back(k);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    if (cuts[i] <= cuts[i - 1]) continue;
    double err = 0.0;
    total += GK::integrate(f, cuts[i - 1], cuts[i], 14, rel_tol, &err);
  }
  return total;
}

struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Grid-building knobs for the cached cumulant / Cramer transforms. The spans
// and densities are engineering choices (reported by every certificate), not
// quantities the underlying bounds pin down.
struct GridSpec {
  std::size_t cumulant_points = 2001;  // core grid resolution
  std::size_t edge_refinement = 14;    // extra points approaching a finite domain edge
  double quantile_ceiling = 1e-12;     // spans cover |X| up to quantile 1 - this
  double slope_span = 0.0;             // Cramer span needed; 0 = auto
};

// A symmetric law defined by its tail exponent. Immutable after construction:
// the cumulant grid, its conjugate and the second moment are built once, so
// values can be shared freely across threads.
class Distribution {
 public:
  explicit Distribution(TailFunction tail, GridSpec spec = {})
      : tail_(std::move(tail)), spec_(spec) {
    require(tail_(0.0) == 0.0, "tail exponent must vanish at 0");
    require(tail_.asymptotic_slope() > 0 || std::isfinite(tail_.endpoint()),
            "defective tail: N must grow or hit a finite endpoint");
    second_moment_ = abs_moment(2.0);
    build_cumulant_grid();
    cramer_ = conjugate(cumulant_grid_);
  }

  const TailFunction& tail() const { return tail_; }
  const GridSpec& grid_spec() const { return spec_; }
  double second_moment() const { return second_moment_; }

  // |X| value at the configured quantile ceiling.
  double abs_span() const {
    return tail_.right_level_inverse(std::log(0.5 / spec_.quantile_ceiling));
  }

  // E|X|^p via exact atom series (purely atomic laws) or the tail-moment
  // integral E|X|^p = int p t^{p-1} P(|X| >= t) dt; relative error <= 1e-8.
  // For p < 2 the substitution u = t^p removes the t^{p-1} singularity.
  double abs_moment(double p) const {
    require(p > 0 && std::isfinite(p), "moment order must be positive");
    if (purely_atomic()) return std::exp(log_abs_moment_atomic(p));

    double t_trunc = truncation_point([&](double t) {
      return tail_(t) - p * std::log(std::max(t, 2.0));
    });
    auto knots = tail_.integration_knots(t_trunc);
    if (p < 2.0) {
      auto integrand = [&](double u) {
        return u <= 0 ? 1.0 : std::exp(-tail_(std::pow(u, 1.0 / p)));
      };
      for (auto& k : knots) k = std::pow(k, p);
      return integrate_piecewise(integrand, 0.0, std::pow(t_trunc, p), knots);
    }
    auto integrand = [&](double t) {
      if (t <= 0) return 0.0;
      double e = (p - 1.0) * std::log(t) - tail_(t);
      if (e > 690.0)
        throw TruncationError("moment integrand overflows at t = " +
                              std::to_string(t));
      return p * std::exp(e);
    };
    return integrate_piecewise(integrand, 0.0, t_trunc,
                               tail_.integration_knots(t_trunc));
  }

  double cdf(double t) const {
    if (t < 0) return 0.5 * std::exp(-tail_(-t));
    return 1.0 - 0.5 * std::exp(-tail_.right_limit(t));
  }

  // Generalized inverse of the CDF; exact for the representation, including
  // atoms, so samplers built on a shared uniform source realize the
  // monotone couplings of the tail order precisely.
  double quantile(double u) const {
    require(u > 0 && u < 1, "quantile level must lie in (0, 1)");
    if (u <= 0.5) return -tail_.sup_level_inverse(std::log(0.5 / u));
    return tail_.right_level_inverse(std::log(0.5 / (1.0 - u)));
  }

  double sample_one(const CounterRng& rng, std::uint64_t i) const {
    return quantile(rng.uniform(i));
  }

  std::vector<double> sample(std::uint64_t seed, std::size_t n,
                             std::uint64_t stream = 0) const {
    CounterRng rng(seed, stream);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = sample_one(rng, i);
    return out;
  }

  // Cumulant generating function at a point; +inf where the exponential
  // moment diverges (including the borderline slope itself).
  double cumulant(double s) const {
    s = std::fabs(s);
    if (s == 0.0) return 0.0;
    if (s >= tail_.asymptotic_slope()) return kInf;
    if (purely_atomic()) {
      std::vector<double> ls;
      for (const auto& [t, lm] : log_atoms()) ls.push_back(lm + log_cosh(s * t));
      return logsumexp(ls);
    }
    // E cosh(sX) = 1 + int_0^inf s sinh(st) P(|X| >= t) dt, integrated with
    // the log-peak shifted out so large s cannot overflow the integrand.
    double t_trunc = truncation_point([&](double t) { return tail_(t) - s * t; });
    auto knots = tail_.integration_knots(t_trunc);
    auto log_peak = [&](double t) { return s * t - tail_(t); };
    double shift = 0.0;
    for (double k : knots) shift = std::max(shift, log_peak(k));
    for (int i = 0; i <= 512; ++i) {
      double v = log_peak(t_trunc * i / 512.0);
      if (std::isfinite(v)) shift = std::max(shift, v);
    }
    auto integrand = [&](double t) {
      double n = tail_(t);
      return 0.5 * s *
             (std::exp(s * t - n - shift) - std::exp(-s * t - n - shift));
    };
    double integral = integrate_piecewise(integrand, 0.0, t_trunc, knots);
    return shift + std::log(std::exp(-shift) + integral);
  }

  const GridFunction& cumulant_grid() const { return cumulant_grid_; }
  const GridFunction& cramer() const { return cramer_; }

  GridFunction cumulant_on(std::vector<double> s_breakpoints) const {
    std::vector<double> vs(s_breakpoints.size());
    for (std::size_t i = 0; i < s_breakpoints.size(); ++i)
      vs[i] = cumulant(s_breakpoints[i]);
    return GridFunction(std::move(s_breakpoints), std::move(vs));
  }

  GridFunction cramer_on(std::vector<double> x_breakpoints) const {
    return resample(cramer_, std::move(x_breakpoints));
  }

  // Largest observed (q/p) ||X||_p / ||X||_q over a geometric grid of 64
  // orders in [2, p_max]; a lower bound on the true regularity constant.
  double regularity_alpha(double p_max) const {
    require(p_max >= 2, "regularity scan needs p_max >= 2");
    const std::size_t m = 64;
    std::vector<double> ps(m), norms(m);
    for (std::size_t i = 0; i < m; ++i) {
      ps[i] = 2.0 * std::pow(p_max / 2.0, static_cast<double>(i) / (m - 1));
      norms[i] = std::pow(abs_moment(ps[i]), 1.0 / ps[i]);
    }
    double alpha = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i = 0; i <= j; ++i)
        alpha = std::max(alpha, (ps[i] / ps[j]) * norms[j] / norms[i]);
    return alpha;
  }

  bool purely_atomic() const {
    using K = TailFunction::Kind;
    return (tail_.kind() == K::kFiniteSupport || tail_.kind() == K::kDyadic) &&
           tail_.floor_linear() == 0 && tail_.floor_quadratic() == 0;
  }

  // (t, ln mass) pairs, analytic beyond double-precision mass underflow.
  std::vector<std::pair<double, double>> log_atoms() const {
    std::vector<std::pair<double, double>> out;
    using K = TailFunction::Kind;
    if (tail_.kind() == K::kFiniteSupport) {
      out.emplace_back(tail_.endpoint(), -tail_.endpoint_left_value());
      return out;
    }
    // Dyadic: mass at 2^k is e^{-2^{k-1}} - e^{-2^k} (k >= 2), 1 - e^{-2} at 2.
    double lam = tail_.arg_scale();
    out.emplace_back(2.0 * lam, std::log(-std::expm1(-2.0)));
    for (int k = 2; k < 80; ++k) {
      double half = std::ldexp(1.0, k - 1);
      double lm = -half + std::log1p(-std::exp(-half));
      out.emplace_back(std::ldexp(1.0, k) * lam, lm);
      if (lm < -1e6) break;
    }
    return out;
  }

  double log_abs_moment_atomic(double p) const {
    std::vector<double> ls;
    for (const auto& [t, lm] : log_atoms()) ls.push_back(lm + p * std::log(t));
    return logsumexp(ls);
  }

 private:
  // Doubling search for a truncation point where the decay functional clears
  // 60 e-folds; failure to find one is reported, not silently clipped.
  double truncation_point(const std::function<double(double)>& decay) const {
    double t = std::max(1.0, tail_.arg_scale());
    double edge = tail_.endpoint();
    if (std::isfinite(edge)) return edge;
    for (int i = 0; i < 80; ++i) {
      if (decay(t) > 60.0) return t;
      t *= 2.0;
    }
    throw TruncationError("tail integral does not decay; truncation failed at t = " +
                          std::to_string(t));
  }

  void build_cumulant_grid() {
    double sigma = tail_.asymptotic_slope();
    std::vector<double> pos;  // s > 0 half; mirrored afterwards
    std::size_t half = spec_.cumulant_points / 2;

    if (std::isfinite(sigma)) {
      for (std::size_t i = 1; i <= half; ++i)
        pos.push_back(0.95 * sigma * static_cast<double>(i) / half);
      for (std::size_t j = 1; j <= spec_.edge_refinement; ++j)
        pos.push_back(sigma * (1.0 - std::pow(10.0, -static_cast<double>(j))));
      pos.push_back(sigma);  // carries the +inf value at the domain edge
    } else {
      double span = pick_unbounded_span();
      for (std::size_t i = 1; i <= half; ++i)
        pos.push_back(span * static_cast<double>(i) / half);
    }
    std::sort(pos.begin(), pos.end());
    pos.erase(std::unique(pos.begin(), pos.end()), pos.end());

    std::vector<double> ss;
    ss.reserve(2 * pos.size() + 3);
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) ss.push_back(-*it);
    ss.push_back(0.0);
    ss.insert(ss.end(), pos.begin(), pos.end());

    std::vector<double> vs(ss.size());
    for (std::size_t i = 0; i < ss.size(); ++i) vs[i] = cumulant(ss[i]);

    // An atom at the domain endpoint gives the cumulant an exact linear
    // asymptote s*a + ln(mass/2); anchoring the grid on that asymptote makes
    // the conjugate exact at the edge of its effective domain.
    if (tail_.has_atom_at_endpoint() && !std::isfinite(sigma)) {
      double a = tail_.endpoint();
      double log_half_mass = -tail_.endpoint_left_value() - std::log(2.0);
      double s_last = ss.back();
      double gap = vs.back() - (s_last * a + log_half_mass);
      double slope_last =
          (vs[vs.size() - 1] - vs[vs.size() - 2]) / (ss.back() - ss[ss.size() - 2]);
      double room = std::max(a - slope_last, 1e-9);
      double anchor = s_last + gap / room + 10.0 / std::max(a, 1e-9);
      for (double sa : {anchor, anchor * 1.25}) {
        double va = sa * a + log_half_mass;
        ss.push_back(sa);
        vs.push_back(va);
        ss.insert(ss.begin(), -sa);
        vs.insert(vs.begin(), va);
      }
    }

    Extension ext = std::isfinite(sigma) ? Extension::kPlusInfinity : Extension::kLinear;
    cumulant_grid_ = GridFunction(std::move(ss), std::move(vs), ext, ext);
  }

  // For laws with all exponential moments: grow the span until the cumulant's
  // edge slope covers the Cramer span we need.
  double pick_unbounded_span() const {
    double need = spec_.slope_span > 0 ? spec_.slope_span : 2.2 * abs_span() + 4.0;
    double s = 1.0;
    for (int i = 0; i < 60; ++i) {
      double h = s * 1e-3;
      double slope = (cumulant(s) - cumulant(s - h)) / h;
      if (slope >= need) return s;
      if (tail_.has_atom_at_endpoint() && slope >= 0.95 * tail_.endpoint())
        return s;  // slope saturates below the endpoint; the anchor takes over
      s *= 2.0;
    }
    throw TruncationError("could not reach the requested cumulant slope span");
  }

  TailFunction tail_;
  GridSpec spec_;
  double second_moment_ = 0.0;
  GridFunction cumulant_grid_;
  GridFunction cramer_;
};

}  // namespace infconv
