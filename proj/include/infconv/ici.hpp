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

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "infconv/convex_ops.hpp"
#include "infconv/distribution.hpp"
#include "infconv/extended.hpp"
#include "infconv/grid_function.hpp"
#include "infconv/parallel.hpp"

namespace infconv {

inline constexpr double kE = 2.718281828459045235360287471352662498;

// Multiplicative loss of the one-dimensional weak transport-entropy
// characterization used as a black-box reduction; not derivable here.
inline constexpr double kWeakTransportFactor = 210.0;

// Universal constants of the certification pipeline. Everything downstream of
// beta1 and b is assembled, not hard-coded: phi_inv_3 comes out of the built
// cost function via the generalized inverse.
struct IciConstants {
  double beta1 = 2.0 * kE;
  double b = 1.0;
  double phi_inv_3 = 0.0;   // generalized inverse of phi at 2 + b^2
  double b_tilde = 0.0;     // b / (210 * phi_inv_3)
  double beta = 0.0;        // 2 * beta1 / b_tilde
  double c_theorem = 4.0 * std::sqrt(2.0) * kE;
  double d_corollary = 6720.0 * std::sqrt(2.0) * kE * kE;
};

inline IciConstants assemble_constants(const GridFunction& phi) {
  IciConstants k;
  k.phi_inv_3 = generalized_inverse(phi, 2.0 + k.b * k.b);
  k.b_tilde = k.b / (kWeakTransportFactor * k.phi_inv_3);
  k.beta = 2.0 * k.beta1 / k.b_tilde;
  return k;
}

struct GridMeta {
  double lo = 0.0, hi = 0.0;
  std::size_t points = 0;
  std::size_t mandatory = 0;  // extra pinned points (atoms, plateau edges)
};

// Outcome of one grid certification: worst margin of RHS - LHS over the grid,
// its location, and the grid that was used.
struct CertificateReport {
  std::string condition;
  bool pass = false;
  double worst_margin = kInf;
  double worst_x = 0.0, worst_y = 0.0;
  GridMeta grid;
  double tolerance = 1e-7;
  std::string note;

  void finish(double tol) {
    tolerance = tol;
    pass = worst_margin >= -tol;
  }
};

// lambda with law(lambda * X) normalized to E X^2 = (2e)^{-2}.
inline double canonical_scale_factor(const Distribution& d) {
  double m2 = d.second_moment();
  require(m2 > 0, "cannot rescale an a.s. zero law");
  return 1.0 / (2.0 * kE * std::sqrt(m2));
}

inline bool is_canonical(const Distribution& d) {
  double target = 1.0 / (4.0 * kE * kE);
  return std::fabs(d.second_moment() - target) <= 1e-8 * target;
}

inline Distribution canonical_rescale(const Distribution& d,
                                      double* lambda_out = nullptr) {
  double lambda = canonical_scale_factor(d);
  if (lambda_out) *lambda_out = lambda;
  Distribution out(d.tail().scaled_arg(lambda), d.grid_spec());
  // Markov at 1/2 under the canonical normalization.
  require(out.tail()(0.5) >= 2.0 - 1e-7,
          "canonical rescale failed the tail floor at 1/2");
  return out;
}

// Certification works on the canonically rescaled law; a flat start of N is
// first lifted by a linear floor so N is strictly increasing on its finite
// part (the reduction the proof itself makes, at a fixed small eps).
struct PreparedLaw {
  Distribution canonical;
  double lambda = 1.0;
  bool regularized = false;
  double eps = 0.0;
};

inline PreparedLaw prepare_canonical(const TailFunction& tail, double eps = 1e-3,
                                     GridSpec spec = {}) {
  TailFunction t = tail;
  bool reg = false;
  if (!t.strictly_increasing()) {
    t = t.with_linear_floor(eps);
    reg = true;
  }
  Distribution raw(t, spec);
  double lambda = 0.0;
  Distribution canon = canonical_rescale(raw, &lambda);
  return PreparedLaw{std::move(canon), lambda, reg, reg ? eps : 0.0};
}

// Span of the certification grids in exponential coordinates that covers the
// configured quantile ceiling.
inline double nu_span(const GridSpec& spec) {
  return std::log(0.5 / spec.quantile_ceiling);
}

// Optimal cost function: quadratic-linear envelope maxed with the rescaled
// Cramer transform. Quadratic on [0,1] (enforced, failure means the scaling
// or the transform upstream is broken), hence its generalized inverse at 3
// is exactly 2.
inline GridFunction build_phi(const Distribution& d_canonical,
                              double x_max = 64.0) {
  require(is_canonical(d_canonical), "build_phi needs a canonically scaled law");
  const double beta1 = 2.0 * kE;
  x_max = std::max(x_max, 4.0);

  std::vector<double> xs;
  for (int i = -15000; i <= 15000; ++i) xs.push_back(i / 10000.0);
  for (double x = 1.5 * 1.02; x < x_max; x *= 1.02) xs.insert(xs.begin(), -x), xs.push_back(x);
  xs.insert(xs.begin(), -x_max);
  xs.push_back(x_max);

  auto quadratic_linear = [](double x) {
    double a = std::fabs(x);
    return a < 1.0 ? a * a : 2.0 * a - 1.0;
  };
  GridFunction base = GridFunction::sample(quadratic_linear, xs,
                                           Extension::kLinear, Extension::kLinear);
  GridFunction branch = scale_arg(d_canonical.cramer(), 1.0 / (2.0 * beta1));
  GridFunction phi = pointwise_max(base, branch);

  for (int i = 0; i <= 1000; ++i) {
    double x = i / 1000.0;
    double v = branch(x);
    require(v <= x * x + 1e-8,
            "cost function lost its quadratic core on [0,1]: scaling or "
            "transform is broken (x = " + std::to_string(x) + ")");
  }
  return phi;
}

// Growth lemma certificate: the rescaled Cramer transform sits below x^2 on
// [-1,1], and the mgf dominates cosh(t / beta1) wherever it is finite.
inline CertificateReport lemma_growth_check(const Distribution& d_canonical,
                                            std::size_t points = 2001,
                                            double tol = 1e-8) {
  require(is_canonical(d_canonical), "lemma check needs a canonical law");
  const double beta1 = 2.0 * kE;
  CertificateReport rep;
  rep.condition = "lemma31";
  rep.grid = {-1.0, 1.0, points, 0};

  const GridFunction& lam_star = d_canonical.cramer();
  for (double x : symmetric_grid(1.0, points)) {
    double margin = x * x - lam_star(x / beta1);
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_x = x;
      rep.worst_y = 0.0;
    }
  }

  // Engine inequality on a t-grid clipped inside the finite cumulant domain.
  double sigma = d_canonical.tail().asymptotic_slope();
  double t_hi = std::isfinite(sigma) ? 0.95 * sigma : 50.0;
  double mgf_worst = kInf;
  double mgf_at = 0.0;
  for (double t : symmetric_grid(t_hi, points)) {
    double lam = d_canonical.cumulant(t);
    if (lam == kInf) continue;
    double m = lam - log_cosh(t / beta1);
    if (m < mgf_worst) {
      mgf_worst = m;
      mgf_at = t;
    }
  }
  rep.note = "mgf_vs_cosh worst margin " + std::to_string(mgf_worst) + " at t = " +
             std::to_string(mgf_at);
  rep.worst_margin = std::min(rep.worst_margin, mgf_worst);
  rep.finish(tol);
  return rep;
}

// Monotone rearrangement pushing the symmetric exponential law onto d,
// evaluated through the tail exponent (no precision loss near quantile 1).
// At 0 the quantile convention puts the value on the negative side.
inline double transport_map(const Distribution& d, double x) {
  if (x > 0) return d.tail().right_level_inverse(x);
  return -d.tail().sup_level_inverse(-x);
}

// Pinned grid points in exponential coordinates where the transport map of a
// plateau law jumps.
inline std::vector<double> transport_jump_points(const Distribution& d,
                                                 double span) {
  std::vector<double> out;
  if (d.tail().kind() == TailFunction::Kind::kDyadic) {
    for (int k = 1; k < 62; ++k) {
      double level = std::ldexp(1.0, k);
      if (level >= span) break;
      double delta = 1e-6 * level;
      out.push_back(level - delta);
      out.push_back(level + delta);
      out.push_back(-level + delta);
      out.push_back(-level - delta);
    }
  }
  return out;
}

namespace detail {

inline std::vector<double> merged_grid(double span, std::size_t points,
                                       std::vector<double> mandatory) {
  std::vector<double> xs = symmetric_grid(span, points);
  for (double m : mandatory)
    if (m > -span && m < span) xs.push_back(m);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

struct PairWorst {
  double margin = kInf;
  double x = 0.0, y = 0.0;
  void take(double m, double a, double b) {
    if (m < margin) {
      margin = m;
      x = a;
      y = b;
    }
  }
  void merge(const PairWorst& o) {
    if (o.margin < margin) *this = o;
  }
};

}  // namespace detail

// Transport condition: |U(x) - U(y)| <= (1/b) phi^{-1}(1 + |x - y|) over all
// grid pairs in exponential coordinates.
inline CertificateReport certify_transport_condition(
    const Distribution& d_canonical, const GridFunction& phi, double b,
    double span, std::size_t points, int threads = 1, double tol = 1e-7) {
  auto xs = detail::merged_grid(span, points,
                                transport_jump_points(d_canonical, span));
  std::vector<double> u(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    u[i] = transport_map(d_canonical, xs[i]);

  MonotoneInverse inv(phi);
  const std::size_t n = xs.size();
  auto worsts = parallel_rows<detail::PairWorst>(
      n, threads, [&](std::size_t i, detail::PairWorst& w) {
        for (std::size_t j = i + 1; j < n; ++j) {
          double rhs = inv(1.0 + (xs[j] - xs[i])) / b;
          w.take(rhs - (u[j] - u[i]), xs[i], xs[j]);
        }
      });
  detail::PairWorst w;
  for (const auto& o : worsts) w.merge(o);

  CertificateReport rep;
  rep.condition = "v1";
  rep.grid = {-span, span, points, n - std::min(n, points)};
  rep.worst_margin = w.margin;
  rep.worst_x = w.x;
  rep.worst_y = w.y;
  rep.finish(tol);
  return rep;
}

// Tail-gap condition: phi(|x - y|) <= 1 + |N(|x|) sgn x - N(|y|) sgn y| over
// all grid pairs inside the transport range.
inline CertificateReport certify_tail_condition(const Distribution& d_canonical,
                                                const GridFunction& phi,
                                                double span, std::size_t points,
                                                int threads = 1,
                                                double tol = 1e-7) {
  const TailFunction& nfun = d_canonical.tail();
  // The transport range is the quantile span; for an endpoint atom the grid
  // edges land on the closed range edge +-a themselves.
  double a_span = std::min(span, d_canonical.abs_span());
  auto xs = detail::merged_grid(a_span, points, {});

  const std::size_t n = xs.size();
  std::vector<double> pot(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = nfun(std::fabs(xs[i]));
    pot[i] = xs[i] < 0 ? -v : v;
  }

  auto worsts = parallel_rows<detail::PairWorst>(
      n, threads, [&](std::size_t i, detail::PairWorst& w) {
        for (std::size_t j = i + 1; j < n; ++j) {
          double lhs = phi(xs[j] - xs[i]);
          double rhs = 1.0 + std::fabs(pot[j] - pot[i]);
          w.take(rhs - lhs, xs[i], xs[j]);
        }
      });
  detail::PairWorst w;
  for (const auto& o : worsts) w.merge(o);

  CertificateReport rep;
  rep.condition = "v2";
  rep.grid = {-a_span, a_span, points, n - std::min(n, points)};
  rep.worst_margin = w.margin;
  rep.worst_x = w.x;
  rep.worst_y = w.y;
  rep.finish(tol);
  return rep;
}

// Case-analysis certificate: locates the quadratic-linear / Cramer crossover
// x0, then certifies the Chernoff floor and the per-case tail inequalities
// that re-derive the tail-gap condition for convex N.
struct CaseAnalysisReport {
  double x0 = kInf;
  std::vector<CertificateReport> parts;
  bool pass = true;

  const CertificateReport* part(const std::string& name) const {
    for (const auto& p : parts)
      if (p.condition == name) return &p;
    return nullptr;
  }
};

inline CaseAnalysisReport certify_case_analysis(const Distribution& d_canonical,
                                                double span, std::size_t points,
                                                int threads = 1,
                                                double tol = 1e-7) {
  const TailFunction& nfun = d_canonical.tail();
  require(nfun.log_concave(), "case analysis needs a convex tail exponent");
  const double beta1 = 2.0 * kE;
  const GridFunction& lam_star = d_canonical.cramer();

  CaseAnalysisReport out;

  // Crossover of 2x - 1 with the rescaled Cramer branch on [1, inf).
  {
    auto h = [&](double x) { return lam_star(x / (2.0 * beta1)) - (2.0 * x - 1.0); };
    double lo = 1.0, hi = kInf;
    double prev = h(1.0);
    for (double x = 1.0; x <= 4.0 * span; x *= 1.01) {
      double v = h(x);
      if ((prev < 0) != (v < 0)) {
        lo = x / 1.01;
        hi = x;
        break;
      }
      prev = v;
    }
    if (std::isfinite(hi)) {
      while (hi - lo > 1e-10) {
        double m = 0.5 * (lo + hi);
        ((h(m) < 0) == (h(lo) < 0) ? lo : hi) = m;
      }
      out.x0 = 0.5 * (lo + hi);
    }
  }

  double a_span = std::min(span, d_canonical.abs_span());
  auto grid = detail::merged_grid(a_span, points, {});

  {
    CertificateReport rep;
    rep.condition = "chernoff";
    rep.grid = {0.0, a_span, points, 0};
    for (double t : grid) {
      if (t < 0) continue;
      double ls = lam_star(t);
      double margin = (ls == kInf) ? kInf : nfun(t) - (ls - std::log(2.0));
      if (margin < rep.worst_margin) {
        rep.worst_margin = margin;
        rep.worst_x = t;
      }
    }
    rep.finish(tol);
    out.parts.push_back(rep);
  }

  // Case 2: midpoint and split inequalities for s, t >= 0.
  {
    std::vector<double> pos;
    for (double t : grid)
      if (t >= 0) pos.push_back(t);
    const std::size_t n = pos.size();
    auto worsts = parallel_rows<std::array<detail::PairWorst, 2>>(
        n, threads, [&](std::size_t i, std::array<detail::PairWorst, 2>& w) {
          double s = pos[i], ns = nfun(s);
          for (std::size_t j = 0; j < n; ++j) {
            double t = pos[j], nt = nfun(t);
            double mid = nfun(0.5 * (s + t));
            if (mid < kInf || (ns < kInf && nt < kInf))
              w[0].take(ext_add(ns, nt) - mid, s, t);
            double whole = nfun(s + t);
            double split = ext_add(nfun(0.5 * s), nt);
            if (whole < kInf || split < kInf) w[1].take(whole - split, s, t);
          }
        });
    std::array<detail::PairWorst, 2> w;
    for (const auto& o : worsts) {
      w[0].merge(o[0]);
      w[1].merge(o[1]);
    }
    const char* names[2] = {"case2_midpoint", "case2_split"};
    for (int q = 0; q < 2; ++q) {
      CertificateReport rep;
      rep.condition = names[q];
      rep.grid = {0.0, a_span, points, 0};
      rep.worst_margin = w[q].margin == kInf ? kInf : w[q].margin;
      rep.worst_x = w[q].x;
      rep.worst_y = w[q].y;
      rep.finish(tol);
      out.parts.push_back(rep);
    }
  }

  // Case 3(i): N(x) >= 4x for x >= 1/2.
  {
    CertificateReport rep;
    rep.condition = "case3_growth";
    rep.grid = {0.5, a_span, points, 0};
    for (double x : grid) {
      if (x < 0.5) continue;
      double margin = nfun(x) - 4.0 * x;
      if (margin < rep.worst_margin) {
        rep.worst_margin = margin;
        rep.worst_x = x;
      }
    }
    rep.finish(tol);
    out.parts.push_back(rep);
  }

  // Case 3(ii): difference quotient >= 4 when x - y >= 1, x >= 1/2.
  {
    std::vector<double> pos;
    for (double t : grid)
      if (t >= 0) pos.push_back(t);
    const std::size_t n = pos.size();
    auto worsts = parallel_rows<detail::PairWorst>(
        n, threads, [&](std::size_t i, detail::PairWorst& w) {
          double x = pos[i], nx = nfun(x);
          if (x < 0.5 || nx == kInf) return;
          for (std::size_t j = 0; j < n; ++j) {
            if (pos[j] > x - 1.0) break;
            double slope = (nx - nfun(pos[j])) / (x - pos[j]);
            w.take(slope - 4.0, x, pos[j]);
          }
        });
    detail::PairWorst w;
    for (const auto& o : worsts) w.merge(o);
    CertificateReport rep;
    rep.condition = "case3_slope";
    rep.grid = {0.0, a_span, points, 0};
    rep.worst_margin = w.margin;
    rep.worst_x = w.x;
    rep.worst_y = w.y;
    rep.finish(tol);
    out.parts.push_back(rep);
  }

  for (const auto& p : out.parts) out.pass = out.pass && p.pass;
  return out;
}

// Monte Carlo estimate of E e^{f # Phi}(X) * E e^{-f(X)} for a product law
// with separable convex test function f = sum of per-coordinate pieces and
// Phi(x) = sum_i LamStar_i(x_i / beta). The two factors use independent
// sample blocks; chunked counter-based streams keep the result bit-identical
// for any thread count.
struct McIciResult {
  double product = 0.0;
  double ci_half = 0.0;  // one-sigma delta-method half width of the product
  double mean_pos = 0.0, mean_neg = 0.0;
  std::size_t n_samples = 0;
  std::string bound_kind = "exact";
};

inline void require_bounded_below(const GridFunction& f) {
  bool left_ok = f.left_extension() == Extension::kPlusInfinity ||
                 f.finite_lo() > 0 || f.left_slope() <= 0;
  bool right_ok = f.right_extension() == Extension::kPlusInfinity ||
                  f.finite_hi() + 1 < f.size() || f.right_slope() >= 0;
  require(left_ok && right_ok, "test function is unbounded below");
}

inline McIciResult mc_ici_test(const std::vector<const Distribution*>& coords,
                               double beta, const std::vector<GridFunction>& f,
                               std::size_t n_samples, std::uint64_t seed,
                               int threads = 1) {
  require(!coords.empty() && coords.size() == f.size(),
          "need one test-function piece per coordinate");
  const std::size_t dim = coords.size();

  // The product is invariant under constant shifts of f; anchoring each piece
  // at minimum zero keeps both exponentials in range. The cost is restricted
  // to a window around the sampling range, which also drops the far-out
  // Cramer vertices whose huge coordinates would degrade the conjugation.
  std::vector<GridFunction> fs;
  fs.reserve(dim);
  double window = 400.0;
  for (std::size_t i = 0; i < dim; ++i) {
    require_bounded_below(f[i]);
    double m = f[i].min_value();
    std::vector<double> vs(f[i].values());
    for (auto& v : vs)
      if (v < kInf) v -= m;
    fs.emplace_back(f[i].xs(), std::move(vs), f[i].left_extension(),
                    f[i].right_extension());
    window = std::max(window, 4.0 * std::max(std::fabs(f[i].xs().front()),
                                             std::fabs(f[i].xs().back())));
  }

  std::vector<GridFunction> h;
  h.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    GridFunction cost = resample(scale_arg(coords[i]->cramer(), 1.0 / beta),
                                 uniform_grid(-window, window, 4001));
    h.push_back(inf_convolution(fs[i], cost));
  }

  struct Acc {
    double sum = 0.0, sq = 0.0;
    void merge(const Acc& o) {
      sum += o.sum;
      sq += o.sq;
    }
  };
  auto run_block = [&](const std::vector<GridFunction>& parts, double sign,
                       std::uint64_t stream_base) {
    auto accs = parallel_chunks<Acc>(
        n_samples, threads, [&](std::size_t lo, std::size_t hi, Acc& a) {
          for (std::size_t s = lo; s < hi; ++s) {
            double e = 0.0;
            for (std::size_t c = 0; c < dim; ++c) {
              CounterRng rng(seed, stream_base + c);
              e += parts[c](coords[c]->sample_one(rng, s));
            }
            double v = std::exp(sign * e);
            a.sum += v;
            a.sq += v * v;
          }
        });
    Acc total;
    for (const auto& a : accs) total.merge(a);
    double mean = total.sum / static_cast<double>(n_samples);
    double var = std::max(0.0, total.sq / static_cast<double>(n_samples) - mean * mean);
    return std::pair<double, double>(mean, std::sqrt(var / static_cast<double>(n_samples)));
  };

  auto [mp, sp] = run_block(h, +1.0, 0);
  auto [mn, sn] = run_block(fs, -1.0, dim);

  McIciResult r;
  r.mean_pos = mp;
  r.mean_neg = mn;
  r.product = mp * mn;
  r.ci_half = std::sqrt(mn * mn * sp * sp + mp * mp * sn * sn);
  r.n_samples = n_samples;
  return r;
}

// Norm-cost variant: uses the conservative lower bound
// (f # Phi)(x) >= max(a ||x|| - p, 0), so it can certify compliance but never
// claim a violation.
template <typename NormFn>
inline McIciResult mc_ici_norm_test(const std::vector<const Distribution*>& coords,
                                    NormFn&& norm, double a, double p,
                                    std::size_t n_samples, std::uint64_t seed,
                                    int threads = 1) {
  const std::size_t dim = coords.size();
  struct Acc {
    double sum_pos = 0.0, sq_pos = 0.0, sum_neg = 0.0, sq_neg = 0.0;
    void merge(const Acc& o) {
      sum_pos += o.sum_pos;
      sq_pos += o.sq_pos;
      sum_neg += o.sum_neg;
      sq_neg += o.sq_neg;
    }
  };
  auto accs = parallel_chunks<Acc>(
      n_samples, threads, [&](std::size_t lo, std::size_t hi, Acc& acc) {
        std::vector<double> x(dim);
        for (std::size_t s = lo; s < hi; ++s) {
          for (std::size_t c = 0; c < dim; ++c) {
            CounterRng rng(seed, c);
            x[c] = coords[c]->sample_one(rng, s);
          }
          double nx = norm(x);
          double vp = std::exp(std::max(a * nx - p, 0.0));
          acc.sum_pos += vp;
          acc.sq_pos += vp * vp;
          for (std::size_t c = 0; c < dim; ++c) {
            CounterRng rng(seed, dim + c);
            x[c] = coords[c]->sample_one(rng, s);
          }
          double vn = std::exp(-a * norm(x));
          acc.sum_neg += vn;
          acc.sq_neg += vn * vn;
        }
      });
  Acc t;
  for (const auto& a_ : accs) t.merge(a_);
  double inv_n = 1.0 / static_cast<double>(n_samples);
  double mp = t.sum_pos * inv_n, mn = t.sum_neg * inv_n;
  double vp = std::max(0.0, t.sq_pos * inv_n - mp * mp) * inv_n;
  double vn = std::max(0.0, t.sq_neg * inv_n - mn * mn) * inv_n;
  McIciResult r;
  r.mean_pos = mp;
  r.mean_neg = mn;
  r.product = mp * mn;
  r.ci_half = std::sqrt(mn * mn * vp + mp * mp * vn);
  r.n_samples = n_samples;
  r.bound_kind = "norm-lower-bound";
  return r;
}

}  // namespace infconv
