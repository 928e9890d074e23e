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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "infconv/ici.hpp"
#include "oracles.hpp"

using namespace infconv;

namespace {

PreparedLaw canonical_exponential() {
  return prepare_canonical(TailFunction::exponential());
}

double exp_cdf(double x) {
  return x < 0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
}

}  // namespace

TEST_CASE("canonical rescale") {
  Distribution expo(TailFunction::exponential());
  double lambda = 0.0;
  Distribution canon = canonical_rescale(expo, &lambda);
  CHECK(lambda == Catch::Approx(1.0 / (2.0 * kE * std::sqrt(2.0))).epsilon(1e-10));
  CHECK(std::fabs(canon.second_moment() - 1.0 / (4.0 * kE * kE)) < 1e-10);
  CHECK(canon.tail()(0.5) >= 2.0);

  Distribution rad(TailFunction::rademacher());
  double lr = 0.0;
  Distribution canon_rad = canonical_rescale(rad, &lr);
  CHECK(lr == Catch::Approx(1.0 / (2.0 * kE)).epsilon(1e-12));
  CHECK(canon_rad.tail()(0.5) == kInf);
}

TEST_CASE("cost function structure") {
  for (const auto& tail :
       {TailFunction::exponential(), TailFunction::rademacher(),
        TailFunction::power(1.0, 2.0), TailFunction::power(1.0, 1.5)}) {
    PreparedLaw prep = prepare_canonical(tail);
    GridFunction phi = build_phi(prep.canonical);
    CHECK(phi(0.0) == 0.0);
    CHECK(even_part_check(phi, 1e-8));
    CHECK(phi.is_convex());
    // Quadratic core.
    for (double x = 0.0; x <= 1.0; x += 0.0103)
      CHECK(std::fabs(phi(x) - x * x) <= 1e-8);
    // Non-decreasing on [0, inf).
    double prev = -1.0;
    for (double x = 0.0; x <= 8.0; x += 0.05) {
      double v = phi(x);
      if (v == kInf) break;
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
    CHECK(std::fabs(generalized_inverse(phi, 3.0) - 2.0) < 1e-6);
  }
}

TEST_CASE("cost function of the two-point law") {
  PreparedLaw prep = prepare_canonical(TailFunction::rademacher());
  GridFunction phi = build_phi(prep.canonical);
  CHECK(phi(2.0) == Catch::Approx(3.0).margin(1e-9));
  // The Cramer branch explodes past 2, so the cost is +inf there.
  CHECK(phi(2.1) == kInf);
}

TEST_CASE("cost function is the max of its branches, recomputed directly") {
  PreparedLaw prep = canonical_exponential();
  GridFunction phi = build_phi(prep.canonical);
  const GridFunction& star = prep.canonical.cramer();
  for (double x = -6.0; x <= 6.0; x += 0.0371) {
    double ql = std::fabs(x) < 1 ? x * x : 2 * std::fabs(x) - 1;
    double want = std::max(ql, star(x / (4.0 * kE)));
    CHECK(std::fabs(phi(x) - want) < 1e-7);
  }
}

TEST_CASE("assembled constants") {
  for (const auto& tail :
       {TailFunction::exponential(), TailFunction::rademacher(),
        TailFunction::power(1.0, 2.0), TailFunction::power(1.0, 1.5)}) {
    PreparedLaw prep = prepare_canonical(tail);
    GridFunction phi = build_phi(prep.canonical);
    IciConstants k = assemble_constants(phi);
    CHECK(std::fabs(k.b_tilde - 1.0 / 420.0) <= 1e-12);
    CHECK(std::fabs(k.beta - 1680.0 * kE) <= 1e-9);
    CHECK(k.c_theorem == Catch::Approx(4.0 * std::sqrt(2.0) * kE));
    CHECK(k.d_corollary < 70223.0);
  }
}

TEST_CASE("growth lemma certificate") {
  for (const auto& tail :
       {TailFunction::exponential(), TailFunction::rademacher(),
        TailFunction::power(1.0, 2.0), TailFunction::power(1.0, 1.5)}) {
    PreparedLaw prep = prepare_canonical(tail);
    CertificateReport rep = lemma_growth_check(prep.canonical);
    INFO(tail.describe() << " margin " << rep.worst_margin);
    CHECK(rep.pass);
  }
  // Equality pattern at x = 0 for the two-point law.
  PreparedLaw rad = prepare_canonical(TailFunction::rademacher());
  const GridFunction& star = rad.canonical.cramer();
  CHECK(std::fabs(star(0.0)) < 1e-10);
}

TEST_CASE("transport map") {
  // Exponential onto exponential is the identity.
  Distribution raw(TailFunction::exponential());
  for (double x = -20.0; x <= 20.0; x += 0.5)
    CHECK(transport_map(raw, x) == Catch::Approx(x).margin(1e-12));

  // Two-atom law: direct composition of quantile and exponential CDF.
  Distribution rad(TailFunction::rademacher());
  for (double x : {-5.0, -0.3, 0.0}) CHECK(transport_map(rad, x) == -1.0);
  for (double x : {0.2, 1.0, 7.0}) CHECK(transport_map(rad, x) == 1.0);
  for (double x = -8.0; x <= 8.0; x += 0.37)
    CHECK(transport_map(rad, x) == rad.quantile(exp_cdf(x)));

  // Quadratic tail: U(x) = sgn(x) sqrt(|x|).
  Distribution gauss(TailFunction::power(1.0, 2.0));
  for (double x = -9.0; x <= 9.0; x += 0.41) {
    double want = (x < 0 ? -1 : 1) * std::sqrt(std::fabs(x));
    CHECK(transport_map(gauss, x) == Catch::Approx(want).margin(1e-12));
    CHECK(transport_map(gauss, x) ==
          Catch::Approx(gauss.quantile(exp_cdf(x))).margin(1e-9));
  }

  // Inverse identity N(|U(x)|) sgn = x on the continuous laws.
  for (double x = -15.0; x <= 15.0; x += 0.7) {
    double u = transport_map(raw, x);
    double back = raw.tail()(std::fabs(u)) * (u < 0 ? -1 : 1);
    CHECK(back == Catch::Approx(x).margin(1e-9));
  }
}

TEST_CASE("transport condition passes for log-concave laws with b = 1") {
  for (const auto& tail :
       {TailFunction::exponential(), TailFunction::rademacher(),
        TailFunction::power(1.0, 2.0)}) {
    PreparedLaw prep = prepare_canonical(tail);
    double span = nu_span(prep.canonical.grid_spec());
    GridFunction phi = build_phi(prep.canonical, span + 4.0);
    CertificateReport rep =
        certify_transport_condition(prep.canonical, phi, 1.0, span, 401);
    INFO(tail.describe() << " margin " << rep.worst_margin);
    CHECK(rep.pass);
  }
}

TEST_CASE("transport condition fails for the plateau law at a plateau edge") {
  PreparedLaw prep = prepare_canonical(TailFunction::dyadic_plateau());
  double span = 4500.0;
  GridFunction phi = build_phi(prep.canonical, (2.0 * span + 2.0) / 2.0 + 4.0);
  CertificateReport rep =
      certify_transport_condition(prep.canonical, phi, 1.0, span, 801);
  CHECK_FALSE(rep.pass);
  CHECK(rep.worst_margin < -1.0);
  // Worst violation sits at a dyadic level.
  double level = std::max(std::fabs(rep.worst_x), std::fabs(rep.worst_y));
  double k = std::round(std::log2(level));
  CHECK(std::fabs(level - std::ldexp(1.0, static_cast<int>(k))) / level < 1e-3);
}

TEST_CASE("tail-gap condition certificates") {
  for (const auto& tail :
       {TailFunction::exponential(), TailFunction::rademacher(),
        TailFunction::power(1.0, 2.0), TailFunction::power(1.0, 1.5)}) {
    PreparedLaw prep = prepare_canonical(tail);
    double span = nu_span(prep.canonical.grid_spec());
    GridFunction phi = build_phi(prep.canonical, span + 4.0);
    CertificateReport rep = certify_tail_condition(prep.canonical, phi, span, 401);
    INFO(tail.describe() << " margin " << rep.worst_margin);
    CHECK(rep.pass);
  }

  // Off-diagonal margins are strictly positive for the exponential law, and
  // the diagonal is the trivial 0 <= 1 case.
  PreparedLaw expo = canonical_exponential();
  GridFunction phi = build_phi(expo.canonical);
  CHECK(phi(0.0) == 0.0);
  const TailFunction& nf = expo.canonical.tail();
  for (double x = -3.0; x <= 3.0; x += 0.31) {
    for (double y = -3.0; y <= 3.0; y += 0.37) {
      double lhs = phi(std::fabs(x - y));
      double rhs = 1.0 + std::fabs(nf(std::fabs(x)) * (x < 0 ? -1 : 1) -
                                   nf(std::fabs(y)) * (y < 0 ? -1 : 1));
      CHECK(rhs - lhs >= (std::fabs(x - y) > 0.1 ? 1e-3 : 0.0));
    }
  }
}

TEST_CASE("case analysis certificate") {
  for (const auto& tail :
       {TailFunction::exponential(), TailFunction::rademacher(),
        TailFunction::power(1.0, 2.0), TailFunction::power(1.0, 1.5)}) {
    PreparedLaw prep = prepare_canonical(tail);
    double span = nu_span(prep.canonical.grid_spec());
    GridFunction phi = build_phi(prep.canonical, span + 4.0);
    CaseAnalysisReport rep = certify_case_analysis(prep.canonical, span, 401);
    INFO(tail.describe());
    CHECK(rep.pass);

    // Cross-check: the case analysis and the direct tail-gap certificate
    // agree on every log-concave law.
    CertificateReport v2 = certify_tail_condition(prep.canonical, phi, span, 401);
    CHECK(rep.pass == v2.pass);
  }

  // The exponential law's Cramer branch has slope below 2 forever, so the
  // crossover never happens.
  PreparedLaw expo = canonical_exponential();
  CaseAnalysisReport rep = certify_case_analysis(expo.canonical, 30.0, 401);
  CHECK(rep.x0 == kInf);

  // The two-point law's branch jumps to +inf at 2.
  PreparedLaw rad = prepare_canonical(TailFunction::rademacher());
  CaseAnalysisReport rrad = certify_case_analysis(rad.canonical, 30.0, 401);
  CHECK(rrad.x0 == Catch::Approx(2.0).margin(1e-6));

  // Non-convex tails are rejected outright.
  PreparedLaw dy = prepare_canonical(TailFunction::dyadic_plateau());
  REQUIRE_THROWS_AS(certify_case_analysis(dy.canonical, 30.0, 101),
                    std::invalid_argument);
}

TEST_CASE("tail-gap pass implies transport pass on the pushed-forward grid") {
  for (const auto& tail :
       {TailFunction::exponential(), TailFunction::power(1.0, 2.0)}) {
    PreparedLaw prep = prepare_canonical(tail);
    double span = nu_span(prep.canonical.grid_spec());
    GridFunction phi = build_phi(prep.canonical, span + 4.0);
    CertificateReport v2 = certify_tail_condition(prep.canonical, phi, span, 301);
    CertificateReport v1 =
        certify_transport_condition(prep.canonical, phi, 1.0, span, 301);
    if (v2.pass) CHECK(v1.pass);
  }
}

TEST_CASE("mc ici: zero test function gives exactly one") {
  PreparedLaw expo = canonical_exponential();
  GridFunction zero({-50.0, 50.0}, {0.0, 0.0}, Extension::kLinear, Extension::kLinear);
  const Distribution* d = &expo.canonical;
  McIciResult r = mc_ici_test({d}, 1680.0 * kE, {zero}, 20000, 11);
  CHECK(r.product == 1.0);
  CHECK(r.ci_half == 0.0);
}

TEST_CASE("mc ici: random convex battery stays at or below one") {
  Distribution expo(TailFunction::exponential());
  const Distribution* d = &expo;
  std::mt19937_64 gen(31337);
  for (int trial = 0; trial < 5; ++trial) {
    GridFunction f = oracle::random_convex_bounded_below(gen, 24, 30.0);
    McIciResult r = mc_ici_test({d}, 1680.0 * kE, {f}, 200000, 1000 + trial);
    INFO("trial " << trial << " product " << r.product << " ci " << r.ci_half);
    CHECK(r.product <= 1.0 + 3.0 * r.ci_half);
  }
}

TEST_CASE("mc ici: product is invariant under constant shifts of f") {
  Distribution expo(TailFunction::exponential());
  const Distribution* d = &expo;
  std::mt19937_64 gen(5150);
  GridFunction f = oracle::random_convex_bounded_below(gen, 16, 20.0);
  std::vector<double> shifted(f.values());
  for (auto& v : shifted)
    if (v < kInf) v += 3.25;
  GridFunction fc(f.xs(), shifted, f.left_extension(), f.right_extension());
  McIciResult a = mc_ici_test({d}, 1680.0 * kE, {f}, 50000, 3);
  McIciResult b = mc_ici_test({d}, 1680.0 * kE, {fc}, 50000, 3);
  CHECK(std::fabs(a.product - b.product) <= 1e-9 * std::max(1.0, a.product));
}

TEST_CASE("mc ici: unbounded-below test functions are rejected") {
  Distribution expo(TailFunction::exponential());
  const Distribution* d = &expo;
  GridFunction ramp({-1.0, 1.0}, {1.0, 3.0}, Extension::kLinear, Extension::kLinear);
  REQUIRE_THROWS_AS(mc_ici_test({d}, 1680.0 * kE, {ramp}, 1000, 1),
                    std::invalid_argument);
}

TEST_CASE("mc ici: separable inf-convolution matches the 2-D brute force") {
  Distribution expo(TailFunction::exponential());
  double beta = 1680.0 * kE;
  std::mt19937_64 gen(777);
  GridFunction f1 = oracle::random_convex_bounded_below(gen, 12, 15.0);
  GridFunction f2 = oracle::random_convex_bounded_below(gen, 12, 15.0);
  GridFunction cost = resample(scale_arg(expo.cramer(), 1.0 / beta),
                               uniform_grid(-200.0, 200.0, 2001));
  GridFunction h1 = inf_convolution(f1, cost);
  GridFunction h2 = inf_convolution(f2, cost);

  // Joint inf over a refining 2-D y-grid at a few probes.
  auto objective = [&](double x1, double x2, double y1, double y2) {
    double a = ext_add(f1(y1), cost(x1 - y1));
    double b = ext_add(f2(y2), cost(x2 - y2));
    return ext_add(a, b);
  };
  for (double x1 = -10.0; x1 <= 10.0; x1 += 5.0) {
    for (double x2 = -10.0; x2 <= 10.0; x2 += 5.0) {
      double c1 = 0.0, c2 = 0.0, r = 20.0;
      double joint = kInf;
      for (int round = 0; round < 12; ++round) {
        double b1 = c1, b2 = c2;
        for (int i = -20; i <= 20; ++i) {
          for (int j = -20; j <= 20; ++j) {
            double y1 = c1 + r * i / 20.0, y2 = c2 + r * j / 20.0;
            double v = objective(x1, x2, y1, y2);
            if (v < joint) {
              joint = v;
              b1 = y1;
              b2 = y2;
            }
          }
        }
        c1 = b1;
        c2 = b2;
        r *= 0.25;
      }
      double sep = h1(x1) + h2(x2);
      if (sep == kInf || joint == kInf) continue;
      CHECK(sep <= joint + 1e-9);
      CHECK(joint - sep <= 1e-6);
    }
  }
}

TEST_CASE("cost scale monotonicity in beta") {
  Distribution expo(TailFunction::exponential());
  GridFunction a = scale_arg(expo.cramer(), 1.0 / 100.0);
  GridFunction b = scale_arg(expo.cramer(), 1.0 / 200.0);
  for (double x = -50.0; x <= 50.0; x += 1.7)
    CHECK(b(x) <= a(x) + 1e-12);
}

TEST_CASE("mc ici is bitwise independent of the thread count") {
  Distribution expo(TailFunction::exponential());
  const Distribution* d = &expo;
  std::mt19937_64 gen(9);
  GridFunction f = oracle::random_convex_bounded_below(gen, 16, 20.0);
  McIciResult a = mc_ici_test({d, d, d}, 1680.0 * kE, {f, f, f}, 150000, 42, 1);
  McIciResult b = mc_ici_test({d, d, d}, 1680.0 * kE, {f, f, f}, 150000, 42, 4);
  CHECK(a.product == b.product);
  CHECK(a.ci_half == b.ci_half);
}
