//
// Copyright 2026 The LDP Sampling Authors
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
//

#include "ldp_sampling/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "oracles.hpp"

namespace ldp {
namespace {

using ::testing::DoubleNear;
using ::testing::HasSubstr;

TEST(GaussLegendreTest, ExactForHighDegreePolynomials) {
  const auto [x, w] = gauss_legendre(16);
  // Exact through degree 31.
  for (int deg : {0, 2, 10, 30}) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], deg);
    EXPECT_NEAR(s, 2.0 / (deg + 1), 1e-14) << "degree " << deg;
  }
}

TEST(IntegrateTest, Identity) {
  EXPECT_NEAR(integrate([](double x) { return x; }, Interval(0, 1)), 0.5,
              1e-12);
}

TEST(IntegrateTest, FlatTopGaussianEnvelope) {
  const double v = integrate(
      [](double x) {
        const double d = std::max(std::abs(x) - 1.0, 0.0);
        return std::exp(-0.5 * d * d);
      },
      Interval(-4, 4));
  EXPECT_NEAR(v, oracle::kFlatPlusGaussTails, 1e-8);
}

TEST(IntegrateTest, StandardNormalMass) {
  const double v = integrate(
      [](double x) {
        return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
      },
      Interval(-4, 4));
  EXPECT_NEAR(v, oracle::kPhi4MinusPhiM4, 1e-10);
  EXPECT_NEAR(v, oracle::phi_cdf(4) - oracle::phi_cdf(-4), 1e-10);
}

TEST(IntegrateTest, ReportsOffendingAbscissa) {
  try {
    integrate([](double x) { return x > 0.25 ? std::nan("") : 1.0; },
              Interval(0, 1), QuadratureConfig{4, 2, 1e-6});
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_GT(e.abscissa(), 0.25);
    EXPECT_THAT(e.what(), HasSubstr("x="));
  }
}

TEST(IntegrateTest, IsLinear) {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    const double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3);
    const double w1 = rng.uniform(0.1, 5), w2 = rng.uniform(0.1, 5);
    const auto f = [&](double x) { return std::sin(w1 * x) + x * x; };
    const auto g = [&](double x) { return std::exp(-w2 * x * x); };
    const Interval dom(-2, 3);
    const double lhs =
        integrate([&](double x) { return a * f(x) + b * g(x); }, dom);
    EXPECT_NEAR(lhs, a * integrate(f, dom) + b * integrate(g, dom), 1e-10);
  }
}

TEST(IntegrateTest, DeterministicAcrossCalls) {
  const auto f = [](double x) { return std::cos(3 * x) * std::exp(x); };
  EXPECT_EQ(integrate(f, Interval(-1, 2)), integrate(f, Interval(-1, 2)));
}

TEST(QuadratureConfigTest, RejectsInvalid) {
  EXPECT_THROW((QuadratureConfig{0, 16, 1e-6}.validate()), InvalidArgument);
  EXPECT_THROW((QuadratureConfig{10, 16, 0.0}.validate()), InvalidArgument);
  EXPECT_THROW((QuadratureConfig{1'000'000, 16, 1e-6}.validate()),
               InvalidArgument);
}

TEST(IntervalTest, RejectsEmptyOrInfinite) {
  EXPECT_THROW(Interval(1, 1), InvalidArgument);
  EXPECT_THROW(Interval(0, INFINITY), InvalidArgument);
}

TEST(ToleranceBandTest, PenaltyAndCompatibility) {
  const ToleranceBand band(1e-5, 1e-5);
  EXPECT_NEAR(band.penalty(), std::log((1 + 1e-5) / (1 - 1e-5)), 1e-18);
  EXPECT_NEAR(band.effective_epsilon(1.0), 1.0 - band.penalty(), 1e-15);
  EXPECT_NO_THROW(band.check_compatible(0.1));
  EXPECT_THROW(ToleranceBand(0.5, 0.5).check_compatible(0.5), InvalidArgument);
  EXPECT_THROW(ToleranceBand(1.0, 0.0), InvalidArgument);
  EXPECT_THROW(ToleranceBand(0.0, -1.0), InvalidArgument);
}

TEST(BisectNormalizerTest, FiniteClosedForm) {
  const std::vector<double> p{0.7, 0.2, 0.1};
  const auto mass = [&](double r) {
    double s = 0.0;
    for (double v : p) s += std::max(v / r, 0.25);
    return s;
  };
  const ToleranceBand band(1e-9, 1e-9);
  const auto root = bisect_normalizer(mass, Interval(1, 2), band);
  // 0.7 / r + 0.5 = 1.
  EXPECT_NEAR(root.r, 1.4, 1e-8);
  EXPECT_TRUE(band.contains(root.mass));
}

TEST(BisectNormalizerTest, UniformReturnsLowerEndImmediately) {
  const auto root = bisect_normalizer([](double) { return 1.0; },
                                      Interval(1, 2), ToleranceBand{});
  EXPECT_EQ(root.r, 1.0);
  EXPECT_EQ(root.iterations, 0);
}

TEST(BisectNormalizerTest, ZeroLowerEndIsNeverReturned) {
  // Plateau at 1 on the whole bracket, as for two-level extreme densities.
  const auto root = bisect_normalizer([](double) { return 1.0; },
                                      Interval(0, 1.5), ToleranceBand{});
  EXPECT_EQ(root.r, 1.5);
}

TEST(BisectNormalizerTest, BracketContractViolation) {
  EXPECT_THROW(bisect_normalizer([](double r) { return 0.5 / r; },
                                 Interval(1, 2), ToleranceBand{}),
               ContractError);
}

TEST(BisectNormalizerTest, NonConvergenceCarriesBracket) {
  // A jump over the band: mass is continuous nowhere near 1.
  const auto mass = [](double r) { return r < 1.3 ? 1.5 : 0.5; };
  try {
    bisect_normalizer(mass, Interval(1, 2), ToleranceBand{}, 30);
    FAIL() << "expected NonConvergence";
  } catch (const NonConvergence& e) {
    EXPECT_LE(e.lo(), 1.3);
    EXPECT_GE(e.hi(), 1.3);
    EXPECT_LT(e.hi() - e.lo(), 1e-6);
  }
}

TEST(BisectNormalizerTest, PolishStaysInBandAndTightens) {
  const auto mass = [](double r) { return 1.2 / r; };
  const ToleranceBand band(1e-3, 1e-3);
  const auto first = bisect_normalizer(mass, Interval(1, 2), band);
  const auto polished = bisect_normalizer(mass, Interval(1, 2), band, 200,
                                          BandStop::kPolish);
  EXPECT_TRUE(band.contains(first.mass));
  EXPECT_TRUE(band.contains(polished.mass));
  EXPECT_LE(std::abs(polished.mass - 1.0), 1e-15);
  EXPECT_GT(std::abs(first.mass - 1.0), std::abs(polished.mass - 1.0));
}

TEST(BisectNormalizerTest, ShrinkingBandMovesRootLittle) {
  const auto mass = [](double r) { return 0.3 + 0.9 / (r * r); };
  const auto loose =
      bisect_normalizer(mass, Interval(1, 2), ToleranceBand(1e-9, 1e-9));
  const auto tight =
      bisect_normalizer(mass, Interval(1, 2), ToleranceBand(1e-12, 1e-12));
  EXPECT_NEAR(loose.r, tight.r, 1e-6);
}

TEST(RngTest, StreamsAreReproducibleAndDistinct) {
  auto a = Rng::for_stream(5, 3), b = Rng::for_stream(5, 3);
  auto c = Rng::for_stream(5, 4);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a();
    EXPECT_EQ(va, b());
    differs |= va != c();
  }
  EXPECT_TRUE(differs);
}

TEST(RngTest, PoissonMeanAndSimplex) {
  Rng rng(1);
  double s = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) s += rng.poisson(2.0);
  EXPECT_NEAR(s / n, 2.0, 0.02);
  const auto w = rng.simplex(7);
  double total = 0.0;
  for (double v : w) {
    EXPECT_GE(v, 0.0);
    total += v;
  }
  EXPECT_NEAR(total, 1.0, 1e-15);
}

Density1D uniform01() {
  return Density1D{Interval(0, 1), [](double) { return 1.0; }};
}

TEST(InverseCdfSamplerTest, UniformPassesKolmogorovSmirnov) {
  InverseCdfSampler sampler(uniform01(), 4096, 42);
  const int n = 100000;
  std::vector<double> xs(n);
  for (auto& x : xs) x = sampler();
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    d = std::max({d, (i + 1.0) / n - xs[i], xs[i] - static_cast<double>(i) / n});
  }
  // alpha = 0.001 critical value 1.95 / sqrt(n) ~ 0.0062.
  EXPECT_LT(d, 0.01);
  EXPECT_LT(d, 1.95 / std::sqrt(static_cast<double>(n)));
}

TEST(InverseCdfSamplerTest, ConcentratedPdfStaysInItsCell) {
  // All mass inside cell 10 of 100 on [0, 1).
  const Density1D spike{Interval(0, 1), [](double x) {
                          return (x >= 0.1 && x < 0.11) ? 100.0 : 0.0;
                        }};
  InverseCdfSampler sampler(spike, 100, 7);
  for (int i = 0; i < 10000; ++i) {
    const double x = sampler();
    EXPECT_GE(x, 0.1 - 1e-12);
    EXPECT_LE(x, 0.11 + 1e-12);
  }
}

TEST(InverseCdfSamplerTest, StepDensityCellProbability) {
  const Density1D step{Interval(0, 1),
                       [](double x) { return x < 0.5 ? 4.0 / 3 : 2.0 / 3; }};
  InverseCdfSampler sampler(step, 4096, 3);
  const int n = 100000;
  int left = 0;
  for (int i = 0; i < n; ++i) left += sampler() < 0.5;
  // Binomial sd is 0.0015; 0.01 is more than 6 sd.
  EXPECT_THAT(static_cast<double>(left) / n, DoubleNear(2.0 / 3, 0.01));
}

TEST(InverseCdfSamplerTest, SameSeedSameStream) {
  InverseCdfSampler a(uniform01(), 4096, 9), b(uniform01(), 4096, 9);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(a(), b());
}

TEST(InverseCdfSamplerTest, GridCdfTracksTrueCdf) {
  const Density1D tri{Interval(0, 1), [](double x) { return 2 * x; }};
  InverseCdfSampler s(tri, 64, 0);
  for (double x = 0.0; x <= 1.0; x += 0.01) {
    // Linear interpolation error of x^2 within a cell of width 1/64.
    EXPECT_NEAR(s.grid_cdf(x), x * x, 1.0 / (4 * 64.0 * 64.0) + 1e-12);
  }
}

TEST(InverseCdfSamplerTest, RejectsUnnormalizedPdf) {
  const Density1D half{Interval(0, 1), [](double) { return 0.5; }};
  EXPECT_THROW(InverseCdfSampler(half, 128, 0), InvalidArgument);
}

}  // namespace
}  // namespace ldp
