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

#include "ldp_sampling/continuous.hpp"

#include <cmath>
#include <string>

#include "gtest/gtest.h"
#include "ldp_sampling/distributions.hpp"
#include "oracles.hpp"

namespace ldp {
namespace {

Density1D uniform01() {
  return Density1D{Interval(0, 1), [](double) { return 1.0; }};
}
Density1D step_p() {
  return Density1D{Interval(0, 1), [](double x) { return x < 0.5 ? 2.0 : 0.0; }};
}
ContinuousClass step_class() {
  return ContinuousClass::make(0.0, 2.0, uniform01(), std::log(2.0));
}

TEST(MechanismConstantsTest, StepClass) {
  const auto k = mechanism_constants(0.0, 2.0, std::log(2.0));
  EXPECT_NEAR(k.alpha, 0.5, 1e-15);
  EXPECT_NEAR(k.b, 2.0 / 3, 1e-15);
  EXPECT_EQ(k.r1, 0.0);
  EXPECT_NEAR(k.r2, 1.5, 1e-15);
  EXPECT_NEAR(k.gamma, 1.0 / 3, 1e-15);
}

TEST(MechanismConstantsTest, RecoversFiniteCase) {
  for (int k : {2, 5, 17}) {
    for (double eps : {0.2, 1.0, 3.0}) {
      const auto c = mechanism_constants(0.0, k, eps);
      EXPECT_NEAR(c.b, k / (std::exp(eps) + k - 1), 1e-14);
      EXPECT_NEAR(c.r2, (std::exp(eps) + k - 1) / std::exp(eps), 1e-14);
    }
  }
}

TEST(MechanismConstantsTest, IdentitiesWithGamma) {
  for (double c1 : {0.0, 0.3, 0.9}) {
    for (double c2 : {1.2, 2.0, 9.0}) {
      for (double eps : {0.1, 1.0, 4.0}) {
        if (c2 <= c1 * std::exp(eps)) continue;
        const auto k = mechanism_constants(c1, c2, eps);
        EXPECT_NEAR(k.b, k.gamma * c1 + (1 - k.gamma), 1e-13);
        EXPECT_NEAR(k.b_upper, k.gamma * c2 + (1 - k.gamma), 1e-13);
        EXPECT_LT(k.r1, 1.0);
        EXPECT_GT(k.r2, 1.0);
      }
    }
  }
}

TEST(MechanismConstantsTest, DegenerateClassHasNearZeroPut) {
  const auto k = mechanism_constants(1.0 - 1e-6, 1.0 + 1e-6, 1e-8);
  EXPECT_NEAR(k.b, 1.0, 1e-6);
  EXPECT_LT(optimal_put_continuous(k, builtin_generator("TV")).value(), 1e-6);
}

TEST(MechanismConstantsTest, Rejections) {
  EXPECT_THROW(mechanism_constants(-0.1, 2.0, 1.0), InvalidArgument);
  EXPECT_THROW(mechanism_constants(1.0, 2.0, 1.0), InvalidArgument);
  EXPECT_THROW(mechanism_constants(0.0, 1.0, 1.0), InvalidArgument);
  try {
    mechanism_constants(0.5, 1.2, 1.0);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("trivial"), std::string::npos);
  }
}

TEST(ContinuousClassTest, RejectsUnnormalizedReference) {
  const Density1D half{Interval(0, 1), [](double) { return 0.5; }};
  EXPECT_THROW(ContinuousClass::make(0.0, 2.0, half, 1.0), InvalidArgument);
}

TEST(OptimalDensityTest, StepDensity) {
  const auto cls = step_class();
  const auto q = optimal_density(cls, step_p());
  EXPECT_NEAR(q.r(), 1.5, 1e-12);
  EXPECT_NEAR(q(0.25), 4.0 / 3, 1e-8);
  EXPECT_NEAR(q(0.75), 2.0 / 3, 1e-8);
}

TEST(OptimalDensityTest, ReferenceIsFixedPoint) {
  const auto env = envelope_class();
  const auto cls = env.at_eps(1.0);
  const auto q = optimal_density(cls, env.h);
  EXPECT_NEAR(q.r(), 1.0, 1e-6);
  for (double x = -4.0; x <= 4.0; x += 0.37) EXPECT_NEAR(q(x), env.h(x), 1e-9);
}

TEST(OptimalDensityTest, MixtureOutputIsUnclipped) {
  const auto env = envelope_class();
  const auto cls = env.at_eps(0.7);
  const auto p0 = GaussMix1D({-0.4, 0.8}, {0.3, 0.7}).density();
  const auto qd = mixture_density(cls, p0);
  const auto q = optimal_density(cls, qd);
  EXPECT_NEAR(q.r(), 1.0, 1e-6);
  for (double x = -3.9; x <= 4.0; x += 0.29) EXPECT_NEAR(q(x), qd(x), 1e-6 * qd(x));
}

TEST(OptimalDensityTest, OutsideClassReportsLocation) {
  const Density1D bad{Interval(0, 1), [](double x) { return x > 0.9 ? 5.5 : 0.5; }};
  try {
    optimal_density(step_class(), bad);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("x="), std::string::npos);
  }
}

TEST(OptimalDensityTest, PrivateAndNormalizedOnRandomMixtures) {
  const auto env = envelope_class();
  const ToleranceBand band(1e-5, 1e-5);
  for (double eps : {0.1, 1.0, 3.0}) {
    const auto cls = env.at_eps(eps);
    const auto& k = cls.constants();
    for (std::uint64_t i = 0; i < 10; ++i) {
      const auto p = random_mixture(MixGenConfig{10, 2.0, 77}, i).density();
      const auto q = optimal_density(cls, p, band);
      EXPECT_TRUE(band.contains(q.mass()));
      EXPECT_NEAR(integrate(q.as_density().eval, q.support()), 1.0, 1e-9);
      for (double x = -4.0; x <= 4.0; x += 0.01) {
        const double ratio = q(x) / env.h(x);
        EXPECT_GE(ratio, k.b / (1 + band.delta2) - 1e-12);
        EXPECT_LE(ratio, k.b_upper / (1 - band.delta1) + 1e-12);
      }
    }
  }
}

TEST(OptimalDensityTest, SamplerFollowsOutput) {
  const auto q = optimal_density(step_class(), step_p());
  auto s = q.sampler(123);
  const int n = 100000;
  int left = 0;
  for (int i = 0; i < n; ++i) left += s() < 0.5;
  EXPECT_NEAR(static_cast<double>(left) / n, 2.0 / 3, 0.01);
}

TEST(MixtureDensityTest, Examples) {
  const auto cls = step_class();
  const auto q = mixture_density(cls, step_p());
  EXPECT_NEAR(q(0.25), 4.0 / 3, 1e-12);
  EXPECT_NEAR(q(0.75), 2.0 / 3, 1e-12);
  const auto same = mixture_density(cls, uniform01());
  EXPECT_NEAR(same(0.3), 1.0, 1e-15);

  const auto wide = ContinuousClass::make(0.0, 2.0, uniform01(), 40.0);
  EXPECT_NEAR(mixture_density(wide, step_p())(0.25), 2.0, 1e-12);
}

TEST(OptimalPutContinuousTest, Examples) {
  const auto cls = step_class();
  EXPECT_NEAR(optimal_put_continuous(cls, builtin_generator("TV")).value(),
              1.0 / 3, 1e-15);
  EXPECT_NEAR(optimal_put_continuous(cls, builtin_generator("KL")).value(),
              oracle::kLn1p5, 1e-15);
  const auto rev = Generator::custom(
      "reverseKL", [](double x) { return -std::log(x); }, ExtReal::infinity(),
      ExtReal::finite(0));
  EXPECT_TRUE(optimal_put_continuous(cls, rev).is_infinite());
}

TEST(UtilityLossTest, StepAchievesPut) {
  const auto cls = step_class();
  const auto q = optimal_density(cls, step_p());
  for (const char* name : {"TV", "KL"}) {
    const auto g = builtin_generator(name);
    EXPECT_NEAR(utility_loss(cls, step_p(), q, g).value(),
                optimal_put_continuous(cls, g).value(), 1e-8);
  }
  EXPECT_NEAR(utility_loss(cls, step_p(), step_p(), builtin_generator("TV")).value(),
              0.0, 1e-12);
}

TEST(UtilityLossTest, ClippingBeatsMixtureOnRandomInputs) {
  const auto env = envelope_class();
  const auto cls = env.at_eps(0.5);
  for (std::uint64_t i = 0; i < 8; ++i) {
    const auto p = random_mixture(MixGenConfig{10, 2.0, 9}, i).density();
    const auto q = optimal_density(cls, p);
    const auto m = mixture_density(cls, p);
    for (const char* name : {"KL", "TV", "SqHellinger"}) {
      const auto g = builtin_generator(name);
      const double star = utility_loss(cls, p, q, g).value();
      const double mix = utility_loss(cls, p, m, g).value();
      EXPECT_LE(star, mix + 1e-6) << name << " instance " << i;
      EXPECT_LE(mix, optimal_put_continuous(cls, g).value() + 1e-6) << name;
    }
  }
}

}  // namespace
}  // namespace ldp
