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

// Optimal private sampling for densities sandwiched by an envelope:
// inputs p with c1 h <= p <= c2 h, h a normalized reference density.
//
// The optimal mechanism clips p / r_P into [b h, b e^eps h]; the mixture
// mechanism releases gamma p + (1 - gamma) h. Both land in the same mollifier
// set, and the clipped one is the f-divergence projection onto it.

#ifndef LDP_SAMPLING_CONTINUOUS_HPP_
#define LDP_SAMPLING_CONTINUOUS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ldp_sampling/divergence.hpp"
#include "ldp_sampling/errors.hpp"
#include "ldp_sampling/ext_real.hpp"
#include "ldp_sampling/numerics.hpp"

namespace ldp {

// Relative slack for p exceeding the envelope by rounding noise.
inline constexpr double kEnvelopeSlack = 1e-9;

struct MechanismConstants {
  double alpha = 0.0;  // (1 - c1) / (c2 - c1)
  double b = 0.0;
  double r1 = 0.0;  // c1 / b
  double r2 = 0.0;  // c2 / (b e^eps)
  double gamma = 0.0;
  double b_upper = 0.0;  // b e^eps
};

/// Constants for the class (c1, c2, eps). Throws InvalidArgument unless
/// 0 <= c1 < 1 < c2 and c2 > c1 e^eps; the last condition failing means the
/// identity mechanism is already eps-LDP with zero loss.
inline MechanismConstants mechanism_constants(double c1, double c2,
                                              double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw InvalidArgument("continuous class: eps must be a positive real");
  }
  if (!(c1 >= 0.0)) throw InvalidArgument("continuous class: need c1 >= 0");
  if (!(c1 < 1.0)) throw InvalidArgument("continuous class: need c1 < 1");
  if (!(c2 > 1.0) || !std::isfinite(c2)) {
    throw InvalidArgument("continuous class: need 1 < c2 < inf");
  }
  const double e = std::exp(eps);
  if (!(c2 > c1 * e)) {
    std::ostringstream os;
    os << "continuous class: c2 <= c1 e^eps (c2=" << c2 << ", c1 e^eps="
       << c1 * e
       << "); trivial regime, the identity mechanism is eps-LDP with zero "
          "loss";
    throw InvalidArgument(os.str());
  }
  const double em1 = std::expm1(eps);
  const double denom = em1 * (1.0 - c1) + c2 - c1;
  MechanismConstants k;
  k.alpha = (1.0 - c1) / (c2 - c1);
  k.b = (c2 - c1) / denom;
  k.b_upper = k.b * e;
  k.r1 = c1 / k.b;
  k.r2 = c2 / k.b_upper;
  k.gamma = em1 / denom;
  return k;
}

class ContinuousClass {
 public:
  /// Validates the normalization condition: integral of h is 1 within 1e-6
  /// (on `quad`), c1 < 1 < c2 and c2 > c1 e^eps.
  static ContinuousClass make(double c1, double c2, Density1D h, double eps,
                              const QuadratureConfig& quad = {}) {
    const auto consts = mechanism_constants(c1, c2, eps);
    const double mass = integrate(h.eval, h.support, quad);
    if (std::abs(mass - 1.0) > 1e-6) {
      std::ostringstream os;
      os << "continuous class: reference density integrates to " << mass;
      throw InvalidArgument(os.str());
    }
    return ContinuousClass(c1, c2, std::move(h), eps, consts);
  }

  double c1() const { return c1_; }
  double c2() const { return c2_; }
  double eps() const { return eps_; }
  const Density1D& h() const { return h_; }
  const MechanismConstants& constants() const { return consts_; }

  // Same envelope at another budget.
  ContinuousClass with_eps(double eps) const {
    return ContinuousClass(c1_, c2_, h_, eps,
                           mechanism_constants(c1_, c2_, eps));
  }

 private:
  ContinuousClass(double c1, double c2, Density1D h, double eps,
                  MechanismConstants consts)
      : c1_(c1), c2_(c2), eps_(eps), h_(std::move(h)), consts_(consts) {}

  double c1_;
  double c2_;
  double eps_;
  Density1D h_;
  MechanismConstants consts_;
};

inline MechanismConstants constants(const ContinuousClass& cls) {
  return cls.constants();
}

/// Output of the optimal mechanism: x -> clip(p(x)/r; b h(x), b e^eps h(x)) / mass.
/// Immutable after construction; the achieved mass is memoized.
class ClippedDensity {
 public:
  ClippedDensity(const ContinuousClass& cls, Density1D source, double r,
                 double mass, double eps_prime)
      : state_(std::make_shared<const State>(
            State{cls.c1(), cls.c2(), cls.constants(), cls.h(),
                  std::move(source), r, mass})),
        eps_(cls.eps()),
        eps_prime_(eps_prime) {}

  double r() const { return state_->r; }
  double mass() const { return state_->mass; }
  double eps() const { return eps_; }
  // Running at this budget with the same band releases eps-LDP output.
  double eps_prime() const { return eps_prime_; }
  const Interval& support() const { return state_->h.support; }

  double operator()(double x) const { return state_->eval(x); }

  Density1D as_density() const {
    auto s = state_;
    return Density1D{s->h.support, [s](double x) { return s->eval(x); }};
  }
  operator Density1D() const { return as_density(); }

  InverseCdfSampler sampler(std::uint64_t seed,
                            int grid_size = InverseCdfSampler::kDefaultGridSize)
      const {
    return InverseCdfSampler(as_density(), grid_size, seed);
  }

 private:
  struct State {
    double c1;
    double c2;
    MechanismConstants k;
    Density1D h;
    Density1D source;
    double r;
    double mass;

    double eval(double x) const {
      const double hv = h(x);
      const double pv = std::clamp(source(x), c1 * hv, c2 * hv);
      return std::clamp(pv / r, k.b * hv, k.b_upper * hv) / mass;
    }
  };

  std::shared_ptr<const State> state_;
  double eps_;
  double eps_prime_;
};

namespace internal {

// Tabulates p and h on the rule and enforces c1 h <= p <= c2 h up to
// kEnvelopeSlack relative; p is clamped into the envelope.
inline void tabulate_in_class(const ContinuousClass& cls, const Density1D& p,
                              const QuadratureRule& rule,
                              std::vector<double>& pv,
                              std::vector<double>& hv) {
  if (!(p.support == cls.h().support)) {
    throw InvalidArgument("density and reference density differ in support");
  }
  pv.resize(rule.size());
  hv.resize(rule.size());
  double worst = 0.0;
  double worst_x = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double x = rule.nodes[i];
    const double h = cls.h().eval(x);
    double v = p.eval(x);
    if (!std::isfinite(v) || !std::isfinite(h) || v < 0.0 || h < 0.0) {
      std::ostringstream os;
      os << "density values must be finite and >= 0 (x=" << x << ")";
      throw InvalidArgument(os.str());
    }
    const double hi = cls.c2() * h;
    const double lo = cls.c1() * h;
    double violation = 0.0;
    if (v > hi) violation = hi > 0.0 ? (v - hi) / hi : INFINITY;
    if (v < lo) violation = (lo - v) / lo;
    if (violation > worst) {
      worst = violation;
      worst_x = x;
    }
    pv[i] = std::clamp(v, lo, hi);
    hv[i] = h;
  }
  if (worst > kEnvelopeSlack) {
    std::ostringstream os;
    os << "density is outside the class c1 h <= p <= c2 h; worst relative "
          "violation "
       << worst << " at x=" << worst_x;
    throw InvalidArgument(os.str());
  }
}

}  // namespace internal

/// Optimal eps-LDP sampler output for p. r_P is bisected on (r1, r2] until
/// the clipped mass lands in `band`; the returned density is then divided by
/// that mass. At r = 0 the clip is taken as b e^eps h where p > 0 and b h
/// where p = 0.
inline ClippedDensity optimal_density(const ContinuousClass& cls,
                                      const Density1D& p,
                                      const ToleranceBand& band = {1e-5, 1e-5},
                                      const QuadratureConfig& quad = {}) {
  band.check_compatible(cls.eps());
  const QuadratureRule rule(cls.h().support, quad);
  std::vector<double> pv, hv;
  internal::tabulate_in_class(cls, p, rule, pv, hv);
  const auto& k = cls.constants();
  const auto clipped_mass = [&](double r) {
    CompensatedSum s;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      double g;
      if (r == 0.0) {
        g = (pv[i] > kZeroThreshold ? k.b_upper : k.b) * hv[i];
      } else {
        g = std::clamp(pv[i] / r, k.b * hv[i], k.b_upper * hv[i]);
      }
      s.add(rule.weights[i] * g);
    }
    return s.value();
  };
  NormalizerRoot root;
  try {
    root = bisect_normalizer(clipped_mass, Interval(k.r1, k.r2), band,
                             kDefaultBisectionIterations, BandStop::kPolish);
  } catch (const ContractError& e) {
    throw MechanismError(std::string("optimal_density: ") + e.what());
  } catch (const NonConvergence& e) {
    throw MechanismError(std::string("optimal_density: ") + e.what());
  }
  return ClippedDensity(cls, p, root.r, root.mass,
                        band.effective_epsilon(cls.eps()));
}

/// Mixture mechanism output gamma p + (1 - gamma) h. Class membership is
/// checked on the `quad` grid.
inline Density1D mixture_density(const ContinuousClass& cls, const Density1D& p,
                                 const QuadratureConfig& quad = {}) {
  const QuadratureRule rule(cls.h().support, quad);
  std::vector<double> pv, hv;
  internal::tabulate_in_class(cls, p, rule, pv, hv);
  const double gamma = cls.constants().gamma;
  const double c1 = cls.c1();
  const double c2 = cls.c2();
  Density1D h = cls.h();
  Density1D src = p;
  return Density1D{h.support, [=](double x) {
                     const double hx = h(x);
                     const double px = std::clamp(src(x), c1 * hx, c2 * hx);
                     return gamma * px + (1.0 - gamma) * hx;
                   }};
}

/// Minimax worst-case f-divergence for the class:
///   (1-r1)/(r2-r1) f(r2) + (r2-1)/(r2-r1) f(r1).
inline ExtReal optimal_put_continuous(const MechanismConstants& k,
                                      const Generator& g) {
  return ratio_bounded_worst_case(g, k.r1, k.r2);
}

inline ExtReal optimal_put_continuous(const ContinuousClass& cls,
                                      const Generator& g) {
  return optimal_put_continuous(cls.constants(), g);
}

/// D_f(p || q) for a mechanism output q of input p.
inline ExtReal utility_loss(const ContinuousClass& cls, const Density1D& p,
                            const Density1D& q, const Generator& g,
                            const QuadratureConfig& quad = {}) {
  if (!(p.support == cls.h().support) || !(q.support == cls.h().support)) {
    throw InvalidArgument("utility_loss: densities must share the class support");
  }
  return density_divergence(g, p, q, quad);
}

}  // namespace ldp

#endif  // LDP_SAMPLING_CONTINUOUS_HPP_
