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

// Optimal private sampling over a finite alphabet [k].
//
// Q*(x|P) = max(P(x) / r_P, 1 / (e^eps + k - 1)) with r_P found by bisection
// on [1, (e^eps + k - 1) / e^eps]. Every output lies in the mollifier set
//   1/(e^eps+k-1) <= Q(x) <= e^eps/(e^eps+k-1)
// and is the f-divergence projection of P onto that set for every f.

#ifndef LDP_SAMPLING_FINITE_HPP_
#define LDP_SAMPLING_FINITE_HPP_

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "ldp_sampling/divergence.hpp"
#include "ldp_sampling/errors.hpp"
#include "ldp_sampling/ext_real.hpp"
#include "ldp_sampling/numerics.hpp"

namespace ldp {

inline constexpr double kPmfSumTolerance = 1e-12;

class Pmf {
 public:
  explicit Pmf(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw InvalidArgument("Pmf: empty probability vector");
    CompensatedSum total;
    for (double v : probs_) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw InvalidArgument("Pmf: entries must be finite and >= 0");
      }
      total.add(v);
    }
    if (std::abs(total.value() - 1.0) > kPmfSumTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "Pmf: entries sum to " << total.value();
      throw InvalidArgument(os.str());
    }
  }

  static Pmf uniform(std::size_t k) {
    return Pmf(std::vector<double>(k, 1.0 / static_cast<double>(k)));
  }
  static Pmf point_mass(std::size_t k, std::size_t x) {
    std::vector<double> v(k, 0.0);
    v.at(x) = 1.0;
    return Pmf(std::move(v));
  }
  // Uniform on the simplex (normalized exponential variates).
  static Pmf random(std::size_t k, Rng& rng) { return Pmf(rng.simplex(k)); }

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }
  operator std::span<const double>() const { return probs_; }

 private:
  std::vector<double> probs_;
};

struct FiniteParams {
  int k = 2;
  double eps = 1.0;
  double lower = 0.0;  // 1 / (e^eps + k - 1)
  double upper = 0.0;  // e^eps / (e^eps + k - 1)

  static FiniteParams make(int k, double eps) {
    if (k < 2) throw InvalidArgument("FiniteParams: k must be >= 2");
    if (!(eps > 0.0) || !std::isfinite(eps)) {
      throw InvalidArgument("FiniteParams: eps must be a positive real");
    }
    FiniteParams p;
    p.k = k;
    p.eps = eps;
    // Divide through by e^eps so large eps does not overflow.
    const double t = std::exp(-eps);
    const double denom = 1.0 + (k - 1) * t;
    p.lower = t / denom;
    p.upper = 1.0 / denom;
    return p;
  }

  // (e^eps + k - 1) / e^eps, the upper end of the r_P bracket.
  double r_max() const { return 1.0 + (k - 1) * std::exp(-eps); }
};

struct FiniteOutput {
  Pmf q;
  double r = 1.0;
  double mass = 1.0;  // clipped mass before the final renormalization
  // Running at this budget with the same band releases eps-LDP output.
  double eps_prime = 0.0;
};

/// Q*_{k,eps}(P), normalized by its achieved mass after the bisection
/// certifies that mass is inside `band`.
inline FiniteOutput optimal_pmf(const FiniteParams& params, const Pmf& p,
                                const ToleranceBand& band = {}) {
  if (p.size() != static_cast<std::size_t>(params.k)) {
    std::ostringstream os;
    os << "optimal_pmf: pmf has length " << p.size() << ", expected k="
       << params.k;
    throw InvalidArgument(os.str());
  }
  band.check_compatible(params.eps);
  const auto& probs = p.probs();
  const auto clipped_mass = [&](double r) {
    CompensatedSum s;
    for (double v : probs) s.add(std::max(v / r, params.lower));
    return s.value();
  };
  NormalizerRoot root;
  try {
    // For very large eps r_max rounds to 1; the clip is then inactive and
    // the lower end is accepted.
    const double hi = std::max(params.r_max(), 1.0 + 1e-12);
    root = bisect_normalizer(clipped_mass, Interval(1.0, hi), band,
                             kDefaultBisectionIterations, BandStop::kPolish);
  } catch (const ContractError& e) {
    throw MechanismError(std::string("optimal_pmf: ") + e.what());
  } catch (const NonConvergence& e) {
    throw MechanismError(std::string("optimal_pmf: ") + e.what());
  }
  std::vector<double> q(probs.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    q[i] = std::max(probs[i] / root.r, params.lower) / root.mass;
  }
  return FiniteOutput{Pmf(std::move(q)), root.r, root.mass,
                      band.effective_epsilon(params.eps)};
}

namespace internal {

// value(0, 1 + t) = f(1 + t) / (1 + t) + t / (1 + t) f(0), written in terms of
// the excess t so that it stays accurate (and -> 0) when 1 + t rounds to 1.
inline ExtReal zero_floor_worst_case(const Generator& g, double t) {
  if (!(t > 0.0)) return ExtReal::finite(0.0);
  const double r2 = 1.0 + t;
  if (r2 > 1.0) return ratio_bounded_worst_case(g, 0.0, r2);
  return ExtReal::finite(0.0) + (t / r2) * g.at(0.0);
}

}  // namespace internal

/// Minimax worst-case f-divergence over all eps-LDP samplers on [k]:
///   e^eps/(e^eps+k-1) f((e^eps+k-1)/e^eps) + (k-1)/(e^eps+k-1) f(0).
inline ExtReal optimal_put(const FiniteParams& params, const Generator& g) {
  return internal::zero_floor_worst_case(g, (params.k - 1) * std::exp(-params.eps));
}

/// Worst case of the e^{-eps/2}..e^{eps/2} band projection around the
/// uniform reference, the best reference for that baseline:
/// value(0, 1/B(1/k)) with B(t) = min(e^{eps/2} t, e^{-eps/2} t + 1 - e^{-eps/2}).
inline ExtReal baseline_put_uniform(const FiniteParams& params,
                                    const Generator& g) {
  const double t = 1.0 / params.k;
  const double half = 0.5 * params.eps;
  const double up = std::exp(half) * t;
  const double down_gap = std::exp(-half) * (1.0 - t);  // 1 - second branch
  const double b = std::min(up, 1.0 - down_gap);
  const double gap = up < 1.0 - down_gap ? 1.0 - up : down_gap;  // 1 - B
  return internal::zero_floor_worst_case(g, gap / b);
}

struct EmpiricalWorstCase {
  double value = 0.0;
  std::size_t argmax = 0;  // trial index; trials [0, k) are point masses
  bool at_point_mass = false;
};

/// Max of D_f(P || Q*(P)) over the k point masses followed by trials - k
/// random pmfs. Trial t draws from Rng::for_stream(seed, t), so the result
/// does not depend on evaluation order.
inline EmpiricalWorstCase empirical_worst_case(const FiniteParams& params,
                                               const Generator& g, int trials,
                                               std::uint64_t seed,
                                               const ToleranceBand& band = {}) {
  if (trials < params.k) {
    throw InvalidArgument("empirical_worst_case: trials must be >= k");
  }
  EmpiricalWorstCase best;
  bool first = true;
  for (int t = 0; t < trials; ++t) {
    Pmf p = [&] {
      if (t < params.k) return Pmf::point_mass(params.k, t);
      Rng rng = Rng::for_stream(seed, static_cast<std::uint64_t>(t));
      return Pmf::random(params.k, rng);
    }();
    const auto out = optimal_pmf(params, p, band);
    const ExtReal d = pmf_divergence(g, p, out.q);
    if (d.is_infinite()) {
      throw MechanismError("empirical_worst_case: infinite divergence");
    }
    if (first || d.value() > best.value) {
      best.value = d.value();
      best.argmax = static_cast<std::size_t>(t);
      first = false;
    }
  }
  best.at_point_mass = best.argmax < static_cast<std::size_t>(params.k);
  return best;
}

}  // namespace ldp

#endif  // LDP_SAMPLING_FINITE_HPP_
