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

// Numeric substrate shared by the finite and continuous mechanisms:
// composite Gauss-Legendre quadrature, the tolerance-band bisection used to
// find normalizing constants, a seedable RNG with derived streams, and a
// grid inverse-CDF sampler.

#ifndef LDP_SAMPLING_NUMERICS_HPP_
#define LDP_SAMPLING_NUMERICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ldp_sampling/errors.hpp"

namespace ldp {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  Interval() = default;
  Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
      std::ostringstream os;
      os << "Interval requires finite lo < hi, got [" << lo << ", " << hi
         << "]";
      throw InvalidArgument(os.str());
    }
  }

  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct QuadratureConfig {
  int panels = 512;
  int nodes_per_panel = 16;
  double abs_tol = 1e-6;

  void validate() const {
    if (panels <= 0 || nodes_per_panel <= 0) {
      throw InvalidArgument("QuadratureConfig: panels and nodes must be > 0");
    }
    if (!(abs_tol > 0.0)) {
      throw InvalidArgument("QuadratureConfig: abs_tol must be > 0");
    }
    if (static_cast<long long>(panels) * nodes_per_panel > 10'000'000LL) {
      throw InvalidArgument("QuadratureConfig: more than 1e7 nodes");
    }
  }

  // Same rule at half the panel count; used for residual estimates.
  QuadratureConfig coarsened() const {
    QuadratureConfig c = *this;
    c.panels = std::max(1, panels / 2);
    return c;
  }
};

// Acceptable normalization window [1 - delta1, 1 + delta2].
struct ToleranceBand {
  double delta1 = 1e-9;
  double delta2 = 1e-9;

  ToleranceBand() = default;
  ToleranceBand(double d1, double d2) : delta1(d1), delta2(d2) { validate(); }

  void validate() const {
    if (!(delta1 >= 0.0 && delta1 < 1.0)) {
      throw InvalidArgument("ToleranceBand: delta1 must lie in [0, 1)");
    }
    if (!(delta2 >= 0.0) || !std::isfinite(delta2)) {
      throw InvalidArgument("ToleranceBand: delta2 must be >= 0");
    }
  }

  double lower() const { return 1.0 - delta1; }
  double upper() const { return 1.0 + delta2; }
  bool contains(double mass) const {
    return mass >= lower() && mass <= upper();
  }

  // Privacy charged for accepting any mass in the band.
  double penalty() const { return std::log((1.0 + delta2) / (1.0 - delta1)); }

  // Budget at which to run a mechanism so that the released output is
  // eps-LDP despite approximate normalization.
  double effective_epsilon(double eps) const { return eps - penalty(); }

  void check_compatible(double eps) const {
    validate();
    if (!(penalty() < eps)) {
      std::ostringstream os;
      os << "ToleranceBand penalty " << penalty()
         << " leaves no privacy budget at eps=" << eps;
      throw InvalidArgument(os.str());
    }
  }
};

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence. Accurate to a few ulps for n <= 128.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(
    int n) {
  if (n <= 0) throw InvalidArgument("gauss_legendre: n must be > 0");
  std::vector<double> x(n), w(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    if (n == 1) dp = 1.0, z = 0.0;
    const double wi = n == 1 ? 2.0 : 2.0 / ((1.0 - z * z) * dp * dp);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = wi;
    w[n - 1 - i] = wi;
  }
  return {x, w};
}

// Composite rule materialized on an interval. Mechanisms tabulate densities
// on `nodes` once and then work with plain arrays.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  QuadratureRule(const Interval& domain, const QuadratureConfig& quad) {
    quad.validate();
    const auto [gx, gw] = gauss_legendre(quad.nodes_per_panel);
    const double h = domain.width() / quad.panels;
    nodes.reserve(static_cast<std::size_t>(quad.panels) * gx.size());
    weights.reserve(nodes.capacity());
    for (int p = 0; p < quad.panels; ++p) {
      const double a = domain.lo + p * h;
      const double mid = a + 0.5 * h;
      for (std::size_t j = 0; j < gx.size(); ++j) {
        nodes.push_back(mid + 0.5 * h * gx[j]);
        weights.push_back(0.5 * h * gw[j]);
      }
    }
  }

  std::size_t size() const { return nodes.size(); }
};

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Composite fixed-node Gauss-Legendre estimate of the integral of `fn` over
/// `domain`. Deterministic for identical inputs. For integrands that are
/// smooth on every panel the error is O(h^(2n)) with h the panel width and n
/// the nodes per panel; a kink or jump inside a panel degrades that panel to
/// low order.
template <typename Fn>
double integrate(Fn&& fn, const Interval& domain,
                 const QuadratureConfig& quad = {}) {
  const QuadratureRule rule(domain, quad);
  CompensatedSum acc;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = fn(rule.nodes[i]);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "integrate: integrand is " << v << " at x=" << rule.nodes[i];
      throw NumericError(os.str(), acc.value(), 0.0, rule.nodes[i]);
    }
    acc.add(rule.weights[i] * v);
  }
  return acc.value();
}

struct NormalizerRoot {
  double r = 0.0;
  double mass = 0.0;
  int iterations = 0;
};

inline constexpr int kDefaultBisectionIterations = 200;
inline constexpr double kBracketSlack = 1e-12;
inline constexpr double kPolishTolerance = 4e-16;

enum class BandStop {
  kFirstHit,  // return the first r whose mass is inside the band
  kPolish,    // keep bisecting inside the band toward mass == 1
};

/// Finds r in `bracket` with mass(r) inside `band`, for a continuous
/// non-increasing `mass`. The bracket must satisfy mass(lo) >= 1 and
/// mass(hi) <= 1 up to kBracketSlack. A zero lower endpoint is probed through
/// `mass(0)` (the caller defines that limit) but never returned, since r is a
/// divisor; on a plateau where mass is 1 on the whole bracket the upper end is
/// returned.
///
/// With BandStop::kPolish the search continues after the first in-band hit
/// until |mass - 1| <= kPolishTolerance or the bracket stops shrinking, and
/// returns the in-band point closest to 1. The returned mass is always inside
/// the band.
template <typename MassFn>
NormalizerRoot bisect_normalizer(MassFn&& mass, const Interval& bracket,
                                 const ToleranceBand& band,
                                 int max_iter = kDefaultBisectionIterations,
                                 BandStop stop = BandStop::kFirstHit) {
  band.validate();
  if (max_iter <= 0) throw InvalidArgument("bisect_normalizer: max_iter <= 0");
  if (bracket.lo < 0.0) {
    throw InvalidArgument("bisect_normalizer: bracket must be nonnegative");
  }
  std::optional<NormalizerRoot> best;
  const auto accept = [&](double r, double m, int it) {
    if (!band.contains(m)) return false;
    if (stop == BandStop::kFirstHit ||
        std::abs(m - 1.0) <= kPolishTolerance) {
      best = NormalizerRoot{r, m, it};
      return true;
    }
    if (!best || std::abs(m - 1.0) < std::abs(best->mass - 1.0)) {
      best = NormalizerRoot{r, m, it};
    }
    return false;
  };
  const double m_lo = mass(bracket.lo);
  if (bracket.lo > 0.0 && accept(bracket.lo, m_lo, 0)) return *best;
  const double m_hi = mass(bracket.hi);
  if (accept(bracket.hi, m_hi, 0)) return *best;
  if (best) {
    // An endpoint is in the band; polish only when the bracket is valid.
    if (m_lo < 1.0 || m_hi > 1.0) return *best;
  } else if (m_lo < 1.0 - kBracketSlack || m_hi > 1.0 + kBracketSlack) {
    std::ostringstream os;
    os.precision(17);
    os << "bisect_normalizer: bracket [" << bracket.lo << ", " << bracket.hi
       << "] has mass(lo)=" << m_lo << ", mass(hi)=" << m_hi
       << "; need mass(lo) >= 1 >= mass(hi)";
    throw ContractError(os.str());
  }
  double lo = bracket.lo;
  double hi = bracket.hi;
  for (int it = 1; it <= max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double m = mass(mid);
    if (!std::isfinite(m)) {
      throw NumericError("bisect_normalizer: non-finite mass", m, 0.0, mid);
    }
    if (accept(mid, m, it)) return *best;
    if (m > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (best) return *best;
  std::ostringstream os;
  os.precision(17);
  os << "bisect_normalizer: band not reached after " << max_iter
     << " iterations; last bracket [" << lo << ", " << hi << "]";
  throw NonConvergence(os.str(), lo, hi);
}

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// xoshiro256** seeded through splitmix64. Streams for parallel tasks are
/// derived from (master seed, task index) so results do not depend on
/// scheduling.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& s : state_) s = splitmix64(sm);
  }

  static Rng for_stream(std::uint64_t master, std::uint64_t index) {
    std::uint64_t sm = master ^ (0x9E3779B97F4A7C15ULL * (index + 1));
    return Rng(splitmix64(sm));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double exponential() { return -std::log1p(-uniform()); }

  // Inversion of the Poisson cdf; one uniform per draw.
  int poisson(double mean) {
    if (!(mean > 0.0)) throw InvalidArgument("poisson: mean must be > 0");
    const double u = uniform();
    double p = std::exp(-mean);
    double cdf = p;
    int k = 0;
    while (u >= cdf && k < 100000) {
      ++k;
      p *= mean / k;
      cdf += p;
      if (p == 0.0 && cdf < u) break;
    }
    return k;
  }

  // Uniform point on the probability simplex of dimension k.
  std::vector<double> simplex(std::size_t k) {
    std::vector<double> w(k);
    double total = 0.0;
    for (auto& v : w) {
      v = exponential();
      total += v;
    }
    for (auto& v : w) v /= total;
    return w;
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

// A pdf on a bounded interval, evaluated as a black box.
struct Density1D {
  Interval support;
  std::function<double(double)> eval;

  double operator()(double x) const {
    return support.contains(x) ? eval(x) : 0.0;
  }
};

/// Seeded sampler from a tabulated cdf: the support is cut into `grid_size`
/// equal cells, each cell's mass is integrated with an 8-point rule, and draws
/// are uniform within the selected cell.
class InverseCdfSampler {
 public:
  static constexpr int kDefaultGridSize = 4096;

  InverseCdfSampler(const Density1D& pdf, int grid_size, std::uint64_t seed)
      : support_(pdf.support), rng_(seed) {
    if (grid_size <= 0) {
      throw InvalidArgument("InverseCdfSampler: grid_size must be > 0");
    }
    const double h = support_.width() / grid_size;
    cell_width_ = h;
    const auto [gx, gw] = gauss_legendre(8);
    cdf_.assign(static_cast<std::size_t>(grid_size) + 1, 0.0);
    CompensatedSum acc;
    for (int i = 0; i < grid_size; ++i) {
      const double mid = support_.lo + (i + 0.5) * h;
      double cell = 0.0;
      for (std::size_t j = 0; j < gx.size(); ++j) {
        const double v = pdf.eval(mid + 0.5 * h * gx[j]);
        if (!(v >= 0.0) || !std::isfinite(v)) {
          throw InvalidArgument(
              "InverseCdfSampler: pdf must be finite and nonnegative");
        }
        cell += 0.5 * h * gw[j] * v;
      }
      acc.add(cell);
      cdf_[i + 1] = acc.value();
    }
    const double total = cdf_.back();
    if (std::abs(total - 1.0) > 1e-3) {
      std::ostringstream os;
      os << "InverseCdfSampler: pdf integrates to " << total
         << ", expected 1 within 1e-3";
      throw InvalidArgument(os.str());
    }
    for (auto& c : cdf_) c /= total;
    cdf_.back() = 1.0;
  }

  InverseCdfSampler(const Density1D& pdf, std::uint64_t seed)
      : InverseCdfSampler(pdf, kDefaultGridSize, seed) {}

  double operator()() {
    const double u = rng_.uniform();
    // First cell whose right cdf exceeds u; it has positive mass.
    const auto it = std::upper_bound(cdf_.begin() + 1, cdf_.end(), u);
    const std::size_t cell =
        static_cast<std::size_t>(std::distance(cdf_.begin() + 1, it));
    const std::size_t i = std::min(cell, cdf_.size() - 2);
    const double mass = cdf_[i + 1] - cdf_[i];
    const double frac = mass > 0.0 ? (u - cdf_[i]) / mass : 0.5;
    return support_.lo + (static_cast<double>(i) + std::clamp(frac, 0.0, 1.0)) *
                             cell_width_;
  }

  // Piecewise-linear cdf implied by the grid.
  double grid_cdf(double x) const {
    if (x <= support_.lo) return 0.0;
    if (x >= support_.hi) return 1.0;
    const double pos = (x - support_.lo) / cell_width_;
    const auto i = std::min(static_cast<std::size_t>(pos), cdf_.size() - 2);
    const double frac = pos - static_cast<double>(i);
    return cdf_[i] + frac * (cdf_[i + 1] - cdf_[i]);
  }

  const Interval& support() const { return support_; }

 private:
  Interval support_;
  Rng rng_;
  double cell_width_ = 0.0;
  std::vector<double> cdf_;
};

}  // namespace ldp

#endif  // LDP_SAMPLING_NUMERICS_HPP_
