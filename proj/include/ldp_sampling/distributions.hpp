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

// Experiment distributions: unit-variance Gaussian mixtures truncated to
// [-4, 4] with means in [-1, 1], the envelope that contains all of them, and
// the 2D Gaussian ring used for the grid demo.

#ifndef LDP_SAMPLING_DISTRIBUTIONS_HPP_
#define LDP_SAMPLING_DISTRIBUTIONS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>
#include "ldp_sampling/continuous.hpp"
#include "ldp_sampling/errors.hpp"
#include "ldp_sampling/numerics.hpp"

namespace ldp {

inline constexpr double kTruncation = 4.0;

class GaussMix1D {
 public:
  GaussMix1D(std::vector<double> means, std::vector<double> weights)
      : means_(std::move(means)), weights_(std::move(weights)) {
    if (means_.empty() || means_.size() != weights_.size()) {
      throw InvalidArgument("GaussMix1D: need equally many means and weights");
    }
    double total = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0)) throw InvalidArgument("GaussMix1D: negative weight");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw InvalidArgument("GaussMix1D: weights must sum to 1");
    }
    for (double m : means_) {
      if (!(std::abs(m) <= 1.0)) {
        throw InvalidArgument("GaussMix1D: means must lie in [-1, 1]");
      }
    }
    // Mass of the untruncated mixture on [-4, 4].
    normalizer_ = 0.0;
    for (std::size_t i = 0; i < means_.size(); ++i) {
      normalizer_ += weights_[i] * (normal_cdf(kTruncation - means_[i]) -
                                    normal_cdf(-kTruncation - means_[i]));
    }
  }

  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& weights() const { return weights_; }
  double normalizer() const { return normalizer_; }
  Interval truncation() const { return Interval(-kTruncation, kTruncation); }
  std::size_t size() const { return means_.size(); }

  double pdf(double x) const {
    if (!(std::abs(x) <= kTruncation)) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < means_.size(); ++i) {
      s += weights_[i] * normal_pdf(x - means_[i]);
    }
    return s / normalizer_;
  }

  Density1D density() const {
    auto self = *this;
    return Density1D{truncation(), [self](double x) { return self.pdf(x); }};
  }

  friend bool operator==(const GaussMix1D&, const GaussMix1D&) = default;

 private:
  std::vector<double> means_;
  std::vector<double> weights_;
  double normalizer_ = 1.0;
};

inline double mixture_pdf(const GaussMix1D& m, double x) { return m.pdf(x); }

inline void to_json(nlohmann::json& j, const GaussMix1D& m) {
  j = nlohmann::json{{"means", m.means()}, {"weights", m.weights()}};
}

inline GaussMix1D mixture_from_json(const nlohmann::json& j) {
  return GaussMix1D(j.at("means").get<std::vector<double>>(),
                    j.at("weights").get<std::vector<double>>());
}

struct MixGenConfig {
  int K = 10;         // cap on the number of components
  double k0 = 2.0;    // Poisson mean
  std::uint64_t seed = 0;

  void validate() const {
    if (K < 1) throw InvalidArgument("MixGenConfig: K must be >= 1");
    if (!(k0 > 0.0)) throw InvalidArgument("MixGenConfig: k0 must be > 0");
  }
};

/// Mixture `index` of the corpus for `cfg`: k = min(Poisson(k0) + 1, K)
/// components, means uniform on [-1, 1], weights uniform on the simplex.
/// Draws come from Rng::for_stream(seed, index).
inline GaussMix1D random_mixture(const MixGenConfig& cfg, std::uint64_t index) {
  cfg.validate();
  Rng rng = Rng::for_stream(cfg.seed, index);
  const int k = std::min(rng.poisson(cfg.k0) + 1, cfg.K);
  std::vector<double> means(static_cast<std::size_t>(k));
  for (auto& m : means) m = rng.uniform(-1.0, 1.0);
  auto weights = rng.simplex(static_cast<std::size_t>(k));
  return GaussMix1D(std::move(means), std::move(weights));
}

// Envelope for every truncated mixture: the class (c1 = 0, c2, h).
struct EnvelopeClass {
  double c2 = 0.0;
  Density1D h;

  ContinuousClass at_eps(double eps, const QuadratureConfig& quad = {}) const {
    return ContinuousClass::make(0.0, c2, h, eps, quad);
  }
};

/// h~(x) = exp(-max(|x|-1, 0)^2 / 2) / (sqrt(2 pi) (Phi(3) - Phi(-5))) on
/// [-4, 4] bounds every mixture pdf pointwise. c2 is its integral, in closed
/// form, and h = h~ / c2.
inline EnvelopeClass envelope_class() {
  const double sqrt2pi = std::sqrt(2.0 * std::numbers::pi);
  const double min_mass = normal_cdf(3.0) - normal_cdf(-5.0);
  const double scale = 1.0 / (sqrt2pi * min_mass);
  const double flat_plus_tails = 2.0 + 2.0 * sqrt2pi * (normal_cdf(3.0) - 0.5);
  EnvelopeClass env;
  env.c2 = flat_plus_tails * scale;
  const double h_scale = scale / env.c2;
  env.h = Density1D{Interval(-kTruncation, kTruncation), [h_scale](double x) {
                      if (!(std::abs(x) <= kTruncation)) return 0.0;
                      const double d = std::max(std::abs(x) - 1.0, 0.0);
                      return h_scale * std::exp(-0.5 * d * d);
                    }};
  return env;
}

/// Density tabulated at the centres of an n x n grid on [lo, hi]^2, stored
/// row-major with rows indexed by y.
struct GridDensity2D {
  int n = 0;
  double lo = -kTruncation;
  double hi = kTruncation;
  std::vector<double> values;

  double cell() const { return (hi - lo) / n; }
  double center(int i) const { return lo + (i + 0.5) * cell(); }
  double at(int ix, int iy) const {
    return values[static_cast<std::size_t>(iy) * n + ix];
  }
  double mass() const {
    CompensatedSum s;
    for (double v : values) s.add(v);
    return s.value() * cell() * cell();
  }
};

/// Equal-weight mixture of `modes` isotropic Gaussians with the given
/// variance and means cos/sin(2 pi i / modes), one of them at (1, 0).
inline GridDensity2D gaussian_ring_2d(int modes, double variance,
                                      int grid = 256) {
  if (modes < 1) throw InvalidArgument("gaussian_ring_2d: modes must be >= 1");
  if (!(variance > 0.0)) {
    throw InvalidArgument("gaussian_ring_2d: variance must be > 0");
  }
  if (grid < 2) throw InvalidArgument("gaussian_ring_2d: grid must be >= 2");
  GridDensity2D g;
  g.n = grid;
  g.values.assign(static_cast<std::size_t>(grid) * grid, 0.0);
  const double norm = 1.0 / (2.0 * std::numbers::pi * variance * modes);
  std::vector<std::pair<double, double>> mu;
  for (int i = 0; i < modes; ++i) {
    const double t = 2.0 * std::numbers::pi * i / modes;
    mu.emplace_back(std::cos(t), std::sin(t));
  }
  for (int iy = 0; iy < grid; ++iy) {
    for (int ix = 0; ix < grid; ++ix) {
      const double x = g.center(ix), y = g.center(iy);
      double s = 0.0;
      for (const auto& [mx, my] : mu) {
        const double dx = x - mx, dy = y - my;
        s += std::exp(-(dx * dx + dy * dy) / (2.0 * variance));
      }
      g.values[static_cast<std::size_t>(iy) * grid + ix] = norm * s;
    }
  }
  return g;
}

}  // namespace ldp

#endif  // LDP_SAMPLING_DISTRIBUTIONS_HPP_
