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

// f-divergences between pmfs and between 1D densities.
//
// A generator f is convex on (0, inf) with f(1) = 0. Its boundary limits
// f(0) = lim_{x->0+} f(x) and f*(0) = lim_{x->0+} x f(1/x) may be +inf and
// are carried explicitly, so that q f(p/q) is well defined when p or q
// vanishes:
//   0 f(0/0) = 0,   q f(0/q) = q f(0),   0 f(p/0) = p f*(0).
// Logarithms are natural (KL in nats).

#ifndef LDP_SAMPLING_DIVERGENCE_HPP_
#define LDP_SAMPLING_DIVERGENCE_HPP_

#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ldp_sampling/errors.hpp"
#include "ldp_sampling/ext_real.hpp"
#include "ldp_sampling/numerics.hpp"

namespace ldp {

// Densities or probabilities below this are treated as exactly zero.
inline constexpr double kZeroThreshold = 1e-300;

class Generator {
 public:
  using Fn = std::function<double(double)>;

  /// Builds a generator after checking f(1) = 0 and midpoint convexity on a
  /// log-spaced grid over [1e-6, 1e6]. Throws InvalidArgument otherwise.
  static Generator custom(std::string name, Fn eval, ExtReal f_at_zero,
                          ExtReal fstar_at_zero) {
    Generator g(std::move(name), std::move(eval), f_at_zero, fstar_at_zero);
    g.check_convexity();
    return g;
  }

  const std::string& name() const { return name_; }
  ExtReal f_at_zero() const { return f_at_zero_; }
  ExtReal fstar_at_zero() const { return fstar_at_zero_; }

  // f(x) for x > 0.
  double eval(double x) const { return (*eval_)(x); }
  double operator()(double x) const { return eval(x); }

  // f on [0, inf), with f(0) the boundary limit.
  ExtReal at(double x) const {
    if (x <= 0.0) return f_at_zero_;
    return ExtReal::finite(eval(x));
  }

  /// q f(p/q) with the zero conventions above.
  ExtReal perspective(double p, double q) const {
    const bool p_zero = p <= kZeroThreshold;
    const bool q_zero = q <= kZeroThreshold;
    if (p_zero && q_zero) return ExtReal::finite(0.0);
    if (q_zero) return p * fstar_at_zero_;
    if (p_zero) return q * f_at_zero_;
    return ExtReal::finite(q * eval(p / q));
  }

 private:
  Generator(std::string name, Fn eval, ExtReal f0, ExtReal fstar0)
      : name_(std::move(name)),
        eval_(std::make_shared<const Fn>(std::move(eval))),
        f_at_zero_(f0),
        fstar_at_zero_(fstar0) {}

  friend Generator builtin_generator(std::string_view name);

  void check_convexity() const {
    const double f1 = eval(1.0);
    if (!(std::abs(f1) <= 1e-12)) {
      std::ostringstream os;
      os << "generator '" << name_ << "': f(1) = " << f1 << ", expected 0";
      throw InvalidArgument(os.str());
    }
    std::vector<double> grid;
    for (int i = 0; i <= 120; ++i) grid.push_back(std::pow(10.0, -6.0 + 0.1 * i));
    std::vector<double> values;
    values.reserve(grid.size());
    for (double x : grid) {
      const double v = eval(x);
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "generator '" << name_ << "' is not finite at x=" << x;
        throw InvalidArgument(os.str());
      }
      values.push_back(v);
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (std::size_t j = i + 1; j < grid.size(); ++j) {
        const double avg = 0.5 * (values[i] + values[j]);
        const double mid = eval(0.5 * (grid[i] + grid[j]));
        if (mid > avg + 1e-10 * std::max(1.0, std::abs(avg))) {
          std::ostringstream os;
          os << "generator '" << name_ << "' fails midpoint convexity at ("
             << grid[i] << ", " << grid[j] << ")";
          throw InvalidArgument(os.str());
        }
      }
    }
  }

  std::string name_;
  std::shared_ptr<const Fn> eval_;
  ExtReal f_at_zero_;
  ExtReal fstar_at_zero_;
};

/// One of "KL" (x log x), "TV" (|x-1|/2), "SqHellinger" ((1-sqrt x)^2) or
/// "ChiSq" (x^2 - 1), with exact boundary limits.
inline Generator builtin_generator(std::string_view name) {
  const auto inf = ExtReal::infinity();
  const auto fin = [](double v) { return ExtReal::finite(v); };
  if (name == "KL") {
    return Generator("KL", [](double x) { return x * std::log(x); }, fin(0.0),
                     inf);
  }
  if (name == "TV") {
    return Generator("TV", [](double x) { return 0.5 * std::abs(x - 1.0); },
                     fin(0.5), fin(0.5));
  }
  if (name == "SqHellinger") {
    return Generator("SqHellinger",
                     [](double x) {
                       const double d = 1.0 - std::sqrt(x);
                       return d * d;
                     },
                     fin(1.0), fin(1.0));
  }
  if (name == "ChiSq") {
    return Generator("ChiSq", [](double x) { return x * x - 1.0; }, fin(-1.0),
                     inf);
  }
  throw InvalidArgument("unknown generator '" + std::string(name) +
                        "'; expected KL, TV, SqHellinger or ChiSq");
}

// M_f = f(0) + f*(0), attained by mutually singular pairs.
inline ExtReal max_divergence(const Generator& g) {
  return g.f_at_zero() + g.fstar_at_zero();
}

namespace internal {

class ExtSum {
 public:
  void add(ExtReal v) {
    if (v.is_infinite()) {
      infinite_ = true;
    } else {
      finite_.add(v.value());
    }
  }
  ExtReal value() const {
    return infinite_ ? ExtReal::infinity() : ExtReal::finite(finite_.value());
  }

 private:
  CompensatedSum finite_;
  bool infinite_ = false;
};

inline void check_probability(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    std::ostringstream os;
    os << what << " = " << v << " is not in [0, 1]";
    throw InvalidArgument(os.str());
  }
}

}  // namespace internal

/// D_f(Bern(l1) || Bern(l2)).
inline ExtReal binary_divergence(const Generator& g, double lambda1,
                                 double lambda2) {
  internal::check_probability(lambda1, "lambda1");
  internal::check_probability(lambda2, "lambda2");
  return g.perspective(lambda1, lambda2) +
         g.perspective(1.0 - lambda1, 1.0 - lambda2);
}

inline ExtReal pmf_divergence(const Generator& g, std::span<const double> p,
                              std::span<const double> q) {
  if (p.size() != q.size() || p.empty()) {
    std::ostringstream os;
    os << "pmf_divergence: length mismatch (" << p.size() << " vs "
       << q.size() << ")";
    throw InvalidArgument(os.str());
  }
  internal::ExtSum sum;
  for (std::size_t i = 0; i < p.size(); ++i) sum.add(g.perspective(p[i], q[i]));
  return sum.value();
}

namespace internal {

inline ExtReal density_divergence_on(const Generator& g, const Density1D& p,
                                     const Density1D& q,
                                     const QuadratureConfig& quad) {
  const QuadratureRule rule(p.support, quad);
  ExtSum sum;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double x = rule.nodes[i];
    const double pv = p.eval(x);
    const double qv = q.eval(x);
    if (!std::isfinite(pv) || !std::isfinite(qv) || pv < 0.0 || qv < 0.0) {
      std::ostringstream os;
      os << "density_divergence: invalid density values p=" << pv
         << ", q=" << qv << " at x=" << x;
      throw NumericError(os.str(), 0.0, 0.0, x);
    }
    const ExtReal term = g.perspective(pv, qv);
    if (term.is_infinite()) return ExtReal::infinity();
    sum.add(rule.weights[i] * term);
  }
  return sum.value();
}

}  // namespace internal

/// D_f(p || q) for densities on a common interval, by composite
/// Gauss-Legendre quadrature. The same integral at half the panel count gives
/// a residual; if it exceeds quad.abs_tol a NumericError carrying the
/// estimate and residual is thrown.
inline ExtReal density_divergence(const Generator& g, const Density1D& p,
                                  const Density1D& q,
                                  const QuadratureConfig& quad = {}) {
  if (!(p.support == q.support)) {
    throw InvalidArgument("density_divergence: densities must share support");
  }
  const ExtReal fine = internal::density_divergence_on(g, p, q, quad);
  if (fine.is_infinite() || quad.panels < 2) return fine;
  const ExtReal coarse =
      internal::density_divergence_on(g, p, q, quad.coarsened());
  if (coarse.is_infinite()) return fine;
  const double residual = std::abs(fine.value() - coarse.value());
  if (residual > quad.abs_tol) {
    std::ostringstream os;
    os << "density_divergence: quadrature residual " << residual
       << " exceeds abs_tol " << quad.abs_tol << " (estimate "
       << fine.value() << ")";
    throw NumericError(os.str(), fine.value(), residual);
  }
  return fine;
}

/// Largest D_f(P || Q) over pairs whose likelihood ratio p/q stays in
/// [r1, r2], 0 <= r1 < 1 < r2:
///   (1-r1)/(r2-r1) f(r2) + (r2-1)/(r2-r1) f(r1),
/// with f(0) the boundary limit when r1 = 0. This is also the minimax value of
/// both mechanisms once r1, r2 are fixed.
inline ExtReal ratio_bounded_worst_case(const Generator& g, double r1,
                                        double r2) {
  if (!(r1 >= 0.0 && r1 < 1.0 && r2 > 1.0 && std::isfinite(r2))) {
    std::ostringstream os;
    os << "ratio_bounded_worst_case: need 0 <= r1 < 1 < r2, got r1=" << r1
       << ", r2=" << r2;
    throw InvalidArgument(os.str());
  }
  const double span = r2 - r1;
  return ((1.0 - r1) / span) * g.at(r2) + ((r2 - 1.0) / span) * g.at(r1);
}

}  // namespace ldp

#endif  // LDP_SAMPLING_DIVERGENCE_HPP_
