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

// Experiment orchestration: finite-space PUT tables, the truncated Gaussian
// mixture experiment, the 2D ring grid demo, and CSV/JSON/SVG output.

#ifndef LDP_SAMPLING_HARNESS_HPP_
#define LDP_SAMPLING_HARNESS_HPP_

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "ldp_sampling/continuous.hpp"
#include "ldp_sampling/distributions.hpp"
#include "ldp_sampling/divergence.hpp"
#include "ldp_sampling/errors.hpp"
#include "ldp_sampling/ext_real.hpp"
#include "ldp_sampling/finite.hpp"
#include "ldp_sampling/numerics.hpp"

namespace ldp {

enum class Mode { kFinite, kGaussMix, kRing };

inline std::string to_string(Mode m) {
  switch (m) {
    case Mode::kFinite:
      return "finite";
    case Mode::kGaussMix:
      return "gaussmix";
    case Mode::kRing:
      return "ring";
  }
  return "unknown";
}

inline constexpr const char* kProposed = "proposed";
inline constexpr const char* kBaselineClosedForm = "baseline_closed_form";
inline constexpr const char* kMixtureQdagger = "mixture_Qdagger";

inline constexpr const char* kTheoretical = "theoretical";
inline constexpr const char* kEmpiricalMax = "empirical_max";

struct ExperimentConfig {
  Mode mode = Mode::kFinite;
  int k = 10;
  std::vector<double> eps_grid{0.1, 0.5, 1.0, 2.0, 5.0};
  std::vector<std::string> divergences{"KL", "TV", "SqHellinger"};
  int N = 100;
  int K = 10;
  double k0 = 2.0;
  std::uint64_t seed = 0;
  ToleranceBand band{1e-9, 1e-9};
  QuadratureConfig quad{};
  std::string out_path;
  int threads = 1;
  bool record_runtime = false;

  // Ring demo.
  int modes = 3;
  double variance = 0.5;
  int grid = 256;

  static ExperimentConfig defaults(Mode mode) {
    ExperimentConfig c;
    c.mode = mode;
    if (mode != Mode::kFinite) c.band = ToleranceBand(1e-5, 1e-5);
    return c;
  }

  void validate() const {
    band.validate();
    if (eps_grid.empty()) throw InvalidArgument("eps grid is empty");
    for (double e : eps_grid) band.check_compatible(e);
    if (N < 1) throw InvalidArgument("N must be >= 1");
    if (mode == Mode::kFinite && k < 2) throw InvalidArgument("k must be >= 2");
    if (divergences.empty()) throw InvalidArgument("no divergences selected");
    for (const auto& d : divergences) {
      if (d != "KL" && d != "TV" && d != "SqHellinger") {
        throw InvalidArgument("divergence '" + d +
                              "' not one of KL, TV, SqHellinger");
      }
    }
    if (threads < 1) throw InvalidArgument("threads must be >= 1");
    quad.validate();
  }
};

struct ResultRow {
  std::string mode;
  std::optional<int> k;
  double eps = 0.0;
  std::optional<double> eps_effective;
  std::string divergence;
  std::string mechanism;
  std::string statistic = kTheoretical;
  ExtReal value;
  std::optional<int> N;
  std::optional<int> K;
  std::optional<double> k0;
  std::optional<std::uint64_t> seed;
  std::optional<double> runtime_ms;
};

namespace internal {

inline std::string format_double(double v) {
  if (std::isinf(v) && v > 0) return "inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
std::string format_opt(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>) {
    return format_double(*v);
  } else {
    return std::to_string(*v);
  }
}

inline void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ResultRow& a, const ResultRow& b) {
                     return std::tie(a.eps, a.divergence, a.mechanism,
                                     a.statistic) <
                            std::tie(b.eps, b.divergence, b.mechanism,
                                     b.statistic);
                   });
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace internal

/// Theoretical proposed and baseline rows for every (eps, f), plus the
/// empirical worst case of the proposed mechanism over the point masses and
/// N - k random pmfs (at least k trials are always run).
inline std::vector<ResultRow> run_finite(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<ResultRow> rows;
  for (double eps : cfg.eps_grid) {
    const auto params = FiniteParams::make(cfg.k, eps);
    const double eps_run = cfg.band.effective_epsilon(eps);
    const auto run_params = FiniteParams::make(cfg.k, eps_run);
    for (const auto& name : cfg.divergences) {
      const auto g = builtin_generator(name);
      ResultRow base;
      base.mode = "finite";
      base.k = cfg.k;
      base.eps = eps;
      base.divergence = name;

      internal::Stopwatch sw;
      ResultRow proposed = base;
      proposed.mechanism = kProposed;
      proposed.value = optimal_put(params, g);
      if (cfg.record_runtime) proposed.runtime_ms = sw.elapsed_ms();
      rows.push_back(proposed);

      internal::Stopwatch sw2;
      ResultRow baseline = base;
      baseline.mechanism = kBaselineClosedForm;
      baseline.value = baseline_put_uniform(params, g);
      if (cfg.record_runtime) baseline.runtime_ms = sw2.elapsed_ms();
      rows.push_back(baseline);

      internal::Stopwatch sw3;
      const int trials = std::max(cfg.N, cfg.k);
      const auto emp =
          empirical_worst_case(run_params, g, trials, cfg.seed, cfg.band);
      ResultRow empirical = base;
      empirical.mechanism = kProposed;
      empirical.statistic = kEmpiricalMax;
      empirical.eps_effective = eps_run;
      empirical.value = ExtReal::finite(emp.value);
      empirical.N = trials;
      empirical.seed = cfg.seed;
      if (cfg.record_runtime) empirical.runtime_ms = sw3.elapsed_ms();
      rows.push_back(empirical);
    }
  }
  internal::sort_rows(rows);
  return rows;
}

struct InstanceLoss {
  std::string divergence;
  ExtReal proposed;
  ExtReal mixture;
};

struct InstanceRecord {
  std::uint64_t index = 0;
  double eps = 0.0;
  GaussMix1D mixture{{0.0}, {1.0}};
  double r = 0.0;
  double mass = 0.0;
  std::vector<InstanceLoss> losses;
};

/// Empirical worst-case loss of the clipping mechanism and the mixture
/// mechanism over N random truncated mixtures, per (eps, f), with the
/// theoretical value of the envelope class. Mechanisms run at
/// band.effective_epsilon(eps) so the released samples are eps-LDP.
/// Per-instance results go to `instances` when given.
inline std::vector<ResultRow> run_gaussmix(
    const ExperimentConfig& cfg,
    std::vector<InstanceRecord>* instances = nullptr) {
  cfg.validate();
  const auto env = envelope_class();
  const MixGenConfig gen{cfg.K, cfg.k0, cfg.seed};
  std::vector<GaussMix1D> corpus;
  corpus.reserve(static_cast<std::size_t>(cfg.N));
  for (int j = 0; j < cfg.N; ++j) {
    corpus.push_back(random_mixture(gen, static_cast<std::uint64_t>(j)));
  }
  std::vector<Generator> gens;
  for (const auto& name : cfg.divergences) gens.push_back(builtin_generator(name));

  std::vector<ResultRow> rows;
  for (double eps : cfg.eps_grid) {
    internal::Stopwatch sw;
    const double eps_run = cfg.band.effective_epsilon(eps);
    const auto cls = env.at_eps(eps_run, cfg.quad);
    std::vector<InstanceRecord> recs(corpus.size());
    std::vector<std::exception_ptr> errors(corpus.size());

    const auto work = [&](std::size_t j) {
      try {
        const Density1D p = corpus[j].density();
        const auto q_star = optimal_density(cls, p, cfg.band, cfg.quad);
        const Density1D q_mix = mixture_density(cls, p, cfg.quad);
        InstanceRecord rec;
        rec.index = j;
        rec.eps = eps;
        rec.mixture = corpus[j];
        rec.r = q_star.r();
        rec.mass = q_star.mass();
        for (const auto& g : gens) {
          rec.losses.push_back(
              {g.name(), utility_loss(cls, p, q_star, g, cfg.quad),
               utility_loss(cls, p, q_mix, g, cfg.quad)});
        }
        recs[j] = std::move(rec);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    };
    if (cfg.threads <= 1) {
      for (std::size_t j = 0; j < corpus.size(); ++j) work(j);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> pool;
      for (int t = 0; t < cfg.threads; ++t) {
        pool.emplace_back([&] {
          for (std::size_t j = next++; j < corpus.size(); j = next++) work(j);
        });
      }
      for (auto& th : pool) th.join();
    }
    for (std::size_t j = 0; j < errors.size(); ++j) {
      if (!errors[j]) continue;
      std::ostringstream os;
      os << "gaussmix instance (seed=" << cfg.seed << ", index=" << j
         << ", eps=" << eps << ") failed: ";
      try {
        std::rethrow_exception(errors[j]);
      } catch (const std::exception& e) {
        os << e.what();
      }
      throw MechanismError(os.str());
    }

    const double elapsed = sw.elapsed_ms();
    for (std::size_t gi = 0; gi < gens.size(); ++gi) {
      ExtReal max_star = ExtReal::finite(0.0);
      ExtReal max_mix = ExtReal::finite(0.0);
      for (const auto& rec : recs) {
        max_star = std::max(max_star, rec.losses[gi].proposed,
                            [](ExtReal a, ExtReal b) { return a < b; });
        max_mix = std::max(max_mix, rec.losses[gi].mixture,
                           [](ExtReal a, ExtReal b) { return a < b; });
      }
      ResultRow base;
      base.mode = "gaussmix";
      base.eps = eps;
      base.eps_effective = eps_run;
      base.divergence = gens[gi].name();

      ResultRow star = base;
      star.mechanism = kProposed;
      star.statistic = kEmpiricalMax;
      star.value = max_star;
      star.N = cfg.N;
      star.K = cfg.K;
      star.k0 = cfg.k0;
      star.seed = cfg.seed;
      if (cfg.record_runtime) star.runtime_ms = elapsed;
      ResultRow mix = star;
      mix.mechanism = kMixtureQdagger;
      mix.value = max_mix;
      ResultRow cap = base;
      cap.mechanism = kProposed;
      cap.statistic = kTheoretical;
      cap.value = optimal_put_continuous(cls, gens[gi]);
      rows.push_back(star);
      rows.push_back(mix);
      rows.push_back(cap);
    }
    if (instances) {
      for (auto& rec : recs) instances->push_back(std::move(rec));
    }
  }
  internal::sort_rows(rows);
  return rows;
}

inline nlohmann::json instances_to_json(
    const std::vector<InstanceRecord>& instances) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& rec : instances) {
    nlohmann::json losses = nlohmann::json::object();
    for (const auto& l : rec.losses) {
      losses[l.divergence] = {{"proposed", l.proposed.to_string()},
                              {"mixture_Qdagger", l.mixture.to_string()}};
    }
    arr.push_back({{"index", rec.index},
                   {"eps", rec.eps},
                   {"mixture", rec.mixture},
                   {"r", rec.r},
                   {"mass", rec.mass},
                   {"losses", losses}});
  }
  return arr;
}

struct RingResult {
  GridDensity2D input;
  GridDensity2D output;
  GridDensity2D envelope;  // normalized reference density h
  double c2 = 0.0;
  double b = 0.0;
  double b_upper = 0.0;
  double r = 0.0;
  double mass = 0.0;
  double eps = 0.0;
  double eps_run = 0.0;
};

/// Grid specialization of the clipping mechanism for the 2D ring. Cells are
/// treated as atoms with weight cell^2; the envelope is
/// exp(-max(0, |x|-1)^2 / (2 sigma^2)) / (2 pi sigma^2), rescaled by the
/// smallest truncated mass of a unit-ball-mean Gaussian so that every
/// truncated mixture of such Gaussians lies below it.
inline RingResult run_ring(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.eps_grid.size() != 1) {
    throw InvalidArgument("ring mode takes exactly one eps");
  }
  RingResult out;
  out.eps = cfg.eps_grid.front();
  out.eps_run = cfg.band.effective_epsilon(out.eps);
  out.input = gaussian_ring_2d(cfg.modes, cfg.variance, cfg.grid);
  const double area = out.input.cell() * out.input.cell();
  const double in_mass = out.input.mass();
  for (auto& v : out.input.values) v /= in_mass;

  // Smallest in-window mass: the mean closest to an edge, at (1, 0).
  const auto worst = gaussian_ring_2d(1, cfg.variance, cfg.grid);
  const double min_mass = worst.mass();
  GridDensity2D h = out.input;
  const double s2 = cfg.variance;
  for (int iy = 0; iy < h.n; ++iy) {
    for (int ix = 0; ix < h.n; ++ix) {
      const double rad = std::hypot(h.center(ix), h.center(iy));
      const double d = std::max(0.0, rad - 1.0);
      h.values[static_cast<std::size_t>(iy) * h.n + ix] =
          std::exp(-d * d / (2.0 * s2)) /
          (2.0 * std::numbers::pi * s2 * min_mass);
    }
  }
  out.c2 = h.mass();
  for (auto& v : h.values) v /= out.c2;
  out.envelope = h;

  const auto k = mechanism_constants(0.0, out.c2, out.eps_run);
  out.b = k.b;
  out.b_upper = k.b_upper;
  std::vector<double> pv(out.input.values.size());
  for (std::size_t i = 0; i < pv.size(); ++i) {
    pv[i] = std::min(out.input.values[i], out.c2 * h.values[i]);
  }
  const auto clipped_mass = [&](double r) {
    CompensatedSum s;
    for (std::size_t i = 0; i < pv.size(); ++i) {
      const double hv = h.values[i];
      const double g = r == 0.0
                           ? (pv[i] > kZeroThreshold ? k.b_upper : k.b) * hv
                           : std::clamp(pv[i] / r, k.b * hv, k.b_upper * hv);
      s.add(g);
    }
    return s.value() * area;
  };
  const auto root = bisect_normalizer(clipped_mass, Interval(k.r1, k.r2),
                                      cfg.band, kDefaultBisectionIterations,
                                      BandStop::kPolish);
  out.r = root.r;
  out.mass = root.mass;
  out.output = out.input;
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const double hv = h.values[i];
    out.output.values[i] =
        std::clamp(pv[i] / root.r, k.b * hv, k.b_upper * hv) / root.mass;
  }
  return out;
}

inline nlohmann::json ring_to_json(const RingResult& ring) {
  const auto matrix = [](const GridDensity2D& g) {
    nlohmann::json rows = nlohmann::json::array();
    for (int iy = 0; iy < g.n; ++iy) {
      std::vector<double> row(g.values.begin() + static_cast<long>(iy) * g.n,
                              g.values.begin() + static_cast<long>(iy + 1) * g.n);
      rows.push_back(row);
    }
    return rows;
  };
  std::vector<double> centers;
  for (int i = 0; i < ring.input.n; ++i) centers.push_back(ring.input.center(i));
  return {{"eps", ring.eps},
          {"eps_effective", ring.eps_run},
          {"c2", ring.c2},
          {"b", ring.b},
          {"b_upper", ring.b_upper},
          {"r", ring.r},
          {"mass", ring.mass},
          {"centers", centers},
          {"input", matrix(ring.input)},
          {"proposed", matrix(ring.output)}};
}

inline constexpr const char* kCsvHeader =
    "mode,k,eps,eps_effective,divergence,mechanism,value,N,K,k0,seed,"
    "runtime_ms";

inline std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += r.mode + ',' + internal::format_opt(r.k) + ',' +
           internal::format_double(r.eps) + ',' +
           internal::format_opt(r.eps_effective) + ',' + r.divergence + ',' +
           r.mechanism + ',' + r.value.to_string() + ',' +
           internal::format_opt(r.N) + ',' + internal::format_opt(r.K) + ',' +
           internal::format_opt(r.k0) + ',' + internal::format_opt(r.seed) +
           ',' + internal::format_opt(r.runtime_ms) + '\n';
  }
  return out;
}

inline nlohmann::json rows_to_json(const std::vector<ResultRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  const auto opt = [](const auto& v) -> nlohmann::json {
    if (v) return *v;
    return nullptr;
  };
  for (const auto& r : rows) {
    nlohmann::json j;
    j["mode"] = r.mode;
    j["k"] = opt(r.k);
    j["eps"] = r.eps;
    j["eps_effective"] = opt(r.eps_effective);
    j["divergence"] = r.divergence;
    j["mechanism"] = r.mechanism;
    j["statistic"] = r.statistic;
    if (r.value.is_infinite()) {
      j["value"] = "inf";
    } else {
      j["value"] = r.value.value();
    }
    j["N"] = opt(r.N);
    j["K"] = opt(r.K);
    j["k0"] = opt(r.k0);
    j["seed"] = opt(r.seed);
    j["runtime_ms"] = opt(r.runtime_ms);
    arr.push_back(std::move(j));
  }
  return arr;
}

enum class Format { kCsv, kJson };

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
}

inline void emit(const std::vector<ResultRow>& rows, Format format,
                 const std::string& path) {
  if (rows.empty()) throw InvalidArgument("emit: no rows");
  if (format == Format::kCsv) {
    write_text(path, rows_to_csv(rows));
  } else {
    write_text(path, rows_to_json(rows).dump(2) + "\n");
  }
}

/// One line chart per divergence: value against eps (log axis), one series
/// per (mechanism, statistic). Infinite values are skipped.
inline std::string rows_to_svg(const std::vector<ResultRow>& rows) {
  std::vector<std::string> divs;
  for (const auto& r : rows) {
    if (std::find(divs.begin(), divs.end(), r.divergence) == divs.end()) {
      divs.push_back(r.divergence);
    }
  }
  const int pw = 320, ph = 240, pad = 40;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << pw * static_cast<int>(divs.size()) << "\" height=\"" << ph << "\">\n";
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  for (std::size_t d = 0; d < divs.size(); ++d) {
    std::vector<const ResultRow*> sel;
    for (const auto& r : rows) {
      if (r.divergence == divs[d] && r.value.is_finite()) sel.push_back(&r);
    }
    if (sel.empty()) continue;
    double xmin = 1e300, xmax = -1e300, ymax = 0.0;
    for (const auto* r : sel) {
      xmin = std::min(xmin, std::log(r->eps));
      xmax = std::max(xmax, std::log(r->eps));
      ymax = std::max(ymax, r->value.value());
    }
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (ymax <= 0.0) ymax = 1.0;
    const double x0 = static_cast<double>(d) * pw;
    const auto px = [&](double e) {
      return x0 + pad + (std::log(e) - xmin) / (xmax - xmin) * (pw - 2 * pad);
    };
    const auto py = [&](double v) {
      return ph - pad - v / ymax * (ph - 2 * pad);
    };
    svg << "<text x=\"" << x0 + pw / 2.0 << "\" y=\"20\" text-anchor=\"middle\">"
        << divs[d] << "</text>\n";
    svg << "<rect x=\"" << x0 + pad << "\" y=\"" << pad << "\" width=\""
        << pw - 2 * pad << "\" height=\"" << ph - 2 * pad
        << "\" fill=\"none\" stroke=\"#888\"/>\n";
    std::vector<std::string> series;
    for (const auto* r : sel) {
      const std::string key = r->mechanism + "/" + r->statistic;
      if (std::find(series.begin(), series.end(), key) == series.end()) {
        series.push_back(key);
      }
    }
    for (std::size_t s = 0; s < series.size(); ++s) {
      svg << "<polyline fill=\"none\" stroke=\"" << colors[s % 4]
          << "\" points=\"";
      for (const auto* r : sel) {
        if (r->mechanism + "/" + r->statistic != series[s]) continue;
        svg << px(r->eps) << ',' << py(r->value.value()) << ' ';
      }
      svg << "\"/>\n";
      svg << "<text x=\"" << x0 + pad + 4 << "\" y=\"" << pad + 14 + 12 * s
          << "\" font-size=\"10\" fill=\"" << colors[s % 4] << "\">"
          << series[s] << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace ldp

#endif  // LDP_SAMPLING_HARNESS_HPP_
