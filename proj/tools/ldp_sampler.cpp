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

// Command-line front end for the experiment harness.
//
//   ldp_sampler finite   --k 10 [--eps-grid 0.1,0.5,1,2,5] --out results/finite_k10
//   ldp_sampler gaussmix --eps 0.5 --seed 2 --out results/gaussmix_eps0.5
//   ldp_sampler ring     --eps 0.5 --modes 3 --variance 0.5 --out results/ring
//
// Exit codes: 0 success, 1 contract or argument error, 2 I/O error.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ldp_sampling.hpp"

namespace {

struct Options {
  int k = 10;
  std::vector<double> eps_grid;
  double eps = 0.0;
  std::vector<std::string> divergences{"KL", "TV", "SqHellinger"};
  int trials = 100;
  int K = 10;
  double k0 = 2.0;
  std::uint64_t seed = 0;
  double delta1 = -1.0;
  double delta2 = -1.0;
  std::string out;
  std::string svg;
  std::string dump;
  bool fast = false;
  bool timing = false;
  int threads = 1;
  int modes = 3;
  double variance = 0.5;
  int grid = 256;
};

std::uint64_t env_seed() {
  if (const char* s = std::getenv("LDP_SAMPLER_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw ldp::InvalidArgument(std::string("LDP_SAMPLER_SEED is not an integer: ") + s);
    }
  }
  return 0;
}

ldp::ExperimentConfig make_config(ldp::Mode mode, const Options& o) {
  auto cfg = ldp::ExperimentConfig::defaults(mode);
  cfg.k = o.k;
  if (!o.eps_grid.empty()) {
    cfg.eps_grid = o.eps_grid;
  } else if (o.eps > 0.0) {
    cfg.eps_grid = {o.eps};
  } else if (mode == ldp::Mode::kRing) {
    cfg.eps_grid = {0.5};
  }
  cfg.divergences = o.divergences;
  cfg.N = o.trials;
  cfg.K = o.K;
  cfg.k0 = o.k0;
  cfg.seed = o.seed;
  if (o.delta1 >= 0.0) cfg.band.delta1 = o.delta1;
  if (o.delta2 >= 0.0) cfg.band.delta2 = o.delta2;
  if (o.fast) {
    cfg.quad.panels = std::max(1, cfg.quad.panels / 2);
    cfg.grid = std::max(2, o.grid / 2);
  } else {
    cfg.grid = o.grid;
  }
  cfg.threads = o.threads;
  cfg.record_runtime = o.timing;
  cfg.modes = o.modes;
  cfg.variance = o.variance;
  cfg.out_path = o.out;
  return cfg;
}

void write_rows(const std::vector<ldp::ResultRow>& rows, const Options& o) {
  if (o.out.empty()) {
    std::cout << ldp::rows_to_csv(rows);
  } else {
    ldp::emit(rows, ldp::Format::kCsv, o.out + ".csv");
    ldp::emit(rows, ldp::Format::kJson, o.out + ".json");
    std::cerr << "wrote " << o.out << ".csv and " << o.out << ".json\n";
  }
  if (!o.svg.empty()) ldp::write_text(o.svg, ldp::rows_to_svg(rows));
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--eps-grid", o.eps_grid, "Privacy budgets")->delimiter(',');
  cmd->add_option("--divergences", o.divergences, "Subset of KL,TV,SqHellinger")
      ->delimiter(',');
  cmd->add_option("--seed", o.seed, "Master seed (default $LDP_SAMPLER_SEED or 0)");
  cmd->add_option("--band-delta1", o.delta1, "Lower normalization tolerance");
  cmd->add_option("--band-delta2", o.delta2, "Upper normalization tolerance");
  cmd->add_option("--out", o.out, "Output path prefix; writes <out>.csv and <out>.json");
  cmd->add_flag("--timing", o.timing, "Record runtime_ms (breaks byte-stable output)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal locally private sampling: PUT tables and experiments"};
  app.require_subcommand(1);
  Options o;

  auto* finite = app.add_subcommand("finite", "Worst-case f-divergence tables on [k]");
  finite->add_option("--k", o.k, "Alphabet size")->required();
  finite->add_option("--trials", o.trials, "Pmfs for the empirical worst case");
  finite->add_option("--svg", o.svg, "Also render a line chart");
  add_common(finite, o);

  auto* gauss = app.add_subcommand("gaussmix", "Truncated 1D Gaussian mixture experiment");
  gauss->add_option("--eps", o.eps, "Privacy budget (or use --eps-grid)");
  gauss->add_option("--trials", o.trials, "Number of mixtures N");
  gauss->add_option("--K", o.K, "Cap on mixture components");
  gauss->add_option("--k0", o.k0, "Poisson mean for component count");
  gauss->add_option("--threads", o.threads, "Worker threads");
  gauss->add_option("--dump", o.dump, "Per-instance JSON dump path");
  gauss->add_option("--svg", o.svg, "Also render a line chart");
  gauss->add_flag("--fast", o.fast, "Halve quadrature resolution");
  add_common(gauss, o);

  auto* ring = app.add_subcommand("ring", "2D Gaussian ring grid demo");
  ring->add_option("--eps", o.eps, "Privacy budget");
  ring->add_option("--modes", o.modes, "Number of ring components");
  ring->add_option("--variance", o.variance, "Per-axis component variance");
  ring->add_option("--grid", o.grid, "Grid cells per axis");
  ring->add_flag("--fast", o.fast, "Halve grid resolution");
  add_common(ring, o);

  try {
    o.seed = env_seed();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  CLI11_PARSE(app, argc, argv);

  try {
    if (finite->parsed()) {
      write_rows(ldp::run_finite(make_config(ldp::Mode::kFinite, o)), o);
    } else if (gauss->parsed()) {
      if (o.eps <= 0.0 && o.eps_grid.empty()) {
        throw ldp::InvalidArgument("gaussmix needs --eps or --eps-grid");
      }
      std::vector<ldp::InstanceRecord> instances;
      const auto cfg = make_config(ldp::Mode::kGaussMix, o);
      write_rows(ldp::run_gaussmix(cfg, o.dump.empty() ? nullptr : &instances), o);
      if (!o.dump.empty()) {
        ldp::write_text(o.dump, ldp::instances_to_json(instances).dump(1) + "\n");
      }
    } else if (ring->parsed()) {
      const auto result = ldp::run_ring(make_config(ldp::Mode::kRing, o));
      const std::string text = ldp::ring_to_json(result).dump() + "\n";
      if (o.out.empty()) {
        std::cout << text;
      } else {
        ldp::write_text(o.out + ".json", text);
        std::cerr << "wrote " << o.out << ".json\n";
      }
    }
  } catch (const ldp::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
