// Copyright 2026 The cavsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// cavsim <run|sweep|oracle|baseline|closedform> [--config FILE] [--seed N]
//        [--runs N] [--workers N] [--out FILE] [--set key=value ...]

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cavsim/commands.hpp"
#include "cavsim/config.hpp"
#include "cavsim/error.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<unsigned> workers;
  std::string out_path;
  std::vector<std::string> settings;
  std::string sweep_param;
  std::string sweep_range;  // "start..stop"
  std::optional<int> sweep_steps;
};

cavsim::RunConfig resolve(const Flags& flags) {
  cavsim::RunConfig cfg;
  if (!flags.config_path.empty()) {
    cfg = cavsim::load_config_file(flags.config_path);
  }
  for (const auto& kv : flags.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      cavsim::fail(cavsim::ErrorKind::Config, "--set expects key=value, got '" + kv + "'");
    }
    cavsim::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!flags.sweep_param.empty()) {
    cavsim::apply_setting(cfg, "sweep_param", flags.sweep_param);
  }
  if (!flags.sweep_range.empty()) {
    const auto dots = flags.sweep_range.find("..");
    if (dots == std::string::npos) {
      cavsim::fail(cavsim::ErrorKind::Config,
                   "sweep range: expected start..stop, got '" + flags.sweep_range + "'");
    }
    cavsim::apply_setting(cfg, "sweep_start", flags.sweep_range.substr(0, dots));
    cavsim::apply_setting(cfg, "sweep_stop", flags.sweep_range.substr(dots + 2));
  }
  if (flags.sweep_steps) {
    cavsim::apply_setting(cfg, "sweep_steps", std::to_string(*flags.sweep_steps));
  }
  if (flags.seed) cfg.master_seed = *flags.seed;
  if (flags.runs) cfg.n_runs = *flags.runs;
  if (flags.workers) cfg.workers = *flags.workers;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-trajectory simulator for heralded entanglement of ions in two cavities"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags flags;
  app.add_option("--config", flags.config_path, "key = value configuration file");
  app.add_option("--seed", flags.seed, "master seed");
  app.add_option("--runs", flags.runs, "trajectories per ensemble");
  app.add_option("--workers", flags.workers, "worker threads (0: all cores)");
  app.add_option("--out", flags.out_path, "write CSV here instead of stdout");
  app.add_option("--set", flags.settings, "override a config key, key=value")->take_all();

  auto* run = app.add_subcommand("run", "ensemble of the weak-driving protocol");
  auto* sweep = app.add_subcommand("sweep", "ensembles over a parameter grid");
  sweep->add_option("param", flags.sweep_param, "physical parameter to sweep");
  sweep->add_option("range", flags.sweep_range, "start..stop");
  sweep->add_option("--steps", flags.sweep_steps, "grid points (>= 2)");
  auto* oracle = app.add_subcommand("oracle", "trajectory average vs master equation");
  auto* baseline = app.add_subcommand("baseline", "sudden-excitation reference scheme");
  auto* closedform = app.add_subcommand("closedform", "weak-driving closed-form predictions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cavsim::kExitConfig;
  }

  try {
    const cavsim::RunConfig cfg = resolve(flags);
    std::ofstream file;
    if (!flags.out_path.empty()) {
      file.open(flags.out_path);
      if (!file) {
        cavsim::fail(cavsim::ErrorKind::Config, "--out: cannot open '" + flags.out_path + "'");
      }
    }
    std::ostream& out = flags.out_path.empty() ? std::cout : file;
    std::ostream& log = std::cerr;

    if (*run) {
      cavsim::command_run(cfg, out, log);
    } else if (*sweep) {
      cavsim::command_sweep(cfg, out, log);
    } else if (*oracle) {
      cavsim::command_oracle(cfg, out, log);
    } else if (*baseline) {
      cavsim::command_baseline(cfg, out, log);
    } else if (*closedform) {
      cavsim::command_closedform(cfg, out, log);
    }
    out.flush();
    return cavsim::kExitOk;
  } catch (const cavsim::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cavsim::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cavsim::kExitRuntime;
  }
}
