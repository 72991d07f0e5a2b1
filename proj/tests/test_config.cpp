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

#include <functional>
#include <sstream>
#include <string>

#include "cavsim/commands.hpp"
#include "cavsim/config.hpp"
#include "cavsim/error.hpp"
#include "doctest.h"

using namespace cavsim;

namespace {

std::string config_error(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) {
      return e.what();
    }
    return "wrong kind";
  }
  return "no error";
}

}  // namespace

TEST_CASE("empty config gives the reference parameters") {
  const RunConfig cfg = parse_config("");
  CHECK(cfg.params.g == 1.0);
  CHECK(cfg.params.omega == 1.0);
  CHECK(cfg.params.delta == 20.0);
  CHECK(cfg.params.kappa == 10.0);
  CHECK(cfg.params.gamma31 == 0.1);
  CHECK(cfg.params.gamma32 == 0.1);
  CHECK(cfg.params.eta == 1.0);
  CHECK(cfg.params.window == 100.0);
  CHECK(cfg.params.n_max == 2);
  CHECK(cfg.n_runs == 100000);
  CHECK(cfg.integrator().dt == doctest::Approx(1e-3));
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config text parsing") {
  const RunConfig cfg = parse_config(
      "# comment line\n"
      "eta = 0.5   # trailing comment\n"
      "\n"
      "variant = \"adiabatic\"\n"
      "  runs=250\n"
      "seed = 9\n"
      "renorm_each_step = true\n");
  CHECK(cfg.params.eta == 0.5);
  CHECK(cfg.variant == ModelVariant::TwoCavityAdiabatic);
  CHECK(cfg.n_runs == 250);
  CHECK(cfg.master_seed == 9);
  CHECK(cfg.renorm_each_step);

  CHECK(config_error([] { parse_config("eta 0.5\n"); }) != "no error");
}

TEST_CASE("invalid settings name the key") {
  CHECK(config_error([] { parse_config("eta = 1.2\n").validate(); }).find("eta") !=
        std::string::npos);
  CHECK(config_error([] { parse_config("kappa = fast\n"); }).find("kappa") != std::string::npos);
  CHECK(config_error([] { parse_config("colour = blue\n"); }).find("colour") !=
        std::string::npos);
  CHECK(config_error([] { parse_config("n_max = 2.5\n"); }).find("n_max") != std::string::npos);
  CHECK(config_error([] { parse_config("dt = 0.01\n").validate(); }) != "no error");
  CHECK(config_error([] { parse_config("runs = -3\n"); }) != "no error");
}

TEST_CASE("sweep expansion") {
  RunConfig cfg;
  apply_setting(cfg, "sweep_param", "eta");
  apply_setting(cfg, "sweep_start", "0");
  apply_setting(cfg, "sweep_stop", "1");
  const auto points = expand_sweep(cfg);
  REQUIRE(points.size() == 11);
  CHECK(points.front().params.eta == 0.0);
  CHECK(points.back().params.eta == 1.0);
  CHECK(points[3].params.eta == doctest::Approx(0.3));
  for (const auto& point : points) {
    CHECK(point.master_seed == cfg.master_seed);
  }

  RunConfig bad;
  apply_setting(bad, "sweep_param", "colour");
  CHECK(config_error([&] { expand_sweep(bad); }) != "no error");
}

TEST_CASE("physical parameter accessors round-trip") {
  PhysicalParams p;
  for (std::string_view name : physical_param_names()) {
    set_physical_param(p, name, name == "n_max" ? 3.0 : 0.25);
    CHECK(get_physical_param(p, name) == (name == "n_max" ? 3.0 : 0.25));
  }
}

TEST_CASE("header lists settings but not the worker count") {
  RunConfig cfg;
  cfg.workers = 3;
  std::ostringstream out;
  write_comment_header(out, "run", cfg);
  const std::string text = out.str();
  CHECK(text.find("# cavsim 0.1.0") == 0);
  CHECK(text.find("eta") != std::string::npos);
  CHECK(text.find("workers") == std::string::npos);
  for (const auto& [key, value] : describe(cfg)) {
    CHECK(key != "workers");
  }
}

TEST_CASE("closedform command output") {
  RunConfig cfg;
  std::ostringstream out;
  std::ostringstream log;
  command_closedform(cfg, out, log);
  CHECK(out.str().find("p_suc_ideal=0.1\n") != std::string::npos);
  CHECK(out.str().find("t_av=1000\n") != std::string::npos);
}

TEST_CASE("run output is reproducible and independent of workers") {
  RunConfig cfg;
  cfg.n_runs = 600;
  cfg.master_seed = 42;
  auto render = [&](unsigned workers) {
    RunConfig c = cfg;
    c.workers = workers;
    std::ostringstream out;
    std::ostringstream log;
    command_run(c, out, log);
    return out.str();
  };
  const std::string a = render(1);
  CHECK(a == render(1));
  CHECK(a == render(3));
  CHECK(a.find("p_success,p_success_err,mean_fidelity") != std::string::npos);
}

TEST_CASE("sweep and oracle commands produce one row per point") {
  RunConfig cfg;
  cfg.n_runs = 200;
  apply_setting(cfg, "sweep_param", "eta");
  apply_setting(cfg, "sweep_start", "0.5");
  apply_setting(cfg, "sweep_stop", "1");
  apply_setting(cfg, "sweep_steps", "3");
  std::ostringstream out;
  std::ostringstream log;
  command_sweep(cfg, out, log);
  std::istringstream lines(out.str());
  std::string line;
  int rows = 0;
  bool header = false;
  while (std::getline(lines, line)) {
    if (line.starts_with("#")) {
      continue;
    }
    if (!header) {
      CHECK(line == "sweep_value,p_success,p_success_err,mean_fidelity,fidelity_err,n_success,n_runs");
      header = true;
      continue;
    }
    ++rows;
  }
  CHECK(rows == 3);

  RunConfig oracle;
  oracle.n_runs = 200;
  apply_setting(oracle, "oracle_t_end", "1");
  apply_setting(oracle, "oracle_samples", "2");
  std::ostringstream oracle_out;
  command_oracle(oracle, oracle_out, log);
  CHECK(oracle_out.str().find("time,trace_distance,click_integral\n") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ErrorKind::Config) == 2);
  CHECK(exit_code_for(ErrorKind::Regime) == 3);
  CHECK(exit_code_for(ErrorKind::Numerical) == 4);
}
