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

#include "cavsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cavsim/error.hpp"

namespace cavsim {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string_view unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view what) {
  fail(ErrorKind::Config,
       std::string(key) + ": expected " + std::string(what) + ", got '" + std::string(value) + "'");
}

double parse_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || !std::isfinite(out)) {
    bad_value(key, value, "a number");
  }
  return out;
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    bad_value(key, value, "a non-negative integer");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value, "true or false");
}

// Shortest text that parses back to the same double.
std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

SweepSpec& sweep_of(RunConfig& cfg) {
  if (!cfg.sweep) {
    cfg.sweep.emplace();
  }
  return *cfg.sweep;
}

}  // namespace

std::vector<double> SweepSpec::values() const {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(std::max(steps, 0)));
  for (int i = 0; i < steps; ++i) {
    // Pin the endpoints exactly.
    if (i == steps - 1) {
      v.push_back(stop);
    } else {
      v.push_back(start + (stop - start) * static_cast<double>(i) / (steps - 1));
    }
  }
  return v;
}

IntegratorConfig RunConfig::integrator() const {
  IntegratorConfig ic = IntegratorConfig::defaults_for(params);
  if (dt) {
    ic.dt = *dt;
  }
  ic.jump_time_tol = jump_time_tol;
  ic.renorm_each_step = renorm_each_step;
  return ic;
}

ProtocolOptions RunConfig::protocol_options() const {
  ProtocolOptions o;
  o.t_drain = t_drain;
  o.baseline_window = baseline_window;
  o.variant = variant;
  return o;
}

double RunConfig::oracle_dt() const {
  if (oracle.dt > 0.0) {
    return oracle.dt;
  }
  return 0.04 / std::max({params.delta, 2.0 * params.kappa, 1.0});
}

double RunConfig::oracle_t_end() const {
  return oracle.t_end >= 0.0 ? oracle.t_end : params.window;
}

void RunConfig::validate() const {
  params.validate();
  integrator().validate(params);
  if (n_runs == 0) {
    fail(ErrorKind::Config, "runs: must be >= 1");
  }
  if (sweep) {
    const auto& names = physical_param_names();
    if (std::find(names.begin(), names.end(), sweep->parameter) == names.end()) {
      fail(ErrorKind::Config,
           "sweep_param: '" + sweep->parameter + "' is not a physical parameter");
    }
    if (sweep->steps < 2) {
      fail(ErrorKind::Config, "sweep_steps: must be >= 2");
    }
  }
  if (oracle.samples < 1) {
    fail(ErrorKind::Config, "oracle_samples: must be >= 1");
  }
}

const std::vector<std::string_view>& physical_param_names() {
  static const std::vector<std::string_view> names = {
      "g",   "omega",     "delta",  "kappa", "gamma31",
      "gamma32", "eta", "dark_rate", "window", "n_max"};
  return names;
}

void set_physical_param(PhysicalParams& p, std::string_view name, double value) {
  if (name == "g") p.g = value;
  else if (name == "omega") p.omega = value;
  else if (name == "delta") p.delta = value;
  else if (name == "kappa") p.kappa = value;
  else if (name == "gamma31") p.gamma31 = value;
  else if (name == "gamma32") p.gamma32 = value;
  else if (name == "eta") p.eta = value;
  else if (name == "dark_rate") p.dark_rate = value;
  else if (name == "window") p.window = value;
  else if (name == "n_max") {
    if (value != std::floor(value)) {
      fail(ErrorKind::Config, "n_max: must be an integer");
    }
    p.n_max = static_cast<int>(value);
  } else {
    fail(ErrorKind::Config, "unknown physical parameter '" + std::string(name) + "'");
  }
}

double get_physical_param(const PhysicalParams& p, std::string_view name) {
  if (name == "g") return p.g;
  if (name == "omega") return p.omega;
  if (name == "delta") return p.delta;
  if (name == "kappa") return p.kappa;
  if (name == "gamma31") return p.gamma31;
  if (name == "gamma32") return p.gamma32;
  if (name == "eta") return p.eta;
  if (name == "dark_rate") return p.dark_rate;
  if (name == "window") return p.window;
  if (name == "n_max") return p.n_max;
  fail(ErrorKind::Config, "unknown physical parameter '" + std::string(name) + "'");
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view raw) {
  const std::string_view value = unquote(trim(raw));
  const auto& names = physical_param_names();
  if (std::find(names.begin(), names.end(), key) != names.end()) {
    set_physical_param(cfg.params, key, parse_double(key, value));
  } else if (key == "dt") {
    cfg.dt = parse_double(key, value);
  } else if (key == "jump_time_tol") {
    cfg.jump_time_tol = parse_double(key, value);
  } else if (key == "renorm_each_step") {
    cfg.renorm_each_step = parse_bool(key, value);
  } else if (key == "runs") {
    cfg.n_runs = parse_unsigned(key, value);
  } else if (key == "seed") {
    cfg.master_seed = parse_unsigned(key, value);
  } else if (key == "workers") {
    cfg.workers = static_cast<unsigned>(parse_unsigned(key, value));
  } else if (key == "protocol") {
    cfg.protocol = parse_protocol(value);
  } else if (key == "variant") {
    cfg.variant = parse_variant(value);
  } else if (key == "t_drain") {
    cfg.t_drain = parse_double(key, value);
  } else if (key == "baseline_window") {
    cfg.baseline_window = parse_double(key, value);
  } else if (key == "sweep_param") {
    sweep_of(cfg).parameter = std::string(value);
  } else if (key == "sweep_start") {
    sweep_of(cfg).start = parse_double(key, value);
  } else if (key == "sweep_stop") {
    sweep_of(cfg).stop = parse_double(key, value);
  } else if (key == "sweep_steps") {
    sweep_of(cfg).steps = static_cast<int>(parse_unsigned(key, value));
  } else if (key == "oracle_t_end") {
    cfg.oracle.t_end = parse_double(key, value);
  } else if (key == "oracle_samples") {
    cfg.oracle.samples = static_cast<int>(parse_unsigned(key, value));
  } else if (key == "oracle_dt") {
    cfg.oracle.dt = parse_double(key, value);
  } else {
    fail(ErrorKind::Config, "unknown key '" + std::string(key) + "'");
  }
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorKind::Config,
           "config line " + std::to_string(line_no) + ": expected key = value");
    }
    apply_setting(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorKind::Config, "config: cannot open '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

std::vector<RunConfig> expand_sweep(const RunConfig& cfg) {
  if (!cfg.sweep) {
    return {cfg};
  }
  cfg.validate();
  std::vector<RunConfig> out;
  for (double v : cfg.sweep->values()) {
    RunConfig point = cfg;
    set_physical_param(point.params, cfg.sweep->parameter, v);
    out.push_back(std::move(point));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> describe(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> kv;
  for (auto name : physical_param_names()) {
    kv.emplace_back(std::string(name), format_number(get_physical_param(cfg.params, name)));
  }
  const IntegratorConfig ic = cfg.integrator();
  kv.emplace_back("dt", format_number(ic.dt));
  kv.emplace_back("jump_time_tol", format_number(ic.jump_time_tol));
  kv.emplace_back("renorm_each_step", ic.renorm_each_step ? "true" : "false");
  kv.emplace_back("runs", std::to_string(cfg.n_runs));
  kv.emplace_back("seed", std::to_string(cfg.master_seed));
  kv.emplace_back("protocol", std::string(to_string(cfg.protocol)));
  kv.emplace_back("variant", std::string(to_string(cfg.variant)));
  kv.emplace_back("t_drain", cfg.t_drain >= 0.0 ? format_number(cfg.t_drain)
                                                 : format_number(cfg.params.kappa > 0.0
                                                                     ? 5.0 / cfg.params.kappa
                                                                     : 0.0));
  if (cfg.sweep) {
    kv.emplace_back("sweep_param", cfg.sweep->parameter);
    kv.emplace_back("sweep_start", format_number(cfg.sweep->start));
    kv.emplace_back("sweep_stop", format_number(cfg.sweep->stop));
    kv.emplace_back("sweep_steps", std::to_string(cfg.sweep->steps));
  }
  return kv;
}

}  // namespace cavsim
