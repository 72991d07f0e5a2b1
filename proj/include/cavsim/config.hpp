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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cavsim/model.hpp"
#include "cavsim/protocol.hpp"
#include "cavsim/trajectory.hpp"

namespace cavsim {

inline constexpr std::string_view kVersion = "0.1.0";

struct SweepSpec {
  std::string parameter;
  double start = 0.0;
  double stop = 1.0;
  int steps = 11;

  /// Evenly spaced, endpoints included.
  std::vector<double> values() const;
};

struct OracleSettings {
  double t_end = -1.0;  // negative: the protocol window
  int samples = 10;
  double dt = -1.0;     // negative: 0.04 / max(Δ, 2κ, 1)
};

struct RunConfig {
  PhysicalParams params;
  std::optional<double> dt;  // unset: IntegratorConfig::defaults_for(params)
  double jump_time_tol = 1e-6;
  bool renorm_each_step = false;
  std::size_t n_runs = 100000;
  std::uint64_t master_seed = 1;
  unsigned workers = 0;
  ProtocolKind protocol = ProtocolKind::WeakDriving;
  ModelVariant variant = ModelVariant::TwoCavityFull;
  double t_drain = -1.0;
  double baseline_window = -1.0;
  std::optional<SweepSpec> sweep;
  OracleSettings oracle;

  IntegratorConfig integrator() const;
  ProtocolOptions protocol_options() const;
  double oracle_dt() const;
  double oracle_t_end() const;

  /// Range checks; errors name the offending key.
  void validate() const;
};

/// Names accepted by set_physical_param (the PhysicalParams fields).
const std::vector<std::string_view>& physical_param_names();
void set_physical_param(PhysicalParams& p, std::string_view name, double value);
double get_physical_param(const PhysicalParams& p, std::string_view name);

/// Applies one `key = value` setting. Unknown keys and unparsable values
/// throw ErrorKind::Config naming the key.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

/// Flat key-value text: `key = value` per line, `#` comments, optional
/// double quotes around strings. Missing keys keep their defaults.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});

/// One config per sweep point, each with the swept field set.
std::vector<RunConfig> expand_sweep(const RunConfig& cfg);

/// Resolved settings as ordered key/value pairs. `workers` is omitted: it
/// does not influence results.
std::vector<std::pair<std::string, std::string>> describe(const RunConfig& cfg);

}  // namespace cavsim
