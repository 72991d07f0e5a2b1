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

// Subcommands behind the `cavsim` executable. Each writes machine-readable
// output to `out` and a human-readable summary to `log`; failures surface
// as cavsim::Error.

#pragma once

#include <iosfwd>
#include <string_view>

#include "cavsim/config.hpp"
#include "cavsim/error.hpp"
#include "cavsim/protocol.hpp"

namespace cavsim {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitRegime = 3,
  kExitRuntime = 4,
};

int exit_code_for(ErrorKind kind);

/// `#`-prefixed lines: version, command, units and every resolved setting.
void write_comment_header(std::ostream& out, std::string_view command, const RunConfig& cfg);

void write_stats_csv_header(std::ostream& out);
void write_stats_csv_row(std::ostream& out, const EnsembleStats& stats);
void write_stats_summary(std::ostream& log, std::string_view title, const EnsembleStats& stats);

void command_run(const RunConfig& cfg, std::ostream& out, std::ostream& log);
void command_baseline(const RunConfig& cfg, std::ostream& out, std::ostream& log);
/// CSV columns: sweep_value,p_success,p_success_err,mean_fidelity,fidelity_err,n_success,n_runs
void command_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& log);
/// CSV columns: time,trace_distance,click_integral
void command_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& log);
void command_closedform(const RunConfig& cfg, std::ostream& out, std::ostream& log);

}  // namespace cavsim
