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

// Entanglement generation by weak Raman driving with stop-on-first-click,
// the sudden-excitation baseline, and ensemble statistics over both.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "cavsim/model.hpp"
#include "cavsim/trajectory.hpp"

namespace cavsim {

enum class Classification {
  SuccessD1,
  SuccessD2,
  SuccessDarkD1,
  SuccessDarkD2,
  NoClick,
  MultiClick,  // baseline only: two or more clicks in the window
};

bool is_success(Classification c);
std::string_view to_string(Classification c);

struct Outcome {
  Classification classification = Classification::NoClick;
  std::optional<double> click_time;
  std::optional<double> ion_fidelity;       // after the cavity drain
  std::optional<double> fidelity_at_click;  // immediately after the click
  int clicks = 0;
  TrajectoryRecord record;
};

/// Bell target heralded by detector `d` (DetectorD1 or DetectorD2), over the
/// two-ion space of `basis`:
///   D1 → (|2,1⟩ + |1,2⟩)/√2,  D2 → (|1,2⟩ − |2,1⟩)/√2.
StateVector target_state(ChannelLabel d, const Basis& basis = Basis::two_cavity(2));

struct ProtocolOptions {
  /// Lasers-off wait after the click before the cavities are traced out;
  /// negative selects 5/κ.
  double t_drain = -1.0;
  /// Observation window for the baseline; negative selects 10/κ.
  double baseline_window = -1.0;
  ModelVariant variant = ModelVariant::TwoCavityFull;
};

/// Weak-driving protocol with all operators and propagators prepared once.
/// Immutable; `run` may be called concurrently.
class WeakDrivingProtocol {
 public:
  WeakDrivingProtocol(const PhysicalParams& p, const IntegratorConfig& cfg,
                      ProtocolOptions options = {});

  Outcome run(std::uint64_t seed) const;

  const TrajectoryEngine& drive() const { return drive_; }
  double drain_time() const { return t_drain_; }

 private:
  PhysicalParams params_;
  TrajectoryEngine drive_;
  TrajectoryEngine drain_;
  double t_drain_;
  StateVector initial_;
};

/// Baseline: post-pulse state injected directly, couplings off, every click
/// in the window counted.
class SuddenBaseline {
 public:
  SuddenBaseline(const PhysicalParams& p, const IntegratorConfig& cfg,
                 ProtocolOptions options = {});

  Outcome run(std::uint64_t seed) const;

  static StateVector initial_state(const Basis& basis);
  double window() const { return window_; }

 private:
  TrajectoryEngine engine_;
  double window_;
};

Outcome run_protocol(const PhysicalParams& p, const IntegratorConfig& cfg, std::uint64_t seed,
                     ProtocolOptions options = {});
Outcome run_baseline_sudden(const PhysicalParams& p, const IntegratorConfig& cfg,
                            std::uint64_t seed, ProtocolOptions options = {});

enum class ProtocolKind { WeakDriving, BaselineSudden };

std::string_view to_string(ProtocolKind kind);
ProtocolKind parse_protocol(std::string_view name);

/// What the ensemble keeps from each run.
struct OutcomeSummary {
  Classification classification = Classification::NoClick;
  int clicks = 0;
  double fidelity = 0.0;
  double fidelity_at_click = 0.0;
  double click_time = 0.0;
};

OutcomeSummary summarize(const Outcome& outcome);

struct MeanWithError {
  double mean = 0.0;
  double error = 0.0;  // standard error of the mean
};

struct EnsembleStats {
  std::size_t n_runs = 0;
  std::size_t n_success = 0;
  std::size_t n_no_click = 0;
  std::size_t n_multi_click = 0;
  /// Indexed by Classification D1, D2, DarkD1, DarkD2.
  std::array<std::size_t, 4> success_by_detector{};
  /// Runs with 0, 1, 2 and ≥3 clicks.
  std::array<std::size_t, 4> click_histogram{};

  MeanWithError p_success;        // binomial error
  MeanWithError fidelity;         // over successes, sample-variance error
  MeanWithError fidelity_at_click;
  MeanWithError click_time;
};

/// Sequential reduction in input order.
EnsembleStats aggregate(std::span<const OutcomeSummary> outcomes);

struct EnsembleOptions {
  ProtocolOptions protocol;
  unsigned workers = 0;  // 0: hardware concurrency
};

/// Per-run seeds are derive_seed(master_seed, index); results do not depend
/// on the number of workers.
EnsembleStats run_ensemble(const PhysicalParams& p, const IntegratorConfig& cfg,
                           std::size_t n_runs, std::uint64_t master_seed, ProtocolKind kind,
                           const EnsembleOptions& options = {});

}  // namespace cavsim
