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

// Quantum-jump (Monte Carlo wavefunction) integration with the waiting-time
// algorithm: the unnormalized state evolves under H_eff until its squared
// norm falls to a uniform threshold r, at which point a channel is sampled
// with weight ‖L_k ψ‖² and the state collapses.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "cavsim/hilbert.hpp"
#include "cavsim/model.hpp"

namespace cavsim {

struct IntegratorConfig {
  double dt = 1e-3;
  double jump_time_tol = 1e-6;
  bool renorm_each_step = false;

  /// dt = 0.02 / max(Δ, 2κ, 1): resolves the detuning and the photon decay.
  static IntegratorConfig defaults_for(const PhysicalParams& p);

  /// Enforces dt·Δ ≤ 0.05 and positive tolerances.
  void validate(const PhysicalParams& p) const;
};

/// One classical fourth-order Runge-Kutta step of d|ψ⟩/dt = −i H_eff |ψ⟩.
StateVector evolve_no_jump(const StateVector& s, const SparseOperator& h_eff, double dt);

/// Fast-forward of the fixed-step integrator.
///
/// For a time-independent generator one RK4 step is the matrix polynomial
/// M = 1 + A + A²/2 + A³/6 + A⁴/24 with A = −i H_eff dt. M and its binary
/// powers M^(2^j) are formed once, so k steps cost popcount(k) products.
/// Exact zeros (symmetry blocks of H_eff) are dropped from the stored powers.
class Propagator {
 public:
  Propagator(const SparseOperator& h_eff, double dt);

  double dt() const { return dt_; }
  const SparseOperator& generator() const { return h_eff_; }
  const SparseOperator& power(std::size_t level) const { return powers_.at(level); }
  std::size_t levels() const { return powers_.size(); }

  /// `steps` full steps of size dt.
  StateVector advance(const StateVector& s, std::uint64_t steps) const;
  /// One step of arbitrary size h (no fast-forward).
  StateVector partial_step(const StateVector& s, double h) const;
  /// Whole steps plus one shorter closing step.
  StateVector evolve(const StateVector& s, double duration) const;

  struct Crossing {
    bool found = false;
    double elapsed = 0.0;  // time from the start of the search
    StateVector state;     // at the crossing, or at the end of the interval
  };

  /// Locates the first time in (0, duration] where ‖ψ‖² drops to `threshold`,
  /// to within |‖ψ‖² − r| ≤ tol·r. Relies on the norm being non-increasing.
  Crossing find_norm_crossing(const StateVector& s, double threshold, double duration,
                              double tol) const;

 private:
  double dt_;
  SparseOperator h_eff_;
  std::vector<SparseOperator> powers_;
};

/// Two independent streams per trajectory: one for thresholds and channel
/// choice, one for dark-count arrivals. Turning dark counts on or off
/// therefore leaves the photon-driven part of a trajectory unchanged.
class TrajectoryRng {
 public:
  explicit TrajectoryRng(std::uint64_t seed);

  /// Uniform on the open interval (0, 1).
  double uniform();
  double dark_uniform();

 private:
  std::mt19937_64 jumps_;
  std::mt19937_64 dark_;
};

/// Deterministic per-trajectory seed from (master seed, trajectory index).
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

enum class RunMode { FirstClick, FullWindow };
enum class Termination { FirstClick, WindowExpired };

struct JumpEvent {
  double time;
  ChannelLabel label;
};

struct TrajectoryRecord {
  std::vector<JumpEvent> events;
  StateVector final_state;  // normalized
  double end_time = 0.0;
  Termination termination = Termination::WindowExpired;
};

struct JumpSample {
  std::size_t channel;
  StateVector state;  // L_k ψ / ‖L_k ψ‖
};

/// Chooses channel k with probability ‖L_k s‖² / Σ_j ‖L_j s‖² using the
/// supplied uniform draw in [0, 1).
JumpSample sample_jump(const StateVector& s, std::span<const JumpChannel> channels, double u);

/// Called at each checkpoint time with the normalized conditional state.
using CheckpointFn = std::function<void(std::size_t checkpoint, const StateVector& state)>;

class TrajectoryEngine {
 public:
  TrajectoryEngine(Model model, const PhysicalParams& params, IntegratorConfig cfg);

  const Model& model() const { return model_; }
  const PhysicalParams& params() const { return params_; }
  const IntegratorConfig& config() const { return cfg_; }
  const Propagator& propagator() const { return propagator_; }

  /// Integrates from `t_start` to at most `t_end`. In first-click mode the
  /// run stops at the first click (detector or dark count). Dark counts are
  /// Poisson arrivals at `dark_rate` per detector and never collapse the state.
  TrajectoryRecord run(const StateVector& initial, TrajectoryRng& rng, RunMode mode,
                       double t_start, double t_end, std::span<const double> checkpoints = {},
                       const CheckpointFn& on_checkpoint = {}) const;

 private:
  Model model_;
  PhysicalParams params_;
  IntegratorConfig cfg_;
  Propagator propagator_;
};

/// Single trajectory over [0, window] seeded from `seed`.
TrajectoryRecord run_trajectory(const TrajectoryEngine& engine, const StateVector& initial,
                                std::uint64_t seed, RunMode mode);

/// Mean of |ψ⟩⟨ψ| over `n_runs` full-window trajectories at each checkpoint.
/// Chunked reduction in index order: bitwise independent of `workers`.
std::vector<DensityMatrix> ensemble_average_density(const TrajectoryEngine& engine,
                                                    const StateVector& initial,
                                                    std::span<const double> checkpoints,
                                                    std::size_t n_runs, std::uint64_t master_seed,
                                                    unsigned workers = 0);

/// Event log lines "traj_index,time,channel_label".
void write_events(std::ostream& out, std::size_t traj_index, const TrajectoryRecord& record);

}  // namespace cavsim
