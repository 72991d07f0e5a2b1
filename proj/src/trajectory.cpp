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

#include "cavsim/trajectory.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "cavsim/error.hpp"
#include "cavsim/parallel.hpp"

namespace cavsim {

namespace {

constexpr double kMaxDtDelta = 0.05;
constexpr double kUnderflowNorm2 = 1e-14;
constexpr int kMaxBisections = 200;
const Complex kMinusI{0.0, -1.0};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

IntegratorConfig IntegratorConfig::defaults_for(const PhysicalParams& p) {
  IntegratorConfig cfg;
  cfg.dt = 0.02 / std::max({p.delta, 2.0 * p.kappa, 1.0});
  return cfg;
}

void IntegratorConfig::validate(const PhysicalParams& p) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    fail(ErrorKind::Config, "dt: must be positive");
  }
  if (dt * std::abs(p.delta) > kMaxDtDelta * (1.0 + 1e-12)) {
    fail(ErrorKind::Config, "dt: dt*delta = " + std::to_string(dt * p.delta) +
                                " exceeds 0.05; the detuning is not resolved");
  }
  if (!(jump_time_tol > 0.0) || jump_time_tol >= 1.0) {
    fail(ErrorKind::Config, "jump_time_tol: must lie in (0, 1)");
  }
}

StateVector evolve_no_jump(const StateVector& s, const SparseOperator& h_eff, double dt) {
  // k = −i H ψ
  StateVector k1, k2, k3, k4, tmp;
  h_eff.apply_into(s, k1);
  k1 *= kMinusI;
  tmp = s + (0.5 * dt) * k1;
  h_eff.apply_into(tmp, k2);
  k2 *= kMinusI;
  tmp = s + (0.5 * dt) * k2;
  h_eff.apply_into(tmp, k3);
  k3 *= kMinusI;
  tmp = s + dt * k3;
  h_eff.apply_into(tmp, k4);
  k4 *= kMinusI;
  return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// ---------------------------------------------------------------------------

Propagator::Propagator(const SparseOperator& h_eff, double dt) : dt_(dt), h_eff_(h_eff) {
  if (!(dt > 0.0)) {
    fail(ErrorKind::Config, "dt: must be positive");
  }
  const auto n = static_cast<Eigen::Index>(h_eff.dimension());
  const Eigen::MatrixXcd a = (kMinusI * dt) * h_eff.to_dense();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  // Horner form of the RK4 stability polynomial.
  Eigen::MatrixXcd step = id + a / 4.0;
  step = id + (a / 3.0) * step;
  step = id + (a / 2.0) * step;
  step = id + a * step;

  // 2^40 steps outlasts any window at any admissible dt.
  constexpr int kLevels = 41;
  powers_.reserve(kLevels);
  Eigen::MatrixXcd current = step;
  for (int level = 0; level < kLevels; ++level) {
    powers_.push_back(SparseOperator::from_dense(current));
    if (level + 1 < kLevels) {
      current = (current * current).eval();
    }
  }
}

StateVector Propagator::advance(const StateVector& s, std::uint64_t steps) const {
  StateVector cur = s;
  StateVector next;
  std::size_t level = 0;
  const std::size_t top = powers_.size() - 1;
  while (steps != 0 && level < top) {
    if (steps & 1u) {
      powers_[level].apply_into(cur, next);
      cur.swap(next);
    }
    steps >>= 1;
    ++level;
  }
  // Remaining high bits, expressed in units of the top power.
  for (; steps != 0; --steps) {
    powers_[top].apply_into(cur, next);
    cur.swap(next);
  }
  return cur;
}

StateVector Propagator::partial_step(const StateVector& s, double h) const {
  if (h <= 0.0) {
    return s;
  }
  return evolve_no_jump(s, h_eff_, h);
}

namespace {

struct StepSplit {
  std::uint64_t steps;
  double remainder;
};

StepSplit split_duration(double duration, double dt) {
  if (duration <= 0.0) {
    return {0, 0.0};
  }
  const double ratio = duration / dt;
  auto steps = static_cast<std::uint64_t>(std::floor(ratio));
  double remainder = duration - static_cast<double>(steps) * dt;
  if (remainder < 0.0) {
    remainder = 0.0;
  }
  // Absorb rounding noise so that durations that are whole multiples of dt
  // do not produce a spurious femtosecond step.
  if (remainder < 1e-12 * dt) {
    remainder = 0.0;
  } else if (dt - remainder < 1e-12 * dt) {
    ++steps;
    remainder = 0.0;
  }
  return {steps, remainder};
}

}  // namespace

StateVector Propagator::evolve(const StateVector& s, double duration) const {
  const StepSplit split = split_duration(duration, dt_);
  return partial_step(advance(s, split.steps), split.remainder);
}

Propagator::Crossing Propagator::find_norm_crossing(const StateVector& s, double threshold,
                                                    double duration, double tol) const {
  Crossing out;
  if (s.squaredNorm() <= threshold) {
    out.found = true;
    out.state = s;
    return out;
  }
  const StepSplit split = split_duration(duration, dt_);
  StateVector end = partial_step(advance(s, split.steps), split.remainder);
  if (end.squaredNorm() > threshold) {
    out.elapsed = duration;
    out.state = std::move(end);
    return out;
  }

  // Largest whole step count n <= steps with ‖ψ_n‖² > r.
  StateVector cur = s;
  StateVector cand;
  std::uint64_t n = 0;
  for (std::size_t level = std::min<std::size_t>(powers_.size(), 64); level-- > 0;) {
    const std::uint64_t stride = std::uint64_t{1} << level;
    if (stride > split.steps || n > split.steps - stride) {
      continue;
    }
    powers_[level].apply_into(cur, cand);
    if (cand.squaredNorm() > threshold) {
      cur.swap(cand);
      n += stride;
    }
  }

  // Bisect inside the last (possibly shortened) step; `hi` always sits on
  // the crossed side so the jump never precedes the threshold.
  double lo = 0.0;
  double hi = n < split.steps ? dt_ : split.remainder;
  StateVector at = partial_step(cur, hi);
  for (int it = 0; it < kMaxBisections; ++it) {
    if (std::abs(at.squaredNorm() - threshold) <= tol * threshold) {
      break;
    }
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;
    }
    StateVector probe = partial_step(cur, mid);
    if (probe.squaredNorm() > threshold) {
      lo = mid;
    } else {
      hi = mid;
      at = std::move(probe);
    }
  }
  out.found = true;
  out.elapsed = static_cast<double>(n) * dt_ + hi;
  out.state = std::move(at);
  return out;
}

// ---------------------------------------------------------------------------

TrajectoryRng::TrajectoryRng(std::uint64_t seed)
    : jumps_(splitmix64(seed ^ 0x6A09E667F3BCC908ull)),
      dark_(splitmix64(seed ^ 0xBB67AE8584CAA73Bull)) {}

double TrajectoryRng::uniform() { return open_unit(jumps_()); }

double TrajectoryRng::dark_uniform() { return open_unit(dark_()); }

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x3C6EF372FE94F82Bull));
}

JumpSample sample_jump(const StateVector& s, std::span<const JumpChannel> channels, double u) {
  std::vector<StateVector> images(channels.size());
  std::vector<double> weights(channels.size());
  double total = 0.0;
  for (std::size_t k = 0; k < channels.size(); ++k) {
    channels[k].op.apply_into(s, images[k]);
    weights[k] = images[k].squaredNorm();
    total += weights[k];
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    fail(ErrorKind::Numerical, "sample_jump: every channel annihilates the state");
  }
  const double target = u * total;
  std::size_t chosen = channels.size();
  double cumulative = 0.0;
  for (std::size_t k = 0; k < channels.size(); ++k) {
    if (weights[k] <= 0.0) {
      continue;
    }
    chosen = k;
    cumulative += weights[k];
    if (target < cumulative) {
      break;
    }
  }
  StateVector collapsed = images[chosen] / std::sqrt(weights[chosen]);
  return {chosen, std::move(collapsed)};
}

// ---------------------------------------------------------------------------

TrajectoryEngine::TrajectoryEngine(Model model, const PhysicalParams& params, IntegratorConfig cfg)
    : model_(std::move(model)),
      params_(params),
      cfg_(cfg),
      propagator_((params.validate(), cfg.validate(params), model_.effective_hamiltonian), cfg.dt) {}

TrajectoryRecord TrajectoryEngine::run(const StateVector& initial, TrajectoryRng& rng,
                                       RunMode mode, double t_start, double t_end,
                                       std::span<const double> checkpoints,
                                       const CheckpointFn& on_checkpoint) const {
  if (static_cast<std::size_t>(initial.size()) != model_.basis.dimension()) {
    fail(ErrorKind::Domain, "initial state dimension does not match the model basis");
  }
  if (std::abs(initial.squaredNorm() - 1.0) > 1e-10) {
    fail(ErrorKind::Domain, "initial state must be normalized");
  }
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end())) {
    fail(ErrorKind::Domain, "checkpoints must be sorted");
  }

  constexpr double kNever = std::numeric_limits<double>::infinity();
  const int detectors = model_.detector_count();
  const bool dark_on = params_.dark_rate > 0.0;
  auto next_dark = [&](double from) {
    return dark_on ? from - std::log(rng.dark_uniform()) / params_.dark_rate : kNever;
  };
  double dark_at[2] = {kNever, kNever};
  for (int d = 0; d < detectors; ++d) {
    dark_at[d] = next_dark(t_start);
  }
  static constexpr ChannelLabel kDark[] = {ChannelLabel::DarkCountD1, ChannelLabel::DarkCountD2};

  TrajectoryRecord record;
  StateVector psi = initial;
  double t = t_start;
  double r = rng.uniform();
  std::size_t next_cp = 0;
  while (next_cp < checkpoints.size() && checkpoints[next_cp] < t_start) {
    ++next_cp;
  }

  auto finish = [&](Termination why) {
    const double norm2 = psi.squaredNorm();
    if (norm2 < kUnderflowNorm2) {
      fail(ErrorKind::Numerical, "state norm underflow");
    }
    record.final_state = psi / std::sqrt(norm2);
    record.end_time = t;
    record.termination = why;
    return record;
  };

  for (;;) {
    double seg_end = t_end;
    if (next_cp < checkpoints.size()) {
      seg_end = std::min(seg_end, checkpoints[next_cp]);
    }
    for (int d = 0; d < detectors; ++d) {
      seg_end = std::min(seg_end, dark_at[d]);
    }

    Propagator::Crossing crossing =
        propagator_.find_norm_crossing(psi, r, seg_end - t, cfg_.jump_time_tol);
    if (crossing.found) {
      t += crossing.elapsed;
      if (crossing.state.squaredNorm() < kUnderflowNorm2) {
        fail(ErrorKind::Numerical, "state norm underflow before jump");
      }
      JumpSample jump = sample_jump(crossing.state, model_.channels, rng.uniform());
      const ChannelLabel label = model_.channels[jump.channel].label;
      psi = std::move(jump.state);
      record.events.push_back({t, label});
      if (mode == RunMode::FirstClick && is_click(label)) {
        return finish(Termination::FirstClick);
      }
      r = rng.uniform();
      continue;
    }

    psi = std::move(crossing.state);
    t = seg_end;
    const double norm2 = psi.squaredNorm();
    if (norm2 < kUnderflowNorm2) {
      fail(ErrorKind::Numerical, "state norm underflow");
    }
    if (cfg_.renorm_each_step) {
      psi /= std::sqrt(norm2);
      r /= norm2;
    }
    while (next_cp < checkpoints.size() && checkpoints[next_cp] <= t) {
      if (on_checkpoint) {
        on_checkpoint(next_cp, psi / psi.norm());
      }
      ++next_cp;
    }
    for (int d = 0; d < detectors; ++d) {
      if (dark_at[d] <= t) {
        record.events.push_back({t, kDark[d]});
        if (mode == RunMode::FirstClick) {
          return finish(Termination::FirstClick);
        }
        dark_at[d] = next_dark(t);
      }
    }
    if (t >= t_end) {
      return finish(Termination::WindowExpired);
    }
  }
}

TrajectoryRecord run_trajectory(const TrajectoryEngine& engine, const StateVector& initial,
                                std::uint64_t seed, RunMode mode) {
  TrajectoryRng rng(seed);
  return engine.run(initial, rng, mode, 0.0, engine.params().window);
}

std::vector<DensityMatrix> ensemble_average_density(const TrajectoryEngine& engine,
                                                    const StateVector& initial,
                                                    std::span<const double> checkpoints,
                                                    std::size_t n_runs, std::uint64_t master_seed,
                                                    unsigned workers) {
  if (n_runs == 0) {
    fail(ErrorKind::Config, "runs: must be >= 1");
  }
  if (checkpoints.empty()) {
    return {};
  }
  const auto dim = static_cast<Eigen::Index>(engine.model().basis.dimension());
  const double t_end = checkpoints.back();
  constexpr std::size_t kChunk = 256;
  const std::size_t n_chunks = (n_runs + kChunk - 1) / kChunk;
  std::vector<std::vector<DensityMatrix>> partial(n_chunks);

  parallel_chunks(n_runs, kChunk, workers, [&](std::size_t chunk, std::size_t begin,
                                               std::size_t end) {
    std::vector<DensityMatrix> acc(checkpoints.size(), DensityMatrix::Zero(dim, dim));
    for (std::size_t i = begin; i < end; ++i) {
      TrajectoryRng rng(derive_seed(master_seed, i));
      engine.run(initial, rng, RunMode::FullWindow, 0.0, t_end, checkpoints,
                 [&](std::size_t cp, const StateVector& s) {
                   acc[cp].noalias() += s * s.adjoint();
                 });
    }
    partial[chunk] = std::move(acc);
  });

  std::vector<DensityMatrix> mean(checkpoints.size(), DensityMatrix::Zero(dim, dim));
  for (const auto& chunk : partial) {
    for (std::size_t cp = 0; cp < mean.size(); ++cp) {
      mean[cp] += chunk[cp];
    }
  }
  for (auto& rho : mean) {
    rho /= static_cast<double>(n_runs);
  }
  return mean;
}

void write_events(std::ostream& out, std::size_t traj_index, const TrajectoryRecord& record) {
  const auto precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& e : record.events) {
    out << traj_index << ',' << e.time << ',' << to_string(e.label) << '\n';
  }
  out.precision(precision);
}

}  // namespace cavsim
