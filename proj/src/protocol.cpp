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

#include "cavsim/protocol.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cavsim/error.hpp"
#include "cavsim/parallel.hpp"

namespace cavsim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Classification success_for(ChannelLabel label) {
  switch (label) {
    case ChannelLabel::DetectorD1: return Classification::SuccessD1;
    case ChannelLabel::DetectorD2: return Classification::SuccessD2;
    case ChannelLabel::DarkCountD1: return Classification::SuccessDarkD1;
    case ChannelLabel::DarkCountD2: return Classification::SuccessDarkD2;
    default:
      fail(ErrorKind::Domain, "not a click label: " + std::string(to_string(label)));
  }
}

double default_drain(const PhysicalParams& p) { return p.kappa > 0.0 ? 5.0 / p.kappa : 0.0; }

IntegratorConfig checked(const IntegratorConfig& cfg, const PhysicalParams& p) {
  cfg.validate(p);
  return cfg;
}

MeanWithError mean_and_error(double sum, double sum_sq, std::size_t n) {
  if (n == 0) {
    return {kNaN, kNaN};
  }
  const double nd = static_cast<double>(n);
  const double mean = sum / nd;
  if (n < 2) {
    return {mean, 0.0};
  }
  const double var = std::max(0.0, (sum_sq - nd * mean * mean) / (nd - 1.0));
  return {mean, std::sqrt(var / nd)};
}

}  // namespace

bool is_success(Classification c) {
  return c == Classification::SuccessD1 || c == Classification::SuccessD2 ||
         c == Classification::SuccessDarkD1 || c == Classification::SuccessDarkD2;
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::SuccessD1: return "success_D1";
    case Classification::SuccessD2: return "success_D2";
    case Classification::SuccessDarkD1: return "success_darkD1";
    case Classification::SuccessDarkD2: return "success_darkD2";
    case Classification::NoClick: return "no_click";
    case Classification::MultiClick: return "multi_click";
  }
  return "?";
}

std::string_view to_string(ProtocolKind kind) {
  return kind == ProtocolKind::WeakDriving ? "weak" : "baseline";
}

ProtocolKind parse_protocol(std::string_view name) {
  if (name == "weak") return ProtocolKind::WeakDriving;
  if (name == "baseline") return ProtocolKind::BaselineSudden;
  fail(ErrorKind::Config, "protocol: unknown protocol '" + std::string(name) +
                              "' (expected weak or baseline)");
}

StateVector target_state(ChannelLabel d, const Basis& basis) {
  StateVector t = StateVector::Zero(static_cast<Eigen::Index>(basis.ion_dimension()));
  const auto i21 = static_cast<Eigen::Index>(basis.ion_index(2, 1));
  const auto i12 = static_cast<Eigen::Index>(basis.ion_index(1, 2));
  switch (d) {
    case ChannelLabel::DetectorD1:
      t[i21] = kInvSqrt2;
      t[i12] = kInvSqrt2;
      return t;
    case ChannelLabel::DetectorD2:
      t[i12] = kInvSqrt2;
      t[i21] = -kInvSqrt2;
      return t;
    default:
      fail(ErrorKind::Domain, "target_state: '" + std::string(to_string(d)) +
                                  "' is not a detector (expected D1 or D2)");
  }
}

// ---------------------------------------------------------------------------

WeakDrivingProtocol::WeakDrivingProtocol(const PhysicalParams& p, const IntegratorConfig& cfg,
                                         ProtocolOptions options)
    : params_(p),
      drive_(build_model(p, options.variant), p, checked(cfg, p)),
      drain_(build_model([&] {
               PhysicalParams off = p;
               off.omega = 0.0;
               return off;
             }(), options.variant),
             p, cfg),
      t_drain_(options.t_drain >= 0.0 ? options.t_drain : default_drain(p)) {
  initial_ = basis_vector(drive_.model().basis, BasisState{2, 2, 0, 0});
}

Outcome WeakDrivingProtocol::run(std::uint64_t seed) const {
  TrajectoryRng rng(seed);
  Outcome out;
  out.record = drive_.run(initial_, rng, RunMode::FirstClick, 0.0, params_.window);
  if (out.record.termination == Termination::WindowExpired) {
    out.classification = Classification::NoClick;
    return out;
  }

  const JumpEvent click = out.record.events.back();
  const ChannelLabel detector = firing_detector(click.label);
  const Basis& basis = drive_.model().basis;
  const StateVector target = target_state(detector, basis);
  out.classification = success_for(click.label);
  out.clicks = 1;
  out.click_time = click.time;
  out.fidelity_at_click = fidelity(reduce_to_ions(basis, out.record.final_state), target);

  // Lasers off; the residual cavity field leaks out before the trace.
  if (t_drain_ > 0.0) {
    TrajectoryRecord drained = drain_.run(out.record.final_state, rng, RunMode::FullWindow,
                                          click.time, click.time + t_drain_);
    out.record.events.insert(out.record.events.end(), drained.events.begin(),
                             drained.events.end());
    out.record.final_state = std::move(drained.final_state);
    out.record.end_time = drained.end_time;
  }
  out.ion_fidelity = fidelity(reduce_to_ions(basis, out.record.final_state), target);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

PhysicalParams couplings_off(PhysicalParams p) {
  p.g = 0.0;
  p.omega = 0.0;
  return p;
}

Model baseline_model(const PhysicalParams& p, const ProtocolOptions& options) {
  if (options.variant != ModelVariant::TwoCavityFull) {
    fail(ErrorKind::Config, "variant: the baseline needs the full two-cavity model");
  }
  return build_model(couplings_off(p), ModelVariant::TwoCavityFull);
}

double baseline_window(const PhysicalParams& p, const ProtocolOptions& options) {
  if (options.baseline_window >= 0.0) {
    return options.baseline_window;
  }
  if (!(p.kappa > 0.0)) {
    fail(ErrorKind::Config, "kappa: the baseline window 10/kappa needs kappa > 0");
  }
  return 10.0 / p.kappa;
}

}  // namespace

SuddenBaseline::SuddenBaseline(const PhysicalParams& p, const IntegratorConfig& cfg,
                               ProtocolOptions options)
    : engine_(baseline_model(p, options), couplings_off(p), checked(cfg, p)),
      window_(baseline_window(p, options)) {}

StateVector SuddenBaseline::initial_state(const Basis& basis) {
  const Complex i{0.0, 1.0};
  StateVector s = StateVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
  s[static_cast<Eigen::Index>(basis.encode({2, 2, 0, 0}))] = 0.5;
  s[static_cast<Eigen::Index>(basis.encode({1, 1, 1, 1}))] = -0.5;
  s[static_cast<Eigen::Index>(basis.encode({2, 1, 0, 1}))] = 0.5 * i;
  s[static_cast<Eigen::Index>(basis.encode({1, 2, 1, 0}))] = 0.5 * i;
  return s;
}

Outcome SuddenBaseline::run(std::uint64_t seed) const {
  TrajectoryRng rng(seed);
  Outcome out;
  const Basis& basis = engine_.model().basis;
  out.record = engine_.run(initial_state(basis), rng, RunMode::FullWindow, 0.0, window_);
  const JumpEvent* first_click = nullptr;
  for (const auto& e : out.record.events) {
    if (is_click(e.label)) {
      if (first_click == nullptr) {
        first_click = &e;
      }
      ++out.clicks;
    }
  }
  if (out.clicks == 0) {
    out.classification = Classification::NoClick;
  } else if (out.clicks > 1) {
    out.classification = Classification::MultiClick;
    out.click_time = first_click->time;
  } else {
    out.classification = success_for(first_click->label);
    out.click_time = first_click->time;
    const StateVector target = target_state(firing_detector(first_click->label), basis);
    out.ion_fidelity = fidelity(reduce_to_ions(basis, out.record.final_state), target);
    out.fidelity_at_click = out.ion_fidelity;
  }
  return out;
}

Outcome run_protocol(const PhysicalParams& p, const IntegratorConfig& cfg, std::uint64_t seed,
                     ProtocolOptions options) {
  return WeakDrivingProtocol(p, cfg, options).run(seed);
}

Outcome run_baseline_sudden(const PhysicalParams& p, const IntegratorConfig& cfg,
                            std::uint64_t seed, ProtocolOptions options) {
  return SuddenBaseline(p, cfg, options).run(seed);
}

// ---------------------------------------------------------------------------

OutcomeSummary summarize(const Outcome& outcome) {
  OutcomeSummary s;
  s.classification = outcome.classification;
  s.clicks = outcome.clicks;
  s.fidelity = outcome.ion_fidelity.value_or(0.0);
  s.fidelity_at_click = outcome.fidelity_at_click.value_or(0.0);
  s.click_time = outcome.click_time.value_or(0.0);
  return s;
}

EnsembleStats aggregate(std::span<const OutcomeSummary> outcomes) {
  EnsembleStats stats;
  stats.n_runs = outcomes.size();
  double f_sum = 0.0, f_sq = 0.0, fc_sum = 0.0, fc_sq = 0.0, t_sum = 0.0, t_sq = 0.0;
  for (const auto& o : outcomes) {
    ++stats.click_histogram[static_cast<std::size_t>(std::min(o.clicks, 3))];
    if (o.classification == Classification::NoClick) {
      ++stats.n_no_click;
      continue;
    }
    if (o.classification == Classification::MultiClick) {
      ++stats.n_multi_click;
      continue;
    }
    ++stats.n_success;
    ++stats.success_by_detector[static_cast<std::size_t>(o.classification)];
    f_sum += o.fidelity;
    f_sq += o.fidelity * o.fidelity;
    fc_sum += o.fidelity_at_click;
    fc_sq += o.fidelity_at_click * o.fidelity_at_click;
    t_sum += o.click_time;
    t_sq += o.click_time * o.click_time;
  }
  if (stats.n_runs > 0) {
    const double n = static_cast<double>(stats.n_runs);
    const double p = static_cast<double>(stats.n_success) / n;
    stats.p_success = {p, std::sqrt(p * (1.0 - p) / n)};
  } else {
    stats.p_success = {kNaN, kNaN};
  }
  stats.fidelity = mean_and_error(f_sum, f_sq, stats.n_success);
  stats.fidelity_at_click = mean_and_error(fc_sum, fc_sq, stats.n_success);
  stats.click_time = mean_and_error(t_sum, t_sq, stats.n_success);
  return stats;
}

EnsembleStats run_ensemble(const PhysicalParams& p, const IntegratorConfig& cfg,
                           std::size_t n_runs, std::uint64_t master_seed, ProtocolKind kind,
                           const EnsembleOptions& options) {
  if (n_runs == 0) {
    fail(ErrorKind::Config, "runs: must be >= 1");
  }
  std::vector<OutcomeSummary> outcomes(n_runs);
  constexpr std::size_t kChunk = 512;
  if (kind == ProtocolKind::WeakDriving) {
    const WeakDrivingProtocol protocol(p, cfg, options.protocol);
    parallel_chunks(n_runs, kChunk, options.workers,
                    [&](std::size_t, std::size_t begin, std::size_t end) {
                      for (std::size_t i = begin; i < end; ++i) {
                        outcomes[i] = summarize(protocol.run(derive_seed(master_seed, i)));
                      }
                    });
  } else {
    const SuddenBaseline baseline(p, cfg, options.protocol);
    parallel_chunks(n_runs, kChunk, options.workers,
                    [&](std::size_t, std::size_t begin, std::size_t end) {
                      for (std::size_t i = begin; i < end; ++i) {
                        outcomes[i] = summarize(baseline.run(derive_seed(master_seed, i)));
                      }
                    });
  }
  return aggregate(outcomes);
}

}  // namespace cavsim
