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

#include "cavsim/commands.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "cavsim/analytics.hpp"
#include "cavsim/trajectory.hpp"

namespace cavsim {

namespace {

constexpr int kCsvPrecision = 10;

std::string num(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  std::ostringstream out;
  out << std::setprecision(kCsvPrecision) << v;
  return out.str();
}

EnsembleStats ensemble_for(const RunConfig& cfg, ProtocolKind kind) {
  cfg.validate();
  EnsembleOptions options;
  options.protocol = cfg.protocol_options();
  options.workers = cfg.workers;
  return run_ensemble(cfg.params, cfg.integrator(), cfg.n_runs, cfg.master_seed, kind, options);
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return kExitConfig;
    case ErrorKind::Regime: return kExitRegime;
    default: return kExitRuntime;
  }
}

void write_comment_header(std::ostream& out, std::string_view command, const RunConfig& cfg) {
  out << "# cavsim " << kVersion << '\n';
  out << "# command: " << command << '\n';
  out << "# units: rates in g, times in 1/g\n";
  for (const auto& [key, value] : describe(cfg)) {
    out << "# " << key << " = " << value << '\n';
  }
}

void write_stats_csv_header(std::ostream& out) {
  out << "p_success,p_success_err,mean_fidelity,fidelity_err,n_success,n_runs,"
         "n_d1,n_d2,n_dark_d1,n_dark_d2,n_no_click,n_multi_click,"
         "clicks0,clicks1,clicks2,clicks3plus,"
         "mean_fidelity_at_click,fidelity_at_click_err,mean_click_time\n";
}

void write_stats_csv_row(std::ostream& out, const EnsembleStats& s) {
  out << num(s.p_success.mean) << ',' << num(s.p_success.error) << ',' << num(s.fidelity.mean)
      << ',' << num(s.fidelity.error) << ',' << s.n_success << ',' << s.n_runs;
  for (auto n : s.success_by_detector) {
    out << ',' << n;
  }
  out << ',' << s.n_no_click << ',' << s.n_multi_click;
  for (auto n : s.click_histogram) {
    out << ',' << n;
  }
  out << ',' << num(s.fidelity_at_click.mean) << ',' << num(s.fidelity_at_click.error) << ','
      << num(s.click_time.mean) << '\n';
}

void write_stats_summary(std::ostream& log, std::string_view title, const EnsembleStats& s) {
  log << "== " << title << " ==\n"
      << "units: rates in g, times in 1/g\n"
      << "runs                 " << s.n_runs << '\n'
      << "successes            " << s.n_success << "  (D1 " << s.success_by_detector[0]
      << ", D2 " << s.success_by_detector[1] << ", dark " << s.success_by_detector[2] << '/'
      << s.success_by_detector[3] << ")\n"
      << "p_success            " << num(s.p_success.mean) << " +- " << num(s.p_success.error)
      << '\n'
      << "mean fidelity        " << num(s.fidelity.mean) << " +- " << num(s.fidelity.error)
      << '\n'
      << "fidelity at click    " << num(s.fidelity_at_click.mean) << " +- "
      << num(s.fidelity_at_click.error) << '\n'
      << "mean click time      " << num(s.click_time.mean) << '\n'
      << "clicks 0/1/2/3+      " << s.click_histogram[0] << '/' << s.click_histogram[1] << '/'
      << s.click_histogram[2] << '/' << s.click_histogram[3] << '\n';
}

void command_run(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  const EnsembleStats stats = ensemble_for(cfg, cfg.protocol);
  write_comment_header(out, "run", cfg);
  write_stats_csv_header(out);
  write_stats_csv_row(out, stats);
  write_stats_summary(log, "cavsim run (" + std::string(to_string(cfg.protocol)) + ")", stats);
  if (cfg.protocol == ProtocolKind::WeakDriving) {
    try {
      const ClosedFormReport cf = closed_form(cfg.params, cfg.params.window);
      log << "closed-form p_suc    " << num(cf.p_suc_eta) << "  (eta * (g*omega/(delta*kappa))^2 * 4*kappa*T)\n";
    } catch (const Error&) {
      log << "closed-form p_suc    n/a (outside weak-driving regime)\n";
    }
  }
}

void command_baseline(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  const EnsembleStats stats = ensemble_for(cfg, ProtocolKind::BaselineSudden);
  write_comment_header(out, "baseline", cfg);
  write_stats_csv_header(out);
  write_stats_csv_row(out, stats);
  write_stats_summary(log, "cavsim baseline (sudden excitation)", stats);
  const double n = static_cast<double>(stats.n_runs);
  log << "P(0/1/2 clicks)      " << num(stats.click_histogram[0] / n) << " / "
      << num(stats.click_histogram[1] / n) << " / " << num(stats.click_histogram[2] / n) << '\n';
}

void command_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  if (!cfg.sweep) {
    fail(ErrorKind::Config, "sweep_param: the sweep command needs a sweep parameter");
  }
  const std::vector<RunConfig> points = expand_sweep(cfg);
  write_comment_header(out, "sweep", cfg);
  out << "sweep_value,p_success,p_success_err,mean_fidelity,fidelity_err,n_success,n_runs\n";
  for (const auto& point : points) {
    const EnsembleStats s = ensemble_for(point, point.protocol);
    const double value = get_physical_param(point.params, cfg.sweep->parameter);
    out << num(value) << ',' << num(s.p_success.mean) << ',' << num(s.p_success.error) << ','
        << num(s.fidelity.mean) << ',' << num(s.fidelity.error) << ',' << s.n_success << ','
        << s.n_runs << '\n';
    log << cfg.sweep->parameter << " = " << num(value) << ": p_success " << num(s.p_success.mean)
        << " +- " << num(s.p_success.error) << ", fidelity " << num(s.fidelity.mean) << " +- "
        << num(s.fidelity.error) << '\n';
  }
}

void command_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  cfg.validate();
  const double t_end = cfg.oracle_t_end();
  if (!(t_end > 0.0)) {
    fail(ErrorKind::Config, "oracle_t_end: must be > 0");
  }
  std::vector<double> times;
  for (int k = 1; k <= cfg.oracle.samples; ++k) {
    times.push_back(t_end * k / cfg.oracle.samples);
  }
  times.back() = t_end;

  const Model model = build_model(cfg.params, cfg.variant);
  const StateVector initial = basis_vector(model.basis, {2, 2, 0, 0});
  LiouvilleOptions lo;
  lo.dt = cfg.oracle_dt();
  lo.sample_times = times;
  const auto exact = liouville_solve(model, cfg.params, projector(initial), t_end, lo);

  const TrajectoryEngine engine(model, cfg.params, cfg.integrator());
  const auto averaged =
      ensemble_average_density(engine, initial, times, cfg.n_runs, cfg.master_seed, cfg.workers);

  write_comment_header(out, "oracle", cfg);
  out << "# oracle_dt = " << num(lo.dt) << '\n';
  out << "time,trace_distance,click_integral\n";
  log << "== cavsim oracle: trajectory ensemble vs master equation ==\n"
      << "units: rates in g, times in 1/g\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double d = trace_distance(exact[i].rho, averaged[i]);
    out << num(times[i]) << ',' << num(d) << ',' << num(exact[i].click_integral) << '\n';
    log << "t = " << num(times[i]) << "  trace distance " << num(d) << "  expected clicks "
        << num(exact[i].click_integral) << '\n';
  }
}

void command_closedform(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  cfg.params.validate();
  const ClosedFormReport r = closed_form(cfg.params, cfg.params.window);
  write_comment_header(out, "closedform", cfg);
  out << "drive_ratio=" << num(r.drive_ratio) << '\n'
      << "x_re=" << num(r.x.real()) << '\n'
      << "x_im=" << num(r.x.imag()) << '\n'
      << "click_rate=" << num(r.click_rate) << '\n'
      << "t_av=" << num(r.t_av) << '\n'
      << "p_suc_ideal=" << num(r.p_suc_ideal) << '\n'
      << "p_suc_eta=" << num(r.p_suc_eta) << '\n'
      << "p_two_photon=" << num(r.p_two_photon) << '\n'
      << "regime_warning=" << (r.regime_warning ? "true" : "false") << '\n';
  if (r.regime_warning) {
    log << "warning: g*omega/(delta*kappa) = " << num(r.drive_ratio)
        << " > 0.2; the weak-driving formulas are unreliable here\n";
  }
}

}  // namespace cavsim
