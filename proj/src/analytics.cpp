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

#include "cavsim/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cavsim/error.hpp"

namespace cavsim {

namespace {

const Complex kMinusI{0.0, -1.0};

bool is_detector(ChannelLabel label) {
  return label == ChannelLabel::DetectorD1 || label == ChannelLabel::DetectorD2;
}

class LindbladRhs {
 public:
  explicit LindbladRhs(const Model& model) : model_(model) {}

  /// Returns ρ̇ and writes the detector click rate.
  DensityMatrix operator()(const DensityMatrix& rho, double& click_rate) const {
    const DensityMatrix x = left_multiply(model_.effective_hamiltonian, rho);
    DensityMatrix out = kMinusI * (x - x.adjoint());
    click_rate = 0.0;
    for (std::size_t k = 0; k < model_.channels.size(); ++k) {
      const SparseOperator& l = model_.channels[k].op;
      if (l.nonzeros() == 0) {
        continue;
      }
      // L ρ L† = (L (L ρ)†)†
      const DensityMatrix y = left_multiply(l, rho);
      const DensityMatrix term = left_multiply(l, DensityMatrix(y.adjoint())).adjoint();
      out += term;
      if (is_detector(model_.channels[k].label)) {
        click_rate += term.trace().real();
      }
    }
    return 0.5 * (out + out.adjoint());
  }

 private:
  const Model& model_;
};

void check_oracle_inputs(const Model& model, const PhysicalParams& p,
                         const DensityMatrix& initial, double t_end,
                         const LiouvilleOptions& options) {
  const std::size_t dim = model.basis.dimension();
  if (dim > options.dimension_cap) {
    fail(ErrorKind::Config, "n_max: oracle dimension " + std::to_string(dim) +
                                " exceeds the cap of " + std::to_string(options.dimension_cap));
  }
  if (static_cast<std::size_t>(initial.rows()) != dim ||
      static_cast<std::size_t>(initial.cols()) != dim) {
    fail(ErrorKind::Domain, "liouville_solve: initial density matrix has the wrong dimension");
  }
  if (!(options.dt > 0.0) || options.dt * std::abs(p.delta) > 0.05 * (1.0 + 1e-12)) {
    fail(ErrorKind::Config, "oracle_dt: must be positive with dt*delta <= 0.05");
  }
  if (!(t_end >= 0.0)) {
    fail(ErrorKind::Config, "oracle_t_end: must be >= 0");
  }
  const auto& ts = options.sample_times;
  if (!std::is_sorted(ts.begin(), ts.end()) ||
      (!ts.empty() && (ts.front() < 0.0 || ts.back() > t_end))) {
    fail(ErrorKind::Config, "oracle sample times must be sorted and inside [0, t_end]");
  }
}

}  // namespace

ClosedFormReport closed_form(const PhysicalParams& p, double window) {
  p.validate();
  const double coupling = p.g * p.omega;
  const double denom = p.delta * p.kappa;
  if (!(coupling > 0.0) || !(denom > 0.0)) {
    fail(ErrorKind::Regime, "closed form undefined: needs g*omega > 0 and delta*kappa > 0");
  }
  const double c2 = coupling * coupling;
  const double d2 = denom * denom;

  ClosedFormReport r;
  r.drive_ratio = coupling / denom;
  r.x = Complex{0.0, -r.drive_ratio};
  r.click_rate = 4.0 * p.kappa * c2 / d2;
  r.t_av = p.delta * p.delta * p.kappa / (4.0 * c2);
  r.p_suc_ideal = 4.0 * p.kappa * window * c2 / d2;
  r.p_suc_eta = p.eta * r.p_suc_ideal;
  r.p_two_photon = 0.5 * c2 / d2;
  r.regime_warning = r.drive_ratio > 0.2;
  if (r.p_suc_ideal > 1.0 || r.p_two_photon > 1.0) {
    fail(ErrorKind::Regime, "weak-driving formula exceeds probability 1 (p_suc_ideal = " +
                                std::to_string(r.p_suc_ideal) + "); outside its validity");
  }
  return r;
}

DensityMatrix projector(const StateVector& s) { return s * s.adjoint(); }

namespace {

template <class Record>
void integrate(const Model& model, const PhysicalParams& p, const DensityMatrix& initial,
               double t_end, const LiouvilleOptions& options, Record&& record) {
  check_oracle_inputs(model, p, initial, t_end, options);
  const LindbladRhs rhs(model);
  DensityMatrix rho = initial;
  double clicks = 0.0;
  double t = 0.0;

  auto advance_to = [&](double target) {
    const double span = target - t;
    if (span <= 0.0) {
      return;
    }
    const auto steps = static_cast<long>(std::ceil(span / options.dt - 1e-9));
    const double h = span / static_cast<double>(std::max(1L, steps));
    double r1, r2, r3, r4;
    for (long s = 0; s < std::max(1L, steps); ++s) {
      const DensityMatrix k1 = rhs(rho, r1);
      const DensityMatrix k2 = rhs(rho + (0.5 * h) * k1, r2);
      const DensityMatrix k3 = rhs(rho + (0.5 * h) * k2, r3);
      const DensityMatrix k4 = rhs(rho + h * k3, r4);
      rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      clicks += (h / 6.0) * (r1 + 2.0 * r2 + 2.0 * r3 + r4);
    }
    t = target;
  };

  for (double ts : options.sample_times) {
    advance_to(ts);
    record(t, rho, clicks);
  }
  advance_to(t_end);
}

}  // namespace

std::vector<DensitySample> liouville_solve(const Model& model, const PhysicalParams& p,
                                           const DensityMatrix& initial, double t_end,
                                           const LiouvilleOptions& options) {
  std::vector<DensitySample> samples;
  integrate(model, p, initial, t_end, options,
            [&](double t, const DensityMatrix& rho, double clicks) {
              samples.push_back({t, rho, clicks});
            });
  return samples;
}

std::vector<DensitySample> liouville_solve(const PhysicalParams& p, ModelVariant variant,
                                           const DensityMatrix& initial, double t_end,
                                           const LiouvilleOptions& options) {
  return liouville_solve(build_model(p, variant), p, initial, t_end, options);
}

std::vector<ClickSample> unconditional_click_statistics(const Model& model,
                                                        const PhysicalParams& p, double t_end,
                                                        const LiouvilleOptions& options) {
  const DensityMatrix initial = projector(basis_vector(model.basis, {2, 2, 0, 0}));
  std::vector<ClickSample> samples;
  integrate(model, p, initial, t_end, options,
            [&](double t, const DensityMatrix&, double clicks) {
              samples.push_back({t, clicks});
            });
  return samples;
}

std::vector<ClickSample> unconditional_click_statistics(const PhysicalParams& p,
                                                        ModelVariant variant, double t_end,
                                                        const LiouvilleOptions& options) {
  return unconditional_click_statistics(build_model(p, variant), p, t_end, options);
}

double click_slope(const std::vector<ClickSample>& samples, std::size_t from, std::size_t to) {
  if (from >= samples.size() || to >= samples.size() || from == to) {
    fail(ErrorKind::Domain, "click_slope: bad sample indices");
  }
  return (samples[to].cumulative_clicks - samples[from].cumulative_clicks) /
         (samples[to].time - samples[from].time);
}

}  // namespace cavsim
