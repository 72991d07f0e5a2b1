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

// Weak-driving closed forms and a density-matrix integrator for the full
// master equation, used as an oracle for the trajectory ensemble.

#pragma once

#include <vector>

#include "cavsim/hilbert.hpp"
#include "cavsim/model.hpp"

namespace cavsim {

struct ClosedFormReport {
  double drive_ratio = 0.0;  // gΩ/(Δκ)
  Complex x;                 // single-photon amplitude −i gΩ/(Δκ)
  double click_rate = 0.0;   // R = 4κ (gΩ/Δκ)²
  double t_av = 0.0;         // Δ²κ / (4(gΩ)²)
  double p_suc_ideal = 0.0;  // (gΩ/Δκ)² 4κT
  double p_suc_eta = 0.0;    // η · p_suc_ideal
  double p_two_photon = 0.0; // ½ (gΩ/Δκ)²
  bool regime_warning = false;  // drive_ratio > 0.2
};

/// Throws ErrorKind::Regime when a probability formula exceeds 1 or the
/// ratio is undefined (Δκ = 0 or gΩ = 0).
ClosedFormReport closed_form(const PhysicalParams& p, double window);

struct LiouvilleOptions {
  double dt = 1e-3;
  std::size_t dimension_cap = 81;
  /// Times at which ρ is recorded; must be sorted and lie in [0, t_end].
  std::vector<double> sample_times;
};

struct DensitySample {
  double time;
  DensityMatrix rho;
  double click_integral;  // ∫ Σ_detectors tr(L†Lρ) dt
};

/// RK4 integration of ρ̇ = −i(H_eff ρ − ρ H_eff†) + Σ_k L_k ρ L_k†.
/// Steps are shortened where needed to land exactly on the sample times.
std::vector<DensitySample> liouville_solve(const Model& model, const PhysicalParams& p,
                                           const DensityMatrix& initial, double t_end,
                                           const LiouvilleOptions& options);

std::vector<DensitySample> liouville_solve(const PhysicalParams& p, ModelVariant variant,
                                           const DensityMatrix& initial, double t_end,
                                           const LiouvilleOptions& options);

struct ClickSample {
  double time;
  double cumulative_clicks;
};

/// Expected cumulative detector clicks starting from |2,2;0,0⟩.
std::vector<ClickSample> unconditional_click_statistics(const Model& model,
                                                        const PhysicalParams& p, double t_end,
                                                        const LiouvilleOptions& options);

std::vector<ClickSample> unconditional_click_statistics(const PhysicalParams& p,
                                                        ModelVariant variant, double t_end,
                                                        const LiouvilleOptions& options);

/// Mean click rate between two samples, (N(t1) − N(t0)) / (t1 − t0).
double click_slope(const std::vector<ClickSample>& samples, std::size_t from, std::size_t to);

DensityMatrix projector(const StateVector& s);

}  // namespace cavsim
