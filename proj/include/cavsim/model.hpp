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

// Hamiltonians and jump channels for two ions coupled to cavity modes whose
// output is mixed on a 50/50 beam splitter before photodetection.
//
// Units: every rate is expressed in units of the ion-cavity coupling g and
// times in units of 1/g; hbar = 1.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cavsim/hilbert.hpp"

namespace cavsim {

struct PhysicalParams {
  double g = 1.0;
  double omega = 1.0;
  double delta = 20.0;
  double kappa = 10.0;  // field decay; photons leave at 2κ
  double gamma31 = 0.1;
  double gamma32 = 0.1;
  double eta = 1.0;        // detector efficiency, mirror absorption folded in
  double dark_rate = 0.0;  // per detector
  double window = 100.0;   // protocol wait time T
  int n_max = 2;

  /// Throws ErrorKind::Config naming the offending field.
  void validate() const;
};

enum class ModelVariant { TwoCavityFull, TwoCavityAdiabatic, SingleCavity };

enum class ChannelLabel {
  DetectorD1,
  DetectorD2,
  UndetectedLossA,
  UndetectedLossB,
  SpontA_to1,
  SpontA_to2,
  SpontB_to1,
  SpontB_to2,
  DarkCountD1,
  DarkCountD2,
};

/// D1, D2 and dark counts: everything the experimenter sees as a click.
bool is_click(ChannelLabel label);
bool is_dark_count(ChannelLabel label);
/// Maps dark counts onto the detector that fired; detectors map to themselves.
ChannelLabel firing_detector(ChannelLabel label);

std::string_view to_string(ChannelLabel label);
std::string_view to_string(ModelVariant variant);
ModelVariant parse_variant(std::string_view name);

/// Rate-weighted jump operator (the √rate prefactor is included).
struct JumpChannel {
  ChannelLabel label;
  SparseOperator op;
};

struct Model {
  ModelVariant variant;
  Basis basis;
  SparseOperator hamiltonian;            // Hermitian part
  SparseOperator effective_hamiltonian;  // governs no-click evolution
  std::vector<JumpChannel> channels;

  /// Number of physical detectors (2 behind the beam splitter, 1 for a single cavity).
  int detector_count() const { return variant == ModelVariant::SingleCavity ? 1 : 2; }
};

Basis basis_for(ModelVariant variant, int n_max);

// Elementary operators on a given basis. `ion` and `mode` are 0 for A, 1 for B.
SparseOperator annihilation(const Basis& basis, int mode);
SparseOperator ion_transition(const Basis& basis, int ion, int to_level, int from_level);

/// Sum over both ions of Δ|3⟩⟨3| + g(|3⟩⟨1|c + h.c.) + Ω(|3⟩⟨2| + h.c.).
/// For the single-cavity variant both ions share one mode.
SparseOperator build_hamiltonian(const PhysicalParams& p,
                                 ModelVariant variant = ModelVariant::TwoCavityFull);

/// H − iκ Σ c†c − i(γ31+γ32) Σ |3⟩⟨3|.
SparseOperator build_effective_hamiltonian(const PhysicalParams& p,
                                           ModelVariant variant = ModelVariant::TwoCavityFull);

/// Beam-splitter convention: D1 = √(κη)(c_A + c_B), D2 = √(κη)(c_A − c_B).
/// Lost photons go to √(2κ(1−η)) c_i, omitted when η = 1; spontaneous
/// channels √(2γ31)|1⟩⟨3|, √(2γ32)|2⟩⟨3| per ion, omitted at zero rate.
/// The adiabatic variant carries only the cavity channels.
std::vector<JumpChannel> build_jump_channels(const PhysicalParams& p,
                                             ModelVariant variant = ModelVariant::TwoCavityFull);

struct AdiabaticOptions {
  bool level_shifts = true;  // keep g²/Δ |1⟩⟨1| and Ω²/Δ |2⟩⟨2|
};

/// Two-level ions {1,2} after eliminating |3⟩:
/// H_ad = Σ_i (gΩ/Δ)(|2⟩⟨1|c_i + h.c.) + (g²/Δ)|1⟩⟨1| + (Ω²/Δ)|2⟩⟨2| − iκ c_i†c_i.
/// Requires Δ > 0.
Model build_adiabatic_model(const PhysicalParams& p, AdiabaticOptions options = {});

Model build_model(const PhysicalParams& p, ModelVariant variant);

/// i(H_eff − H_eff†) − Σ_k L_k†L_k; zero for a consistent model.
Eigen::MatrixXcd channel_completeness_defect(const Model& model);

}  // namespace cavsim
