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

#include "cavsim/model.hpp"

#include <cmath>
#include <sstream>

#include "cavsim/error.hpp"

namespace cavsim {

namespace {

void require(bool ok, std::string_view field, double value, std::string_view rule) {
  if (!ok) {
    std::ostringstream msg;
    msg << field << ": " << rule << " (got " << value << ")";
    fail(ErrorKind::Config, msg.str());
  }
}

void require_rate(std::string_view field, double value) {
  require(std::isfinite(value) && value >= 0.0, field, value, "must be finite and >= 0");
}

const Complex kI{0.0, 1.0};

int ion_level(const BasisState& b, int ion) { return ion == 0 ? b.level_a : b.level_b; }

int photons(const BasisState& b, int mode) { return mode == 0 ? b.n_a : b.n_b; }

SparseOperator cavity_number(const Basis& basis, int mode) {
  const SparseOperator c = annihilation(basis, mode);
  return c.adjoint() * c;
}

SparseOperator scaled(double s, const SparseOperator& op) { return Complex{s, 0.0} * op; }

}  // namespace

void PhysicalParams::validate() const {
  require_rate("g", g);
  require_rate("omega", omega);
  require_rate("delta", delta);
  require_rate("kappa", kappa);
  require_rate("gamma31", gamma31);
  require_rate("gamma32", gamma32);
  require_rate("dark_rate", dark_rate);
  require(std::isfinite(eta) && eta >= 0.0 && eta <= 1.0, "eta", eta, "must lie in [0, 1]");
  require(std::isfinite(window) && window >= 0.0, "window", window, "must be finite and >= 0");
  require(n_max >= 1 && n_max <= 8, "n_max", n_max, "must lie in [1, 8]");
}

bool is_click(ChannelLabel label) {
  switch (label) {
    case ChannelLabel::DetectorD1:
    case ChannelLabel::DetectorD2:
    case ChannelLabel::DarkCountD1:
    case ChannelLabel::DarkCountD2:
      return true;
    default:
      return false;
  }
}

bool is_dark_count(ChannelLabel label) {
  return label == ChannelLabel::DarkCountD1 || label == ChannelLabel::DarkCountD2;
}

ChannelLabel firing_detector(ChannelLabel label) {
  switch (label) {
    case ChannelLabel::DetectorD1:
    case ChannelLabel::DarkCountD1:
      return ChannelLabel::DetectorD1;
    case ChannelLabel::DetectorD2:
    case ChannelLabel::DarkCountD2:
      return ChannelLabel::DetectorD2;
    default:
      fail(ErrorKind::Domain, std::string("channel ") + std::string(to_string(label)) +
                                  " is not a detector click");
  }
}

std::string_view to_string(ChannelLabel label) {
  switch (label) {
    case ChannelLabel::DetectorD1: return "D1";
    case ChannelLabel::DetectorD2: return "D2";
    case ChannelLabel::UndetectedLossA: return "lossA";
    case ChannelLabel::UndetectedLossB: return "lossB";
    case ChannelLabel::SpontA_to1: return "spontA1";
    case ChannelLabel::SpontA_to2: return "spontA2";
    case ChannelLabel::SpontB_to1: return "spontB1";
    case ChannelLabel::SpontB_to2: return "spontB2";
    case ChannelLabel::DarkCountD1: return "darkD1";
    case ChannelLabel::DarkCountD2: return "darkD2";
  }
  return "?";
}

std::string_view to_string(ModelVariant variant) {
  switch (variant) {
    case ModelVariant::TwoCavityFull: return "full";
    case ModelVariant::TwoCavityAdiabatic: return "adiabatic";
    case ModelVariant::SingleCavity: return "single";
  }
  return "?";
}

ModelVariant parse_variant(std::string_view name) {
  if (name == "full") return ModelVariant::TwoCavityFull;
  if (name == "adiabatic") return ModelVariant::TwoCavityAdiabatic;
  if (name == "single") return ModelVariant::SingleCavity;
  fail(ErrorKind::Config, "variant: unknown model variant '" + std::string(name) +
                              "' (expected full, adiabatic or single)");
}

Basis basis_for(ModelVariant variant, int n_max) {
  switch (variant) {
    case ModelVariant::TwoCavityFull: return Basis::two_cavity(n_max);
    case ModelVariant::TwoCavityAdiabatic: return Basis::adiabatic(n_max);
    case ModelVariant::SingleCavity: return Basis::single_cavity(n_max);
  }
  fail(ErrorKind::Domain, "unknown model variant");
}

SparseOperator annihilation(const Basis& basis, int mode) {
  if (mode < 0 || mode >= basis.modes()) {
    fail(ErrorKind::Domain, "cavity mode index out of range");
  }
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    BasisState b = basis.decode(i);
    const int n = photons(b, mode);
    if (n == 0) {
      continue;
    }
    (mode == 0 ? b.n_a : b.n_b) = n - 1;
    entries.push_back({basis.encode(b), i, Complex{std::sqrt(static_cast<double>(n)), 0.0}});
  }
  return SparseOperator(basis.dimension(), std::move(entries));
}

SparseOperator ion_transition(const Basis& basis, int ion, int to_level, int from_level) {
  if (ion != 0 && ion != 1) {
    fail(ErrorKind::Domain, "ion index must be 0 (A) or 1 (B)");
  }
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    BasisState b = basis.decode(i);
    if (ion_level(b, ion) != from_level) {
      continue;
    }
    (ion == 0 ? b.level_a : b.level_b) = to_level;
    entries.push_back({basis.encode(b), i, Complex{1.0, 0.0}});
  }
  return SparseOperator(basis.dimension(), std::move(entries));
}

SparseOperator build_hamiltonian(const PhysicalParams& p, ModelVariant variant) {
  p.validate();
  if (variant == ModelVariant::TwoCavityAdiabatic) {
    return build_adiabatic_model(p).hamiltonian;
  }
  const Basis basis = basis_for(variant, p.n_max);
  SparseOperator h = SparseOperator::zero(basis.dimension());
  for (int ion = 0; ion < 2; ++ion) {
    const int mode = variant == ModelVariant::SingleCavity ? 0 : ion;
    const SparseOperator c = annihilation(basis, mode);
    const SparseOperator s31 = ion_transition(basis, ion, 3, 1);
    const SparseOperator s32 = ion_transition(basis, ion, 3, 2);
    const SparseOperator cavity_term = s31 * c;
    const SparseOperator drive_term = s32;
    h = h + scaled(p.delta, ion_transition(basis, ion, 3, 3)) +
        scaled(p.g, cavity_term + cavity_term.adjoint()) +
        scaled(p.omega, drive_term + drive_term.adjoint());
  }
  return h;
}

SparseOperator build_effective_hamiltonian(const PhysicalParams& p, ModelVariant variant) {
  if (variant == ModelVariant::TwoCavityAdiabatic) {
    return build_adiabatic_model(p).effective_hamiltonian;
  }
  const SparseOperator h = build_hamiltonian(p, variant);
  const Basis basis = basis_for(variant, p.n_max);
  SparseOperator damping = SparseOperator::zero(basis.dimension());
  for (int mode = 0; mode < basis.modes(); ++mode) {
    damping = damping + scaled(p.kappa, cavity_number(basis, mode));
  }
  for (int ion = 0; ion < 2; ++ion) {
    damping = damping + scaled(p.gamma31 + p.gamma32, ion_transition(basis, ion, 3, 3));
  }
  return h - kI * damping;
}

namespace {

std::vector<JumpChannel> cavity_channels(const PhysicalParams& p, const Basis& basis) {
  std::vector<JumpChannel> channels;
  if (basis.modes() == 1) {
    const SparseOperator c = annihilation(basis, 0);
    channels.push_back({ChannelLabel::DetectorD1, scaled(std::sqrt(2.0 * p.kappa * p.eta), c)});
    if (p.eta < 1.0) {
      channels.push_back(
          {ChannelLabel::UndetectedLossA, scaled(std::sqrt(2.0 * p.kappa * (1.0 - p.eta)), c)});
    }
    return channels;
  }
  const SparseOperator ca = annihilation(basis, 0);
  const SparseOperator cb = annihilation(basis, 1);
  const double detected = std::sqrt(p.kappa * p.eta);
  channels.push_back({ChannelLabel::DetectorD1, scaled(detected, ca + cb)});
  channels.push_back({ChannelLabel::DetectorD2, scaled(detected, ca - cb)});
  if (p.eta < 1.0) {
    const double lost = std::sqrt(2.0 * p.kappa * (1.0 - p.eta));
    channels.push_back({ChannelLabel::UndetectedLossA, scaled(lost, ca)});
    channels.push_back({ChannelLabel::UndetectedLossB, scaled(lost, cb)});
  }
  return channels;
}

}  // namespace

std::vector<JumpChannel> build_jump_channels(const PhysicalParams& p, ModelVariant variant) {
  p.validate();
  if (variant == ModelVariant::TwoCavityAdiabatic) {
    return build_adiabatic_model(p).channels;
  }
  const Basis basis = basis_for(variant, p.n_max);
  std::vector<JumpChannel> channels = cavity_channels(p, basis);
  static constexpr ChannelLabel kTo1[] = {ChannelLabel::SpontA_to1, ChannelLabel::SpontB_to1};
  static constexpr ChannelLabel kTo2[] = {ChannelLabel::SpontA_to2, ChannelLabel::SpontB_to2};
  for (int ion = 0; ion < 2; ++ion) {
    if (p.gamma31 > 0.0) {
      channels.push_back(
          {kTo1[ion], scaled(std::sqrt(2.0 * p.gamma31), ion_transition(basis, ion, 1, 3))});
    }
    if (p.gamma32 > 0.0) {
      channels.push_back(
          {kTo2[ion], scaled(std::sqrt(2.0 * p.gamma32), ion_transition(basis, ion, 2, 3))});
    }
  }
  return channels;
}

Model build_adiabatic_model(const PhysicalParams& p, AdiabaticOptions options) {
  p.validate();
  if (!(p.delta > 0.0)) {
    fail(ErrorKind::Regime, "delta: adiabatic elimination requires delta > 0");
  }
  const Basis basis = Basis::adiabatic(p.n_max);
  const double raman = p.g * p.omega / p.delta;
  SparseOperator h = SparseOperator::zero(basis.dimension());
  SparseOperator damping = SparseOperator::zero(basis.dimension());
  for (int ion = 0; ion < 2; ++ion) {
    const SparseOperator c = annihilation(basis, ion);
    const SparseOperator absorb = ion_transition(basis, ion, 2, 1) * c;
    h = h + scaled(raman, absorb + absorb.adjoint());
    if (options.level_shifts) {
      h = h + scaled(p.g * p.g / p.delta, ion_transition(basis, ion, 1, 1)) +
          scaled(p.omega * p.omega / p.delta, ion_transition(basis, ion, 2, 2));
    }
    damping = damping + scaled(p.kappa, cavity_number(basis, ion));
  }
  Model model{ModelVariant::TwoCavityAdiabatic, basis, h, h - kI * damping,
              cavity_channels(p, basis)};
  return model;
}

Model build_model(const PhysicalParams& p, ModelVariant variant) {
  if (variant == ModelVariant::TwoCavityAdiabatic) {
    return build_adiabatic_model(p);
  }
  return Model{variant, basis_for(variant, p.n_max), build_hamiltonian(p, variant),
               build_effective_hamiltonian(p, variant), build_jump_channels(p, variant)};
}

Eigen::MatrixXcd channel_completeness_defect(const Model& model) {
  const Eigen::MatrixXcd heff = model.effective_hamiltonian.to_dense();
  Eigen::MatrixXcd defect = kI * (heff - heff.adjoint());
  for (const auto& ch : model.channels) {
    const Eigen::MatrixXcd l = ch.op.to_dense();
    defect -= l.adjoint() * l;
  }
  return defect;
}

}  // namespace cavsim
