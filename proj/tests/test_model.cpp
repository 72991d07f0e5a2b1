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

#include <random>
#include <string>

#include "cavsim/error.hpp"
#include "cavsim/model.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace cavsim;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

std::size_t idx(const Basis& basis, BasisState b) { return basis.encode(b); }

}  // namespace

TEST_CASE("default parameters validate, bad ones name the field") {
  PhysicalParams p;
  CHECK_NOTHROW(p.validate());
  p.eta = 1.2;
  try {
    p.validate();
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    CHECK(std::string(e.what()).find("eta") != std::string::npos);
  }
  PhysicalParams q;
  q.kappa = -1.0;
  CHECK_THROWS_AS(q.validate(), Error);
  q = {};
  q.n_max = 9;
  CHECK_THROWS_AS(q.validate(), Error);
}

TEST_CASE("Hamiltonian matrix elements") {
  PhysicalParams p;
  p.g = 0.7;
  p.omega = 1.3;
  const Basis basis = Basis::two_cavity(p.n_max);
  const SparseOperator h = build_hamiltonian(p);
  CHECK(h.at(idx(basis, {3, 2, 0, 0}), idx(basis, {1, 2, 1, 0})) == Complex{0.7, 0.0});
  CHECK(h.at(idx(basis, {3, 2, 1, 0}), idx(basis, {1, 2, 2, 0})).real() ==
        doctest::Approx(0.7 * std::sqrt(2.0)));
  CHECK(h.at(idx(basis, {2, 3, 0, 0}), idx(basis, {2, 2, 0, 0})) == Complex{1.3, 0.0});
  CHECK(h.at(idx(basis, {3, 1, 0, 0}), idx(basis, {3, 1, 0, 0})) == Complex{20.0, 0.0});
  CHECK(h.at(idx(basis, {3, 3, 0, 0}), idx(basis, {3, 3, 0, 0})) == Complex{40.0, 0.0});
  CHECK(h.is_hermitian());
  // Cavity A couples only to ion A.
  CHECK(h.at(idx(basis, {2, 3, 0, 0}), idx(basis, {2, 1, 1, 0})) == Complex{});
}

TEST_CASE("Hamiltonian agrees with an entrywise reference construction") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const PhysicalParams p = testing::random_params(rng);
    const Eigen::MatrixXcd diff = build_hamiltonian(p).to_dense() - testing::reference_hamiltonian(p);
    CHECK(max_abs(diff) < 1e-14);
  }
}

TEST_CASE("effective Hamiltonian damping terms") {
  PhysicalParams p;
  const Basis basis = Basis::two_cavity(p.n_max);
  const SparseOperator heff = build_effective_hamiltonian(p);
  CHECK_FALSE(heff.is_hermitian());
  CHECK(build_hamiltonian(p).is_hermitian());

  const Eigen::MatrixXcd anti = (heff.to_dense() - heff.to_dense().adjoint()) / Complex{0.0, 2.0};
  const auto diag = [&](BasisState b) {
    const auto i = static_cast<Eigen::Index>(idx(basis, b));
    return anti(i, i);
  };
  CHECK(diag({2, 2, 1, 0}).real() == doctest::Approx(-p.kappa));
  CHECK(diag({2, 2, 2, 1}).real() == doctest::Approx(-3.0 * p.kappa));
  CHECK(diag({3, 2, 0, 0}).real() == doctest::Approx(-(p.gamma31 + p.gamma32)));
  CHECK(diag({2, 2, 0, 0}).real() == 0.0);

  const Eigen::MatrixXcd herm = (heff.to_dense() + heff.to_dense().adjoint()) / 2.0;
  CHECK(max_abs(herm - build_hamiltonian(p).to_dense()) < 1e-15);

  PhysicalParams closed = p;
  closed.kappa = closed.gamma31 = closed.gamma32 = 0.0;
  CHECK(build_effective_hamiltonian(closed).is_hermitian(0.0));
}

TEST_CASE("channel inventory") {
  PhysicalParams p;
  const auto channels = build_jump_channels(p);
  CHECK(channels.size() == 6);
  CHECK(channels[0].label == ChannelLabel::DetectorD1);
  CHECK(channels[1].label == ChannelLabel::DetectorD2);

  p.eta = 0.5;
  CHECK(build_jump_channels(p).size() == 8);
  p.gamma32 = 0.0;
  CHECK(build_jump_channels(p).size() == 6);
  p.gamma31 = 0.0;
  p.eta = 1.0;
  CHECK(build_jump_channels(p).size() == 2);
  CHECK(build_jump_channels(p, ModelVariant::SingleCavity).size() == 1);

  CHECK(is_click(ChannelLabel::DetectorD2));
  CHECK(is_click(ChannelLabel::DarkCountD1));
  CHECK_FALSE(is_click(ChannelLabel::UndetectedLossA));
  CHECK(firing_detector(ChannelLabel::DarkCountD2) == ChannelLabel::DetectorD2);
  CHECK(to_string(ChannelLabel::SpontB_to1) == "spontB1");
  CHECK(parse_variant("adiabatic") == ModelVariant::TwoCavityAdiabatic);
  CHECK_THROWS_AS(parse_variant("triple"), Error);
}

TEST_CASE("channel completeness holds for random parameters and every variant") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 50; ++trial) {
    const PhysicalParams p = testing::random_params(rng);
    for (auto variant : {ModelVariant::TwoCavityFull, ModelVariant::TwoCavityAdiabatic,
                         ModelVariant::SingleCavity}) {
      CHECK(max_abs(channel_completeness_defect(build_model(p, variant))) <= 1e-12);
    }
  }
  for (double eta : {0.0, 0.3, 1.0}) {
    PhysicalParams p;
    p.eta = eta;
    CHECK(max_abs(channel_completeness_defect(build_model(p, ModelVariant::TwoCavityFull))) <=
          1e-12);
  }
}

TEST_CASE("symmetric single-photon state clicks both detectors equally") {
  PhysicalParams p;
  p.gamma31 = p.gamma32 = 0.0;
  const Basis basis = Basis::two_cavity(p.n_max);
  StateVector s = basis_vector(basis, {2, 1, 0, 1}) + basis_vector(basis, {1, 2, 1, 0});
  s /= std::sqrt(2.0);
  const auto channels = build_jump_channels(p);

  // Direct evaluation: (c_A ± c_B) maps the two branches onto |2,1⟩|0⟩ and ±|1,2⟩|0⟩, so
  // each detector sees amplitude 1/√2 per branch and intensity κη·(1/2 + 1/2).
  const double expected = p.kappa * p.eta;
  const double d1 = cavsim::apply(channels[0].op, s).squaredNorm();
  const double d2 = cavsim::apply(channels[1].op, s).squaredNorm();
  CHECK(d1 == doctest::Approx(expected));
  CHECK(d2 == doctest::Approx(expected));
  CHECK(d1 / (d1 + d2) == doctest::Approx(0.5));
}

TEST_CASE("detected rates scale linearly with efficiency") {
  PhysicalParams p;
  std::mt19937_64 rng(8);
  const StateVector s = testing::random_state(rng, Basis::two_cavity(2).dimension());
  const auto full = build_jump_channels(p);
  p.eta = 0.35;
  const auto partial = build_jump_channels(p);
  for (int k = 0; k < 2; ++k) {
    CHECK(cavsim::apply(partial[k].op, s).squaredNorm() ==
          doctest::Approx(0.35 * cavsim::apply(full[k].op, s).squaredNorm()));
  }
}

TEST_CASE("adiabatic model structure") {
  PhysicalParams p;
  const Model m = build_adiabatic_model(p);
  REQUIRE(m.basis.dimension() == 36);
  const double raman = p.g * p.omega / p.delta;
  CHECK(m.hamiltonian.at(idx(m.basis, {2, 2, 0, 0}), idx(m.basis, {1, 2, 1, 0})).real() ==
        doctest::Approx(raman));
  CHECK(m.hamiltonian.at(idx(m.basis, {1, 2, 1, 0}), idx(m.basis, {2, 2, 0, 0})).real() ==
        doctest::Approx(raman));
  CHECK(m.hamiltonian.at(idx(m.basis, {2, 1, 0, 0}), idx(m.basis, {1, 1, 0, 0})) == Complex{});
  // Light shifts on the diagonal.
  CHECK(m.hamiltonian.at(idx(m.basis, {2, 2, 0, 0}), idx(m.basis, {2, 2, 0, 0})).real() ==
        doctest::Approx(2.0 * p.omega * p.omega / p.delta));
  CHECK(m.hamiltonian.at(idx(m.basis, {1, 2, 0, 0}), idx(m.basis, {1, 2, 0, 0})).real() ==
        doctest::Approx((p.g * p.g + p.omega * p.omega) / p.delta));
  CHECK(m.channels.size() == 2);

  const Model bare = build_adiabatic_model(p, {.level_shifts = false});
  CHECK(bare.hamiltonian.at(idx(m.basis, {2, 2, 0, 0}), idx(m.basis, {2, 2, 0, 0})) == Complex{});

  p.delta = 0.0;
  try {
    build_adiabatic_model(p);
    FAIL("expected a regime error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Regime);
  }
}

TEST_CASE("single-cavity variant shares one mode") {
  PhysicalParams p;
  const Model m = build_model(p, ModelVariant::SingleCavity);
  CHECK(m.basis.dimension() == 27);
  CHECK(m.detector_count() == 1);
  // Both ions emit into the same mode.
  CHECK(m.hamiltonian.at(idx(m.basis, {3, 2, 0, 0}), idx(m.basis, {1, 2, 1, 0})) ==
        Complex{p.g, 0.0});
  CHECK(m.hamiltonian.at(idx(m.basis, {2, 3, 0, 0}), idx(m.basis, {2, 1, 1, 0})) ==
        Complex{p.g, 0.0});
}
