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

#include <cmath>
#include <random>

#include "cavsim/analytics.hpp"
#include "cavsim/error.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace cavsim;

TEST_CASE("closed-form predictions at the reference parameters") {
  PhysicalParams p;
  const ClosedFormReport r = closed_form(p, p.window);
  // gΩ/(Δκ) = 1/200.
  CHECK(r.drive_ratio == doctest::Approx(0.005).epsilon(1e-15));
  CHECK(r.x.real() == 0.0);
  CHECK(r.x.imag() == doctest::Approx(-0.005).epsilon(1e-15));
  CHECK(r.t_av == 1000.0);
  CHECK(r.p_suc_ideal == 0.1);
  CHECK(r.p_suc_eta == 0.1);
  CHECK(r.p_two_photon == doctest::Approx(1.25e-5).epsilon(1e-14));
  CHECK(r.click_rate * r.t_av == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_FALSE(r.regime_warning);

  // The two-photon estimate is |x|⁴ accumulated at rate 2κ over t_av.
  CHECK(r.p_two_photon == doctest::Approx(std::pow(r.drive_ratio, 4) * 2.0 * p.kappa * r.t_av));

  p.eta = 0.4;
  CHECK(closed_form(p, p.window).p_suc_eta == doctest::Approx(0.04));
}

TEST_CASE("closed-form regime checks") {
  PhysicalParams p;
  p.omega = 0.0;
  CHECK_THROWS_AS(closed_form(p, 100.0), Error);

  PhysicalParams long_window;
  try {
    closed_form(long_window, 2000.0);
    FAIL("expected a regime error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Regime);
  }

  PhysicalParams strong;
  strong.omega = 50.0;  // drive_ratio 0.25
  CHECK(closed_form(strong, 0.01).regime_warning);
}

TEST_CASE("Liouville solver preserves trace, Hermiticity and positivity") {
  PhysicalParams p;
  p.omega = 4.0;
  std::mt19937_64 rng(31);
  const StateVector s = testing::random_state(rng, 81);
  LiouvilleOptions opt;
  opt.dt = 2e-3;
  opt.sample_times = {0.5, 1.0, 2.0};
  const auto samples = liouville_solve(p, ModelVariant::TwoCavityFull, projector(s), 2.0, opt);
  REQUIRE(samples.size() == 3);
  for (const auto& sample : samples) {
    CHECK(std::abs(sample.rho.trace() - Complex{1.0, 0.0}) < 1e-8);
    CHECK(hermiticity_defect(sample.rho) < 1e-12);
    CHECK(min_eigenvalue(sample.rho) > -1e-8);
  }
  CHECK(samples[0].click_integral <= samples[2].click_integral);
}

TEST_CASE("dark state is stationary") {
  PhysicalParams p;
  p.omega = 0.0;
  const Basis basis = Basis::two_cavity(2);
  const DensityMatrix rho0 = projector(basis_vector(basis, {2, 2, 0, 0}));
  LiouvilleOptions opt;
  opt.sample_times = {1.0};
  const auto samples = liouville_solve(p, ModelVariant::TwoCavityFull, rho0, 1.0, opt);
  CHECK((samples.back().rho - rho0).norm() < 1e-14);
  CHECK(samples.back().click_integral == 0.0);
}

TEST_CASE("bare photon: population and click integral match the exponential law") {
  PhysicalParams p;
  p.g = p.omega = 0.0;
  const Basis basis = Basis::two_cavity(2);
  const auto photon = static_cast<Eigen::Index>(basis.encode({2, 2, 1, 0}));
  LiouvilleOptions opt;
  opt.sample_times = {0.05, 0.2};
  for (double eta : {1.0, 0.5}) {
    p.eta = eta;
    const auto samples = liouville_solve(p, ModelVariant::TwoCavityFull,
                                         projector(basis_vector(basis, {2, 2, 1, 0})), 0.2, opt);
    for (const auto& sample : samples) {
      const double survive = std::exp(-2.0 * p.kappa * sample.time);
      CHECK(std::abs(sample.rho(photon, photon).real() - survive) < 1e-8);
      CHECK(std::abs(sample.click_integral - eta * (1.0 - survive)) < 1e-8);
    }
  }
}

TEST_CASE("unconditional click rate scales with efficiency and approaches the closed form") {
  PhysicalParams p;
  p.gamma31 = p.gamma32 = 0.0;
  LiouvilleOptions opt;
  opt.dt = 2e-3;
  opt.sample_times = {2.0, 6.0};
  const auto full = unconditional_click_statistics(p, ModelVariant::TwoCavityFull, 6.0, opt);
  const double slope = click_slope(full, 0, 1);
  CHECK(slope == doctest::Approx(closed_form(p, p.window).click_rate).epsilon(0.15));

  p.eta = 0.5;
  const auto half = unconditional_click_statistics(p, ModelVariant::TwoCavityFull, 6.0, opt);
  CHECK(click_slope(half, 0, 1) == doctest::Approx(0.5 * slope).epsilon(1e-9));
}

TEST_CASE("Liouville solver rejects oversized or malformed requests") {
  PhysicalParams p;
  p.n_max = 3;
  const DensityMatrix big = DensityMatrix::Zero(144, 144);
  CHECK_THROWS_AS(liouville_solve(p, ModelVariant::TwoCavityFull, big, 1.0, {}), Error);

  PhysicalParams q;
  LiouvilleOptions unsorted;
  unsorted.sample_times = {2.0, 1.0};
  const DensityMatrix rho = projector(basis_vector(Basis::two_cavity(2), {2, 2, 0, 0}));
  CHECK_THROWS_AS(liouville_solve(q, ModelVariant::TwoCavityFull, rho, 3.0, unsorted), Error);

  LiouvilleOptions coarse;
  coarse.dt = 0.01;
  CHECK_THROWS_AS(liouville_solve(q, ModelVariant::TwoCavityFull, rho, 1.0, coarse), Error);
}
