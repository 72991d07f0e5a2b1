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

// Test-only reference constructions. Everything here is written directly
// from the basis labels so it does not share code paths with the builders
// under test.

#pragma once

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "cavsim/hilbert.hpp"
#include "cavsim/model.hpp"

namespace cavsim::testing {

/// Dense H for two cavities, written term by term from matrix elements:
/// ⟨3,n|H|1,n+1⟩ = g√(n+1), ⟨3|H|2⟩ = Ω, ⟨3|H|3⟩ = Δ per ion.
inline Eigen::MatrixXcd reference_hamiltonian(const PhysicalParams& p) {
  const Basis basis = Basis::two_cavity(p.n_max);
  const auto dim = static_cast<Eigen::Index>(basis.dimension());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const BasisState b = basis.decode(static_cast<std::size_t>(col));
    for (int ion = 0; ion < 2; ++ion) {
      const int level = ion == 0 ? b.level_a : b.level_b;
      const int n = ion == 0 ? b.n_a : b.n_b;
      auto with = [&](int new_level, int new_n) {
        BasisState t = b;
        (ion == 0 ? t.level_a : t.level_b) = new_level;
        (ion == 0 ? t.n_a : t.n_b) = new_n;
        return static_cast<Eigen::Index>(basis.encode(t));
      };
      if (level == 3) {
        h(col, col) += p.delta;
        h(with(2, n), col) += p.omega;
        if (n + 1 <= p.n_max) {
          h(with(1, n + 1), col) += p.g * std::sqrt(n + 1.0);
        }
      }
      if (level == 2) {
        h(with(3, n), col) += p.omega;
      }
      if (level == 1 && n >= 1) {
        h(with(3, n - 1), col) += p.g * std::sqrt(static_cast<double>(n));
      }
    }
  }
  return h;
}

inline StateVector random_state(std::mt19937_64& rng, std::size_t dim, bool normalize = true) {
  std::normal_distribution<double> gauss;
  StateVector s(static_cast<Eigen::Index>(dim));
  for (auto& a : s) {
    a = {gauss(rng), gauss(rng)};
  }
  if (normalize) {
    s.normalize();
  }
  return s;
}

inline PhysicalParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PhysicalParams p;
  p.g = 0.2 + 2.0 * u(rng);
  p.omega = 3.0 * u(rng);
  p.delta = 1.0 + 40.0 * u(rng);
  p.kappa = 20.0 * u(rng);
  p.gamma31 = u(rng) < 0.2 ? 0.0 : u(rng);
  p.gamma32 = u(rng) < 0.2 ? 0.0 : u(rng);
  p.eta = u(rng) < 0.2 ? 1.0 : u(rng);
  p.n_max = 1 + static_cast<int>(3.0 * u(rng));
  return p;
}

inline StateVector ion_vector(const Basis& basis, int level_a, int level_b) {
  StateVector v = StateVector::Zero(static_cast<Eigen::Index>(basis.ion_dimension()));
  v[static_cast<Eigen::Index>(basis.ion_index(level_a, level_b))] = 1.0;
  return v;
}

}  // namespace cavsim::testing
