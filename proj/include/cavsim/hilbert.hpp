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

// Tensor-product basis for two ions and their cavity modes, a small sparse
// operator type, and the reduced-state / fidelity helpers built on top.

#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cavsim {

using Complex = std::complex<double>;
using StateVector = Eigen::VectorXcd;
using DensityMatrix = Eigen::MatrixXcd;

/// One product basis state. Ion levels are the physical labels 1, 2, 3;
/// photon numbers count from 0. For a single shared cavity `n_b` is always 0.
struct BasisState {
  int level_a = 2;
  int level_b = 2;
  int n_a = 0;
  int n_b = 0;

  friend bool operator==(const BasisState&, const BasisState&) = default;
};

/// Flat indexing of the product basis.
///
/// Ordering is fixed: level_a varies slowest, then level_b, then n_a, and
/// n_b fastest. Ions carry either the three levels {1,2,3} or, for the
/// adiabatically eliminated model, only {1,2}. With one cavity mode the
/// n_b factor is absent.
class Basis {
 public:
  Basis(int ion_levels, int modes, int n_max);

  static Basis two_cavity(int n_max) { return Basis(3, 2, n_max); }
  static Basis adiabatic(int n_max) { return Basis(2, 2, n_max); }
  static Basis single_cavity(int n_max) { return Basis(3, 1, n_max); }

  int ion_levels() const { return ion_levels_; }
  int modes() const { return modes_; }
  int n_max() const { return n_max_; }

  std::size_t dimension() const;
  std::size_t ion_dimension() const;
  std::size_t photon_dimension() const;

  bool contains(const BasisState& b) const;
  std::size_t encode(const BasisState& b) const;
  BasisState decode(std::size_t index) const;

  /// Index into the two-ion space (dimension ion_levels²).
  std::size_t ion_index(int level_a, int level_b) const;

  friend bool operator==(const Basis&, const Basis&) = default;

 private:
  int ion_levels_;
  int modes_;
  int n_max_;
};

/// Flat index in the two-cavity three-level basis with Fock cutoff n_max.
std::size_t encode_index(const BasisState& b, int n_max);
BasisState decode_index(std::size_t index, int n_max);

struct Entry {
  std::size_t row;
  std::size_t col;
  Complex value;
};

/// Square complex sparse matrix in compressed-row form.
///
/// Construction canonicalizes the entry list: entries are sorted row-major,
/// duplicates are summed and exact zeros dropped. Instances are immutable.
class SparseOperator {
 public:
  SparseOperator() = default;
  SparseOperator(std::size_t dimension, std::vector<Entry> entries);

  static SparseOperator identity(std::size_t dimension);
  static SparseOperator zero(std::size_t dimension);
  /// Keeps every entry that is not exactly zero.
  static SparseOperator from_dense(const Eigen::MatrixXcd& m);

  std::size_t dimension() const { return dimension_; }
  std::size_t nonzeros() const { return entries_.size(); }
  std::span<const Entry> entries() const { return entries_; }
  std::span<const Entry> row(std::size_t r) const;

  Complex at(std::size_t row, std::size_t col) const;

  SparseOperator adjoint() const;
  Eigen::MatrixXcd to_dense() const;

  bool is_hermitian(double tol = 1e-12) const;

  /// out = this * in. `out` must not alias `in`.
  void apply_into(const StateVector& in, StateVector& out) const;

  friend SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator-(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator*(Complex s, const SparseOperator& a);

 private:
  std::size_t dimension_ = 0;
  std::vector<Entry> entries_;
  std::vector<std::size_t> row_start_;
};

StateVector apply(const SparseOperator& op, const StateVector& s);

/// op * m, column by column.
DensityMatrix left_multiply(const SparseOperator& op, const DensityMatrix& m);

StateVector basis_vector(const Basis& basis, const BasisState& b);

/// Partial trace over every cavity mode. The input must be normalized.
DensityMatrix reduce_to_ions(const Basis& basis, const StateVector& s);

/// ⟨target|rho|target⟩.
double fidelity(const DensityMatrix& rho, const StateVector& target);

/// ½‖a − b‖₁ for Hermitian arguments.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

double min_eigenvalue(const DensityMatrix& rho);
double hermiticity_defect(const DensityMatrix& rho);

/// Writes "index re im" per amplitude with |amplitude| > threshold.
void write_state(std::ostream& out, const StateVector& s, double threshold = 0.0);
StateVector read_state(std::istream& in, std::size_t dimension);

}  // namespace cavsim
