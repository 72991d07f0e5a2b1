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

#include "cavsim/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "cavsim/error.hpp"

namespace cavsim {

namespace {

constexpr double kNormTolerance = 1e-10;

// Ion levels are labelled from 1 in both the three- and two-level bases.
constexpr int kLowestLevel = 1;

}  // namespace

Basis::Basis(int ion_levels, int modes, int n_max)
    : ion_levels_(ion_levels), modes_(modes), n_max_(n_max) {
  if (ion_levels != 2 && ion_levels != 3) {
    fail(ErrorKind::Domain, "ion_levels must be 2 or 3");
  }
  if (modes != 1 && modes != 2) {
    fail(ErrorKind::Domain, "modes must be 1 or 2");
  }
  if (n_max < 0) {
    fail(ErrorKind::Domain, "n_max must be non-negative");
  }
}

std::size_t Basis::photon_dimension() const {
  const auto n = static_cast<std::size_t>(n_max_ + 1);
  return modes_ == 2 ? n * n : n;
}

std::size_t Basis::ion_dimension() const {
  const auto l = static_cast<std::size_t>(ion_levels_);
  return l * l;
}

std::size_t Basis::dimension() const {
  return ion_dimension() * photon_dimension();
}

bool Basis::contains(const BasisState& b) const {
  const int lo = kLowestLevel;
  const int hi = lo + ion_levels_ - 1;
  auto level_ok = [&](int l) { return l >= lo && l <= hi; };
  auto photon_ok = [&](int n) { return n >= 0 && n <= n_max_; };
  return level_ok(b.level_a) && level_ok(b.level_b) && photon_ok(b.n_a) &&
         (modes_ == 2 ? photon_ok(b.n_b) : b.n_b == 0);
}

std::size_t Basis::encode(const BasisState& b) const {
  if (!contains(b)) {
    std::ostringstream msg;
    msg << "basis state (" << b.level_a << ',' << b.level_b << ';' << b.n_a
        << ',' << b.n_b << ") outside basis with " << ion_levels_
        << " ion levels, " << modes_ << " mode(s), n_max=" << n_max_;
    fail(ErrorKind::Domain, msg.str());
  }
  const std::size_t photons =
      modes_ == 2 ? static_cast<std::size_t>(b.n_a * (n_max_ + 1) + b.n_b)
                  : static_cast<std::size_t>(b.n_a);
  return ion_index(b.level_a, b.level_b) * photon_dimension() + photons;
}

BasisState Basis::decode(std::size_t index) const {
  if (index >= dimension()) {
    fail(ErrorKind::Domain, "basis index " + std::to_string(index) + " out of range");
  }
  const std::size_t pd = photon_dimension();
  const std::size_t ion = index / pd;
  const std::size_t photons = index % pd;
  const auto levels = static_cast<std::size_t>(ion_levels_);
  const int lo = kLowestLevel;
  BasisState b;
  b.level_a = lo + static_cast<int>(ion / levels);
  b.level_b = lo + static_cast<int>(ion % levels);
  const auto n1 = static_cast<std::size_t>(n_max_ + 1);
  if (modes_ == 2) {
    b.n_a = static_cast<int>(photons / n1);
    b.n_b = static_cast<int>(photons % n1);
  } else {
    b.n_a = static_cast<int>(photons);
    b.n_b = 0;
  }
  return b;
}

std::size_t Basis::ion_index(int level_a, int level_b) const {
  const int lo = kLowestLevel;
  const int hi = lo + ion_levels_ - 1;
  if (level_a < lo || level_a > hi || level_b < lo || level_b > hi) {
    fail(ErrorKind::Domain, "ion level out of range");
  }
  return static_cast<std::size_t>((level_a - lo) * ion_levels_ + (level_b - lo));
}

std::size_t encode_index(const BasisState& b, int n_max) {
  return Basis::two_cavity(n_max).encode(b);
}

BasisState decode_index(std::size_t index, int n_max) {
  return Basis::two_cavity(n_max).decode(index);
}

// ---------------------------------------------------------------------------

SparseOperator::SparseOperator(std::size_t dimension, std::vector<Entry> entries)
    : dimension_(dimension) {
  for (const auto& e : entries) {
    if (e.row >= dimension || e.col >= dimension) {
      fail(ErrorKind::Domain, "sparse entry outside operator dimension");
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  entries_.reserve(entries.size());
  for (const auto& e : entries) {
    if (!entries_.empty() && entries_.back().row == e.row && entries_.back().col == e.col) {
      entries_.back().value += e.value;
    } else {
      entries_.push_back(e);
    }
  }
  std::erase_if(entries_, [](const Entry& e) { return e.value == Complex{}; });

  row_start_.assign(dimension_ + 1, 0);
  for (const auto& e : entries_) {
    ++row_start_[e.row + 1];
  }
  for (std::size_t r = 0; r < dimension_; ++r) {
    row_start_[r + 1] += row_start_[r];
  }
}

SparseOperator SparseOperator::identity(std::size_t dimension) {
  std::vector<Entry> entries;
  entries.reserve(dimension);
  for (std::size_t i = 0; i < dimension; ++i) {
    entries.push_back({i, i, Complex{1.0, 0.0}});
  }
  return SparseOperator(dimension, std::move(entries));
}

SparseOperator SparseOperator::zero(std::size_t dimension) {
  return SparseOperator(dimension, {});
}

SparseOperator SparseOperator::from_dense(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) {
    fail(ErrorKind::Domain, "from_dense requires a square matrix");
  }
  const auto n = static_cast<std::size_t>(m.rows());
  std::vector<Entry> entries;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (m(r, c) != Complex{}) {
        entries.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c), m(r, c)});
      }
    }
  }
  return SparseOperator(n, std::move(entries));
}

std::span<const Entry> SparseOperator::row(std::size_t r) const {
  if (r >= dimension_) {
    fail(ErrorKind::Domain, "row index out of range");
  }
  return std::span<const Entry>(entries_.data() + row_start_[r], row_start_[r + 1] - row_start_[r]);
}

Complex SparseOperator::at(std::size_t r, std::size_t c) const {
  const auto entries = row(r);
  const auto it = std::lower_bound(entries.begin(), entries.end(), c,
                                   [](const Entry& e, std::size_t col) { return e.col < col; });
  return (it != entries.end() && it->col == c) ? it->value : Complex{};
}

SparseOperator SparseOperator::adjoint() const {
  std::vector<Entry> entries;
  entries.reserve(entries_.size());
  for (const auto& e : entries_) {
    entries.push_back({e.col, e.row, std::conj(e.value)});
  }
  return SparseOperator(dimension_, std::move(entries));
}

Eigen::MatrixXcd SparseOperator::to_dense() const {
  const auto n = static_cast<Eigen::Index>(dimension_);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& e : entries_) {
    m(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) = e.value;
  }
  return m;
}

bool SparseOperator::is_hermitian(double tol) const {
  for (const auto& e : entries_) {
    if (std::abs(e.value - std::conj(at(e.col, e.row))) > tol) {
      return false;
    }
  }
  return true;
}

void SparseOperator::apply_into(const StateVector& in, StateVector& out) const {
  if (static_cast<std::size_t>(in.size()) != dimension_) {
    fail(ErrorKind::Domain, "operator/state dimension mismatch: " + std::to_string(dimension_) +
                                " vs " + std::to_string(in.size()));
  }
  out.resize(in.size());
  const Entry* e = entries_.data();
  for (std::size_t r = 0; r < dimension_; ++r) {
    Complex acc{};
    const Entry* end = entries_.data() + row_start_[r + 1];
    for (; e != end; ++e) {
      acc += e->value * in[static_cast<Eigen::Index>(e->col)];
    }
    out[static_cast<Eigen::Index>(r)] = acc;
  }
}

namespace {

void require_same_dimension(const SparseOperator& a, const SparseOperator& b) {
  if (a.dimension() != b.dimension()) {
    fail(ErrorKind::Domain, "operator dimension mismatch");
  }
}

}  // namespace

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
  require_same_dimension(a, b);
  std::vector<Entry> entries(a.entries_.begin(), a.entries_.end());
  entries.insert(entries.end(), b.entries_.begin(), b.entries_.end());
  return SparseOperator(a.dimension_, std::move(entries));
}

SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) {
  return a + Complex{-1.0, 0.0} * b;
}

SparseOperator operator*(Complex s, const SparseOperator& a) {
  std::vector<Entry> entries(a.entries_.begin(), a.entries_.end());
  for (auto& e : entries) {
    e.value *= s;
  }
  return SparseOperator(a.dimension_, std::move(entries));
}

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
  require_same_dimension(a, b);
  std::vector<Entry> entries;
  std::map<std::size_t, Complex> row_acc;
  for (std::size_t r = 0; r < a.dimension_; ++r) {
    row_acc.clear();
    for (const auto& ea : a.row(r)) {
      for (const auto& eb : b.row(ea.col)) {
        row_acc[eb.col] += ea.value * eb.value;
      }
    }
    for (const auto& [c, v] : row_acc) {
      entries.push_back({r, c, v});
    }
  }
  return SparseOperator(a.dimension_, std::move(entries));
}

StateVector apply(const SparseOperator& op, const StateVector& s) {
  StateVector out;
  op.apply_into(s, out);
  return out;
}

DensityMatrix left_multiply(const SparseOperator& op, const DensityMatrix& m) {
  if (static_cast<std::size_t>(m.rows()) != op.dimension()) {
    fail(ErrorKind::Domain, "operator/matrix dimension mismatch");
  }
  DensityMatrix out = DensityMatrix::Zero(m.rows(), m.cols());
  for (const auto& e : op.entries()) {
    out.row(static_cast<Eigen::Index>(e.row)) += e.value * m.row(static_cast<Eigen::Index>(e.col));
  }
  return out;
}

StateVector basis_vector(const Basis& basis, const BasisState& b) {
  StateVector s = StateVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
  s[static_cast<Eigen::Index>(basis.encode(b))] = 1.0;
  return s;
}

DensityMatrix reduce_to_ions(const Basis& basis, const StateVector& s) {
  if (static_cast<std::size_t>(s.size()) != basis.dimension()) {
    fail(ErrorKind::Domain, "state dimension does not match basis");
  }
  const double norm2 = s.squaredNorm();
  if (std::abs(norm2 - 1.0) > kNormTolerance) {
    fail(ErrorKind::Domain, "reduce_to_ions needs a normalized state (norm² = " +
                                std::to_string(norm2) + ")");
  }
  const auto ions = static_cast<Eigen::Index>(basis.ion_dimension());
  const auto photons = static_cast<Eigen::Index>(basis.photon_dimension());
  // Row-major reshape: row = ion index, column = photon index.
  Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> psi(
      s.data(), ions, photons);
  return psi * psi.adjoint();
}

double fidelity(const DensityMatrix& rho, const StateVector& target) {
  if (rho.rows() != rho.cols() || rho.rows() != target.size()) {
    fail(ErrorKind::Domain, "fidelity: dimension mismatch");
  }
  if (std::abs(target.squaredNorm() - 1.0) > kNormTolerance) {
    fail(ErrorKind::Domain, "fidelity: target state is not normalized");
  }
  return target.dot(rho * target).real();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorKind::Domain, "trace_distance: dimension mismatch");
  }
  const DensityMatrix diff = a - b;
  const DensityMatrix herm = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<DensityMatrix> solver(herm, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double min_eigenvalue(const DensityMatrix& rho) {
  const DensityMatrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<DensityMatrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double hermiticity_defect(const DensityMatrix& rho) {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

void write_state(std::ostream& out, const StateVector& s, double threshold) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (std::abs(s[i]) > threshold) {
      out << i << ' ' << s[i].real() << ' ' << s[i].imag() << '\n';
    }
  }
  out.flags(flags);
  out.precision(precision);
}

StateVector read_state(std::istream& in, std::size_t dimension) {
  StateVector s = StateVector::Zero(static_cast<Eigen::Index>(dimension));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    std::istringstream fields(line);
    std::size_t index = 0;
    double re = 0.0;
    double im = 0.0;
    if (!(fields >> index >> re >> im) || index >= dimension) {
      fail(ErrorKind::Domain, "malformed state dump at line " + std::to_string(line_no));
    }
    s[static_cast<Eigen::Index>(index)] = Complex{re, im};
  }
  return s;
}

}  // namespace cavsim
