// Copyright 2026 The pqc authors
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

#ifndef PQC_DENSMAT_HPP
#define PQC_DENSMAT_HPP

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace pqc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Basis-ordering convention used throughout: qubit 0 is the *leftmost*
/// tensor factor, so the basis index of |q0 q1 ... q_{n-1}> is
/// q0*2^{n-1} + q1*2^{n-2} + ... + q_{n-1}. Auxiliary/extension factors are
/// always prepended, i.e. extended spaces factor as (extension) x (system).

inline Matrix dagger(const Matrix& m) { return m.adjoint(); }

/// Kronecker product; dimensions multiply.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  return Eigen::kroneckerProduct(a, b);
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

// Subsystem factorization of a total space, leftmost factor first.
struct DimLayout {
  std::vector<Index> factors;

  Index total() const {
    Index t = 1;
    for (Index f : factors) t *= f;
    return t;
  }

  static DimLayout qubits(int n) {
    return DimLayout{std::vector<Index>(static_cast<std::size_t>(n), 2)};
  }

  void check() const {
    for (Index f : factors)
      if (f < 1) throw std::invalid_argument("DimLayout: factor dims must be >= 1");
  }
};

struct PureState {
  Vector amplitudes;
  Index dim() const { return amplitudes.size(); }
};

/// Normalizes a vector into a PureState. Throws on (near-)zero input.
inline PureState normalized_state(Vector v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw std::invalid_argument("normalized_state: vector has no finite positive norm");
  v /= n;
  return PureState{std::move(v)};
}

inline PureState basis_state(Index dim, Index k) {
  if (k < 0 || k >= dim) throw std::invalid_argument("basis_state: index out of range");
  Vector v = Vector::Zero(dim);
  v(k) = 1.0;
  return PureState{std::move(v)};
}

struct DensityMatrix {
  Matrix matrix;
  Index dim() const { return matrix.rows(); }
};

inline DensityMatrix pure_density(const PureState& psi) {
  return DensityMatrix{psi.amplitudes * psi.amplitudes.adjoint()};
}

inline DensityMatrix maximally_mixed(Index dim) {
  return DensityMatrix{Matrix::Identity(dim, dim) / static_cast<double>(dim)};
}

struct Spectrum {
  Eigen::VectorXd eigenvalues;  // sorted non-increasing
  Matrix eigenvectors;          // columns match eigenvalues
};

/// Eigendecomposition of a Hermitian matrix, eigenvalues non-increasing.
/// Rejects inputs whose anti-Hermitian part exceeds `tol` (max-abs entry).
inline Spectrum hermitian_spectrum(const Matrix& h, double tol = 1e-9) {
  if (h.rows() != h.cols())
    throw std::invalid_argument("hermitian_spectrum: matrix must be square");
  const double herm_residual = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (herm_residual > tol)
    throw std::invalid_argument("hermitian_spectrum: input not Hermitian (residual " +
                                std::to_string(herm_residual) + ")");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("hermitian_spectrum: eigensolver failed");
  const Index n = h.rows();
  Spectrum s;
  s.eigenvalues.resize(n);
  s.eigenvectors.resize(n, n);
  for (Index i = 0; i < n; ++i) {  // ascending -> non-increasing
    s.eigenvalues(i) = solver.eigenvalues()(n - 1 - i);
    s.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return s;
}

/// Reduced state on the kept factors (original factor order preserved).
inline DensityMatrix partial_trace(const DensityMatrix& rho, const DimLayout& layout,
                                   const std::vector<std::size_t>& keep) {
  layout.check();
  if (layout.total() != rho.dim())
    throw std::invalid_argument("partial_trace: layout does not match state dimension");
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set must be non-empty");

  const std::size_t nf = layout.factors.size();
  std::vector<bool> kept(nf, false);
  for (std::size_t k : keep) {
    if (k >= nf) throw std::invalid_argument("partial_trace: keep index out of range");
    kept[k] = true;
  }

  // strides of each factor in the flattened index
  std::vector<Index> stride(nf, 1);
  for (std::size_t f = nf; f-- > 1;) stride[f - 1] = stride[f] * layout.factors[f];

  std::vector<std::size_t> keep_idx, trace_idx;
  for (std::size_t f = 0; f < nf; ++f) (kept[f] ? keep_idx : trace_idx).push_back(f);

  Index out_dim = 1;
  for (std::size_t f : keep_idx) out_dim *= layout.factors[f];
  Index tr_dim = 1;
  for (std::size_t f : trace_idx) tr_dim *= layout.factors[f];

  // flattened index of a multi-index over the given factor subset
  auto expand = [&](Index packed, const std::vector<std::size_t>& subset) {
    Index full = 0;
    for (std::size_t j = subset.size(); j-- > 0;) {
      const std::size_t f = subset[j];
      full += (packed % layout.factors[f]) * stride[f];
      packed /= layout.factors[f];
    }
    return full;
  };

  Matrix out = Matrix::Zero(out_dim, out_dim);
  for (Index r = 0; r < out_dim; ++r) {
    const Index rbase = expand(r, keep_idx);
    for (Index c = 0; c < out_dim; ++c) {
      const Index cbase = expand(c, keep_idx);
      Complex sum = 0.0;
      for (Index t = 0; t < tr_dim; ++t) {
        const Index toff = expand(t, trace_idx);
        sum += rho.matrix(rbase + toff, cbase + toff);
      }
      out(r, c) = sum;
    }
  }
  return DensityMatrix{std::move(out)};
}

struct DensityValidation {
  double hermiticity_residual = 0.0;
  double min_eigenvalue = 0.0;
  double trace_deviation = 0.0;
  double tol = 0.0;
  bool passed = false;
};

/// Checks Hermiticity, positivity and unit trace of a density matrix.
inline DensityValidation validate_density_matrix(const DensityMatrix& rho, double tol = 1e-9) {
  DensityValidation report;
  report.tol = tol;
  if (rho.matrix.rows() != rho.matrix.cols() || rho.dim() == 0) {
    report.hermiticity_residual = std::numeric_limits<double>::infinity();
    return report;
  }
  report.hermiticity_residual = (rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff();
  report.trace_deviation = std::abs(rho.matrix.trace() - Complex(1.0));
  const Matrix sym = 0.5 * (rho.matrix + rho.matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  report.min_eigenvalue = solver.eigenvalues().minCoeff();
  report.passed = report.hermiticity_residual <= tol && report.trace_deviation <= tol &&
                  report.min_eigenvalue >= -tol;
  return report;
}

}  // namespace pqc

#endif  // PQC_DENSMAT_HPP
