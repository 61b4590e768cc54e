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

#ifndef PQC_CHANNELS_HPP
#define PQC_CHANNELS_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pqc/densmat.hpp"
#include "pqc/random.hpp"

namespace pqc {

/// Operators with Tr(K^dag K) below this are treated as numerically null
/// and dropped after canonicalization.
inline constexpr double kKrausPruneTol = 1e-12;

// CPTP map as an ordered Kraus set: rho -> sum_a K_a rho K_a^dag.
struct KrausChannel {
  Index in_dim = 0;
  Index out_dim = 0;
  std::vector<Matrix> operators;

  Index dim() const { return in_dim; }
  std::size_t size() const { return operators.size(); }
};

inline KrausChannel make_kraus(std::vector<Matrix> ops) {
  if (ops.empty()) throw std::invalid_argument("make_kraus: need at least one operator");
  const Index out = ops.front().rows();
  const Index in = ops.front().cols();
  for (const Matrix& k : ops)
    if (k.rows() != out || k.cols() != in)
      throw std::invalid_argument("make_kraus: inconsistent operator shapes");
  return KrausChannel{in, out, std::move(ops)};
}

inline KrausChannel unitary_channel(const Matrix& u) { return make_kraus({u}); }

inline KrausChannel identity_channel(Index dim) {
  return unitary_channel(Matrix::Identity(dim, dim));
}

inline DensityMatrix apply_kraus(const KrausChannel& ch, const DensityMatrix& rho) {
  if (rho.dim() != ch.in_dim)
    throw std::invalid_argument("apply_kraus: state dimension does not match channel");
  Matrix out = Matrix::Zero(ch.out_dim, ch.out_dim);
  for (const Matrix& k : ch.operators) out.noalias() += k * rho.matrix * k.adjoint();
  return DensityMatrix{std::move(out)};
}

// Choi operator J = sum_ij |i><j| (x) E(|i><j|); input index is the first
// tensor factor. PSD iff the map is CP; Tr J = d for trace preservation.
struct ChoiMatrix {
  Index dim = 0;  // system dimension d; matrix is d^2 x d^2
  Matrix matrix;
};

namespace detail {

// Column-stacking consistent with the Choi convention above:
// w[(i,k)] = K[k,i] with i the input (first-factor) index.
inline Vector choi_vec(const Matrix& k) {
  const Index d_out = k.rows(), d_in = k.cols();
  Vector w(d_in * d_out);
  for (Index i = 0; i < d_in; ++i)
    for (Index o = 0; o < d_out; ++o) w(i * d_out + o) = k(o, i);
  return w;
}

inline Matrix choi_unvec(const Vector& w, Index d_in, Index d_out) {
  Matrix k(d_out, d_in);
  for (Index i = 0; i < d_in; ++i)
    for (Index o = 0; o < d_out; ++o) k(o, i) = w(i * d_out + o);
  return k;
}

// Deterministic per-vector phase: largest-magnitude entry made real positive.
inline void fix_phase(Vector& v) {
  Index imax = 0;
  double best = -1.0;
  for (Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best) {
      best = a;
      imax = i;
    }
  }
  if (best > 0.0) v *= std::conj(v(imax)) / best;
}

}  // namespace detail

inline ChoiMatrix choi_from_kraus(const KrausChannel& ch) {
  if (ch.in_dim != ch.out_dim)
    throw std::invalid_argument("choi_from_kraus: channel must be square");
  const Index d = ch.in_dim;
  Matrix j = Matrix::Zero(d * d, d * d);
  for (const Matrix& k : ch.operators) {
    const Vector w = detail::choi_vec(k);
    j.noalias() += w * w.adjoint();
  }
  return ChoiMatrix{d, std::move(j)};
}

/// Kraus set from the Choi eigendecomposition, eigenvalues non-increasing.
/// The result satisfies the canonical orthogonality relation
/// Tr(K_a^dag K_b) = lambda_a delta_ab. Throws if the Choi operator has an
/// eigenvalue below -tol (map not completely positive).
inline KrausChannel kraus_from_choi(const ChoiMatrix& j, double tol = kKrausPruneTol) {
  const Index d = j.dim;
  if (j.matrix.rows() != d * d || j.matrix.cols() != d * d)
    throw std::invalid_argument("kraus_from_choi: matrix size does not match dim");
  const Spectrum spec = hermitian_spectrum(j.matrix, 1e-8);
  if (spec.eigenvalues.minCoeff() < -tol)
    throw std::domain_error("kraus_from_choi: Choi matrix is not positive semidefinite (min eig " +
                            std::to_string(spec.eigenvalues.minCoeff()) + ")");
  std::vector<Matrix> ops;
  for (Index a = 0; a < spec.eigenvalues.size(); ++a) {
    const double lam = spec.eigenvalues(a);
    if (lam < tol) break;  // sorted non-increasing
    Vector w = spec.eigenvectors.col(a);
    detail::fix_phase(w);
    ops.push_back(std::sqrt(lam) * detail::choi_unvec(w, d, d));
  }
  if (ops.empty()) ops.push_back(Matrix::Zero(d, d));
  return KrausChannel{d, d, std::move(ops)};
}

/// Canonical representative of the Kraus equivalence class: orthogonal
/// operators with non-increasing weights, at most d^2 of them, same action.
inline KrausChannel canonicalize(const KrausChannel& ch) {
  return kraus_from_choi(choi_from_kraus(ch));
}

struct CptpValidation {
  double tp_residual = 0.0;         // max-abs entry of sum K^dag K - I
  double choi_min_eigenvalue = 0.0;  // >= -tol for complete positivity
  double tol = 0.0;
  bool passed = false;
};

inline CptpValidation validate_cptp(const KrausChannel& ch, double tol = 1e-10) {
  CptpValidation report;
  report.tol = tol;
  Matrix acc = Matrix::Zero(ch.in_dim, ch.in_dim);
  for (const Matrix& k : ch.operators) acc.noalias() += k.adjoint() * k;
  report.tp_residual = (acc - Matrix::Identity(ch.in_dim, ch.in_dim)).cwiseAbs().maxCoeff();
  const ChoiMatrix j = choi_from_kraus(ch);
  const Matrix sym = 0.5 * (j.matrix + j.matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  report.choi_min_eigenvalue = solver.eigenvalues().minCoeff();
  report.passed = report.tp_residual <= tol && report.choi_min_eigenvalue >= -tol;
  return report;
}

// Channel as a unitary on ancilla (x) system with the ancilla prepared in a
// basis state and traced out after the dilation.
struct StinespringChannel {
  int system_qubits = 0;
  int ancilla_qubits = 0;
  Matrix dilation;          // unitary on 2^(ancilla+system)
  Index ancilla_init = 0;   // |nu_0> basis index

  Index system_dim() const { return Index(1) << system_qubits; }
  Index ancilla_dim() const { return Index(1) << ancilla_qubits; }
};

inline void check_stinespring(const StinespringChannel& st, double tol = 1e-10) {
  const Index n = st.ancilla_dim() * st.system_dim();
  if (st.dilation.rows() != n || st.dilation.cols() != n)
    throw std::invalid_argument("stinespring: dilation size does not match qubit counts");
  if (st.ancilla_init < 0 || st.ancilla_init >= st.ancilla_dim())
    throw std::invalid_argument("stinespring: ancilla_init out of range");
  const double residual =
      (st.dilation.adjoint() * st.dilation - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (residual > tol)
    throw std::invalid_argument("stinespring: dilation not unitary (residual " +
                                std::to_string(residual) + ")");
}

/// K_a = (<a| (x) I) U (|nu_0> (x) I); null operators are pruned.
inline KrausChannel stinespring_to_kraus(const StinespringChannel& st) {
  check_stinespring(st);
  const Index ds = st.system_dim(), da = st.ancilla_dim();
  std::vector<Matrix> ops;
  for (Index a = 0; a < da; ++a) {
    Matrix k(ds, ds);
    for (Index r = 0; r < ds; ++r)
      for (Index c = 0; c < ds; ++c) k(r, c) = st.dilation(a * ds + r, st.ancilla_init * ds + c);
    if (k.squaredNorm() >= kKrausPruneTol) ops.push_back(std::move(k));
  }
  if (ops.empty()) ops.push_back(Matrix::Zero(ds, ds));
  return KrausChannel{ds, ds, std::move(ops)};
}

/// Dilation with q_a = ceil(log2 #operators): the ancilla-|0> input block
/// stacks the Kraus operators, the remaining columns are completed to a
/// unitary by Gram-Schmidt over the standard basis in order.
inline StinespringChannel kraus_to_stinespring(const KrausChannel& ch, double tol = 1e-10) {
  if (ch.in_dim != ch.out_dim)
    throw std::invalid_argument("kraus_to_stinespring: channel must be square");
  const Index d = ch.in_dim;
  const int qs = static_cast<int>(std::lround(std::log2(static_cast<double>(d))));
  if ((Index(1) << qs) != d)
    throw std::invalid_argument("kraus_to_stinespring: dimension must be a power of 2");
  const CptpValidation v = validate_cptp(ch, tol);
  if (!v.passed)
    throw std::domain_error("kraus_to_stinespring: channel is not CPTP (tp residual " +
                            std::to_string(v.tp_residual) + ", choi min eig " +
                            std::to_string(v.choi_min_eigenvalue) + ")");

  int qa = 0;
  while ((std::size_t(1) << qa) < ch.operators.size()) ++qa;
  const Index da = Index(1) << qa;
  const Index n = da * d;

  Matrix u = Matrix::Zero(n, n);
  for (Index c = 0; c < d; ++c)  // ancilla-|0> block: U(|0> (x) |c>) = sum_a |a> (x) K_a|c>
    for (std::size_t a = 0; a < ch.operators.size(); ++a)
      for (Index r = 0; r < d; ++r) u(Index(a) * d + r, c) = ch.operators[a](r, c);

  // complete remaining columns from the standard basis, deterministic order
  Index next = d;
  for (Index cand = 0; cand < n && next < n; ++cand) {
    Vector v2 = Vector::Zero(n);
    v2(cand) = 1.0;
    for (Index c = 0; c < next; ++c) v2 -= u.col(c).dot(v2) * u.col(c);
    const double nrm = v2.norm();
    if (nrm > 1e-8) u.col(next++) = v2 / nrm;
  }
  if (next != n) throw std::runtime_error("kraus_to_stinespring: unitary completion failed");
  return StinespringChannel{qs, qa, std::move(u), 0};
}

/// rho' = Tr_ancilla[ U ((|nu_0><nu_0|) (x) rho) U^dag ].
inline DensityMatrix apply_stinespring(const StinespringChannel& st, const DensityMatrix& rho) {
  if (rho.dim() != st.system_dim())
    throw std::invalid_argument("apply_stinespring: state dimension does not match channel");
  const Index da = st.ancilla_dim();
  Matrix anc = Matrix::Zero(da, da);
  anc(st.ancilla_init, st.ancilla_init) = 1.0;
  const Matrix joint = st.dilation * kron(anc, rho.matrix) * st.dilation.adjoint();
  return partial_trace(DensityMatrix{joint}, DimLayout{{da, st.system_dim()}}, {1});
}

// Convex mixture of channels; realizes mixed-unitary channels when all
// members are unitary conjugations.
struct ChannelEnsemble {
  std::vector<std::pair<double, KrausChannel>> members;
};

inline void check_ensemble(const ChannelEnsemble& en, double tol = 1e-12) {
  if (en.members.empty()) throw std::invalid_argument("ensemble: no members");
  double sum = 0.0;
  const Index d = en.members.front().second.in_dim;
  for (const auto& [w, ch] : en.members) {
    if (w < 0.0) throw std::invalid_argument("ensemble: negative weight");
    if (ch.in_dim != d || ch.out_dim != d)
      throw std::invalid_argument("ensemble: member dimensions disagree");
    sum += w;
  }
  if (std::abs(sum - 1.0) > tol)
    throw std::invalid_argument("ensemble: weights sum to " + std::to_string(sum));
}

inline DensityMatrix apply_ensemble_exact(const ChannelEnsemble& en, const DensityMatrix& rho) {
  check_ensemble(en);
  Matrix out = Matrix::Zero(rho.dim(), rho.dim());
  for (const auto& [w, ch] : en.members) out.noalias() += w * apply_kraus(ch, rho).matrix;
  return DensityMatrix{std::move(out)};
}

/// Finite-sample approximation (1/M) sum_i E_{s_i}(rho) with member indices
/// s_i drawn i.i.d. by weight. Deterministic for a given seed.
inline DensityMatrix apply_ensemble_sampled(const ChannelEnsemble& en, const DensityMatrix& rho,
                                            std::size_t m, std::uint64_t seed) {
  check_ensemble(en);
  if (m == 0) throw std::invalid_argument("apply_ensemble_sampled: sample count must be >= 1");
  std::vector<double> weights;
  weights.reserve(en.members.size());
  for (const auto& [w, ch] : en.members) weights.push_back(w);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  Rng rng(seed);
  std::vector<std::size_t> counts(en.members.size(), 0);
  for (std::size_t i = 0; i < m; ++i) ++counts[pick(rng.engine())];
  Matrix out = Matrix::Zero(rho.dim(), rho.dim());
  for (std::size_t i = 0; i < en.members.size(); ++i) {
    if (counts[i] == 0) continue;
    const double frac = static_cast<double>(counts[i]) / static_cast<double>(m);
    out.noalias() += frac * apply_kraus(en.members[i].second, rho).matrix;
  }
  return DensityMatrix{std::move(out)};
}

/// Exact single-channel form of a mixture: operators sqrt(w_i) K^(i)_a.
inline KrausChannel ensemble_to_kraus(const ChannelEnsemble& en) {
  check_ensemble(en);
  const Index d = en.members.front().second.in_dim;
  std::vector<Matrix> ops;
  for (const auto& [w, ch] : en.members) {
    if (w < kKrausPruneTol) continue;
    const double s = std::sqrt(w);
    for (const Matrix& k : ch.operators) ops.push_back(s * k);
  }
  if (ops.empty()) ops.push_back(Matrix::Zero(d, d));
  return canonicalize(KrausChannel{d, d, std::move(ops)});
}

/// Composition `second after first`, canonicalized to at most d^2 operators.
inline KrausChannel compose(const KrausChannel& first, const KrausChannel& second) {
  if (second.in_dim != first.out_dim)
    throw std::invalid_argument("compose: dimensions do not chain");
  std::vector<Matrix> ops;
  ops.reserve(first.size() * second.size());
  for (const Matrix& k2 : second.operators)
    for (const Matrix& k1 : first.operators) ops.push_back(k2 * k1);
  return canonicalize(KrausChannel{first.in_dim, second.out_dim, std::move(ops)});
}

/// Trivial extension I_ext (x) E with the extension factor prepended.
inline KrausChannel extend(const KrausChannel& ch, Index ext_dim) {
  if (ext_dim < 1) throw std::invalid_argument("extend: ext_dim must be >= 1");
  if (ext_dim == 1) return ch;
  const Matrix eye = Matrix::Identity(ext_dim, ext_dim);
  std::vector<Matrix> ops;
  ops.reserve(ch.size());
  for (const Matrix& k : ch.operators) ops.push_back(kron(eye, k));
  return KrausChannel{ext_dim * ch.in_dim, ext_dim * ch.out_dim, std::move(ops)};
}

/// CPTP channel drawn from a Haar-random Stinespring dilation with
/// 2^ancilla_qubits Kraus operators. Useful for randomized property checks.
inline KrausChannel random_cptp_channel(int system_qubits, int ancilla_qubits,
                                        std::uint64_t seed) {
  const Index n = Index(1) << (system_qubits + ancilla_qubits);
  StinespringChannel st{system_qubits, ancilla_qubits, haar_random_unitary(n, seed), 0};
  return stinespring_to_kraus(st);
}

}  // namespace pqc

#endif  // PQC_CHANNELS_HPP
