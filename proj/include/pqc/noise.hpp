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

#ifndef PQC_NOISE_HPP
#define PQC_NOISE_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pqc/channels.hpp"
#include "pqc/densmat.hpp"

namespace pqc {
namespace gates {

inline Matrix identity2() { return Matrix::Identity(2, 2); }

inline Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline Matrix pauli_y() {
  Matrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

inline Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline Matrix hadamard() {
  Matrix m(2, 2);
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}

inline Matrix rz(double theta) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = std::exp(Complex(0, -theta / 2));
  m(1, 1) = std::exp(Complex(0, theta / 2));
  return m;
}

/// CNOT with qubit 0 (leftmost factor) as control and qubit 1 as target.
inline Matrix cnot01() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return m;
}

/// CNOT with qubit 1 as control and qubit 0 as target.
inline Matrix cnot10() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(1, 3) = m(2, 2) = m(3, 1) = 1.0;
  return m;
}

}  // namespace gates

/// {sqrt(1-p) I, sqrt(p/3) X, sqrt(p/3) Y, sqrt(p/3) Z}.
inline KrausChannel depolarizing_kraus(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("depolarizing_kraus: p must lie in [0,1]");
  std::vector<Matrix> ops;
  ops.push_back(std::sqrt(1.0 - p) * gates::identity2());
  const double s = std::sqrt(p / 3.0);
  ops.push_back(s * gates::pauli_x());
  ops.push_back(s * gates::pauli_y());
  ops.push_back(s * gates::pauli_z());
  return KrausChannel{2, 2, std::move(ops)};
}

/// {[[1,0],[0,sqrt(1-g)]], [[0,sqrt(g)],[0,0]]}.
inline KrausChannel amplitude_damping_kraus(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::invalid_argument("amplitude_damping_kraus: gamma must lie in [0,1]");
  Matrix k0 = Matrix::Identity(2, 2);
  k0(1, 1) = std::sqrt(1.0 - gamma);
  Matrix k1 = Matrix::Zero(2, 2);
  k1(0, 1) = std::sqrt(gamma);
  return KrausChannel{2, 2, {std::move(k0), std::move(k1)}};
}

enum class NoiseOrder { kDepolarizingFirst, kAmplitudeDampingFirst };

struct QubitNoise {
  double depolarizing_p = 0.0;
  double amplitude_damping_gamma = 0.0;
};

struct NoiseSpec {
  std::vector<QubitNoise> qubits;
  NoiseOrder order = NoiseOrder::kDepolarizingFirst;

  static NoiseSpec table1() {
    return NoiseSpec{{{0.01, 0.05}, {0.03, 0.3}}, NoiseOrder::kDepolarizingFirst};
  }

  static NoiseSpec noiseless(std::size_t n_qubits = 2) {
    return NoiseSpec{std::vector<QubitNoise>(n_qubits), NoiseOrder::kDepolarizingFirst};
  }

  void check() const {
    if (qubits.empty()) throw std::invalid_argument("NoiseSpec: empty qubit list");
    for (const QubitNoise& q : qubits) {
      if (!(q.depolarizing_p >= 0.0 && q.depolarizing_p <= 1.0))
        throw std::invalid_argument("NoiseSpec: depolarizing parameter out of [0,1]");
      if (!(q.amplitude_damping_gamma >= 0.0 && q.amplitude_damping_gamma <= 1.0))
        throw std::invalid_argument("NoiseSpec: amplitude damping parameter out of [0,1]");
    }
  }
};

/// Per-qubit depolarizing-then-amplitude-damping (order per spec.order),
/// tensored across all qubits with qubit 0 leftmost, canonicalized.
inline KrausChannel noise_layer(const NoiseSpec& spec) {
  spec.check();
  std::vector<Matrix> ops = {Matrix::Identity(1, 1)};
  for (const QubitNoise& q : spec.qubits) {
    const KrausChannel dep = depolarizing_kraus(q.depolarizing_p);
    const KrausChannel ad = amplitude_damping_kraus(q.amplitude_damping_gamma);
    const KrausChannel& first = (spec.order == NoiseOrder::kDepolarizingFirst) ? dep : ad;
    const KrausChannel& second = (spec.order == NoiseOrder::kDepolarizingFirst) ? ad : dep;
    // per-qubit composition, tensored onto the accumulated operators
    std::vector<Matrix> next;
    next.reserve(ops.size() * first.size() * second.size());
    for (const Matrix& acc : ops)
      for (const Matrix& k2 : second.operators)
        for (const Matrix& k1 : first.operators) next.push_back(kron(acc, k2 * k1));
    ops = std::move(next);
  }
  const Index d = Index(1) << spec.qubits.size();
  return canonicalize(KrausChannel{d, d, std::move(ops)});
}

enum class GateVariant { kDirect, kHadamardConjugated };

/// Noisy realization of a CNOT between qubits 0 and 1: single-qubit noise
/// layers immediately before and after the entangling gate. For the
/// Hadamard-conjugated variant the entangling gate is the reversed CNOT and
/// the conjugating Hadamards are noiseless and sit outside the noise layers.
inline KrausChannel build_cnot_variant(GateVariant variant, const NoiseSpec& spec) {
  if (spec.qubits.size() != 2)
    throw std::invalid_argument("build_cnot_variant: noise spec must cover exactly 2 qubits");
  const KrausChannel layer = noise_layer(spec);
  switch (variant) {
    case GateVariant::kDirect: {
      const KrausChannel gate = unitary_channel(gates::cnot01());
      return compose(compose(layer, gate), layer);
    }
    case GateVariant::kHadamardConjugated: {
      const KrausChannel hh = unitary_channel(kron(gates::hadamard(), gates::hadamard()));
      const KrausChannel gate = unitary_channel(gates::cnot10());
      return compose(compose(compose(compose(hh, layer), gate), layer), hh);
    }
  }
  throw std::invalid_argument("build_cnot_variant: unknown variant");
}

/// Convex mixture w1 * Direct + (1 - w1) * HadamardConjugated.
inline ChannelEnsemble mixed_cnot_channel(double w1, const NoiseSpec& spec) {
  if (!(w1 >= 0.0 && w1 <= 1.0))
    throw std::invalid_argument("mixed_cnot_channel: w1 must lie in [0,1]");
  ChannelEnsemble en;
  en.members.emplace_back(w1, build_cnot_variant(GateVariant::kDirect, spec));
  en.members.emplace_back(1.0 - w1, build_cnot_variant(GateVariant::kHadamardConjugated, spec));
  return en;
}

inline KrausChannel ideal_cnot_channel() { return unitary_channel(gates::cnot01()); }

}  // namespace pqc

#endif  // PQC_NOISE_HPP
