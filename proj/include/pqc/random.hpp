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

#ifndef PQC_RANDOM_HPP
#define PQC_RANDOM_HPP

#include <cstdint>
#include <cstring>
#include <random>
#include <stdexcept>

#include "pqc/densmat.hpp"

namespace pqc {

/// Derives an independent child seed from (seed, stream). Randomness enters
/// the library only through explicit seeds; parallel work items get their
/// own derived stream so results do not depend on scheduling.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined words
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 0x632BE59BD9B4E019ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return derive_seed(derive_seed(seed, a), b);
}

/// Seed stream tied to a double-valued coordinate (e.g. a grid point), so
/// that refined grids reuse identical seeds at shared coordinates.
inline std::uint64_t seed_for_coordinate(std::uint64_t seed, double x) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(x));
  std::memcpy(&bits, &x, sizeof(bits));
  return derive_seed(seed, bits);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double normal() { return normal_(gen_); }
  double uniform() { return uniform_(gen_); }
  std::uint64_t raw() { return gen_(); }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Haar-random pure state: normalized complex Gaussian vector.
inline PureState haar_random_pure_state(Index dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("haar_random_pure_state: dim must be >= 1");
  Rng rng(seed);
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) {
    const double re = rng.normal();
    const double im = rng.normal();
    v(i) = Complex(re, im);
  }
  return normalized_state(std::move(v));
}

/// Haar-random unitary via QR of a complex Gaussian matrix with the phase
/// correction Q -> Q diag(r_ii/|r_ii|).
inline Matrix haar_random_unitary(Index dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("haar_random_unitary: dim must be >= 1");
  Rng rng(seed);
  Matrix g(dim, dim);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(i, j) = Complex(re, im);
    }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < dim; ++i) {
    const Complex rii = r(i, i);
    const double mag = std::abs(rii);
    q.col(i) *= (mag > 0.0) ? rii / mag : Complex(1.0);
  }
  return q;
}

}  // namespace pqc

#endif  // PQC_RANDOM_HPP
