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

#ifndef PQC_METRICS_HPP
#define PQC_METRICS_HPP

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "pqc/channels.hpp"
#include "pqc/densmat.hpp"
#include "pqc/parallel.hpp"
#include "pqc/random.hpp"

namespace pqc {

/// Dimension m of the auxiliary extension space, 1 <= m <= d. m = 1 means
/// no extension (reported externally as n = 0 alongside m).
struct ExtensionIndex {
  Index m = 1;
};

/// External (paper-facing) label of an extension index: 0 for "none".
inline Index paper_extension_label(ExtensionIndex ext) { return ext.m == 1 ? 0 : ext.m; }

/// d_Tr(rho1, rho2) = 1/2 sum |eigenvalues(rho1 - rho2)|.
inline double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  if (rho1.dim() != rho2.dim())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  const Matrix diff = rho1.matrix - rho2.matrix;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (diff + diff.adjoint()),
                                               Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

namespace detail {

struct CostWorkspace {
  Matrix diff;
  Vector image;
  Eigen::SelfAdjointEigenSolver<Matrix> solver;
};

// Trace distance between the outputs of two channels, both trivially
// extended to m * d, evaluated on pure inputs. Shared by the ascent, the
// Haar mean and the brute-force oracle; reusing a workspace keeps the inner
// loop allocation-free.
class PairCost {
 public:
  PairCost(const KrausChannel& target, const KrausChannel& candidate, ExtensionIndex ext)
      : dim_(ext.m * target.in_dim) {
    if (target.in_dim != candidate.in_dim || target.out_dim != candidate.out_dim)
      throw std::invalid_argument("PairCost: channel dimensions disagree");
    if (ext.m < 1) throw std::invalid_argument("PairCost: extension dim must be >= 1");
    const KrausChannel a = extend(target, ext.m);
    const KrausChannel b = extend(candidate, ext.m);
    a_ops_ = a.operators;
    b_ops_ = b.operators;
  }

  Index dim() const { return dim_; }

  CostWorkspace make_workspace() const {
    return CostWorkspace{Matrix(dim_, dim_), Vector(dim_),
                         Eigen::SelfAdjointEigenSolver<Matrix>(dim_)};
  }

  // eta must be normalized
  double operator()(const Vector& eta, CostWorkspace& ws) const {
    ws.diff.setZero();
    auto lower = ws.diff.selfadjointView<Eigen::Lower>();
    for (const Matrix& k : a_ops_) {
      ws.image.noalias() = k * eta;
      lower.rankUpdate(ws.image, 1.0);
    }
    for (const Matrix& k : b_ops_) {
      ws.image.noalias() = k * eta;
      lower.rankUpdate(ws.image, -1.0);
    }
    ws.solver.compute(ws.diff, Eigen::EigenvaluesOnly);
    return 0.5 * ws.solver.eigenvalues().cwiseAbs().sum();
  }

 private:
  Index dim_;
  std::vector<Matrix> a_ops_;
  std::vector<Matrix> b_ops_;
};

}  // namespace detail

/// Trace distance of the two extended-channel outputs on |eta><eta|.
inline double cost_at_state(const KrausChannel& target, const KrausChannel& candidate,
                            const PureState& eta, ExtensionIndex ext) {
  const detail::PairCost cost(target, candidate, ext);
  if (eta.dim() != cost.dim())
    throw std::invalid_argument("cost_at_state: state dim must equal ext * channel dim");
  auto ws = cost.make_workspace();
  return cost(eta.amplitudes, ws);
}

struct AscentConfig {
  int restarts = 16;
  int max_iters = 500;
  double step = 0.1;         // initial line-search step, halved on failure
  double fd_step = 1e-5;     // central-difference step on ambient components
  double rel_tol = 1e-10;    // relative improvement convergence threshold
  double stall_tol = 1e-12;  // absolute improvement counted as a stall
  int stall_limit = 20;
  std::uint64_t seed = 1;
};

struct CostEvaluation {
  double value = 0.0;
  PureState witness;
  ExtensionIndex ext;
  bool converged = false;
  int iterations = 0;
};

namespace detail {

struct AscentOutcome {
  double value = 0.0;
  Vector state;
  bool converged = false;
  int iterations = 0;
};

// Projected gradient ascent on the unit sphere of C^(m*d), with the state
// handled as 2*m*d ambient reals. Central finite differences; backtracking
// line search on the raw objective.
inline AscentOutcome ascend_from(const PairCost& cost, Vector psi, const AscentConfig& cfg) {
  constexpr double kMinStep = 1e-12;
  const Index n = psi.size();
  auto ws = cost.make_workspace();

  auto value_of = [&](const Vector& v) {
    const double nrm = v.norm();
    return cost(v / nrm, ws);
  };

  psi /= psi.norm();
  double f = cost(psi, ws);
  Vector grad(n), trial(n);
  AscentOutcome out;
  int stall_count = 0;
  int iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    // central differences on the 2n ambient real components
    for (Index j = 0; j < n; ++j) {
      for (int part = 0; part < 2; ++part) {
        const Complex delta = part == 0 ? Complex(cfg.fd_step, 0) : Complex(0, cfg.fd_step);
        trial = psi;
        trial(j) += delta;
        const double fp = value_of(trial);
        trial(j) -= 2.0 * delta;
        const double fm = value_of(trial);
        const double deriv = (fp - fm) / (2.0 * cfg.fd_step);
        if (part == 0)
          grad(j) = Complex(deriv, grad(j).imag());
        else
          grad(j) = Complex(grad(j).real(), deriv);
      }
    }
    // tangent-space projection (the radial component vanishes analytically;
    // remove its finite-difference residue)
    Complex radial = 0.0;
    for (Index j = 0; j < n; ++j) radial += std::conj(psi(j)) * grad(j);
    grad -= radial.real() * psi;

    const double gnorm = grad.norm();
    if (gnorm * cfg.step < kMinStep) {
      ++stall_count;
      if (stall_count >= cfg.stall_limit) break;
      continue;
    }

    double t = cfg.step;
    double f_next = f;
    bool improved = false;
    while (t >= kMinStep) {
      trial = psi + (t / gnorm) * grad;
      trial /= trial.norm();
      const double ft = cost(trial, ws);
      if (ft > f) {
        psi = trial;
        f_next = ft;
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) {
      ++stall_count;
      if (stall_count >= cfg.stall_limit) {
        out.converged = true;  // no ascent direction makes progress
        break;
      }
      continue;
    }
    const double gain = f_next - f;
    f = f_next;
    if (gain < cfg.stall_tol) {
      ++stall_count;
      if (stall_count >= cfg.stall_limit) {
        out.converged = true;
        break;
      }
    } else {
      stall_count = 0;
    }
    if (gain <= cfg.rel_tol * std::max(f, 1e-300)) {
      out.converged = true;
      ++iter;
      break;
    }
  }
  out.value = f;
  out.state = std::move(psi);
  out.iterations = iter;
  return out;
}

}  // namespace detail

/// Multi-start ascent lower bound on sup_eta d_Tr((I_m (x) E1)(eta),
/// (I_m (x) E2)(eta)); the sup is saturated by pure states. Restart r uses
/// the derived seed (cfg.seed, r), so enlarging the restart budget keeps
/// earlier starts and the reported value can only grow. Extra starting
/// states can be supplied as warm starts; they run after the Haar restarts.
inline CostEvaluation worst_case_cost(const KrausChannel& target, const KrausChannel& candidate,
                                      ExtensionIndex ext, const AscentConfig& cfg,
                                      std::span<const PureState> warm_starts = {}) {
  const detail::PairCost cost(target, candidate, ext);
  const Index n = cost.dim();
  const std::size_t total = static_cast<std::size_t>(cfg.restarts) + warm_starts.size();
  std::vector<detail::AscentOutcome> outcomes(total);
  parallel_for(total, [&](std::size_t r) {
    Vector start;
    if (r < static_cast<std::size_t>(cfg.restarts)) {
      start = haar_random_pure_state(n, derive_seed(cfg.seed, r)).amplitudes;
    } else {
      start = warm_starts[r - cfg.restarts].amplitudes;
      if (start.size() != n)
        throw std::invalid_argument("worst_case_cost: warm start has wrong dimension");
    }
    outcomes[r] = detail::ascend_from(cost, std::move(start), cfg);
  });

  // deterministic merge: strictly-greater replacement keeps the lowest seed
  std::size_t best = 0;
  for (std::size_t r = 1; r < total; ++r)
    if (outcomes[r].value > outcomes[best].value) best = r;

  CostEvaluation eval;
  eval.value = outcomes.empty() ? 0.0 : outcomes[best].value;
  eval.witness = PureState{std::move(outcomes[best].state)};
  eval.ext = ext;
  eval.converged = outcomes[best].converged;
  eval.iterations = outcomes[best].iterations;
  return eval;
}

/// Average of cost_at_state over Haar-random pure inputs of dim m * d.
inline double mean_cost(const KrausChannel& target, const KrausChannel& candidate,
                        ExtensionIndex ext, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("mean_cost: samples must be >= 1");
  const detail::PairCost cost(target, candidate, ext);
  auto ws = cost.make_workspace();
  double sum = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const PureState eta = haar_random_pure_state(cost.dim(), derive_seed(seed, i));
    sum += cost(eta.amplitudes, ws);
  }
  return sum / static_cast<double>(samples);
}

struct DiamondResult {
  double value = 0.0;
  ExtensionIndex argmax;
  std::vector<CostEvaluation> per_m;
};

/// Evaluates the worst-case cost for every extension dim m in {1..max_ext}
/// (max_ext defaults to d) and returns the maximum. The best witness of
/// each smaller extension is embedded and reused as a warm start, so the
/// per-m values are non-decreasing wherever the true suprema are.
inline DiamondResult diamond_distance(const KrausChannel& target, const KrausChannel& candidate,
                                      const AscentConfig& cfg, Index max_ext = 0) {
  const Index d = target.in_dim;
  if (max_ext <= 0 || max_ext > d) max_ext = d;
  DiamondResult result;
  std::vector<PureState> warm;
  for (Index m = 1; m <= max_ext; ++m) {
    AscentConfig sub = cfg;
    sub.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(m));
    std::vector<PureState> embedded;
    for (const PureState& w : warm) {
      Vector v = Vector::Zero(m * d);
      v.head(w.dim()) = w.amplitudes;  // extension factor is prepended
      embedded.push_back(PureState{std::move(v)});
    }
    CostEvaluation eval = worst_case_cost(target, candidate, ExtensionIndex{m}, sub, embedded);
    warm.push_back(eval.witness);
    result.per_m.push_back(std::move(eval));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < result.per_m.size(); ++i)
    if (result.per_m[i].value > result.per_m[best].value) best = i;
  result.value = result.per_m[best].value;
  result.argmax = result.per_m[best].ext;
  return result;
}

}  // namespace pqc

#endif  // PQC_METRICS_HPP
