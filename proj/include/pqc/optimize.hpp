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

#ifndef PQC_OPTIMIZE_HPP
#define PQC_OPTIMIZE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <variant>
#include <vector>

#include "pqc/channels.hpp"
#include "pqc/metrics.hpp"
#include "pqc/parallel.hpp"
#include "pqc/random.hpp"

namespace pqc {

/// Real optimization variables with closed per-component bound intervals.
struct ParameterVector {
  std::vector<double> values;
  std::vector<std::pair<double, double>> bounds;

  std::size_t arity() const { return values.size(); }

  void check() const {
    if (values.size() != bounds.size())
      throw std::invalid_argument("ParameterVector: values/bounds size mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto [lo, hi] = bounds[i];
      if (!(lo <= hi)) throw std::invalid_argument("ParameterVector: lo > hi");
      if (values[i] < lo || values[i] > hi)
        throw std::invalid_argument("ParameterVector: value outside bounds");
    }
  }

  void clip() {
    for (std::size_t i = 0; i < values.size(); ++i)
      values[i] = std::clamp(values[i], bounds[i].first, bounds[i].second);
  }
};

/// A family of channels indexed by a real parameter vector. Builders may
/// return either a Kraus channel or a convex ensemble; ensembles are
/// flattened before metric evaluation.
struct ParametricChannel {
  std::size_t arity = 0;
  std::function<std::variant<KrausChannel, ChannelEnsemble>(const std::vector<double>&)> builder;

  KrausChannel build(const std::vector<double>& theta) const {
    if (theta.size() != arity)
      throw std::invalid_argument("ParametricChannel: wrong parameter count");
    auto built = builder(theta);
    if (std::holds_alternative<KrausChannel>(built))
      return std::get<KrausChannel>(std::move(built));
    return ensemble_to_kraus(std::get<ChannelEnsemble>(built));
  }
};

/// Golden-section search on [lo, hi]. The returned point is the best sample
/// seen; it is the global minimizer only when f is unimodal on the bracket.
inline std::pair<double, double> golden_section_min(const std::function<double(double)>& f,
                                                    double lo, double hi, double tol) {
  if (!(lo < hi)) throw std::invalid_argument("golden_section_min: requires lo < hi");
  constexpr double kInvPhi = 0.6180339887498949;
  double a = hi - kInvPhi * (hi - lo);
  double b = lo + kInvPhi * (hi - lo);
  double fa = f(a), fb = f(b);
  double best_x = fa <= fb ? a : b;
  double best_f = fa <= fb ? fa : fb;
  while (hi - lo > tol) {
    if (fa <= fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - kInvPhi * (hi - lo);
      fa = f(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + kInvPhi * (hi - lo);
      fb = f(b);
    }
    const double fx = fa <= fb ? fa : fb;
    const double x = fa <= fb ? a : b;
    if (fx < best_f || (fx == best_f && x < best_x)) {
      best_f = fx;
      best_x = x;
    }
  }
  return {best_x, best_f};
}

/// Grid sweep of the inner worst-case cost along a 1-parameter family.
struct SweepCurve {
  std::vector<double> grid;
  std::vector<double> worst_cost;
  std::vector<double> mean_cost;
  std::vector<PureState> witnesses;
  std::size_t argmin = 0;       // ties broken toward the smaller parameter
  std::size_t argmin_mean = 0;  // min-mean counterpart
};

namespace detail {

// Per-grid-point seed, a pure function of the parameter value's bit
// pattern. Power-of-two grid refinements reproduce coarse points exactly
// (i/N and 2i/2N are the same double), so shared points share seeds.
inline std::uint64_t sweep_point_seed(std::uint64_t seed, double x) {
  return seed_for_coordinate(seed, x);
}

}  // namespace detail

inline SweepCurve sweep(const ParametricChannel& pc, const KrausChannel& target,
                        ExtensionIndex ext, std::size_t grid_points, const AscentConfig& cfg,
                        std::size_t mean_samples, std::uint64_t seed,
                        std::pair<double, double> interval = {0.0, 1.0}) {
  if (pc.arity != 1) throw std::invalid_argument("sweep: parametric channel must have arity 1");
  if (grid_points < 2) throw std::invalid_argument("sweep: need at least 2 grid points");
  const auto [lo, hi] = interval;

  SweepCurve curve;
  curve.grid.resize(grid_points);
  curve.worst_cost.resize(grid_points);
  curve.mean_cost.resize(grid_points);
  curve.witnesses.resize(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(grid_points - 1);
    curve.grid[i] = lo + t * (hi - lo);
  }

  parallel_for(grid_points, [&](std::size_t i) {
    const double x = curve.grid[i];
    const std::uint64_t point_seed = detail::sweep_point_seed(seed, x);
    const KrausChannel candidate = pc.build({x});
    AscentConfig point_cfg = cfg;
    point_cfg.seed = point_seed;
    CostEvaluation eval = worst_case_cost(target, candidate, ext, point_cfg);
    curve.worst_cost[i] = eval.value;
    curve.witnesses[i] = std::move(eval.witness);
    curve.mean_cost[i] =
        mean_cost(target, candidate, ext, mean_samples, derive_seed(point_seed, 0x6d65616eULL));
  });

  for (std::size_t i = 1; i < grid_points; ++i) {
    if (curve.worst_cost[i] < curve.worst_cost[curve.argmin]) curve.argmin = i;
    if (curve.mean_cost[i] < curve.mean_cost[curve.argmin_mean]) curve.argmin_mean = i;
  }
  return curve;
}

struct GdaConfig {
  int max_outer = 100;
  double fd_step = 1e-4;    // central differences on the parameters
  double step = 0.1;        // initial outer descent step, halved on failure
  double step_min = 1e-9;   // line-search exhaustion threshold
  double tol = 1e-9;        // outer absolute-improvement convergence
  int certify_restarts = 32;
  AscentConfig inner;
  std::uint64_t seed = 1;
};

struct GdaResult {
  ParameterVector theta_star;
  CostEvaluation cost;  // re-certified at theta_star with the enlarged budget
  bool converged = false;
  int outer_iterations = 0;
  std::vector<double> certified_history;  // best-so-far, non-increasing
};

/// Alternating descent-ascent: the inner multi-start ascent is re-run in
/// full at every query point (witnesses can jump discontinuously in the
/// parameters); accumulated witnesses join as extra restarts. All inner
/// evaluations within one outer iteration share a seed so that finite
/// differences see a common random number stream.
inline GdaResult minmax_gda(const ParametricChannel& pc, const KrausChannel& target,
                            ExtensionIndex ext, const ParameterVector& init,
                            const GdaConfig& cfg) {
  init.check();
  if (init.arity() != pc.arity)
    throw std::invalid_argument("minmax_gda: init arity does not match channel");
  const std::size_t n = pc.arity;
  constexpr std::size_t kWarmPoolCap = 8;

  std::vector<PureState> warm;
  auto evaluate = [&](const std::vector<double>& theta, std::uint64_t seed) {
    const KrausChannel candidate = pc.build(theta);
    const CptpValidation v = validate_cptp(candidate, 1e-10);
    if (!v.passed) throw std::domain_error("minmax_gda: builder produced a non-CPTP channel");
    AscentConfig inner = cfg.inner;
    inner.seed = seed;
    return worst_case_cost(target, candidate, ext, inner, warm);
  };

  GdaResult result;
  ParameterVector theta = init;
  ParameterVector best = init;
  double best_value = std::numeric_limits<double>::infinity();

  int it = 0;
  for (; it < cfg.max_outer; ++it) {
    const std::uint64_t iter_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(it));
    CostEvaluation here = evaluate(theta.values, iter_seed);
    if (warm.size() >= kWarmPoolCap) warm.erase(warm.begin());
    warm.push_back(here.witness);
    if (here.value < best_value ||
        (here.value == best_value && theta.values < best.values)) {
      best_value = here.value;
      best = theta;
    }
    result.certified_history.push_back(best_value);

    // central finite differences, clipped to the bound box; the divisor is
    // the realized displacement so boundary points degrade to one-sided
    std::vector<double> grad(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const auto [lo, hi] = theta.bounds[j];
      std::vector<double> tp = theta.values, tm = theta.values;
      tp[j] = std::clamp(tp[j] + cfg.fd_step, lo, hi);
      tm[j] = std::clamp(tm[j] - cfg.fd_step, lo, hi);
      const double width = tp[j] - tm[j];
      if (width <= 0) continue;
      grad[j] = (evaluate(tp, iter_seed).value - evaluate(tm, iter_seed).value) / width;
    }
    double gnorm = 0.0;
    for (double g : grad) gnorm += g * g;
    gnorm = std::sqrt(gnorm);
    if (gnorm == 0.0) {
      result.converged = true;
      ++it;
      break;
    }

    double t = cfg.step;
    bool improved = false;
    double gained = 0.0;
    while (t >= cfg.step_min) {
      ParameterVector trial = theta;
      for (std::size_t j = 0; j < n; ++j) trial.values[j] -= (t / gnorm) * grad[j];
      trial.clip();
      const CostEvaluation f_trial = evaluate(trial.values, iter_seed);
      if (f_trial.value < here.value) {
        gained = here.value - f_trial.value;
        theta = std::move(trial);
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved || gained < cfg.tol) {
      result.converged = true;
      ++it;
      break;
    }
  }
  result.outer_iterations = it;

  // final certification with the enlarged restart budget
  AscentConfig certify = cfg.inner;
  certify.restarts = std::max(cfg.inner.restarts, cfg.certify_restarts);
  certify.seed = derive_seed(cfg.seed, 0x63657274ULL);
  const KrausChannel final_channel = pc.build(best.values);
  result.cost = worst_case_cost(target, final_channel, ext, certify, warm);
  result.theta_star = std::move(best);
  return result;
}

}  // namespace pqc

#endif  // PQC_OPTIMIZE_HPP
