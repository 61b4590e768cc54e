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

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <stdexcept>

#include "pqc/noise.hpp"
#include "pqc/optimize.hpp"
#include "test_support.hpp"

using namespace pqc;
using Catch::Matchers::WithinAbs;

namespace {

ParametricChannel mixture_family(const NoiseSpec& spec) {
  ParametricChannel pc;
  pc.arity = 1;
  pc.builder = [spec](const std::vector<double>& th) -> std::variant<KrausChannel, ChannelEnsemble> {
    return mixed_cnot_channel(th[0], spec);
  };
  return pc;
}

ParametricChannel rz_family() {
  ParametricChannel pc;
  pc.arity = 1;
  pc.builder = [](const std::vector<double>& th) -> std::variant<KrausChannel, ChannelEnsemble> {
    return unitary_channel(gates::rz(th[0]));
  };
  return pc;
}

AscentConfig quick_ascent(int restarts) {
  AscentConfig cfg;
  cfg.restarts = restarts;
  return cfg;
}

}  // namespace

TEST_CASE("ParameterVector validation and clipping") {
  ParameterVector ok{{0.5}, {{0.0, 1.0}}};
  CHECK_NOTHROW(ok.check());
  CHECK(ok.arity() == 1);

  CHECK_THROWS_AS((ParameterVector{{0.5, 0.1}, {{0.0, 1.0}}}.check()), std::invalid_argument);
  CHECK_THROWS_AS((ParameterVector{{1.5}, {{0.0, 1.0}}}.check()), std::invalid_argument);
  CHECK_THROWS_AS((ParameterVector{{0.0}, {{1.0, 0.0}}}.check()), std::invalid_argument);

  ParameterVector clipped{{1.7}, {{0.0, 1.0}}};
  clipped.clip();
  CHECK(clipped.values[0] == 1.0);
}

TEST_CASE("ParametricChannel flattens ensembles and checks arity") {
  const ParametricChannel pc = mixture_family(NoiseSpec::table1());
  const KrausChannel built = pc.build({0.3});
  CHECK(built.in_dim == 4);
  CHECK(validate_cptp(built, 1e-10).passed);
  CHECK_THROWS_AS(pc.build({0.3, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(pc.build({1.4}), std::invalid_argument);  // weight range from the builder
}

TEST_CASE("golden_section_min on shifted quadratics") {
  const auto [x1, f1] = golden_section_min([](double x) { return (x - 0.3) * (x - 0.3); }, 0.0,
                                           1.0, 1e-6);
  CHECK_THAT(x1, WithinAbs(0.3, 1e-5));
  CHECK_THAT(f1, WithinAbs(0.0, 1e-9));

  // minimum at the boundary
  const auto [x2, f2] = golden_section_min([](double x) { return x; }, 0.0, 1.0, 1e-6);
  CHECK(x2 < 1e-4);
  CHECK_THAT(f2, WithinAbs(0.0, 1e-4));

  // constant functions return the best sampled value
  const auto [x3, f3] = golden_section_min([](double) { return 2.5; }, 0.0, 1.0, 1e-6);
  CHECK(f3 == 2.5);
  CHECK(x3 >= 0.0);
  CHECK(x3 <= 1.0);

  CHECK_THROWS_AS(golden_section_min([](double x) { return x; }, 1.0, 0.0, 1e-6),
                  std::invalid_argument);
}

TEST_CASE("sweep input validation") {
  const KrausChannel target = ideal_cnot_channel();
  const ParametricChannel pc = mixture_family(NoiseSpec::noiseless());
  ParametricChannel two;
  two.arity = 2;
  two.builder = pc.builder;
  CHECK_THROWS_AS(sweep(two, target, ExtensionIndex{1}, 5, AscentConfig{}, 10, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(sweep(pc, target, ExtensionIndex{1}, 1, AscentConfig{}, 10, 1),
                  std::invalid_argument);
}

TEST_CASE("noiseless sweep is flat at zero") {
  const SweepCurve curve = sweep(mixture_family(NoiseSpec::noiseless()), ideal_cnot_channel(),
                                 ExtensionIndex{1}, 21, quick_ascent(4), 50, 3);
  REQUIRE(curve.grid.size() == 21);
  CHECK(curve.grid.front() == 0.0);
  CHECK(curve.grid.back() == 1.0);
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    CHECK(curve.worst_cost[i] <= 1e-8);
    CHECK(curve.mean_cost[i] <= 1e-8);
    CHECK(curve.mean_cost[i] >= 0.0);
  }
}

TEST_CASE("Table-1 sweep: shape, continuity and endpoint anchors") {
  const SweepCurve curve = sweep(mixture_family(NoiseSpec::table1()), ideal_cnot_channel(),
                                 ExtensionIndex{1}, 21, quick_ascent(8), 100, 1);

  // worst-case dominates the mean pointwise and the curve is continuous
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    CHECK(curve.worst_cost[i] >= curve.mean_cost[i] - 1e-9);
    CHECK(curve.worst_cost[i] > 0.0);
    if (i > 0) CHECK(std::abs(curve.worst_cost[i] - curve.worst_cost[i - 1]) < 0.05);
  }

  // endpoints are the pure variants
  CHECK_THAT(curve.worst_cost.front(), WithinAbs(0.5586539703994878, 2e-4));
  CHECK_THAT(curve.worst_cost.back(), WithinAbs(0.5309252350221135, 2e-4));

  // interior optimum near w1 = 0.55
  CHECK(curve.argmin > 0);
  CHECK(curve.argmin < curve.grid.size() - 1);
  CHECK_THAT(curve.grid[curve.argmin], WithinAbs(0.55, 0.101));
  CHECK(curve.worst_cost[curve.argmin] <
        std::min(curve.worst_cost.front(), curve.worst_cost.back()) - 1e-3);
}

TEST_CASE("sweep values are invariant under power-of-two grid refinement") {
  const ParametricChannel pc = mixture_family(NoiseSpec::table1());
  const KrausChannel target = ideal_cnot_channel();
  const AscentConfig cfg = quick_ascent(4);
  const SweepCurve coarse = sweep(pc, target, ExtensionIndex{1}, 6, cfg, 40, 17);
  const SweepCurve fine = sweep(pc, target, ExtensionIndex{1}, 11, cfg, 40, 17);

  // grid point i of the coarse run is point 2i of the fine run: identical
  // parameter double, hence identical seed and identical value
  for (std::size_t i = 0; i < coarse.grid.size(); ++i) {
    REQUIRE(coarse.grid[i] == fine.grid[2 * i]);
    CHECK(coarse.worst_cost[i] == fine.worst_cost[2 * i]);
    CHECK(coarse.mean_cost[i] == fine.mean_cost[2 * i]);
  }
}

TEST_CASE("sweep endpoint values match direct evaluations") {
  const ParametricChannel pc = mixture_family(NoiseSpec::table1());
  const KrausChannel target = ideal_cnot_channel();
  const AscentConfig cfg = quick_ascent(4);
  const std::uint64_t seed = 23;
  const SweepCurve curve = sweep(pc, target, ExtensionIndex{1}, 3, cfg, 30, seed);

  AscentConfig at0 = cfg;
  at0.seed = seed_for_coordinate(seed, 0.0);
  const double direct0 = worst_case_cost(target, pc.build({0.0}), ExtensionIndex{1}, at0).value;
  CHECK_THAT(curve.worst_cost.front(), WithinAbs(direct0, 1e-9));

  AscentConfig at1 = cfg;
  at1.seed = seed_for_coordinate(seed, 1.0);
  const double direct1 = worst_case_cost(target, pc.build({1.0}), ExtensionIndex{1}, at1).value;
  CHECK_THAT(curve.worst_cost.back(), WithinAbs(direct1, 1e-9));
}

TEST_CASE("minmax_gda input validation and the non-CPTP guard") {
  const KrausChannel target = identity_channel(2);
  ParametricChannel broken;
  broken.arity = 1;
  broken.builder = [](const std::vector<double>&) -> std::variant<KrausChannel, ChannelEnsemble> {
    return make_kraus({0.5 * Matrix::Identity(2, 2)});
  };
  GdaConfig cfg;
  cfg.inner.restarts = 2;
  const ParameterVector init{{0.5}, {{0.0, 1.0}}};
  CHECK_THROWS_AS(minmax_gda(broken, target, ExtensionIndex{1}, init, cfg), std::domain_error);

  const ParameterVector bad_init{{2.0}, {{0.0, 1.0}}};
  CHECK_THROWS_AS(minmax_gda(rz_family(), target, ExtensionIndex{1}, bad_init, cfg),
                  std::invalid_argument);
}

TEST_CASE("minmax_gda on the noiseless mixture is identically zero") {
  GdaConfig cfg;
  cfg.inner.restarts = 4;
  const ParameterVector init{{0.25}, {{0.0, 1.0}}};
  const GdaResult res = minmax_gda(mixture_family(NoiseSpec::noiseless()), ideal_cnot_channel(),
                                   ExtensionIndex{1}, init, cfg);
  CHECK(res.cost.value <= 1e-8);
  CHECK(res.converged);
  REQUIRE_FALSE(res.certified_history.empty());
  CHECK(res.certified_history.back() <= 1e-8);
}

TEST_CASE("minmax_gda drives a detuned Rz rotation back to the identity") {
  GdaConfig cfg;
  cfg.inner.restarts = 4;
  cfg.seed = 5;
  const ParameterVector init{{2.0}, {{-M_PI, M_PI}}};
  const GdaResult res =
      minmax_gda(rz_family(), identity_channel(2), ExtensionIndex{1}, init, cfg);

  // worst-case cost of Rz(theta) vs identity is |sin(theta/2)|
  CHECK(res.cost.value <= 1e-6);
  CHECK_THAT(std::abs(res.theta_star.values[0]), WithinAbs(0.0, 1e-5));

  // the reported history is the certified best-so-far: non-increasing
  for (std::size_t i = 1; i < res.certified_history.size(); ++i)
    CHECK(res.certified_history[i] <= res.certified_history[i - 1] + 1e-15);
}

TEST_CASE("minmax_gda recovers the optimal mixture weight") {
  GdaConfig cfg;
  cfg.inner.restarts = 6;
  cfg.max_outer = 30;
  cfg.tol = 1e-6;
  cfg.certify_restarts = 12;
  cfg.seed = 2;
  const ParameterVector init{{0.3}, {{0.0, 1.0}}};
  const GdaResult res = minmax_gda(mixture_family(NoiseSpec::table1()), ideal_cnot_channel(),
                                   ExtensionIndex{1}, init, cfg);

  // continuous optimum sits at w1 ~ 0.5562 with cost ~ 0.43765
  CHECK_THAT(res.theta_star.values[0], WithinAbs(0.556212, 0.02));
  CHECK_THAT(res.cost.value, WithinAbs(0.4376481318, 5e-4));
  for (std::size_t i = 1; i < res.certified_history.size(); ++i)
    CHECK(res.certified_history[i] <= res.certified_history[i - 1] + 1e-15);
}
