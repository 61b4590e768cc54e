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
//
// CLI job implementations. Exit-code contract: 0 success, 1 domain or
// validation failure, 2 usage or parse failure. Numeric file output uses 17
// significant digits (lossless double round-trip) with '.' decimal
// separator and '\n' line endings; files are written atomically.

#ifndef PQC_RUNNER_HPP
#define PQC_RUNNER_HPP

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pqc/metrics.hpp"
#include "pqc/noise.hpp"
#include "pqc/optimize.hpp"
#include "pqc/serialize.hpp"

namespace pqc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// 17-significant-digit, locale-independent decimal rendering.
inline std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

/// One sweep grid point; per_extension is populated at the argmin, where
/// the extension study runs.
struct SweepRecord {
  double w1 = 0.0;
  double worst_cost = 0.0;
  double mean_cost = 0.0;
  PureState witness;
  std::vector<CostEvaluation> per_extension;
};

namespace detail {

// w1 * first + (1 - w1) * second, as configured
inline ParametricChannel mixture_family(const ExperimentConfig& cfg) {
  const KrausChannel first = build_cnot_variant(cfg.variants[0], cfg.noise);
  const KrausChannel second = build_cnot_variant(cfg.variants[1], cfg.noise);
  ParametricChannel pc;
  pc.arity = 1;
  pc.builder = [first,
                second](const std::vector<double>& th) -> std::variant<KrausChannel,
                                                                       ChannelEnsemble> {
    const double w1 = th[0];
    if (w1 < 0.0 || w1 > 1.0)
      throw std::invalid_argument("mixture weight w1 must lie in [0, 1]");
    return ChannelEnsemble{{{w1, first}, {1.0 - w1, second}}};
  };
  return pc;
}

inline std::filesystem::path derived_summary_path(const ExperimentConfig& cfg) {
  if (!cfg.out_json.empty()) return cfg.out_json;
  std::filesystem::path p = cfg.out_csv;
  p.replace_extension(".summary.json");
  return p;
}

inline Json per_extension_study(const KrausChannel& target, const KrausChannel& candidate,
                                const ExperimentConfig& cfg, std::uint64_t seed,
                                std::vector<CostEvaluation>* out_evals = nullptr) {
  Json arr = Json::array();
  for (Index m : cfg.extensions) {
    AscentConfig a = cfg.ascent;
    a.seed = derive_seed(seed, static_cast<std::uint64_t>(m));
    const CostEvaluation eval = worst_case_cost(target, candidate, ExtensionIndex{m}, a);
    arr.push_back(evaluation_to_json(eval));
    if (out_evals) out_evals->push_back(eval);
  }
  return arr;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// pqc validate

/// Validates either a serialized channel file (object with "kind") or an
/// experiment config, building every channel the experiment uses.
inline int run_validate(const std::filesystem::path& path, std::ostream& out) {
  const Json j = parse_json_file(path);  // parse errors -> invalid_argument -> exit 2

  if (j.is_object() && j.contains("kind")) {
    AnyChannel ch;
    try {
      ch = channel_from_json(j, path.string());
    } catch (const std::invalid_argument& e) {
      out << "FAIL  schema: " << e.what() << '\n';
      return kExitUsage;
    }
    KrausChannel kraus;
    try {
      kraus = as_kraus(ch);  // stinespring unitarity / ensemble weights checked here
    } catch (const std::exception& e) {
      out << "FAIL  channel content: " << e.what() << '\n';
      return kExitDomain;
    }
    const CptpValidation v = validate_cptp(kraus, 1e-10);
    out << (v.passed ? "PASS" : "FAIL") << "  cptp: tp_residual=" << format_double(v.tp_residual)
        << " choi_min_eigenvalue=" << format_double(v.choi_min_eigenvalue) << '\n';
    return v.passed ? kExitOk : kExitDomain;
  }

  const ExperimentConfig cfg = experiment_from_json(j);  // range errors -> exit 2
  bool all_ok = true;
  const auto check = [&](const std::string& name, const KrausChannel& ch) {
    const CptpValidation v = validate_cptp(ch, 1e-10);
    all_ok = all_ok && v.passed;
    out << (v.passed ? "PASS" : "FAIL") << "  " << name
        << ": tp_residual=" << format_double(v.tp_residual)
        << " choi_min_eigenvalue=" << format_double(v.choi_min_eigenvalue) << '\n';
    // density checks on representative outputs
    const Index d = ch.in_dim;
    const DensityMatrix inputs[] = {maximally_mixed(d), pure_density(basis_state(d, 0))};
    for (const DensityMatrix& rho : inputs) {
      const DensityValidation dv = validate_density_matrix(apply_kraus(ch, rho), 1e-9);
      if (!dv.passed) {
        all_ok = false;
        out << "FAIL  " << name << ": output density check failed" << '\n';
      }
    }
  };

  for (std::size_t q = 0; q < cfg.noise.qubits.size(); ++q) {
    check("depolarizing(q" + std::to_string(q) + ")",
          depolarizing_kraus(cfg.noise.qubits[q].depolarizing_p));
    check("amplitude_damping(q" + std::to_string(q) + ")",
          amplitude_damping_kraus(cfg.noise.qubits[q].amplitude_damping_gamma));
  }
  check("noise_layer", noise_layer(cfg.noise));
  check("variant_" + variant_to_string(cfg.variants[0]),
        build_cnot_variant(cfg.variants[0], cfg.noise));
  check("variant_" + variant_to_string(cfg.variants[1]),
        build_cnot_variant(cfg.variants[1], cfg.noise));
  check("ideal_cnot", ideal_cnot_channel());
  const ParametricChannel pc = detail::mixture_family(cfg);
  for (double w1 : {0.0, 0.25, 0.5, 0.75, 1.0})
    check("mixture(w1=" + format_double(w1) + ")", pc.build({w1}));

  out << (all_ok ? "OK" : "INVALID") << '\n';
  return all_ok ? kExitOk : kExitDomain;
}

// ---------------------------------------------------------------------------
// pqc sweep

inline constexpr std::size_t kReferenceStates = 8;

/// Runs the w1 grid sweep at m = 1 (the unextended cost of the figure-2
/// style study), evaluates the configured extension dims at the argmin, and
/// writes the CSV plus a JSON summary.
inline int run_sweep(const std::filesystem::path& config_path,
                     std::optional<std::size_t> grid_override,
                     std::optional<std::string> csv_override, std::ostream& out) {
  ExperimentConfig cfg = experiment_from_json(parse_json_file(config_path));
  if (grid_override) cfg.grid_points = *grid_override;
  if (cfg.grid_points < 2) throw std::invalid_argument("sweep: need at least 2 grid points");
  if (csv_override) cfg.out_csv = *csv_override;

  const KrausChannel target = ideal_cnot_channel();
  const ParametricChannel pc = detail::mixture_family(cfg);
  const SweepCurve curve =
      sweep(pc, target, ExtensionIndex{1}, cfg.grid_points, cfg.ascent, cfg.mean_samples,
            cfg.seed);

  // fixed Haar reference states, seeds literally seed+1 .. seed+K
  std::vector<PureState> refs;
  for (std::size_t k = 1; k <= kReferenceStates; ++k)
    refs.push_back(haar_random_pure_state(target.in_dim, cfg.seed + k));
  std::vector<std::vector<double>> ref_costs(curve.grid.size());
  parallel_for(curve.grid.size(), [&](std::size_t i) {
    const KrausChannel candidate = pc.build({curve.grid[i]});
    const detail::PairCost cost(target, candidate, ExtensionIndex{1});
    auto ws = cost.make_workspace();
    ref_costs[i].reserve(refs.size());
    for (const PureState& psi : refs) ref_costs[i].push_back(cost(psi.amplitudes, ws));
  });

  std::string csv = "w1,worst_cost,mean_cost";
  for (std::size_t k = 1; k <= kReferenceStates; ++k)
    csv += ",cost_state_" + std::to_string(k);
  csv += '\n';
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    csv += format_double(curve.grid[i]);
    csv += ',';
    csv += format_double(curve.worst_cost[i]);
    csv += ',';
    csv += format_double(curve.mean_cost[i]);
    for (double c : ref_costs[i]) {
      csv += ',';
      csv += format_double(c);
    }
    csv += '\n';
  }
  atomic_write_file(cfg.out_csv, csv);

  const double w1_star = curve.grid[curve.argmin];
  const KrausChannel at_argmin = pc.build({w1_star});
  std::vector<CostEvaluation> per_ext;
  const Json per_m = detail::per_extension_study(
      target, at_argmin, cfg, detail::sweep_point_seed(cfg.seed, w1_star), &per_ext);

  Json records = Json::array();
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    Json rec{{"w1", curve.grid[i]},
             {"worst_cost", curve.worst_cost[i]},
             {"mean_cost", curve.mean_cost[i]},
             {"witness", state_to_json(curve.witnesses[i])}};
    records.push_back(std::move(rec));
  }
  const Json summary{{"grid_points", cfg.grid_points},
                     {"seed", cfg.seed},
                     {"argmin_index", curve.argmin},
                     {"w1_star", w1_star},
                     {"worst_cost_at_argmin", curve.worst_cost[curve.argmin]},
                     {"argmin_mean_index", curve.argmin_mean},
                     {"w1_minmean", curve.grid[curve.argmin_mean]},
                     {"per_extension", per_m},
                     {"records", records}};
  atomic_write_file(detail::derived_summary_path(cfg), summary.dump(2) + "\n");

  out << "sweep: " << cfg.grid_points << " points, argmin w1=" << format_double(w1_star)
      << " worst_cost=" << format_double(curve.worst_cost[curve.argmin])
      << " (min-mean w1=" << format_double(curve.grid[curve.argmin_mean]) << ")\n";
  for (const CostEvaluation& e : per_ext)
    out << "  ext m=" << e.ext.m << " (n=" << paper_extension_label(e.ext)
        << "): cost=" << format_double(e.value) << '\n';
  out << "wrote " << cfg.out_csv << " and " << detail::derived_summary_path(cfg).string()
      << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// pqc optimize

/// Golden-section outer minimization of the certified worst-case cost over
/// w1 (the 1-parameter mixture family), then a per-extension study at the
/// optimum. Evaluation seeds depend on the w1 bit pattern, so values agree
/// with sweep values wherever the grids coincide.
inline int run_optimize(const std::filesystem::path& config_path,
                        std::optional<std::string> json_override, std::ostream& out) {
  ExperimentConfig cfg = experiment_from_json(parse_json_file(config_path));
  if (json_override) cfg.out_json = *json_override;

  const KrausChannel target = ideal_cnot_channel();
  const ParametricChannel pc = detail::mixture_family(cfg);

  const auto objective = [&](double w1) {
    AscentConfig a = cfg.ascent;
    a.seed = detail::sweep_point_seed(cfg.seed, w1);
    return worst_case_cost(target, pc.build({w1}), ExtensionIndex{1}, a).value;
  };
  const auto [w1_star, golden_value] = golden_section_min(objective, 0.0, 1.0, cfg.golden_tol);

  // re-certify with the enlarged restart budget
  AscentConfig certify = cfg.ascent;
  certify.restarts = std::max(cfg.ascent.restarts, cfg.gda.certify_restarts);
  certify.seed = detail::sweep_point_seed(cfg.seed, w1_star);
  const KrausChannel at_star = pc.build({w1_star});
  const CostEvaluation cert = worst_case_cost(target, at_star, ExtensionIndex{1}, certify);

  std::vector<CostEvaluation> per_ext;
  const Json per_m = detail::per_extension_study(target, at_star, cfg,
                                                 detail::sweep_point_seed(cfg.seed, w1_star),
                                                 &per_ext);

  const Json result{{"w1_star", w1_star},
                    {"golden_section_value", golden_value},
                    {"certified", evaluation_to_json(cert)},
                    {"per_extension", per_m},
                    {"seed", cfg.seed}};
  const std::filesystem::path out_path =
      cfg.out_json.empty() ? std::filesystem::path("optimize.json")
                           : std::filesystem::path(cfg.out_json);
  atomic_write_file(out_path, result.dump(2) + "\n");

  out << "optimize: w1*=" << format_double(w1_star)
      << " certified_cost=" << format_double(cert.value) << '\n';
  for (const CostEvaluation& e : per_ext)
    out << "  ext m=" << e.ext.m << " (n=" << paper_extension_label(e.ext)
        << "): cost=" << format_double(e.value) << '\n';
  out << "wrote " << out_path.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// pqc distance

inline int run_distance(const std::filesystem::path& a_path,
                        const std::filesystem::path& b_path, Index max_ext,
                        std::optional<std::string> json_out, const AscentConfig& cfg,
                        std::ostream& out) {
  const KrausChannel a = as_kraus(load_channel(a_path));
  const KrausChannel b = as_kraus(load_channel(b_path));
  if (a.in_dim != b.in_dim || a.out_dim != b.out_dim)
    throw std::invalid_argument("distance: channel dimensions are incompatible");
  for (const auto& [name, ch] : {std::pair<const char*, const KrausChannel&>{"first", a},
                                 {"second", b}}) {
    const CptpValidation v = validate_cptp(ch, 1e-8);
    if (!v.passed) {
      out << "FAIL  " << name << " channel is not CPTP: tp_residual="
          << format_double(v.tp_residual)
          << " choi_min_eigenvalue=" << format_double(v.choi_min_eigenvalue) << '\n';
      return kExitDomain;
    }
  }

  const DiamondResult res = diamond_distance(a, b, cfg, max_ext);
  Json per_m = Json::array();
  for (const CostEvaluation& e : res.per_m) {
    out << "m=" << e.ext.m << " (n=" << paper_extension_label(e.ext)
        << "): cost=" << format_double(e.value) << (e.converged ? "" : "  [not converged]")
        << '\n';
    per_m.push_back(evaluation_to_json(e));
  }
  out << "diamond_lower_bound=" << format_double(res.value) << " attained at m=" << res.argmax.m
      << " (n=" << paper_extension_label(res.argmax) << ")\n";
  if (json_out) {
    const Json j{{"per_m", per_m},
                 {"diamond_lower_bound", res.value},
                 {"argmax_m", res.argmax.m},
                 {"argmax_n", paper_extension_label(res.argmax)}};
    atomic_write_file(*json_out, j.dump(2) + "\n");
    out << "wrote " << *json_out << '\n';
  }
  return kExitOk;
}

}  // namespace pqc

#endif  // PQC_RUNNER_HPP
