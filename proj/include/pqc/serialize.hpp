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
// JSON formats. Complex entries are [re, im] pairs; doubles are emitted as
// shortest-round-trip decimals, so save/load reproduces every matrix
// bit-exactly. Channel files carry "format": "pqc-channel/1". Unknown keys
// are rejected everywhere.

#ifndef PQC_SERIALIZE_HPP
#define PQC_SERIALIZE_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pqc/channels.hpp"
#include "pqc/metrics.hpp"
#include "pqc/noise.hpp"
#include "pqc/optimize.hpp"

namespace pqc {

using Json = nlohmann::json;

inline constexpr const char* kChannelFormat = "pqc-channel/1";

namespace detail {

inline void expect_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                        const std::string& where) {
  if (!obj.is_object()) throw std::invalid_argument(where + ": expected a JSON object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (std::string_view k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known) throw std::invalid_argument(where + ": unknown key \"" + item.key() + "\"");
  }
}

inline void require(bool cond, const std::string& message) {
  if (!cond) throw std::invalid_argument(message);
}

}  // namespace detail

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const Json& j, const std::string& where) {
  detail::require(j.is_array() && !j.empty(), where + ": expected a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Matrix m;
  for (std::size_t r = 0; r < rows; ++r) {
    const Json& row = j[r];
    detail::require(row.is_array() && !row.empty(), where + ": rows must be non-empty arrays");
    if (r == 0) {
      cols = row.size();
      m.resize(rows, cols);
    }
    detail::require(row.size() == cols, where + ": ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) {
      const Json& e = row[c];
      detail::require(e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number(),
                      where + ": entries must be [re, im] number pairs");
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

inline Json state_to_json(const PureState& psi) {
  Json amps = Json::array();
  for (Index i = 0; i < psi.dim(); ++i)
    amps.push_back({psi.amplitudes(i).real(), psi.amplitudes(i).imag()});
  return amps;
}

inline PureState state_from_json(const Json& j, const std::string& where) {
  detail::require(j.is_array() && !j.empty(), where + ": expected a non-empty array");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& e = j[i];
    detail::require(e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number(),
                    where + ": entries must be [re, im] number pairs");
    v(i) = Complex(e[0].get<double>(), e[1].get<double>());
  }
  return PureState{std::move(v)};
}

inline Json evaluation_to_json(const CostEvaluation& eval) {
  return Json{{"value", eval.value},
              {"ext_m", eval.ext.m},
              {"ext_n", paper_extension_label(eval.ext)},
              {"converged", eval.converged},
              {"iterations", eval.iterations},
              {"witness", state_to_json(eval.witness)}};
}

// ---------------------------------------------------------------------------
// channels

using AnyChannel = std::variant<KrausChannel, StinespringChannel, ChannelEnsemble>;

namespace detail {

inline Json kraus_body(const KrausChannel& ch) {
  Json ops = Json::array();
  for (const Matrix& k : ch.operators) ops.push_back(matrix_to_json(k));
  return Json{{"kind", "kraus"},
              {"in_dim", ch.in_dim},
              {"out_dim", ch.out_dim},
              {"operators", std::move(ops)}};
}

inline KrausChannel kraus_from_body(const Json& j, const std::string& where) {
  expect_keys(j, {"kind", "in_dim", "out_dim", "operators", "format"}, where);
  require(j.contains("in_dim") && j.contains("out_dim") && j.contains("operators"),
          where + ": kraus channel needs in_dim, out_dim, operators");
  const Index in_dim = j.at("in_dim").get<Index>();
  const Index out_dim = j.at("out_dim").get<Index>();
  require(in_dim >= 1 && out_dim >= 1, where + ": dims must be positive");
  const Json& ops_json = j.at("operators");
  require(ops_json.is_array() && !ops_json.empty(), where + ": operators must be non-empty");
  std::vector<Matrix> ops;
  for (const Json& o : ops_json) {
    Matrix k = matrix_from_json(o, where + ".operators");
    require(k.rows() == out_dim && k.cols() == in_dim,
            where + ": operator shape must be out_dim x in_dim");
    ops.push_back(std::move(k));
  }
  return KrausChannel{in_dim, out_dim, std::move(ops)};
}

}  // namespace detail

inline Json channel_to_json(const KrausChannel& ch) {
  Json j = detail::kraus_body(ch);
  j["format"] = kChannelFormat;
  return j;
}

inline Json channel_to_json(const StinespringChannel& ch) {
  return Json{{"format", kChannelFormat},
              {"kind", "stinespring"},
              {"system_qubits", ch.system_qubits},
              {"ancilla_qubits", ch.ancilla_qubits},
              {"ancilla_init", ch.ancilla_init},
              {"dilation", matrix_to_json(ch.dilation)}};
}

inline Json channel_to_json(const ChannelEnsemble& en) {
  Json members = Json::array();
  for (const auto& [w, ch] : en.members)
    members.push_back(Json{{"weight", w}, {"channel", detail::kraus_body(ch)}});
  return Json{{"format", kChannelFormat}, {"kind", "ensemble"}, {"members", std::move(members)}};
}

inline Json channel_to_json(const AnyChannel& ch) {
  return std::visit([](const auto& c) { return channel_to_json(c); }, ch);
}

inline AnyChannel channel_from_json(const Json& j, const std::string& where = "channel") {
  detail::require(j.is_object(), where + ": expected a JSON object");
  detail::require(j.contains("format") && j.at("format") == kChannelFormat,
                  where + ": missing or unsupported format (want \"" +
                      std::string(kChannelFormat) + "\")");
  detail::require(j.contains("kind") && j.at("kind").is_string(), where + ": missing kind");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "kraus") return detail::kraus_from_body(j, where);
  if (kind == "stinespring") {
    detail::expect_keys(
        j, {"format", "kind", "system_qubits", "ancilla_qubits", "ancilla_init", "dilation"},
        where);
    StinespringChannel ch;
    ch.system_qubits = j.at("system_qubits").get<int>();
    ch.ancilla_qubits = j.at("ancilla_qubits").get<int>();
    ch.ancilla_init = j.value("ancilla_init", Index{0});
    ch.dilation = matrix_from_json(j.at("dilation"), where + ".dilation");
    check_stinespring(ch);
    return ch;
  }
  if (kind == "ensemble") {
    detail::expect_keys(j, {"format", "kind", "members"}, where);
    detail::require(j.contains("members") && j.at("members").is_array() &&
                        !j.at("members").empty(),
                    where + ": ensemble needs a non-empty members array");
    ChannelEnsemble en;
    std::size_t idx = 0;
    for (const Json& mj : j.at("members")) {
      const std::string mwhere = where + ".members[" + std::to_string(idx++) + "]";
      detail::expect_keys(mj, {"weight", "channel"}, mwhere);
      detail::require(mj.contains("weight") && mj.at("weight").is_number() &&
                          mj.contains("channel"),
                      mwhere + ": needs weight and channel");
      en.members.emplace_back(mj.at("weight").get<double>(),
                              detail::kraus_from_body(mj.at("channel"), mwhere + ".channel"));
    }
    check_ensemble(en);
    return en;
  }
  throw std::invalid_argument(where + ": unknown kind \"" + kind + "\"");
}

/// Collapses any representation to Kraus form for metric evaluation.
inline KrausChannel as_kraus(const AnyChannel& ch) {
  if (std::holds_alternative<KrausChannel>(ch)) return std::get<KrausChannel>(ch);
  if (std::holds_alternative<StinespringChannel>(ch))
    return stinespring_to_kraus(std::get<StinespringChannel>(ch));
  return ensemble_to_kraus(std::get<ChannelEnsemble>(ch));
}

// ---------------------------------------------------------------------------
// noise + experiment configuration

inline Json noise_to_json(const NoiseSpec& spec) {
  Json qubits = Json::array();
  for (const QubitNoise& q : spec.qubits)
    qubits.push_back(Json{{"depolarizing", q.depolarizing_p},
                          {"amplitude_damping", q.amplitude_damping_gamma}});
  return Json{{"qubits", std::move(qubits)},
              {"noise_order",
               spec.order == NoiseOrder::kDepolarizingFirst ? "depol_first" : "ad_first"}};
}

inline NoiseSpec noise_from_json(const Json& j, const std::string& where = "noise") {
  detail::expect_keys(j, {"qubits", "noise_order"}, where);
  detail::require(j.contains("qubits") && j.at("qubits").is_array() && !j.at("qubits").empty(),
                  where + ": needs a non-empty qubits array");
  NoiseSpec spec;
  spec.qubits.clear();
  for (const Json& qj : j.at("qubits")) {
    detail::expect_keys(qj, {"depolarizing", "amplitude_damping"}, where + ".qubits[]");
    detail::require(qj.contains("depolarizing") && qj.contains("amplitude_damping"),
                    where + ": each qubit needs depolarizing and amplitude_damping");
    QubitNoise q;
    q.depolarizing_p = qj.at("depolarizing").get<double>();
    q.amplitude_damping_gamma = qj.at("amplitude_damping").get<double>();
    spec.qubits.push_back(q);
  }
  if (j.contains("noise_order")) {
    const std::string order = j.at("noise_order").get<std::string>();
    if (order == "depol_first")
      spec.order = NoiseOrder::kDepolarizingFirst;
    else if (order == "ad_first")
      spec.order = NoiseOrder::kAmplitudeDampingFirst;
    else
      throw std::invalid_argument(where + ": noise_order must be depol_first or ad_first");
  }
  spec.check();  // range violations surface as parse-stage errors
  return spec;
}

inline GateVariant variant_from_string(const std::string& s, const std::string& where) {
  if (s == "direct") return GateVariant::kDirect;
  if (s == "hadamard_conjugated") return GateVariant::kHadamardConjugated;
  throw std::invalid_argument(where + ": unknown variant \"" + s + "\"");
}

inline std::string variant_to_string(GateVariant v) {
  return v == GateVariant::kDirect ? "direct" : "hadamard_conjugated";
}

/// Everything a CLI job needs; fully parsed and range-checked before any
/// computation starts. Defaults reproduce the two-qubit mixed-CNOT study.
struct ExperimentConfig {
  NoiseSpec noise = NoiseSpec::table1();
  std::vector<GateVariant> variants = {GateVariant::kDirect, GateVariant::kHadamardConjugated};
  std::vector<Index> extensions = {1, 2, 4};
  std::size_t grid_points = 101;
  std::size_t mean_samples = 1000;
  AscentConfig ascent;
  GdaConfig gda;
  double golden_tol = 1e-4;
  std::string out_csv = "sweep.csv";
  std::string out_json;  // empty = derive from out_csv
  std::uint64_t seed = 1;

  Index system_dim() const { return Index{1} << noise.qubits.size(); }
};

inline ExperimentConfig experiment_from_json(const Json& j) {
  detail::expect_keys(j,
                      {"noise", "variants", "extensions", "grid_points", "mean_samples",
                       "optimizer", "output", "seed"},
                      "config");
  ExperimentConfig cfg;
  if (j.contains("noise")) cfg.noise = noise_from_json(j.at("noise"));
  if (j.contains("variants")) {
    const Json& vj = j.at("variants");
    detail::require(vj.is_array() && vj.size() == 2,
                    "config.variants: exactly two variants form the mixture");
    cfg.variants.clear();
    for (const Json& v : vj)
      cfg.variants.push_back(variant_from_string(v.get<std::string>(), "config.variants"));
    detail::require(cfg.variants[0] != cfg.variants[1],
                    "config.variants: the two variants must differ");
  }
  if (j.contains("extensions")) {
    const Json& ej = j.at("extensions");
    detail::require(ej.is_array() && !ej.empty(), "config.extensions: non-empty array required");
    cfg.extensions.clear();
    for (const Json& e : ej) {
      const Index m = e.get<Index>();
      detail::require(m >= 1 && m <= cfg.system_dim(),
                      "config.extensions: each m must lie in [1, system dim]");
      cfg.extensions.push_back(m);
    }
  }
  if (j.contains("grid_points")) cfg.grid_points = j.at("grid_points").get<std::size_t>();
  detail::require(cfg.grid_points >= 2, "config.grid_points: need at least 2");
  if (j.contains("mean_samples")) cfg.mean_samples = j.at("mean_samples").get<std::size_t>();
  detail::require(cfg.mean_samples >= 1, "config.mean_samples: need at least 1");
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("optimizer")) {
    const Json& oj = j.at("optimizer");
    detail::expect_keys(oj,
                        {"restarts", "max_iters", "step", "fd_step", "rel_tol", "stall_tol",
                         "stall_limit", "outer_max_iters", "outer_step", "outer_fd_step",
                         "outer_tol", "certify_restarts", "golden_tol"},
                        "config.optimizer");
    AscentConfig& a = cfg.ascent;
    if (oj.contains("restarts")) a.restarts = oj.at("restarts").get<int>();
    if (oj.contains("max_iters")) a.max_iters = oj.at("max_iters").get<int>();
    if (oj.contains("step")) a.step = oj.at("step").get<double>();
    if (oj.contains("fd_step")) a.fd_step = oj.at("fd_step").get<double>();
    if (oj.contains("rel_tol")) a.rel_tol = oj.at("rel_tol").get<double>();
    if (oj.contains("stall_tol")) a.stall_tol = oj.at("stall_tol").get<double>();
    if (oj.contains("stall_limit")) a.stall_limit = oj.at("stall_limit").get<int>();
    detail::require(a.restarts >= 1 && a.max_iters >= 1 && a.step > 0 && a.fd_step > 0,
                    "config.optimizer: ascent parameters must be positive");
    GdaConfig& g = cfg.gda;
    if (oj.contains("outer_max_iters")) g.max_outer = oj.at("outer_max_iters").get<int>();
    if (oj.contains("outer_step")) g.step = oj.at("outer_step").get<double>();
    if (oj.contains("outer_fd_step")) g.fd_step = oj.at("outer_fd_step").get<double>();
    if (oj.contains("outer_tol")) g.tol = oj.at("outer_tol").get<double>();
    if (oj.contains("certify_restarts"))
      g.certify_restarts = oj.at("certify_restarts").get<int>();
    if (oj.contains("golden_tol")) cfg.golden_tol = oj.at("golden_tol").get<double>();
    detail::require(g.max_outer >= 1 && g.step > 0 && g.fd_step > 0 && g.certify_restarts >= 1 &&
                        cfg.golden_tol > 0,
                    "config.optimizer: outer parameters must be positive");
  }
  cfg.gda.inner = cfg.ascent;
  cfg.gda.seed = cfg.seed;
  if (j.contains("output")) {
    const Json& out = j.at("output");
    detail::expect_keys(out, {"csv", "json"}, "config.output");
    if (out.contains("csv")) cfg.out_csv = out.at("csv").get<std::string>();
    if (out.contains("json")) cfg.out_json = out.at("json").get<std::string>();
  }
  detail::require(cfg.noise.qubits.size() == 2,
                  "config: the CNOT experiment requires exactly 2 qubits");
  return cfg;
}

// ---------------------------------------------------------------------------
// files

/// Parses a JSON file; parse errors carry path, line and column.
inline Json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::invalid_argument("cannot open \"" + path.string() + "\" for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = e.byte == 0 ? 0 : std::min(e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw std::invalid_argument(path.string() + ":" + std::to_string(line) + ":" +
                                std::to_string(col) + ": " + e.what());
  }
}

/// Writes via a temp file in the same directory plus rename, so a failed
/// write never leaves a partial file at the target path.
inline void atomic_write_file(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open \"" + tmp.string() + "\" for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("failed while writing \"" + tmp.string() + "\"");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ec2;
    std::filesystem::remove(tmp, ec2);
    throw std::runtime_error("failed to move \"" + tmp.string() + "\" into place: " +
                             ec.message());
  }
}

inline void save_channel(const std::filesystem::path& path, const AnyChannel& ch) {
  atomic_write_file(path, channel_to_json(ch).dump(2) + "\n");
}

inline AnyChannel load_channel(const std::filesystem::path& path) {
  return channel_from_json(parse_json_file(path), path.string());
}

}  // namespace pqc

#endif  // PQC_SERIALIZE_HPP
