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

#include <sys/wait.h>

#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pqc/runner.hpp"
#include "test_support.hpp"

using namespace pqc;
namespace fs = std::filesystem;
using Catch::Matchers::WithinAbs;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "pqc_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void spit(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  REQUIRE(out.good());
  out << content;
}

struct CliRun {
  int status = -1;
  std::string output;
};

CliRun run_cli(const std::string& args) {
  const fs::path dir = temp_dir();
  static int counter = 0;
  const fs::path log = dir / ("cli_log_" + std::to_string(counter++) + ".txt");
  const std::string cmd = "cd '" + dir.string() + "' && '" + PQC_CLI_PATH + "' " + args +
                          " > '" + log.string() + "' 2>&1";
  const int rc = std::system(cmd.c_str());
  CliRun res;
  if (rc != -1 && WIFEXITED(rc)) res.status = WEXITSTATUS(rc);
  res.output = slurp(log);
  return res;
}

// a small, fast experiment config; absolute output paths
std::string small_config(const fs::path& dir, const std::string& tag, bool noiseless,
                         int grid_points, std::uint64_t seed) {
  const std::string noise =
      noiseless
          ? R"({"qubits": [{"depolarizing": 0, "amplitude_damping": 0},
                           {"depolarizing": 0, "amplitude_damping": 0}]})"
          : R"({"qubits": [{"depolarizing": 0.01, "amplitude_damping": 0.05},
                           {"depolarizing": 0.03, "amplitude_damping": 0.3}]})";
  std::ostringstream cfg;
  cfg << "{\n"
      << "  \"noise\": " << noise << ",\n"
      << "  \"extensions\": [1, 2],\n"
      << "  \"grid_points\": " << grid_points << ",\n"
      << "  \"mean_samples\": 50,\n"
      << "  \"optimizer\": {\"restarts\": 4, \"certify_restarts\": 4, \"golden_tol\": 0.02},\n"
      << "  \"output\": {\"csv\": \"" << (dir / (tag + ".csv")).string() << "\",\n"
      << "              \"json\": \"" << (dir / (tag + ".json")).string() << "\"},\n"
      << "  \"seed\": " << seed << "\n"
      << "}\n";
  const fs::path path = dir / (tag + "_config.json");
  spit(path, cfg.str());
  return path.string();
}

}  // namespace

TEST_CASE("run_validate accepts the shipped experiment config") {
  std::ostringstream out;
  const int status = run_validate(fs::path(PQC_SOURCE_DIR) / "configs" / "table1.json", out);
  CHECK(status == kExitOk);
  CHECK(out.str().find("OK") != std::string::npos);
  CHECK(out.str().find("FAIL") == std::string::npos);
}

TEST_CASE("run_validate separates usage errors from domain failures") {
  const fs::path dir = temp_dir();

  // out-of-range noise is a config (usage) error: invalid_argument
  const fs::path bad_cfg = dir / "gamma_too_big.json";
  spit(bad_cfg, R"({"noise": {"qubits": [
      {"depolarizing": 0.01, "amplitude_damping": 0.05},
      {"depolarizing": 0.03, "amplitude_damping": 1.5}]}})");
  std::ostringstream out;
  CHECK_THROWS_AS(run_validate(bad_cfg, out), std::invalid_argument);

  // a well-formed channel file that is not trace preserving: domain failure
  const fs::path bad_channel = dir / "non_tp.json";
  Json j = channel_to_json(make_kraus({0.5 * Matrix::Identity(2, 2)}));
  spit(bad_channel, j.dump(2) + "\n");
  std::ostringstream out2;
  CHECK(run_validate(bad_channel, out2) == kExitDomain);
  CHECK(out2.str().find("FAIL") != std::string::npos);

  // a valid serialized channel passes
  const fs::path good_channel = dir / "good_channel.json";
  save_channel(good_channel, AnyChannel{amplitude_damping_kraus(0.3)});
  std::ostringstream out3;
  CHECK(run_validate(good_channel, out3) == kExitOk);
}

TEST_CASE("run_sweep writes the CSV contract") {
  const fs::path dir = temp_dir();
  const std::string cfg = small_config(dir, "sweep_noiseless", true, 5, 3);
  std::ostringstream out;
  REQUIRE(run_sweep(cfg, std::nullopt, std::nullopt, out) == kExitOk);

  const std::string csv = slurp(dir / "sweep_noiseless.csv");
  std::istringstream lines(csv);
  std::string header;
  REQUIRE(std::getline(lines, header));
  CHECK(header ==
        "w1,worst_cost,mean_cost,cost_state_1,cost_state_2,cost_state_3,cost_state_4,"
        "cost_state_5,cost_state_6,cost_state_7,cost_state_8");

  int rows = 0;
  std::string line;
  while (std::getline(lines, line)) {
    REQUIRE_FALSE(line.empty());
    std::istringstream fields(line);
    std::string field;
    int nfields = 0;
    while (std::getline(fields, field, ',')) {
      const double v = std::stod(field);  // throws on anything non-numeric
      if (nfields >= 1) CHECK(v <= 1e-8);  // noiseless: every cost vanishes
      if (nfields >= 1) CHECK(v >= -1e-15);
      ++nfields;
    }
    CHECK(nfields == 11);
    ++rows;
  }
  CHECK(rows == 5);

  // summary JSON mirrors the curve
  const Json summary = parse_json_file(dir / "sweep_noiseless.json");
  CHECK(summary.at("grid_points") == 5);
  CHECK(summary.at("seed") == 3);
  CHECK(summary.at("records").size() == 5);
  CHECK(summary.at("per_extension").size() == 2);
  CHECK(summary.at("worst_cost_at_argmin").get<double>() <= 1e-8);
}

TEST_CASE("run_sweep is deterministic: byte-identical outputs") {
  const fs::path dir = temp_dir();
  const std::string cfg = small_config(dir, "det_a", false, 4, 11);
  std::ostringstream out;
  REQUIRE(run_sweep(cfg, std::nullopt, std::string((dir / "det_run1.csv").string()), out) ==
          kExitOk);
  REQUIRE(run_sweep(cfg, std::nullopt, std::string((dir / "det_run2.csv").string()), out) ==
          kExitOk);
  CHECK(slurp(dir / "det_run1.csv") == slurp(dir / "det_run2.csv"));

  // the sweep honors the grid override
  REQUIRE(run_sweep(cfg, 3, std::string((dir / "det_run3.csv").string()), out) == kExitOk);
  const std::string csv = slurp(dir / "det_run3.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 rows
}

TEST_CASE("run_sweep worst-case column dominates the mean column") {
  const fs::path dir = temp_dir();
  const std::string cfg = small_config(dir, "dom", false, 4, 5);
  std::ostringstream out;
  REQUIRE(run_sweep(cfg, std::nullopt, std::nullopt, out) == kExitOk);
  const Json summary = parse_json_file(dir / "dom.json");
  for (const Json& rec : summary.at("records")) {
    const double worst = rec.at("worst_cost").get<double>();
    const double mean = rec.at("mean_cost").get<double>();
    CHECK(worst >= mean);
    CHECK(worst > 0.3);  // Table-1 noise keeps the curve well off zero
  }
}

TEST_CASE("run_optimize on the noiseless family certifies zero") {
  const fs::path dir = temp_dir();
  const std::string cfg = small_config(dir, "opt_noiseless", true, 5, 7);
  std::ostringstream out;
  REQUIRE(run_optimize(cfg, std::string((dir / "opt_out.json").string()), out) == kExitOk);

  const Json res = parse_json_file(dir / "opt_out.json");
  const double w1 = res.at("w1_star").get<double>();
  CHECK(w1 >= 0.0);
  CHECK(w1 <= 1.0);
  CHECK(res.at("golden_section_value").get<double>() <= 1e-8);
  CHECK(res.at("certified").at("value").get<double>() <= 1e-8);
  REQUIRE(res.at("per_extension").size() == 2);
  for (const Json& e : res.at("per_extension")) CHECK(e.at("value").get<double>() <= 1e-8);
}

TEST_CASE("run_distance: identical, orthogonal and noisy channel pairs") {
  const fs::path dir = temp_dir();
  const fs::path id_file = dir / "id.json";
  const fs::path x_file = dir / "x.json";
  save_channel(id_file, AnyChannel{identity_channel(2)});
  save_channel(x_file, AnyChannel{unitary_channel(gates::pauli_x())});

  AscentConfig cfg;
  std::ostringstream out;

  // a vs a: everything is zero
  const fs::path zero_json = dir / "dist_zero.json";
  REQUIRE(run_distance(id_file, id_file, 0, std::string(zero_json.string()), cfg, out) ==
          kExitOk);
  const Json zero = parse_json_file(zero_json);
  CHECK(zero.at("diamond_lower_bound").get<double>() < 1e-10);

  // identity vs X: unit distance already without extension
  const fs::path ix_json = dir / "dist_ix.json";
  REQUIRE(run_distance(id_file, x_file, 0, std::string(ix_json.string()), cfg, out) == kExitOk);
  const Json ix = parse_json_file(ix_json);
  CHECK_THAT(ix.at("diamond_lower_bound").get<double>(), WithinAbs(1.0, 1e-9));
  // both extensions saturate at 1, so the argmax index is a degenerate tie
  CHECK(ix.at("per_m").size() == 2);
  CHECK_THAT(ix.at("per_m")[0].at("value").get<double>(), WithinAbs(1.0, 1e-9));
  CHECK((ix.at("argmax_m") == 1 || ix.at("argmax_m") == 2));

  // the two noisy CNOT variants: strictly positive, matches the anchor
  const fs::path e1_file = dir / "e1.json";
  const fs::path e2_file = dir / "e2.json";
  save_channel(e1_file,
               AnyChannel{build_cnot_variant(GateVariant::kDirect, NoiseSpec::table1())});
  save_channel(e2_file, AnyChannel{build_cnot_variant(GateVariant::kHadamardConjugated,
                                                      NoiseSpec::table1())});
  const fs::path ee_json = dir / "dist_ee.json";
  REQUIRE(run_distance(e1_file, e2_file, 1, std::string(ee_json.string()), cfg, out) == kExitOk);
  const Json ee = parse_json_file(ee_json);
  const double val = ee.at("per_m")[0].at("value").get<double>();
  CHECK_THAT(val, WithinAbs(0.4531709059, 2e-5));

  // the ascent value dominates a brute-force sampled lower bound
  const KrausChannel e1 = as_kraus(load_channel(e1_file));
  const KrausChannel e2 = as_kraus(load_channel(e2_file));
  double brute = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const PureState psi = haar_random_pure_state(4, derive_seed(4711, i));
    brute = std::max(brute, cost_at_state(e1, e2, psi, ExtensionIndex{1}));
  }
  CHECK(val >= brute - 1e-4);
}

TEST_CASE("run_distance rejects incompatible and invalid inputs") {
  const fs::path dir = temp_dir();
  const fs::path small = dir / "dim2.json";
  const fs::path big = dir / "dim4.json";
  save_channel(small, AnyChannel{identity_channel(2)});
  save_channel(big, AnyChannel{identity_channel(4)});
  AscentConfig cfg;
  std::ostringstream out;
  CHECK_THROWS_AS(run_distance(small, big, 0, std::nullopt, cfg, out), std::invalid_argument);

  const fs::path non_tp = dir / "non_tp_dist.json";
  spit(non_tp, channel_to_json(make_kraus({0.5 * Matrix::Identity(2, 2)})).dump() + "\n");
  std::ostringstream out2;
  CHECK(run_distance(non_tp, small, 0, std::nullopt, cfg, out2) == kExitDomain);
  CHECK(out2.str().find("FAIL") != std::string::npos);
}

TEST_CASE("cli binary: exit codes follow the contract") {
  CHECK(run_cli("--help").status == 0);
  CHECK(run_cli("").status == kExitUsage);
  CHECK(run_cli("frobnicate").status == kExitUsage);
  CHECK(run_cli("validate").status == kExitUsage);  // missing required argument
  CHECK(run_cli("validate does_not_exist.json").status == kExitUsage);

  const std::string table1 =
      (fs::path(PQC_SOURCE_DIR) / "configs" / "table1.json").string();
  CHECK(run_cli("validate '" + table1 + "'").status == 0);

  const fs::path dir = temp_dir();
  const fs::path bad_cfg = dir / "cli_gamma_15.json";
  spit(bad_cfg, R"({"noise": {"qubits": [
      {"depolarizing": 0.01, "amplitude_damping": 0.05},
      {"depolarizing": 0.03, "amplitude_damping": 1.5}]}})");
  CHECK(run_cli("validate '" + bad_cfg.string() + "'").status == kExitUsage);

  const fs::path non_tp = dir / "cli_non_tp.json";
  spit(non_tp, channel_to_json(make_kraus({0.5 * Matrix::Identity(2, 2)})).dump() + "\n");
  CHECK(run_cli("validate '" + non_tp.string() + "'").status == kExitDomain);

  const fs::path small = dir / "cli_dim2.json";
  const fs::path big = dir / "cli_dim4.json";
  save_channel(small, AnyChannel{identity_channel(2)});
  save_channel(big, AnyChannel{identity_channel(4)});
  CHECK(run_cli("distance '" + small.string() + "' '" + big.string() + "'").status ==
        kExitUsage);
}

TEST_CASE("cli binary: sweep runs end to end") {
  const fs::path dir = temp_dir();
  const std::string cfg = small_config(dir, "cli_sweep", true, 3, 2);
  const CliRun run = run_cli("sweep '" + cfg + "'");
  CHECK(run.status == 0);
  CHECK(run.output.find("argmin") != std::string::npos);
  CHECK(fs::exists(dir / "cli_sweep.csv"));
  CHECK(fs::exists(dir / "cli_sweep.json"));
}
