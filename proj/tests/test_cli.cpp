// Copyright 2026 The blockscale Authors
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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "blockscale/cli.hpp"
#include "blockscale/family.hpp"
#include "oracles.hpp"

using namespace blockscale;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "blockscale");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("blockscale_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::string* header = nullptr) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("family sweep over a fine grid") {
  const fs::path dir = scratch("family");
  const Run r = run({"family", "--case", "I", "--n", "6", "--grid", "200", "--out", dir.string()});
  REQUIRE(r.code == kExitOk);
  std::string header;
  const auto rows = read_csv(dir / "family_I_6.csv", &header);
  CHECK(header == "c1,c2,C_S,C_R");
  REQUIRE(rows.size() == 200);
  CHECK(rows.front()[1] == 0.0);
  CHECK(rows.back()[1] == load_family(CaseId::I, 6).c2_max);
  const auto meta = nlohmann::json::parse(slurp(dir / "family_I_6.json"));
  CHECK(meta.at("resolution") == 200);
  CHECK(meta.contains("critical_c2_sender"));
}

TEST_CASE("family sweep on the coarsest grid") {
  const fs::path dir = scratch("family2");
  REQUIRE(run({"family", "--case", "III", "--n", "42", "--grid", "2", "--out", dir.string()}).code == kExitOk);
  CHECK(read_csv(dir / "family_III_42.csv").size() == 3);
  CHECK(run({"family", "--case", "III", "--n", "42", "--grid", "1", "--out", dir.string()}).code == kExitUsage);
}

TEST_CASE("family sweep of a separable receiver") {
  const fs::path dir = scratch("family4");
  REQUIRE(run({"family", "--case", "IV", "--n", "42", "--out", dir.string()}).code == kExitOk);
  const auto rows = read_csv(dir / "family_IV_42.csv");
  CHECK(rows.size() == 1 + 21 * 20);
  for (const auto& row : rows) CHECK(row[3] == 0.0);
}

TEST_CASE("family JSON output") {
  const fs::path dir = scratch("familyjson");
  REQUIRE(run({"family", "--case", "2", "--n", "6", "--grid", "5", "--format", "json", "--out", dir.string()})
              .code == kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir / "family_II_6.json"));
  CHECK(j.at("rows").size() == 5);
}

TEST_CASE("usage errors") {
  CHECK(run({"family", "--case", "V", "--n", "6"}).code == kExitUsage);
  CHECK(run({"family", "--case", "I"}).code == kExitUsage);
  CHECK(run({"family", "--case", "I", "--n", "8"}).code == kExitUsage);
  CHECK(run({"family", "--bogus"}).code == kExitUsage);
  CHECK(run({"perturb", "--case", "I", "--n", "6", "--mode", "sometimes"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("verify exit codes") {
  const fs::path dir = scratch("verify");
  const Run ok = run({"verify", "--case", "II", "--n", "6", "--out", dir.string()});
  CHECK(ok.code == kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir / "verify_II_6.json"));
  CHECK(j.at("pass") == true);
  const Run refused = run({"verify", "--case", "I", "--n", "42", "--backend", "ed", "--out", dir.string()});
  CHECK(refused.code == kExitUsage);
  CHECK(refused.err.find("--backend ff") != std::string::npos);
}

TEST_CASE("transfer at zero time maps everything to the background") {
  const fs::path dir = scratch("transfer0");
  REQUIRE(run({"transfer", "--n", "4", "--t", "0", "--b", "1.5", "--out", dir.string()}).code == kExitOk);
  std::string header;
  const auto rows = read_csv(dir / "transfer_N4_ed.csv", &header);
  CHECK(header == "n,m,i,j,re,im");
  REQUIRE(rows.size() == 256);
  const Matrix th = oracle::thermal(2, 1.5);
  for (const auto& row : rows) {
    const int n = static_cast<int>(row[0]), m = static_cast<int>(row[1]);
    const int i = static_cast<int>(row[2]), j = static_cast<int>(row[3]);
    const double want = i == j ? th(n, m).real() : 0.0;
    CHECK(std::abs(row[4] - want) < 1e-14);
    CHECK(row[5] == 0.0);
  }
  const auto meta = nlohmann::json::parse(slurp(dir / "transfer_N4_ed.meta.json"));
  CHECK(meta.at("invariants").at("ok") == true);
}

TEST_CASE("transfer backends agree through the command line") {
  const fs::path dir = scratch("transferff");
  REQUIRE(run({"transfer", "--case", "IV", "--n", "6", "--backend", "ed", "--out", dir.string()}).code == kExitOk);
  REQUIRE(run({"transfer", "--case", "IV", "--n", "6", "--backend", "ff", "--out", dir.string()}).code == kExitOk);
  const auto ed = read_csv(dir / "transfer_N6_ed.csv");
  const auto ff = read_csv(dir / "transfer_N6_ff.csv");
  REQUIRE(ed.size() == ff.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < ed.size(); ++k) {
    worst = std::max({worst, std::abs(ed[k][4] - ff[k][4]), std::abs(ed[k][5] - ff[k][5])});
  }
  CHECK(worst < 1e-8);
  CHECK(run({"transfer", "--n", "6", "--t", "1", "--b", "0", "--backend", "ff", "--out", dir.string()}).code ==
        kExitUsage);
  REQUIRE(run({"transfer", "--n", "5", "--t", "1", "--b", "2", "--format", "json", "--out", dir.string()}).code ==
          kExitOk);
  CHECK(nlohmann::json::parse(slurp(dir / "transfer_N5_ed.json")).at("invariants").at("ok") == true);
}

TEST_CASE("perturb at zero amplitude matches the family sweep") {
  const fs::path dir = scratch("perturb0");
  REQUIRE(run({"family", "--case", "III", "--n", "6", "--grid", "5", "--out", dir.string()}).code == kExitOk);
  REQUIRE(run({"perturb", "--case", "III", "--n", "6", "--grid", "5", "--eps", "0", "--samples", "10", "--out",
               dir.string()}).code == kExitOk);
  const auto fam = read_csv(dir / "family_III_6.csv");
  std::string header;
  const auto mc = read_csv(dir / "perturb_III_6" / "eps_0.csv", &header);
  CHECK(header == "c1,c2,C_S_mean,C_S_stderr,C_R_mean,C_R_stderr,rejections");
  REQUIRE(fam.size() == mc.size());
  for (std::size_t k = 0; k < fam.size(); ++k) {
    CHECK(mc[k][0] == fam[k][0]);
    CHECK(mc[k][1] == fam[k][1]);
    CHECK(mc[k][2] == fam[k][2]);
    CHECK(mc[k][4] == fam[k][3]);
  }
}

TEST_CASE("perturb reruns are byte identical") {
  const fs::path a = scratch("perturb_a"), b = scratch("perturb_b");
  const std::vector<std::string> common = {"perturb", "--case", "IV", "--n", "6", "--grid", "4", "--eps",
                                           "0.05,0.2", "--samples", "100", "--seed", "9"};
  auto with = [&](const fs::path& dir, const char* threads) {
    auto args = common;
    args.insert(args.end(), {"--out", dir.string(), "--threads", threads});
    return run(args).code;
  };
  REQUIRE(with(a, "1") == kExitOk);
  REQUIRE(with(b, "3") == kExitOk);
  for (const char* f : {"eps_0.05.csv", "eps_0.2.csv"}) {
    const std::string x = slurp(a / "perturb_IV_6" / f);
    CHECK_FALSE(x.empty());
    CHECK(x == slurp(b / "perturb_IV_6" / f));
  }
}

TEST_CASE("perturb manifest records the default amplitudes") {
  const fs::path dir = scratch("perturbdefault");
  REQUIRE(run({"perturb", "--case", "I", "--n", "6", "--grid", "3", "--samples", "5", "--out", dir.string()}).code ==
          kExitOk);
  const auto m = nlohmann::json::parse(slurp(dir / "perturb_I_6" / "manifest.json"));
  CHECK(m.at("epsilons") == nlohmann::json({0.0125, 0.025, 0.05, 0.1, 0.2, 1.0}));
  CHECK(m.at("mode") == "pointwise");
  CHECK(m.at("grids").size() == 6);
  CHECK(fs::exists(dir / "perturb_I_6" / "eps_0.0125.csv"));
}

TEST_CASE("config file supplies the flags") {
  const fs::path dir = scratch("config");
  const fs::path cfg = dir / "run.json";
  std::ofstream(cfg) << nlohmann::json{{"command", "family"}, {"case", "II"}, {"n", 42}, {"grid", 7},
                                       {"out", dir.string()}}.dump();
  REQUIRE(run({"--config", cfg.string()}).code == kExitOk);
  CHECK(read_csv(dir / "family_II_42.csv").size() == 7);
  // Command-line flags override the file.
  REQUIRE(run({"family", "--config", cfg.string(), "--grid", "9"}).code == kExitOk);
  CHECK(read_csv(dir / "family_II_42.csv").size() == 9);

  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << R"({"command": "family", "colour": "blue"})";
  CHECK(run({"--config", bad.string()}).code == kExitUsage);
  CHECK(run({"--config", (dir / "missing.json").string()}).code == kExitUsage);
}

TEST_CASE("config parsing") {
  RunConfig base;
  const RunConfig c = apply_config_json(
      nlohmann::json{{"case", 3}, {"eps", {0.1, 0.2}}, {"mode", "shared"}, {"b", "inf"}}, base);
  CHECK(*c.case_id == CaseId::III);
  CHECK(c.epsilons.size() == 2);
  CHECK(c.mode == SamplingMode::shared);
  CHECK(std::isinf(*c.b_field));
  CHECK(format_double(0.1) == "0.10000000000000001");
}

}  // TEST_SUITE
