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

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "blockscale/family.hpp"
#include "blockscale/perturb.hpp"
#include "blockscale/transfer.hpp"

namespace blockscale {

inline constexpr int kExitOk = 0;
inline constexpr int kExitTolerance = 1;
inline constexpr int kExitUsage = 2;

enum class OutputFormat { csv, json };

struct RunConfig {
  std::string subcommand;  // family, verify, transfer, perturb
  std::optional<CaseId> case_id;
  std::optional<int> n_sites;
  Backend backend = Backend::automatic;
  int resolution = 0;  // 0 selects a per-command default
  std::vector<double> epsilons;  // empty selects the per-case default set
  int n_samples = 0;             // 0 selects the per-case default
  std::uint64_t seed = 1;
  std::string out = ".";  // output directory
  OutputFormat format = OutputFormat::csv;
  SamplingMode mode = SamplingMode::pointwise;
  double max_rejection_fraction = kDefaultMaxRejection;
  std::optional<double> transfer_time;
  std::optional<double> b_field;
  int threads = 0;
  bool paper_figures = false;
};

// Keys mirror the long flag names: "command", "case", "n", "backend", "grid",
// "eps", "samples", "seed", "out", "format", "mode", "max-rejection", "t",
// "b", "threads", "paper-figures". Unknown keys are a ConfigurationError.
RunConfig apply_config_json(const nlohmann::json& j, RunConfig base);

std::string format_double(double v);  // %.17g

int cmd_family(const RunConfig& cfg, std::ostream& log);
int cmd_verify(const RunConfig& cfg, std::ostream& log);
int cmd_transfer(const RunConfig& cfg, std::ostream& log);
int cmd_perturb(const RunConfig& cfg, std::ostream& log);
int cmd_paper_figures(const RunConfig& cfg, std::ostream& log);

// Full front end; never throws, returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace blockscale
