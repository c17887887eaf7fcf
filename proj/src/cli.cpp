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

#include "blockscale/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "blockscale/concurrence.hpp"
#include "blockscale/errors.hpp"
#include "blockscale/evolve_ed.hpp"
#include "blockscale/parallel.hpp"

namespace blockscale {

namespace fs = std::filesystem;

namespace {

std::string short_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : format_double(v);
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigurationError("cannot write " + path.string());
  os << text;
  if (!os) throw ConfigurationError("write failed for " + path.string());
}

std::string family_tag(const ScalableFamily& f) {
  return to_string(f.case_id) + "_" + std::to_string(f.n_sites);
}

const ScalableFamily& require_family(const RunConfig& cfg, ScalableFamily& storage) {
  if (!cfg.case_id || !cfg.n_sites) throw ConfigurationError("--case and --n are required");
  storage = load_family(*cfg.case_id, *cfg.n_sites);
  return storage;
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json family_json(const ScalableFamily& f) {
  nlohmann::json j{{"case", to_string(f.case_id)},
                   {"n_sites", f.n_sites},
                   {"lambda0", f.lambda0},
                   {"lambda1", f.lambda1},
                   {"lambda2", f.lambda2},
                   {"transfer_time", f.transfer_time},
                   {"b_field", f.b_field},
                   {"coupling", 1.0},
                   {"c1_max", f.c1_max},
                   {"c2_max", f.c2_max},
                   {"printed_c1_max", optional_json(f.printed_c1_max)},
                   {"printed_c2_max", optional_json(f.printed_c2_max)}};
  if (f.case_id == CaseId::I) {
    j["critical_c2_sender"] = critical_value(f, Side::sender);
    j["critical_c2_receiver"] = critical_value(f, Side::receiver);
  }
  return j;
}

int default_family_grid(const ScalableFamily& f) { return f.uses_c1() && f.uses_c2() ? 21 : 101; }
int default_perturb_grid(const ScalableFamily& f) { return f.uses_c1() && f.uses_c2() ? 11 : 21; }

void write_family_outputs(const ScalableFamily& f, int resolution, OutputFormat format, const fs::path& dir,
                          std::ostream& log) {
  const SweepResult sweep = grid_sweep(f, resolution);
  const std::string stem = "family_" + family_tag(f);
  nlohmann::json meta = family_json(f);
  meta["resolution"] = resolution;
  meta["points"] = sweep.points.size();
  if (format == OutputFormat::csv) {
    std::ostringstream os;
    os << "c1,c2,C_S,C_R\n";
    for (const auto& p : sweep.points) {
      os << format_double(p.c1) << ',' << format_double(p.c2) << ',' << format_double(p.concurrence_sender)
         << ',' << format_double(p.concurrence_receiver) << '\n';
    }
    write_file(dir / (stem + ".csv"), os.str());
    meta["columns"] = {"c1", "c2", "C_S", "C_R"};
    write_file(dir / (stem + ".json"), meta.dump(2) + "\n");
  } else {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& p : sweep.points) {
      rows.push_back({{"c1", p.c1}, {"c2", p.c2}, {"C_S", p.concurrence_sender}, {"C_R", p.concurrence_receiver}});
    }
    meta["rows"] = std::move(rows);
    write_file(dir / (stem + ".json"), meta.dump(2) + "\n");
  }
  log << "family " << family_tag(f) << ": " << sweep.points.size() << " points written to " << dir.string()
      << "\n";
}

bool write_perturb_outputs(const RunConfig& cfg, const ScalableFamily& f, const fs::path& dir,
                           std::ostream& log) {
  const TransferSupermatrix t = compute_transfer(f.chain(), cfg.backend);
  MCStudyConfig mc;
  mc.family = f;
  mc.epsilons = cfg.epsilons.empty() ? default_epsilons(f.case_id) : cfg.epsilons;
  mc.n_samples = cfg.n_samples > 0 ? cfg.n_samples : default_sample_count(f.case_id);
  mc.resolution = cfg.resolution > 0 ? cfg.resolution : default_perturb_grid(f);
  mc.seed = cfg.seed;
  mc.mode = cfg.mode;
  mc.max_rejection_fraction = cfg.max_rejection_fraction;
  mc.workers = cfg.threads;
  const MCResult res = mc_mean_concurrence(mc, t);

  nlohmann::json grids = nlohmann::json::array();
  bool any_abort = false;
  for (const MCGrid& g : res.grids) {
    const std::string stem = "eps_" + short_number(g.epsilon);
    std::uint64_t rejections = 0, aborted = 0;
    for (const auto& p : g.points) {
      rejections += p.rejections;
      aborted += p.aborted ? 1 : 0;
    }
    std::string file;
    if (cfg.format == OutputFormat::csv) {
      std::ostringstream os;
      os << "c1,c2,C_S_mean,C_S_stderr,C_R_mean,C_R_stderr,rejections\n";
      for (const auto& p : g.points) {
        os << format_double(p.c1) << ',' << format_double(p.c2) << ',' << format_double(p.sender_mean) << ','
           << format_double(p.sender_stderr) << ',' << format_double(p.receiver_mean) << ','
           << format_double(p.receiver_stderr) << ',' << p.rejections << '\n';
      }
      file = stem + ".csv";
      write_file(dir / file, os.str());
    } else {
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& p : g.points) {
        rows.push_back({{"c1", p.c1}, {"c2", p.c2}, {"C_S_mean", p.sender_mean},
                        {"C_S_stderr", p.sender_stderr}, {"C_R_mean", p.receiver_mean},
                        {"C_R_stderr", p.receiver_stderr}, {"rejections", p.rejections},
                        {"accepted", p.accepted}, {"aborted", p.aborted}});
      }
      file = stem + ".json";
      write_file(dir / file, nlohmann::json{{"epsilon", g.epsilon}, {"rows", std::move(rows)}}.dump(2) + "\n");
    }
    for (const auto& d : g.diagnostics) log << "warning: " << d << "\n";
    any_abort = any_abort || aborted > 0;
    grids.push_back({{"epsilon", g.epsilon},
                     {"file", file},
                     {"rejections", rejections},
                     {"aborted_points", aborted},
                     {"diagnostics", g.diagnostics}});
  }
  nlohmann::json manifest{{"family", family_json(f)},
                          {"backend", t.backend},
                          {"seed", cfg.seed},
                          {"n_samples", mc.n_samples},
                          {"resolution", mc.resolution},
                          {"mode", to_string(mc.mode)},
                          {"max_rejection_fraction", mc.max_rejection_fraction},
                          {"epsilons", mc.epsilons},
                          {"grids", std::move(grids)},
                          {"wall_seconds", res.wall_seconds}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  log << "perturb " << family_tag(f) << ": " << res.grids.size() << " grids in " << res.wall_seconds
      << " s, written to " << dir.string() << "\n";
  return !any_abort;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunConfig apply_config_json(const nlohmann::json& j, RunConfig c) {
  if (!j.is_object()) throw ConfigurationError("config file must hold a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "command") c.subcommand = v.get<std::string>();
      else if (key == "case") c.case_id = parse_case(v.is_number() ? std::to_string(v.get<int>()) : v.get<std::string>());
      else if (key == "n") c.n_sites = v.get<int>();
      else if (key == "backend") c.backend = parse_backend(v.get<std::string>());
      else if (key == "grid") c.resolution = v.get<int>();
      else if (key == "eps") c.epsilons = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
      else if (key == "samples") c.n_samples = v.get<int>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "format") {
        const auto s = v.get<std::string>();
        if (s != "csv" && s != "json") throw ConfigurationError("format must be csv or json");
        c.format = s == "csv" ? OutputFormat::csv : OutputFormat::json;
      } else if (key == "mode") c.mode = parse_sampling_mode(v.get<std::string>());
      else if (key == "max-rejection") c.max_rejection_fraction = v.get<double>();
      else if (key == "t") c.transfer_time = v.get<double>();
      else if (key == "b") {
        if (v.is_string() && v.get<std::string>() != "inf") throw ConfigurationError("b must be a number or \"inf\"");
        c.b_field = v.is_string() ? std::numeric_limits<double>::infinity() : v.get<double>();
      }
      else if (key == "threads") c.threads = v.get<int>();
      else if (key == "paper-figures") c.paper_figures = v.get<bool>();
      else throw ConfigurationError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("bad config value: ") + e.what());
  }
  return c;
}

int cmd_family(const RunConfig& cfg, std::ostream& log) {
  ScalableFamily f;
  require_family(cfg, f);
  const int res = cfg.resolution > 0 ? cfg.resolution : default_family_grid(f);
  write_family_outputs(f, res, cfg.format, cfg.out, log);
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& log) {
  constexpr double kLambdaTol = 1e-3;
  constexpr double kResidualTol = 2e-3;
  std::vector<ScalableFamily> selected;
  for (const auto& f : all_families()) {
    if (cfg.case_id && f.case_id != *cfg.case_id) continue;
    if (cfg.n_sites && f.n_sites != *cfg.n_sites) continue;
    selected.push_back(f);
  }
  if (selected.empty()) {
    if (cfg.case_id && cfg.n_sites) load_family(*cfg.case_id, *cfg.n_sites);  // throws LookupError
    throw LookupError("no family matches the selection");
  }
  if (cfg.backend == Backend::ed) {
    for (const auto& f : selected) {
      if (f.n_sites > kEdSiteLimit) {
        throw CapacityError("exact diagonalization is limited to " + std::to_string(kEdSiteLimit) +
                            " sites; use --backend ff for N=" + std::to_string(f.n_sites));
      }
    }
  }
  nlohmann::json reports = nlohmann::json::array();
  bool all_pass = true;
  for (const auto& f : selected) {
    const ScalingReport rep = fit_block_scaling(f, compute_transfer(f.chain(), cfg.backend));
    const bool pass = rep.within(kLambdaTol, kResidualTol);
    all_pass = all_pass && pass;
    nlohmann::json j = rep;
    j["pass"] = pass;
    reports.push_back(std::move(j));
    for (const auto& b : rep.blocks) {
      log << family_tag(f) << " [" << rep.backend << "] order " << b.order << ": lambda_hat="
          << format_double(b.lambda_hat) << " expected=" << b.expected << " diff=" << b.lambda_hat - b.expected
          << " residual=" << b.residual << "\n";
    }
    log << family_tag(f) << (pass ? " PASS" : " FAIL") << "\n";
  }
  std::string name = "verify";
  if (cfg.case_id) name += "_" + to_string(*cfg.case_id);
  if (cfg.n_sites) name += "_" + std::to_string(*cfg.n_sites);
  const nlohmann::json doc{{"lambda_tolerance", kLambdaTol},
                           {"residual_tolerance", kResidualTol},
                           {"pass", all_pass},
                           {"reports", std::move(reports)}};
  write_file(fs::path(cfg.out) / (name + ".json"), doc.dump(2) + "\n");
  return all_pass ? kExitOk : kExitTolerance;
}

int cmd_transfer(const RunConfig& cfg, std::ostream& log) {
  ChainSpec spec;
  if (cfg.case_id) {
    if (!cfg.n_sites) throw ConfigurationError("--n is required");
    spec = load_family(*cfg.case_id, *cfg.n_sites).chain();
  } else {
    if (!cfg.n_sites || !cfg.transfer_time || !cfg.b_field) {
      throw ConfigurationError("transfer needs --n with --case, or --n, --t and --b");
    }
    spec.n_sites = *cfg.n_sites;
  }
  if (cfg.transfer_time) spec.transfer_time = *cfg.transfer_time;
  if (cfg.b_field) spec.b_field = *cfg.b_field;
  spec.validate();
  const TransferSupermatrix t = compute_transfer(spec, cfg.backend);
  const InvariantReport inv = check_invariants(t);
  const nlohmann::json inv_json{{"trace_defect", inv.trace_defect},
                                {"hermiticity_defect", inv.hermiticity_defect},
                                {"order_leakage", inv.order_leakage},
                                {"min_image_eigenvalue", inv.min_image_eigenvalue},
                                {"ok", inv.ok()}};
  const std::string stem = "transfer_N" + std::to_string(spec.n_sites) + "_" + t.backend;
  if (cfg.format == OutputFormat::json) {
    nlohmann::json j = t;
    j["invariants"] = inv_json;
    write_file(fs::path(cfg.out) / (stem + ".json"), j.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "n,m,i,j,re,im\n";
    for (int n = 0; n < 4; ++n)
      for (int m = 0; m < 4; ++m)
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) {
            const Complex z = t(n, m, i, j);
            os << n << ',' << m << ',' << i << ',' << j << ',' << format_double(z.real()) << ','
               << format_double(z.imag()) << '\n';
          }
    write_file(fs::path(cfg.out) / (stem + ".csv"), os.str());
    nlohmann::json meta{{"n_sites", spec.n_sites},    {"coupling", spec.coupling},
                        {"transfer_time", spec.transfer_time}, {"backend", t.backend},
                        {"invariants", inv_json}};
    meta["b_field"] = std::isinf(spec.b_field) ? nlohmann::json("inf") : nlohmann::json(spec.b_field);
    write_file(fs::path(cfg.out) / (stem + ".meta.json"), meta.dump(2) + "\n");
  }
  log << stem << ": trace defect " << inv.trace_defect << ", hermiticity defect " << inv.hermiticity_defect
      << ", order leakage " << inv.order_leakage << ", min image eigenvalue " << inv.min_image_eigenvalue
      << "\n";
  return inv.ok() ? kExitOk : kExitTolerance;
}

int cmd_perturb(const RunConfig& cfg, std::ostream& log) {
  ScalableFamily f;
  require_family(cfg, f);
  const fs::path dir = fs::path(cfg.out) / ("perturb_" + family_tag(f));
  write_perturb_outputs(cfg, f, dir, log);
  return kExitOk;
}

int cmd_paper_figures(const RunConfig& cfg, std::ostream& log) {
  const CaseId cases[] = {CaseId::I, CaseId::II, CaseId::III, CaseId::IV};
  for (int k = 0; k < 4; ++k) {
    const fs::path sweep_dir = fs::path(cfg.out) / ("fig" + std::to_string(k + 1));
    const fs::path mc_dir = fs::path(cfg.out) / ("fig" + std::to_string(k + 5));
    for (int n : {6, 42}) {
      const ScalableFamily f = load_family(cases[k], n);
      write_family_outputs(f, cfg.resolution > 0 ? cfg.resolution : default_family_grid(f), cfg.format,
                           sweep_dir, log);
      write_perturb_outputs(cfg, f, mc_dir / ("N" + std::to_string(n)), log);
    }
  }
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"blockscale: entanglement of block-scaled two-qubit states transferred along XX spin chains"};
  app.require_subcommand(0, 1);

  std::string config_path, case_text, backend_text = "auto", out_dir = ".", format_text = "csv",
                                      mode_text = "pointwise";
  int n_sites = 0, grid = 0, samples = 0, threads = 0;
  std::uint64_t seed = 1;
  std::vector<double> eps;
  double max_rejection = kDefaultMaxRejection, t_value = 0.0, b_value = 0.0;
  bool paper = false;

  std::map<std::string, CLI::Option*> opt;
  opt["config"] = app.add_option("--config", config_path, "JSON file whose keys mirror the long flags");
  opt["case"] = app.add_option("--case", case_text, "Case I, II, III or IV");
  opt["n"] = app.add_option("--n", n_sites, "Chain length");
  opt["backend"] = app.add_option("--backend", backend_text, "ed, ff or auto");
  opt["grid"] = app.add_option("--grid", grid, "Grid resolution (>= 2)");
  opt["eps"] = app.add_option("--eps", eps, "Perturbation amplitudes")->delimiter(',');
  opt["samples"] = app.add_option("--samples", samples, "Accepted realizations per grid point");
  opt["seed"] = app.add_option("--seed", seed, "Master RNG seed");
  opt["out"] = app.add_option("--out", out_dir, "Output directory");
  opt["format"] = app.add_option("--format", format_text, "csv or json");
  opt["mode"] = app.add_option("--mode", mode_text, "pointwise or shared perturbations");
  opt["max-rejection"] = app.add_option("--max-rejection", max_rejection, "Rejection fraction that aborts a point");
  opt["t"] = app.add_option("--t", t_value, "Transfer time override");
  opt["b"] = app.add_option("--b", b_value, "Field-to-temperature ratio override");
  opt["threads"] = app.add_option("--threads", threads, "Worker threads (default: BLOCKSCALE_THREADS)");
  opt["paper-figures"] = app.add_flag("--paper-figures", paper, "Write sweeps and perturbation grids for figures 1-8");

  const char* names[][2] = {{"family", "Concurrence over the admissible domain"},
                            {"verify", "Fit block-scaling factors by chain evolution"},
                            {"transfer", "Compute the transfer supermatrix"},
                            {"perturb", "Monte-Carlo perturbation study"}};
  for (const auto& nm : names) app.add_subcommand(nm[0], nm[1])->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig cfg;
    cfg.threads = 0;
    if (opt["config"]->count()) {
      std::ifstream is(config_path);
      if (!is) throw ConfigurationError("cannot open config file " + config_path);
      nlohmann::json j;
      try {
        is >> j;
      } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("config file is not valid JSON: ") + e.what());
      }
      cfg = apply_config_json(j, cfg);
    }
    for (auto* sc : app.get_subcommands()) cfg.subcommand = sc->get_name();
    auto given = [&](const char* k) { return opt[k]->count() > 0; };
    if (given("case")) cfg.case_id = parse_case(case_text);
    if (given("n")) cfg.n_sites = n_sites;
    if (given("backend")) cfg.backend = parse_backend(backend_text);
    if (given("grid")) cfg.resolution = grid;
    if (given("eps")) cfg.epsilons = eps;
    if (given("samples")) cfg.n_samples = samples;
    if (given("seed")) cfg.seed = seed;
    if (given("out")) cfg.out = out_dir;
    if (given("format")) {
      if (format_text != "csv" && format_text != "json") throw ConfigurationError("--format must be csv or json");
      cfg.format = format_text == "csv" ? OutputFormat::csv : OutputFormat::json;
    }
    if (given("mode")) cfg.mode = parse_sampling_mode(mode_text);
    if (given("max-rejection")) cfg.max_rejection_fraction = max_rejection;
    if (given("t")) cfg.transfer_time = t_value;
    if (given("b")) cfg.b_field = b_value;
    if (given("threads")) cfg.threads = threads;
    if (given("paper-figures")) cfg.paper_figures = paper;
    if (cfg.resolution != 0 && cfg.resolution < 2) throw ConfigurationError("--grid must be at least 2");
    if (cfg.n_samples < 0) throw ConfigurationError("--samples must be positive");

    set_default_worker_count(cfg.threads);
    if (cfg.paper_figures) return cmd_paper_figures(cfg, out);
    if (cfg.subcommand == "family") return cmd_family(cfg, out);
    if (cfg.subcommand == "verify") return cmd_verify(cfg, out);
    if (cfg.subcommand == "transfer") return cmd_transfer(cfg, out);
    if (cfg.subcommand == "perturb") return cmd_perturb(cfg, out);
    err << app.help();
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << " (minimum eigenvalue " << e.min_eigenvalue() << ")\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace blockscale
