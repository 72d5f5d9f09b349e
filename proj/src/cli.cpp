// Copyright 2026 The pintmg Authors
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

#include "pintmg/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "pintmg/analysis.hpp"
#include "pintmg/parallel.hpp"
#include "pintmg/solver.hpp"

namespace pintmg::cli {
namespace {

const std::set<std::string> kExperiments = {"nodes",    "specrad_smoother", "specrad_pfasst", "heatmap", "properties",
                                            "symbol",   "solve",            "mu_sweep",       "l_sweep"};

const std::set<std::string> kKnownKeys = {
    "experiment", "problem", "n",        "lambda_re", "lambda_im",   "nu",          "c",         "l",
    "m",          "dt",      "t_end",    "qdelta",    "omega",       "k_smooth",    "tol",       "max_iter",
    "mu_min",     "mu_max",  "mu_points", "grid_re",  "grid_im",     "grid_points", "x_samples", "out",
    "format",     "seed"};

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::kConfig, what); }

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  config_error("key '" + key + "': '" + value + "' is not a finite number");
}

long long to_integer(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  config_error("key '" + key + "': '" + value + "' is not an integer");
}

std::pair<double, double> to_range(const std::string& key, const std::string& value) {
  const auto comma = value.find(',');
  if (comma == std::string::npos) config_error("key '" + key + "' expects 'lo,hi'");
  const double lo = to_double(key, trim(value.substr(0, comma)));
  const double hi = to_double(key, trim(value.substr(comma + 1)));
  if (!(lo < hi)) config_error("key '" + key + "' needs lo < hi");
  return {lo, hi};
}

Level build_level(const ExperimentConfig& cfg) {
  Level level;
  level.coll = make_collocation(cfg.m, cfg.qdelta);
  if (cfg.problem == "heat") {
    level.space = make_heat(cfg.n);
  } else if (cfg.problem == "advection") {
    level.space = make_advection(cfg.n);
  } else {
    level.space = make_dahlquist(Complex(cfg.lambda_re, cfg.lambda_im));
  }
  return level;
}

double coefficient(const ExperimentConfig& cfg) {
  if (cfg.problem == "heat") return cfg.nu;
  if (cfg.problem == "advection") return cfg.c;
  return 1.0;
}

std::string run_status(const RunReport& report) {
  if (report.converged) return "converged";
  if (!std::isfinite(report.residual_history.back())) return "diverged";
  return "max_iter";
}

SolverConfig solver_config(const ExperimentConfig& cfg) {
  SolverConfig s;
  s.smoother_steps = cfg.k_smooth;
  s.tol = cfg.tol;
  s.max_iter = cfg.max_iter;
  s.omega = cfg.omega;
  return s;
}

std::vector<Complex> complex_grid(const std::vector<double>& mus) { return {mus.begin(), mus.end()}; }

RunResult run_nodes(const ExperimentConfig& cfg) {
  const CollocationSpec spec = make_collocation(cfg.m, cfg.qdelta);
  RunResult r;
  r.table.columns = {"node", "tau", "weight", "qdelta_diag"};
  for (int i = 0; i < spec.m; ++i) {
    r.table.rows.push_back({static_cast<long long>(i + 1), spec.nodes[static_cast<std::size_t>(i)],
                            spec.q(spec.m - 1, i).real(), spec.qdelta(i, i).real()});
  }
  return r;
}

RunResult run_specrad(const ExperimentConfig& cfg, SweepTarget target) {
  const Level level = build_level(cfg);
  const auto mus = log_grid(cfg.mu_min, cfg.mu_max, cfg.mu_points);
  const auto sweep = specrad_sweep(standard_builder(level, cfg.l, 1.0), complex_grid(mus), cfg.k_smooth, target,
                                   cfg.omega, worker_count());
  RunResult r;
  r.table.columns = {"mu", "rho", "status"};
  for (const SweepPoint& p : sweep) r.table.rows.push_back({p.mu.real(), p.rho, p.ok ? std::string("ok") : p.error});
  return r;
}

RunResult run_heatmap(const ExperimentConfig& cfg) {
  const auto points = heatmap(cfg.grid_re_min, cfg.grid_re_max, cfg.grid_im_min, cfg.grid_im_max, cfg.grid_points,
                              cfg.k_smooth, cfg.l, cfg.m, cfg.qdelta, worker_count());
  RunResult r;
  r.table.columns = {"re", "im", "rho", "status"};
  double max_rho = 0.0;
  for (const HeatmapPoint& p : points) {
    r.table.rows.push_back({p.re, p.im, p.rho, std::string(p.ok ? "ok" : "failed")});
    if (p.ok) max_rho = std::max(max_rho, p.rho);
  }
  r.summary["max_rho"] = format_double(max_rho);
  return r;
}

RunResult run_properties(const ExperimentConfig& cfg) {
  const Level level = build_level(cfg);
  const double omega = cfg.raw.count("omega") ? cfg.omega : 2.0;
  const auto mus = log_grid(cfg.mu_min, cfg.mu_max, cfg.mu_points);
  std::vector<PropertyNorms> norms(mus.size());
  std::vector<std::string> status(mus.size(), "ok");
  parallel_for(mus.size(), [&](std::size_t i) {
    try {
      norms[i] = property_norms(assemble_standard(cfg.l, mus[i], level), cfg.k_smooth, omega);
    } catch (const Error& err) {
      status[i] = err.what();
    }
  });
  RunResult r;
  r.table.columns = {"mu",           "approx",         "smooth",        "smooth_damped", "full_bound",
                     "post_smoothing", "pre_smoothing", "reusken_bound", "damped_b_norm", "status"};
  for (std::size_t i = 0; i < mus.size(); ++i) {
    const PropertyNorms& p = norms[i];
    r.table.rows.push_back({mus[i], p.approx, p.smooth, p.smooth_damped, p.full_bound, p.post_smoothing,
                            p.pre_smoothing, p.reusken_bound, p.damped_b_norm, status[i]});
  }
  r.summary["omega"] = format_double(omega);
  return r;
}

RunResult run_symbol(const ExperimentConfig& cfg) {
  const Level level = build_level(cfg);
  const Level coarse = coarse_level(level);
  const TransferPair pair = standard_transfer(1, level.coll, coarse.coll, level.space, coarse.space);
  RunResult r;
  r.table.columns = {"kind", "sup", "x", "failed_points"};
  auto add = [&](const std::string& kind, const SymbolSup& s) {
    r.table.rows.push_back({kind, s.value, s.x, static_cast<long long>(s.failed_points)});
  };
  add("smoother_zero_limit",
      symbol_sup(SymbolEvaluator::smoother_zero_limit(level.coll.nmat, level.space.n), cfg.x_samples));
  add("pfasst_zero_limit", symbol_sup(SymbolEvaluator::pfasst_zero_limit(level.coll.nmat, pair), cfg.x_samples));

  // Block symbol, maximized over the spatial eigenvalues.
  const double mu = cfl_number(level.space, coefficient(cfg), cfg.dt);
  SymbolSup worst;
  worst.value = -1.0;
  for (const Complex& lambda : *level.space.eigen) {
    const SymbolSup s = symbol_sup(SymbolEvaluator::smoother_block(level.coll, mu * lambda), cfg.x_samples);
    worst.failed_points += s.failed_points;
    if (s.value > worst.value) {
      worst.value = s.value;
      worst.x = s.x;
    }
  }
  add("smoother_block", worst);
  r.summary["mu"] = format_double(mu);
  return r;
}

RunResult run_solve(const ExperimentConfig& cfg) {
  const Level level = build_level(cfg);
  const double mu = cfl_number(level.space, coefficient(cfg), cfg.dt);
  const RunReport report = solve(make_problem(cfg.l, mu, level), initial_value(cfg, level.space.n), solver_config(cfg));
  if (!std::isfinite(report.residual_history.back())) {
    throw Error(ErrorCode::kNoConvergence, "residual became non-finite");
  }
  RunResult r;
  r.table.columns = {"iteration", "residual"};
  for (std::size_t i = 0; i < report.residual_history.size(); ++i) {
    r.table.rows.push_back({static_cast<long long>(i), report.residual_history[i]});
  }
  r.summary["mu"] = format_double(mu);
  r.summary["iterations"] = std::to_string(report.iterations);
  r.summary["converged"] = report.converged ? "true" : "false";
  return r;
}

struct SweepRun {
  RunReport report;
  std::string status;
};

SweepRun sweep_point(const ExperimentConfig& cfg, const Level& level, Eigen::Index l, double mu) {
  SweepRun out;
  try {
    out.report = solve(make_problem(l, mu, level), initial_value(cfg, level.space.n), solver_config(cfg));
    out.status = run_status(out.report);
  } catch (const Error& err) {
    out.report.residual_history = {std::numeric_limits<double>::quiet_NaN()};
    out.status = err.what();
  }
  return out;
}

RunResult run_mu_sweep(const ExperimentConfig& cfg) {
  const Level level = build_level(cfg);
  const auto mus = log_grid(cfg.mu_min, cfg.mu_max, cfg.mu_points);
  const double unit = cfl_number(level.space, 1.0, cfg.dt);
  std::vector<SweepRun> runs(mus.size());
  parallel_for(mus.size(), [&](std::size_t i) { runs[i] = sweep_point(cfg, level, cfg.l, mus[i]); });
  RunResult r;
  r.table.columns = {"mu", "coefficient", "iterations", "final_residual", "status"};
  for (std::size_t i = 0; i < mus.size(); ++i) {
    r.table.rows.push_back({mus[i], mus[i] / unit, static_cast<long long>(runs[i].report.iterations),
                            runs[i].report.residual_history.back(), runs[i].status});
  }
  return r;
}

RunResult run_l_sweep(const ExperimentConfig& cfg) {
  const Level level = build_level(cfg);
  std::vector<Eigen::Index> ls;
  for (Eigen::Index l = 1; l <= cfg.l; l *= 2) ls.push_back(l);
  std::vector<SweepRun> runs(ls.size());
  std::vector<double> mus(ls.size());
  for (std::size_t i = 0; i < ls.size(); ++i) {
    mus[i] = cfl_number(level.space, coefficient(cfg), cfg.t_end / static_cast<double>(ls[i]));
  }
  parallel_for(ls.size(), [&](std::size_t i) { runs[i] = sweep_point(cfg, level, ls[i], mus[i]); });
  RunResult r;
  r.table.columns = {"l", "dt", "mu", "iterations", "final_residual", "status"};
  for (std::size_t i = 0; i < ls.size(); ++i) {
    r.table.rows.push_back({static_cast<long long>(ls[i]), cfg.t_end / static_cast<double>(ls[i]), mus[i],
                            static_cast<long long>(runs[i].report.iterations), runs[i].report.residual_history.back(),
                            runs[i].status});
  }
  return r;
}

std::string csv_field(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  const std::string& s = std::get<std::string>(cell);
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

nlohmann::json cell_json(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) {
    return std::isfinite(*d) ? nlohmann::json(*d) : nlohmann::json(format_double(*d));
  }
  if (const auto* i = std::get_if<long long>(&cell)) return *i;
  return std::get<std::string>(cell);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  file << text;
  if (!file) throw Error(ErrorCode::kIo, "write to '" + path + "' failed");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) config_error("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) config_error("line " + std::to_string(line_no) + ": empty key");
    if (cfg.raw.count(key)) config_error("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    cfg.raw[key] = value;
  }

  for (const auto& [key, value] : cfg.raw) {
    if (!kKnownKeys.count(key)) {
      cfg.warnings.push_back("unknown key '" + key + "' ignored");
    } else if (key == "experiment") {
      cfg.experiment = value;
    } else if (key == "problem") {
      cfg.problem = value;
    } else if (key == "n") {
      cfg.n = to_integer(key, value);
    } else if (key == "lambda_re") {
      cfg.lambda_re = to_double(key, value);
    } else if (key == "lambda_im") {
      cfg.lambda_im = to_double(key, value);
    } else if (key == "nu") {
      cfg.nu = to_double(key, value);
    } else if (key == "c") {
      cfg.c = to_double(key, value);
    } else if (key == "l") {
      cfg.l = to_integer(key, value);
    } else if (key == "m") {
      cfg.m = static_cast<int>(to_integer(key, value));
    } else if (key == "dt") {
      cfg.dt = to_double(key, value);
    } else if (key == "t_end") {
      cfg.t_end = to_double(key, value);
    } else if (key == "qdelta") {
      try {
        cfg.qdelta = parse_qdelta_kind(value);
      } catch (const Error&) {
        config_error("key 'qdelta': expected LU, IE or EE");
      }
    } else if (key == "omega") {
      cfg.omega = to_double(key, value);
    } else if (key == "k_smooth") {
      cfg.k_smooth = static_cast<int>(to_integer(key, value));
    } else if (key == "tol") {
      cfg.tol = to_double(key, value);
    } else if (key == "max_iter") {
      cfg.max_iter = static_cast<int>(to_integer(key, value));
    } else if (key == "mu_min") {
      cfg.mu_min = to_double(key, value);
    } else if (key == "mu_max") {
      cfg.mu_max = to_double(key, value);
    } else if (key == "mu_points") {
      cfg.mu_points = static_cast<int>(to_integer(key, value));
    } else if (key == "grid_re") {
      std::tie(cfg.grid_re_min, cfg.grid_re_max) = to_range(key, value);
    } else if (key == "grid_im") {
      std::tie(cfg.grid_im_min, cfg.grid_im_max) = to_range(key, value);
    } else if (key == "grid_points") {
      cfg.grid_points = static_cast<int>(to_integer(key, value));
    } else if (key == "x_samples") {
      cfg.x_samples = static_cast<int>(to_integer(key, value));
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "format") {
      cfg.format = value;
    } else if (key == "seed") {
      const long long seed = to_integer(key, value);
      if (seed < 0) config_error("key 'seed' must be non-negative");
      cfg.seed = static_cast<std::uint64_t>(seed);
    }
  }
  return cfg;
}

void finalize_config(ExperimentConfig& cfg) {
  if (!kExperiments.count(cfg.experiment)) config_error("unknown experiment '" + cfg.experiment + "'");
  if (cfg.problem != "heat" && cfg.problem != "advection" && cfg.problem != "dahlquist") {
    config_error("problem must be heat, advection or dahlquist");
  }
  if (cfg.format != "csv" && cfg.format != "json") config_error("format must be csv or json");

  // Keys that belong to another problem are ignored with a warning.
  const std::map<std::string, std::set<std::string>> owners = {
      {"nu", {"heat"}}, {"c", {"advection"}}, {"n", {"heat", "advection"}},
      {"lambda_re", {"dahlquist"}}, {"lambda_im", {"dahlquist"}}};
  for (const auto& [key, problems] : owners) {
    if (cfg.raw.count(key) && !problems.count(cfg.problem)) {
      cfg.warnings.push_back("key '" + key + "' does not apply to problem '" + cfg.problem + "' and is ignored");
    }
  }

  if (cfg.n == 0) cfg.n = cfg.problem == "advection" ? 128 : 127;
  if (cfg.problem == "heat" && (cfg.n < 3 || cfg.n % 2 == 0)) config_error("heat needs odd n >= 3");
  if (cfg.problem == "advection" && (cfg.n < 4 || cfg.n % 2 != 0)) config_error("advection needs even n >= 4");
  if (cfg.l < 1) config_error("l must be >= 1");
  if (cfg.m < 1 || cfg.m > 9) config_error("m must be in 1..9");
  if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0)) config_error("dt and t_end must be positive");
  if (!(cfg.omega > 0.0)) config_error("omega must be positive");
  if (cfg.k_smooth < 1) config_error("k_smooth must be >= 1");
  if (!(cfg.tol > 0.0)) config_error("tol must be positive");
  if (cfg.max_iter < 0) config_error("max_iter must be >= 0");
  if (!(cfg.mu_min > 0.0) || !(cfg.mu_max >= cfg.mu_min)) config_error("need 0 < mu_min <= mu_max");
  if (cfg.mu_points < 0) config_error("mu_points must be >= 0");
  if (cfg.grid_points < 1) config_error("grid_points must be >= 1");
  if (cfg.x_samples < 2) config_error("x_samples must be >= 2");
  if (cfg.problem == "heat" && !(cfg.nu > 0.0)) config_error("nu must be positive");
  if (cfg.problem == "advection" && !(cfg.c > 0.0)) config_error("c must be positive");
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_field(table.columns[i]);
  }
  out += "\r\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw Error(ErrorCode::kInvalidArgument, "emit_csv: ragged record");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_field(row[i]);
    }
    out += "\r\n";
  }
  return out;
}

void emit_csv(const Table& table, const std::string& path) { write_text(path, to_csv(table)); }

Table parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
      any = true;
    } else if (ch == ',') {
      record.push_back(field);
      field.clear();
      any = true;
    } else if (ch == '\r' || ch == '\n') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      record.push_back(field);
      records.push_back(record);
      record.clear();
      field.clear();
      any = false;
    } else {
      field += ch;
      any = true;
    }
  }
  if (any) {
    record.push_back(field);
    records.push_back(record);
  }

  Table table;
  if (records.empty()) return table;
  table.columns = records.front();
  for (std::size_t r = 1; r < records.size(); ++r) {
    std::vector<Cell> row;
    for (const std::string& f : records[r]) {
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (!f.empty() && end == f.c_str() + f.size()) {
        row.emplace_back(v);
      } else {
        row.emplace_back(f);
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  const double decades = std::log10(hi) - std::log10(lo);
  if (points == 0) points = static_cast<int>(std::lround(16.0 * decades)) + 1;
  if (points == 1 || decades == 0.0) return {lo};
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    grid.push_back(std::pow(10.0, std::log10(lo) + decades * static_cast<double>(i) / (points - 1)));
  }
  return grid;
}

CVector initial_value(const ExperimentConfig& cfg, Eigen::Index n) {
  CVector u(n);
  if (cfg.problem == "heat") {
    // Uniform(-1, 1) from the raw 64-bit stream, so the data do not depend on
    // the standard library's distribution implementation.
    std::mt19937_64 rng(cfg.seed);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      u(i) = 2.0 * unit - 1.0;
    }
  } else if (cfg.problem == "advection") {
    for (Eigen::Index i = 0; i < n; ++i) {
      u(i) = std::sin(64.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    }
  } else {
    u.setOnes();
  }
  return u;
}

RunResult run(const ExperimentConfig& cfg) {
  const std::string& e = cfg.experiment;
  if (e == "nodes") return run_nodes(cfg);
  if (e == "specrad_smoother") return run_specrad(cfg, SweepTarget::kSmoother);
  if (e == "specrad_pfasst") return run_specrad(cfg, SweepTarget::kPfasst);
  if (e == "heatmap") return run_heatmap(cfg);
  if (e == "properties") return run_properties(cfg);
  if (e == "symbol") return run_symbol(cfg);
  if (e == "solve") return run_solve(cfg);
  if (e == "mu_sweep") return run_mu_sweep(cfg);
  if (e == "l_sweep") return run_l_sweep(cfg);
  config_error("unknown experiment '" + e + "'");
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Two-level PFASST iteration and analysis experiments"};
  std::string experiment, config_path, out, format;
  app.add_option("experiment", experiment, "Experiment to run")->required();
  app.add_option("--config", config_path, "Flat key = value configuration file")->required();
  app.add_option("--out", out, "Output path (default: <experiment>.csv or .json)");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.set_version_flag("--version", kVersion);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 1;
  }

  ExperimentConfig cfg;
  try {
    std::ifstream file(config_path);
    if (!file) config_error("cannot read config '" + config_path + "'");
    std::stringstream buffer;
    buffer << file.rdbuf();
    cfg = parse_config(buffer.str());
    if (!cfg.experiment.empty() && cfg.experiment != experiment) {
      cfg.warnings.push_back("config experiment '" + cfg.experiment + "' overridden by '" + experiment + "'");
    }
    cfg.experiment = experiment;
    if (!format.empty()) cfg.format = format;
    if (!out.empty()) cfg.out = out;
    finalize_config(cfg);
    if (cfg.out.empty()) cfg.out = experiment + "." + cfg.format;
  } catch (const Error& err) {
    std::cerr << "pintmg: config error: " << err.what() << "\n";
    return 1;
  }
  for (const std::string& w : cfg.warnings) std::cerr << "pintmg: warning: " << w << "\n";

  const auto start = std::chrono::steady_clock::now();
  RunResult result;
  try {
    result = run(cfg);
  } catch (const Error& err) {
    const bool config = err.code() == ErrorCode::kConfig || err.code() == ErrorCode::kInvalidArgument ||
                        err.code() == ErrorCode::kDimensionMismatch;
    std::cerr << "pintmg: " << (config ? "config error: " : "numerical failure: ") << err.what() << "\n";
    return config ? 1 : 2;
  } catch (const std::exception& err) {
    std::cerr << "pintmg: numerical failure: " << err.what() << "\n";
    return 2;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  try {
    if (cfg.format == "csv") {
      emit_csv(result.table, cfg.out);
    } else {
      nlohmann::ordered_json records = nlohmann::ordered_json::array();
      for (const auto& row : result.table.rows) {
        nlohmann::ordered_json record;
        for (std::size_t i = 0; i < row.size(); ++i) record[result.table.columns[i]] = cell_json(row[i]);
        records.push_back(std::move(record));
      }
      write_text(cfg.out, records.dump(2) + "\n");
    }
    nlohmann::ordered_json meta;
    meta["experiment"] = cfg.experiment;
    meta["version"] = kVersion;
    meta["config"] = cfg.raw;
    nlohmann::ordered_json resolved;
    resolved["problem"] = cfg.problem;
    resolved["n"] = cfg.problem == "dahlquist" ? 1 : cfg.n;
    resolved["l"] = cfg.l;
    resolved["m"] = cfg.m;
    resolved["qdelta"] = std::string(to_string(cfg.qdelta));
    resolved["k_smooth"] = cfg.k_smooth;
    resolved["omega"] = cfg.omega;
    resolved["dt"] = cfg.dt;
    resolved["t_end"] = cfg.t_end;
    resolved["tol"] = cfg.tol;
    resolved["max_iter"] = cfg.max_iter;
    resolved["seed"] = cfg.seed;
    resolved["format"] = cfg.format;
    meta["resolved"] = resolved;
    meta["summary"] = result.summary;
    meta["records"] = result.table.rows.size();
    meta["workers"] = worker_count();
    meta["wall_time_seconds"] = seconds;
    meta["warnings"] = cfg.warnings;
    write_text(cfg.out + ".meta.json", meta.dump(2) + "\n");
  } catch (const Error& err) {
    std::cerr << "pintmg: " << err.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace pintmg::cli
