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

#ifndef PINTMG_CLI_HPP
#define PINTMG_CLI_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "pintmg/collocation.hpp"
#include "pintmg/densela.hpp"

namespace pintmg::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Flat key = value configuration. Field names are the config keys.
struct ExperimentConfig {
  std::string experiment;
  std::string problem = "heat";  // heat | advection | dahlquist
  Eigen::Index n = 0;            // 0: 127 for heat, 128 for advection
  double lambda_re = -1.0;
  double lambda_im = 0.0;
  double nu = 0.1;
  double c = 0.1;
  Eigen::Index l = 16;
  int m = 3;
  double dt = 0.25;
  double t_end = 1.0;
  QDeltaKind qdelta = QDeltaKind::kLU;
  double omega = 1.0;
  int k_smooth = 3;
  double tol = 1e-8;
  int max_iter = 200;
  double mu_min = 1e-4;
  double mu_max = 1e8;
  int mu_points = 0;  // 0: 16 points per decade
  double grid_re_min = -30.0, grid_re_max = 0.0;
  double grid_im_min = 0.0, grid_im_max = 30.0;
  int grid_points = 101;
  int x_samples = 721;
  std::uint64_t seed = 20170101;
  std::string out;
  std::string format = "csv";

  std::map<std::string, std::string> raw;  // keys as read from the file
  std::vector<std::string> warnings;
};

/// Parses the key = value text ('#' starts a comment). Throws Error(kConfig).
ExperimentConfig parse_config(const std::string& text);

/// Applies defaults that depend on other fields and validates ranges.
/// Throws Error(kConfig).
void finalize_config(ExperimentConfig& cfg);

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Formats a double with 17 significant digits (round-trips exactly).
std::string format_double(double value);

/// RFC 4180 CSV: header row, one line per record. Throws Error(kIo).
void emit_csv(const Table& table, const std::string& path);
std::string to_csv(const Table& table);

/// Parses text produced by to_csv back into cells (numbers become doubles).
Table parse_csv(const std::string& text);

struct RunResult {
  Table table;
  std::map<std::string, std::string> summary;  // extra sidecar fields
};

/// Runs one experiment. Throws Error on numerical failure.
RunResult run(const ExperimentConfig& cfg);

/// Deterministic initial value for the configured problem.
CVector initial_value(const ExperimentConfig& cfg, Eigen::Index n);

/// Logarithmic grid from lo to hi; points = 0 selects 16 per decade.
std::vector<double> log_grid(double lo, double hi, int points);

/// Entry point of the pintmg executable. Returns the process exit code.
int main_entry(int argc, char** argv);

}  // namespace pintmg::cli

#endif  // PINTMG_CLI_HPP
