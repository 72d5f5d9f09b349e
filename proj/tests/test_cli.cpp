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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "pintmg/analysis.hpp"
#include "pintmg/cli.hpp"
#include "pintmg/error.hpp"
#include "pintmg/parallel.hpp"

using namespace pintmg;
using namespace pintmg::cli;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("pintmg_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "pintmg");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return main_entry(static_cast<int>(argv.size()), argv.data());
}

ErrorCode config_code(const std::string& text) {
  try {
    ExperimentConfig cfg = parse_config(text);
    finalize_config(cfg);
  } catch (const Error& err) {
    return err.code();
  }
  return ErrorCode::kIo;  // sentinel: no error
}

}  // namespace

TEST_CASE("config: keys, comments and defaults") {
  ExperimentConfig cfg = parse_config(
      "# heat run\n"
      "experiment = solve\n"
      "problem=heat   # trailing comment\n"
      "nu = 0.5\n"
      "qdelta = IE\n"
      "grid_re = -10, 0\n"
      "\n");
  finalize_config(cfg);
  CHECK(cfg.experiment == "solve");
  CHECK(cfg.nu == 0.5);
  CHECK(cfg.qdelta == QDeltaKind::kIE);
  CHECK(cfg.grid_re_min == -10.0);
  CHECK(cfg.grid_re_max == 0.0);
  CHECK(cfg.n == 127);
  CHECK(cfg.warnings.empty());

  ExperimentConfig adv = parse_config("experiment = solve\nproblem = advection\n");
  finalize_config(adv);
  CHECK(adv.n == 128);
}

TEST_CASE("config: keys of another problem and unknown keys warn") {
  ExperimentConfig cfg = parse_config("experiment = solve\nproblem = advection\nnu = 2\nlambda_re = 3\ncolour = red\n");
  finalize_config(cfg);
  CHECK(cfg.warnings.size() == 3);
  CHECK(cfg.nu == 2.0);  // parsed but never consulted for advection
}

TEST_CASE("config: malformed input is a config error") {
  CHECK(config_code("experiment = solve\nnu = fast\n") == ErrorCode::kConfig);
  CHECK(config_code("experiment = solve\nl = 2.5\n") == ErrorCode::kConfig);
  CHECK(config_code("experiment = solve\njust a line\n") == ErrorCode::kConfig);
  CHECK(config_code("experiment = solve\nm = 3\nm = 4\n") == ErrorCode::kConfig);
  CHECK(config_code("experiment = dance\n") == ErrorCode::kConfig);
  CHECK(config_code("experiment = solve\nqdelta = XY\n") == ErrorCode::kConfig);
  CHECK(config_code("experiment = solve\nproblem = heat\nn = 128\n") == ErrorCode::kConfig);
  CHECK(config_code("experiment = solve\nproblem = advection\nn = 127\n") == ErrorCode::kConfig);
  CHECK(config_code("experiment = solve\ngrid_im = 5,1\n") == ErrorCode::kConfig);
  CHECK(config_code("experiment = solve\nformat = xml\n") == ErrorCode::kConfig);
  CHECK(config_code("experiment = solve\nnu = nan\n") == ErrorCode::kConfig);
  CHECK(config_code("experiment = solve\n") == ErrorCode::kIo);
}

TEST_CASE("log grid: 16 points per decade by default") {
  const auto grid = log_grid(1e-4, 1e8, 0);
  REQUIRE(grid.size() == 193);
  CHECK(grid.front() == doctest::Approx(1e-4).epsilon(1e-14).scale(0.0));
  CHECK(grid.back() == doctest::Approx(1e8).epsilon(1e-14).scale(0.0));
  CHECK(grid[16] == doctest::Approx(1e-3).epsilon(1e-13).scale(0.0));
  CHECK(log_grid(2.0, 2.0, 0).size() == 1);
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::numeric_limits<double>::denorm_min(),
                   std::numeric_limits<double>::max()}) {
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("csv: empty table is header only") {
  Table t{{"mu", "rho", "status"}, {}};
  CHECK(to_csv(t) == "mu,rho,status\r\n");
}

TEST_CASE("csv: one record gives two lines") {
  Table t{{"mu", "rho", "status"}, {{1.0, 0.5, std::string("ok")}}};
  CHECK(to_csv(t) == "mu,rho,status\r\n1,0.5,ok\r\n");
}

TEST_CASE("csv: quoting and ragged records") {
  Table t{{"kind", "note"}, {{std::string("a,b"), std::string("say \"hi\"")}}};
  CHECK(to_csv(t) == "kind,note\r\n\"a,b\",\"say \"\"hi\"\"\"\r\n");
  const Table back = parse_csv(to_csv(t));
  CHECK(std::get<std::string>(back.rows[0][0]) == "a,b");
  CHECK(std::get<std::string>(back.rows[0][1]) == "say \"hi\"");

  Table ragged{{"a", "b"}, {{1.0}}};
  CHECK_THROWS_AS(to_csv(ragged), Error);
}

TEST_CASE("csv: emitted values parse back bit-exactly") {
  Table t{{"mu", "rho", "status"}, {}};
  std::uint64_t state = 12345;
  for (int i = 0; i < 500; ++i) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    const double a = std::ldexp(static_cast<double>(state >> 11), -53 + static_cast<int>(state % 40) - 20);
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    const double b = -static_cast<double>(state >> 11) * 0x1.0p-53;
    t.rows.push_back({a, b, std::string("ok")});
  }
  const Table back = parse_csv(to_csv(t));
  REQUIRE(back.columns == t.columns);
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    CHECK(std::get<double>(back.rows[i][0]) == std::get<double>(t.rows[i][0]));
    CHECK(std::get<double>(back.rows[i][1]) == std::get<double>(t.rows[i][1]));
  }
}

TEST_CASE("initial value: seeded and reproducible") {
  ExperimentConfig cfg = parse_config("experiment = solve\nseed = 7\n");
  finalize_config(cfg);
  const CVector a = initial_value(cfg, 31);
  const CVector b = initial_value(cfg, 31);
  CHECK(a == b);
  CHECK(a.real().maxCoeff() < 1.0);
  CHECK(a.real().minCoeff() >= -1.0);
  CHECK(a.imag().isZero(0.0));
  cfg.seed = 8;
  CHECK(!(initial_value(cfg, 31) == a));
}

TEST_CASE("executable: exit codes, outputs and determinism") {
  TempDir dir;
  const auto config = dir.path / "run.cfg";
  std::ofstream(config) << "problem = heat\nn = 15\nl = 4\nm = 3\nnu = 0.1\ndt = 0.25\n";
  const std::string out_a = (dir.path / "a.csv").string();
  const std::string out_b = (dir.path / "b.csv").string();

  CHECK(run_cli({"solve", "--config", config.string(), "--out", out_a}) == 0);
  CHECK(run_cli({"solve", "--config", config.string(), "--out", out_b}) == 0);
  const std::string a = read_file(out_a);
  CHECK(a == read_file(out_b));
  CHECK(a.rfind("iteration,residual\r\n0,", 0) == 0);
  const std::string meta = read_file(out_a + ".meta.json");
  CHECK(meta.find("\"wall_time_seconds\"") != std::string::npos);
  CHECK(meta.find("\"version\": \"0.1.0\"") != std::string::npos);

  const std::string json_out = (dir.path / "nodes.json").string();
  CHECK(run_cli({"nodes", "--config", config.string(), "--out", json_out, "--format", "json"}) == 0);
  CHECK(read_file(json_out).find("\"tau\": 1.0") != std::string::npos);

  CHECK(run_cli({"solve", "--config", (dir.path / "missing.cfg").string()}) == 1);
  CHECK(run_cli({"solve"}) == 1);
  CHECK(run_cli({"teleport", "--config", config.string(), "--out", out_a}) == 1);

  // Non-finite iterates are a numerical failure.
  const auto bad = dir.path / "bad.cfg";
  std::ofstream(bad) << "problem = dahlquist\nlambda_re = -1e308\ndt = 100\nl = 4\nmax_iter = 5\n";
  CHECK(run_cli({"solve", "--config", bad.string(), "--out", out_a}) == 2);
}

TEST_CASE("PINTMG_THREADS caps the worker count") {
  ::setenv("PINTMG_THREADS", "1", 1);
  CHECK(worker_count() == 1);
  ::setenv("PINTMG_THREADS", "zero", 1);
  CHECK(worker_count() >= 1);
  ::unsetenv("PINTMG_THREADS");
}

TEST_CASE("parallel_for visits every index and rethrows") {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, 4);
  CHECK(std::count(hits.begin(), hits.end(), 1) == 100);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
    if (i == 7) throw Error(ErrorCode::kNoConvergence, "point 7");
  }, 3), Error);
}

TEST_CASE("sweep results do not depend on the worker count") {
  const Level level{make_collocation(3, QDeltaKind::kLU), make_heat(7)};
  std::vector<Complex> grid;
  for (double mu : log_grid(1e-2, 1e4, 13)) grid.emplace_back(mu);
  const auto one = specrad_sweep(standard_builder(level, 4), grid, 3, SweepTarget::kPfasst, 1.0, 1);
  const auto four = specrad_sweep(standard_builder(level, 4), grid, 3, SweepTarget::kPfasst, 1.0, 4);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(one[i].rho == four[i].rho);
}
