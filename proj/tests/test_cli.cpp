// Copyright 2026 The adiab Authors
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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "adiab/config.hpp"
#include "adiab/errors.hpp"
#include "adiab/runner.hpp"

using namespace adiab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("adiab_test_cli_" + name);
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

int cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(ADIAB_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config_error(const std::string& text) {
  try {
    validate(parse_config(text));
  } catch (const ConfigInvalid& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config parsing fills every section") {
  const auto c = parse_config(
      "[model]\nname = three_level\ne2 = 3.0\n"
      "[run]\nepsilon = 0.1, 0.05\nsteps_per_epsilon = 100\npaths = 50\nseed = 9\norder = 2\n"
      "scheme = euler_maruyama\nout = results\nworkers = 2\n"
      "[verify]\npaths = 10\nsteps = 20\n[convergence]\npaths = 30\n[expansion]\npaths = 5\n");
  CHECK(c.model == "three_level");
  CHECK(c.model_params.at("e2") == 3.0);
  REQUIRE(c.epsilons.size() == 2);
  CHECK(c.epsilons[1] == 0.05);
  CHECK(c.steps_per_epsilon == 100);
  CHECK(c.paths == 50);
  CHECK(c.seed == 9);
  CHECK(c.order == 2);
  CHECK(c.scheme == Scheme::EulerMaruyama);
  CHECK(c.out_dir == fs::path("results"));
  CHECK(c.workers == 2);
  CHECK(c.verify_paths == 10);
  CHECK(c.verify_steps == 20);
  CHECK(c.convergence_paths == 30);
  CHECK(c.expansion_paths == 5);
  CHECK_NOTHROW(validate(c));
  CHECK(c.build_model().dim() == 3);
}

TEST_CASE("config errors name the offending key") {
  CHECK(config_error("[run]\nepsilon = 2\n").find("epsilon") == 0);
  CHECK(config_error("[run]\nepsilon = abc\n").find("epsilon") == 0);
  CHECK(config_error("[run]\nsteps_per_epsilon = 10\n").find("steps_per_epsilon") == 0);
  CHECK(config_error("[run]\npaths = 0\n").find("paths") == 0);
  CHECK(config_error("[run]\norder = 4\n").find("order") == 0);
  CHECK(config_error("[model]\nname = nonsense\n").find("model.name") == 0);
  CHECK(config_error("[run]\ncolour = blue\n").find("run.colour") == 0);
  CHECK(config_error("[extras]\nx = 1\n").find("extras") == 0);
  CHECK(config_error("[run]\nscheme = rk4\n").find("scheme") == 0);
  CHECK(config_error("[model]\nname = table\ndim = 1\nknots = 2\n"
                     "h.0 = 0 0\nh.1 = 0 0\ng.0 = 0 0\ng.1 = 0 0\n")
            .find("model.knots") == 0);
  CHECK(config_error("").empty());
}

TEST_CASE("table models are read knot by knot") {
  std::string text = "[model]\nname = table\ndim = 2\nknots = 5\n";
  for (int j = 0; j < 5; ++j) {
    const double e = 1.0 + 0.1 * j;
    text += "h." + std::to_string(j) + " = 0 0  0 0  0 0  " + std::to_string(e) + " 0\n";
    text += "g." + std::to_string(j) + " = 0 0  0 0  0 0  1 0\n";
  }
  const auto c = parse_config(text);
  REQUIRE(c.table_h.size() == 5);
  CHECK(c.table_h[2](1, 1).real() == doctest::Approx(1.2));
  CHECK(c.table_g[3](1, 1).real() == doctest::Approx(1.0));
  const auto m = c.build_model();
  CHECK(m.H(0.375)(1, 1).real() == doctest::Approx(1.15).epsilon(1e-6));
  CHECK(config_error("[model]\nname = table\ndim = 2\nknots = 4\nh.0 = 1 2 3\n").find("model.h.0") == 0);
}

TEST_CASE("epsilon list parsing") {
  const auto v = parse_epsilon_list("0.1,0.05, 0.025 ,0.0125");
  REQUIRE(v.size() == 4);
  CHECK(v[3] == 0.0125);
  CHECK_THROWS_AS(parse_epsilon_list(""), ConfigInvalid);
}

TEST_CASE("audit JSON schema") {
  const std::string text = audits_json("demo", {{"a", true, 1.0, 2.0, 0.1}, {"b", false, std::nan(""), 0.0, 0.0}});
  const auto j = nlohmann::json::parse(text);
  CHECK(j["subcommand"] == "demo");
  CHECK(j["pass"] == false);
  REQUIRE(j["audits"].size() == 2);
  CHECK(j["audits"][0]["name"] == "a");
  CHECK(j["audits"][0]["threshold"] == 2.0);
  CHECK(j["audits"][1]["estimate"].is_null());
  for (const char* key : {"name", "pass", "estimate", "threshold", "stderr"}) {
    CHECK(j["audits"][0].contains(key));
  }
}

TEST_CASE("selftest subcommand succeeds and writes audits.json") {
  const fs::path out = scratch("selftest");
  CHECK(cli("selftest --out " + out.string(), out / "log.txt") == 0);
  const auto j = nlohmann::json::parse(slurp(out / "audits.json"));
  CHECK(j["subcommand"] == "selftest");
  CHECK(j["pass"] == true);
  CHECK(j["audits"].size() >= 5);
  CHECK(slurp(out / "log.txt").find("audits passed") != std::string::npos);
}

TEST_CASE("CLI exit codes for bad input") {
  const fs::path out = scratch("errors");
  std::ofstream(out / "bad.ini") << "[run]\nepsilon = 2\n";
  CHECK(cli("selftest --config " + (out / "bad.ini").string(), out / "log.txt") == 2);
  CHECK(slurp(out / "log.txt").find("epsilon") != std::string::npos);
  CHECK(cli("selftest --config " + (out / "missing.ini").string(), out / "log2.txt") != 0);
  CHECK(cli("", out / "log3.txt") != 0);
  CHECK(cli("convergence --epsilons 0.1,0.05 --out " + out.string(), out / "log4.txt") == 2);
}

TEST_CASE("tunneling output is identical across worker counts") {
  const fs::path a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  const std::string common = "tunneling --epsilons 0.1 --seed 5 --config ";
  std::ofstream(a / "cfg.ini") << "[model]\nname = three_level\n[run]\npaths = 200\n";
  const std::string cfg = (a / "cfg.ini").string();
  cli(common + cfg + " --workers 1 --out " + a.string(), a / "log.txt");
  cli(common + cfg + " --workers 3 --out " + b.string(), b / "log.txt");
  cli(common + cfg + " --workers 3 --out " + c.string(), c / "log.txt");
  const std::string samples = slurp(a / "samples_0.1.csv");
  REQUIRE_FALSE(samples.empty());
  CHECK(samples == slurp(b / "samples_0.1.csv"));
  CHECK(samples == slurp(c / "samples_0.1.csv"));
  CHECK(slurp(a / "audits.json") == slurp(b / "audits.json"));
}

TEST_CASE("verify subcommand runs a full audit battery") {
  ExperimentConfig cfg;
  cfg.epsilons = {0.1};
  cfg.verify_paths = 1000;
  cfg.verify_steps = 200;
  cfg.paths = 50;
  cfg.workers = 4;
  cfg.out_dir = scratch("verify");
  std::ostringstream log;
  const int code = run("verify", cfg, log);
  INFO(log.str());
  const auto j = nlohmann::json::parse(slurp(cfg.out_dir / "audits.json"));
  CHECK(j["audits"].size() >= 6);
  CHECK(code == 0);
  CHECK(fs::exists(cfg.out_dir / "stochastic_audits.csv"));
}

TEST_CASE("expansion subcommand writes coefficient tables") {
  ExperimentConfig cfg;
  cfg.epsilons = {0.1};
  cfg.expansion_paths = 3;
  cfg.order = 2;
  cfg.out_dir = scratch("expansion");
  std::ostringstream log;
  CHECK(run("expansion", cfg, log) == 0);
  CHECK(fs::exists(cfg.out_dir / "coefficients.csv"));
  CHECK(fs::exists(cfg.out_dir / "expansion_paths.csv"));
}
