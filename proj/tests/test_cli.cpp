#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "nehari_lab/config.hpp"
#include "nehari_lab/errors.hpp"

using namespace nehari_lab;
namespace fs = std::filesystem;

namespace {

std::string binary() {
  const char* p = std::getenv("NEHARI_LAB_CLI");
  return p ? p : "./nehari-lab";
}

int run(const std::string& args) {
  const std::string cmd = binary() + " " + args + " > /dev/null 2>&1";
  const int s = std::system(cmd.c_str());
  return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nehari_lab_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
  RunConfig c;
  apply_settings(c, parse_config_text("# comment\nN = 6\nalpha_list = 0, 0.5 ,1\nstretch = 3\nseed=9\n"));
  CHECK(c.N == 6);
  CHECK(c.alpha_list == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(c.grid.stretch_r == 3.0);
  CHECK(c.grid.stretch_theta == 3.0);
  CHECK(c.solve.seed == 9u);
  RunConfig d;
  apply_settings(d, parse_config_text("stretch_theta = 1\nstretch = 4\n"));
  CHECK(d.grid.stretch_theta == 1.0);
  CHECK_THROWS_AS(parse_config_text("N 5\n"), ConfigError);
  try {
    apply_settings(c, parse_config_text("N = 4\nbogus = 1\ntau = 0.5\nR = 2\n"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string w = e.what();
    CHECK(w.find("N") != std::string::npos);
    CHECK(w.find("bogus") != std::string::npos);
    CHECK(w.find("tau") != std::string::npos);
    CHECK(w.find(" R") == std::string::npos);
  }
}

TEST_CASE("constants subcommand") {
  const fs::path out = scratch("constants");
  REQUIRE(run("constants --N 5 --out " + out.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(out / "constants.json"));
  CHECK(j["S"].get<double>() == doctest::Approx(14.8119117200059).epsilon(1e-12));
  CHECK(j["A"].get<double>() == doctest::Approx(0.50930).epsilon(1e-4));
  CHECK(j["B"].get<double>() == doctest::Approx(std::pow(j["S"].get<double>(), 2.5)).epsilon(1e-12));
  const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
  CHECK(m["subcommand"] == "constants");
  CHECK(m["exit_code"] == 0);
  CHECK(m["constants"]["S"].get<double>() == j["S"].get<double>());
  fs::remove_all(out);
}

TEST_CASE("exit codes") {
  const fs::path out = scratch("errors");
  fs::create_directories(out);
  {
    std::ofstream bad(out / "bad.cfg");
    bad << "N = five\n";
  }
  {
    std::ofstream desc(out / "desc.cfg");
    desc << "alpha_list = 1, 0.5\nn_r = 32\nn_theta = 32\n";
  }
  CHECK(run("constants --config " + (out / "bad.cfg").string() + " --out " + out.string()) == 2);
  CHECK(run("constants --config " + (out / "missing.cfg").string() + " --out " + out.string()) == 2);
  CHECK(run("sweep --config " + (out / "desc.cfg").string() + " --out " + out.string()) == 2);
  CHECK(run("constants --N 3 --out " + out.string()) == 2);
  CHECK(run("nosuch") == 2);
  CHECK(run("minimize --n_r 8 --out " + out.string()) == 2);
  CHECK(run("alpha0 --n_r 32 --n_theta 32 --alpha_lo 0 --alpha_hi 0.5 --out " + out.string()) == 2);
  fs::remove_all(out);
}

TEST_CASE("sweep output is reproducible") {
  const std::string args = "sweep --alpha_list 0,3 --n_r 32 --n_theta 32 --stretch 3 --n_starts 1 --seed 5 --out ";
  const fs::path a = scratch("sweep_a"), b = scratch("sweep_b");
  REQUIRE(run(args + a.string()) == 0);
  setenv("NEHARI_LAB_THREADS", "2", 1);
  REQUIRE(run(args + b.string()) == 0);
  unsetenv("NEHARI_LAB_THREADS");
  const std::string csv = slurp(a / "sweep.csv");
  CHECK(csv == slurp(b / "sweep.csv"));
  CHECK(csv.rfind("alpha,S_est,converged,M,delta_M,fit_eps,fit_C,w_norm,boundary_flag\n", 0) == 0);
  const auto mb = nlohmann::json::parse(slurp(b / "manifest.json"));
  CHECK(mb["config"]["threads"] == 2);
  CHECK(mb["seed"] == 5);
  CHECK(fs::exists(a / "minimizer_001.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("threads flag overrides the environment") {
  const fs::path out = scratch("threads");
  setenv("NEHARI_LAB_THREADS", "3", 1);
  REQUIRE(run("constants --threads 1 --out " + out.string()) == 0);
  unsetenv("NEHARI_LAB_THREADS");
  CHECK(nlohmann::json::parse(slurp(out / "manifest.json"))["config"]["threads"] == 1);
  fs::remove_all(out);
}
