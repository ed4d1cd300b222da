#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("loggas_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_scenario(const fs::path& dir, const std::string& body) {
  fs::path p = dir / "scenario.json";
  std::ofstream(p) << body;
  return p;
}

int run(const std::string& args, const fs::path& err) {
  const std::string cmd = std::string(LOGGAS_BIN) + " " + args + " > /dev/null 2> " + err.string();
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

const char* kSmallSde = R"({"schema": "loggas-scenario/1", "beta": 2, "N": 20, "horizon": 0.2, "dt": 0.01,
                            "replicas": 8, "seed": 3, "snapshots": 2})";

}  // namespace

TEST_CASE("invalid beta is a configuration error") {
  auto d = scratch("beta");
  auto sc = write_scenario(d, R"({"schema": "loggas-scenario/1", "beta": 0.5})");
  const int rc = run("simulate-sde --scenario " + sc.string() + " --out " + (d / "out").string(), d / "err.txt");
  CHECK(rc == 2);
  CHECK(slurp(d / "err.txt").find("beta ≥ 1 required") != std::string::npos);
}

TEST_CASE("same seed gives byte-identical tables regardless of workers") {
  auto d = scratch("seed");
  auto sc = write_scenario(d, kSmallSde);
  REQUIRE(run("simulate-sde --scenario " + sc.string() + " --workers 1 --out " + (d / "a").string(), d / "e1") == 0);
  REQUIRE(run("simulate-sde --scenario " + sc.string() + " --workers 3 --out " + (d / "b").string(), d / "e2") == 0);
  REQUIRE(run("simulate-sde --scenario " + sc.string() + " --seed 4 --out " + (d / "c").string(), d / "e3") == 0);
  for (const char* f : {"trajectory.csv", "linear_stats.csv", "covariance.csv"}) {
    CHECK(fs::exists(d / "a" / f));
    CHECK(slurp(d / "a" / f) == slurp(d / "b" / f));
  }
  CHECK(slurp(d / "a" / "trajectory.csv") != slurp(d / "c" / "trajectory.csv"));
}

TEST_CASE("verify reports the support edge criterion") {
  auto d = scratch("verify");
  const int rc = run("verify --only 2 --out " + d.string(), d / "err.txt");
  CHECK(rc == 0);
  auto j = nlohmann::json::parse(slurp(d / "verify.json"));
  CHECK(j["schema"] == "loggas-verify/1");
  bool found = false;
  for (const auto& c : j["checks"]) {
    if (c["id"] != 2) continue;
    found = true;
    CHECK(c["pass"] == true);
    for (const auto& m : c["metrics"])
      if (m["name"].get<std::string>().find("b_t") != std::string::npos) CHECK(m["observed"].get<double>() <= 1e-4);
  }
  CHECK(found);
}

TEST_CASE("unknown kernel method and missing scenario") {
  auto d = scratch("method");
  auto sc = write_scenario(d, R"({"schema": "loggas-scenario/1"})");
  CHECK(run("eval-kernel --method nonsense --scenario " + sc.string() + " --out " + d.string(), d / "e1") == 2);
  CHECK(run("eval-kernel --method closed", d / "e2") == 2);
  CHECK(run("no-such-command", d / "e3") == 2);
}

TEST_CASE("closed-form kernel tables and JSON output") {
  auto d = scratch("kernel");
  auto sc = write_scenario(d, R"({"schema": "loggas-scenario/1", "kernel": {"x2": 0.3, "x1": [-0.5, 0.7], "dt": [0.5]}})");
  REQUIRE(run("eval-kernel --method closed --scenario " + sc.string() + " --out " + (d / "csv").string(), d / "e1") == 0);
  auto real = slurp(d / "csv" / "real_kernel.csv");
  CHECK(real.rfind("t1,x1,t2,x2,g", 0) == 0);
  CHECK(slurp(d / "csv" / "kernel.csv").rfind("t1,x1,t2,x2,eps1,eps2,re,im,method", 0) == 0);
  REQUIRE(run("eval-kernel --method closed --format json --scenario " + sc.string() + " --out " + (d / "js").string(),
              d / "e2") == 0);
  CHECK_FALSE(fs::exists(d / "js" / "real_kernel.csv"));
  auto j = nlohmann::json::parse(slurp(d / "js" / "real_kernel.json"));
  CHECK(j.is_array());
  CHECK(j.size() == 2);
}
