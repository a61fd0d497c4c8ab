#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = fdchk::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string config(const std::string& name) { return std::string(FDCHK_CONFIG_DIR) + "/" + name; }

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fdchk-test-" + name);
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

}  // namespace

TEST_CASE("phi-lambda0 prints the power(4) value") {
  const auto r = run({"phi-lambda0", "--phi", "builtin:power(p=4)", "--format", "text"});
  CHECK(r.code == 0);
  CHECK(r.out.find("lambda0: 0.57735") != std::string::npos);
}

TEST_CASE("input errors exit with 2") {
  CHECK(run({"op-check", "--config", "/nonexistent/fdchk.toml"}).code == 2);
  CHECK(run({"phi-lambda0", "--phi", "builtin:nosuch"}).code == 2);
  CHECK(run({"op-check", "--config", config("ratio4_b1.7.toml"), "--format", "yaml"}).code == 2);
  CHECK(run({"no-such-command"}).code == 2);

  const fs::path dir = scratch_dir("bad");
  std::ofstream(dir / "bad.toml") << "[phi]\nkind = \"ratio4\"\n[matrix]\ndimension = 1\nentries = [[\"1 + * x1\"]]\n";
  const auto r = run({"op-check", "--config", (dir / "bad.toml").string()});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());

  std::ofstream(dir / "nomatrix.toml") << "[phi]\nkind = \"ratio4\"\n";
  const auto m = run({"op-check", "--config", (dir / "nomatrix.toml").string()});
  CHECK(m.code == 2);
  CHECK(m.err.find("matrix") != std::string::npos);
}

TEST_CASE("op-check verdicts around the threshold") {
  const auto lo = json::parse(run({"op-check", "--config", config("ratio4_b1.7.toml")}).out);
  CHECK(lo["criterion"]["verdict"] == "dissipative");
  const auto hi = json::parse(run({"op-check", "--config", config("ratio4_b1.8.toml")}).out);
  CHECK(hi["criterion"]["verdict"] == "not_dissipative");
  CHECK(hi["criterion"].contains("witness"));
  CHECK(hi["schema"] == "fdchk/1");
}

TEST_CASE("op-probe refutes the linear skew operator and is deterministic") {
  const std::vector<std::string> args{"op-probe", "--config", config("linear_skew.toml"), "--budget", "2000",
                                      "--seed",   "42",       "--no-timestamp"};
  const auto a = run(args);
  REQUIRE(a.code == 0);
  const auto j = json::parse(a.out);
  CHECK(j["best_value"].get<double>() > 0);
  CHECK(j["certified"] == true);
  CHECK(j["provenance"]["seed"] == 42);
  CHECK_FALSE(j["provenance"].contains("generated_at"));
  CHECK(run(args).out == a.out);
}

TEST_CASE("format and out are honored") {
  const fs::path dir = scratch_dir("out");
  const auto file = (dir / "lambda.csv").string();
  const auto r = run({"phi-lambda0", "--phi", "builtin:ratio4", "--format", "csv", "--out", file});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  const std::string csv = slurp(file);
  CHECK(csv.rfind("key,value", 0) == 0);
  CHECK(csv.find("result.lambda0,0.57735") != std::string::npos);
}

TEST_CASE("evolve writes a trajectory") {
  const fs::path dir = scratch_dir("evolve");
  const auto file = (dir / "traj.csv").string();
  const auto r = run({"evolve", "--config", config("heat_ratio4.toml"), "--grid", "16", "--format", "csv", "--out", file});
  CHECK(r.code == 0);
  const std::string csv = slurp(file);
  CHECK(csv.rfind("t,orlicz_integral,luxemburg_norm,l2_norm", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 202);
}

TEST_CASE("examples regenerates its outputs") {
  const fs::path dir = scratch_dir("examples");
  CHECK(run({"examples", "--out", dir.string(), "--no-timestamp"}).code == 0);
  for (const char* name : {"lambda0_table.json", "constant_skew.json", "linear_skew.json"})
    CHECK(fs::exists(dir / name));
}
