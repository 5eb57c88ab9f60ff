#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "ovsafe/cli.hpp"
#include "ovsafe/io.hpp"

using namespace ovsafe;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ovsafe_test_" + std::to_string(std::rand()) + "_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ovsafe");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string write_config(const fs::path& dir, const json& extra,
                         const std::string& name = "config.json") {
  json cfg = {{"model", io::to_json(fixture::canonical())}};
  cfg.merge_patch(extra);
  const fs::path p = dir / name;
  std::ofstream(p) << cfg.dump();
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("17 significant digits round-trip") {
  for (double v : {0.1, 1.0 / 3.0, 1.93588470973048, -2.5e-300, 6.02214076e23}) {
    const std::string s = io::format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(io::format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("StoppingRecord JSON schema") {
  StoppingRecord r;
  r.tau_H = 2.5;
  r.terminal_state = {0.5, -1.0};
  r.seed = 9;
  r.trial_index = 4;
  const json j = io::to_json(r);
  for (const char* key : {"tau_eps_delta", "tau_H", "tau_D", "collision_proxy", "terminal_status",
                          "terminal_state", "seed", "trial_index"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["tau_eps_delta"].is_null());
  CHECK(j["tau_H"] == 2.5);
  CHECK(j["terminal_state"] == json::array({0.5, -1.0}));
  CHECK(j["terminal_status"] == "HorizonReached");
}

TEST_CASE("model params JSON") {
  const ModelParams p = fixture::canonical();
  const ModelParams q = io::model_params_from_json(io::to_json(p));
  CHECK(q.alpha == p.alpha);
  CHECK(q.v_circ == p.v_circ);
  json missing = io::to_json(p);
  missing.erase("beta");
  CHECK_THROWS_AS(io::model_params_from_json(missing), std::invalid_argument);
  json wrong = io::to_json(p);
  wrong["d"] = "one";
  CHECK_THROWS_AS(io::model_params_from_json(wrong), std::invalid_argument);
}

TEST_CASE("config resolution") {
  const json c = resolve_config({{"sde", {{"epsilon", 0.2}}}});
  CHECK(c["sde"]["epsilon"] == 0.2);
  CHECK(c["sde"]["dt"] == 1e-3);
  CHECK_THROWS_AS(resolve_config({{"sdee", 1}}), std::invalid_argument);
  CHECK_THROWS_AS(resolve_config({{"sde", {{"epsilon", "big"}}}}), std::invalid_argument);
  CHECK_THROWS_AS(resolve_config(json::array()), std::invalid_argument);
}

TEST_CASE("cli deterministic") {
  TempDir dir;
  const std::string cfg = write_config(dir.path, json::object());
  const CliRun r = cli({"deterministic", "--config", cfg, "--out", dir.path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("ConvergedToEquilibrium") != std::string::npos);
  const std::string csv = slurp(dir.path / "deterministic.csv");
  CHECK(csv.rfind("# config=", 0) == 0);
  CHECK(csv.find("\nt,x,y,H\n") != std::string::npos);
  const json echoed = json::parse(csv.substr(9, csv.find('\n') - 9));
  CHECK(echoed["model"]["v_circ"] == 0.9);

  const std::string bad =
      write_config(dir.path, {{"model", {{"x_circ", -1.0}}}}, "bad.json");
  const CliRun rb = cli({"deterministic", "--config", bad, "--out", dir.path.string()});
  CHECK(rb.code == 2);
  CHECK(rb.err.find("x_circ") != std::string::npos);

  const CliRun rm = cli({"deterministic", "--config", cfg, "--out", "/definitely/not/here"});
  CHECK(rm.code == 2);
  CHECK(rm.err.find("/definitely/not/here") != std::string::npos);
}

TEST_CASE("cli usage errors") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"fly"}).code == 2);
  CHECK(cli({"sweep", "--threads", "many"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
  TempDir dir;
  CHECK(cli({"validate", "--out", dir.path.string()}).err.find("model.alpha") != std::string::npos);
  const fs::path malformed = dir.path / "bad.json";
  std::ofstream(malformed) << "{\"model\": ";
  CHECK(cli({"sweep", "--config", malformed.string(), "--out", dir.path.string()}).code == 2);
  CHECK(cli({"sweep", "--config", (dir.path / "absent.json").string()}).code == 2);
  const std::string high_v = write_config(dir.path, {{"model", {{"v_circ", 1.97}}}});
  const CliRun rv = cli({"validate", "--config", high_v, "--out", dir.path.string()});
  CHECK(rv.code == 2);
  CHECK(rv.err.find("v_circ") != std::string::npos);
}

TEST_CASE("cli sweep with only zero noise") {
  TempDir dir;
  const std::string cfg = write_config(
      dir.path, {{"sweep", {{"epsilons", {0.0}}, {"horizons", {1.0, 2.0}}, {"trials_per_cell", 100}}}});
  const CliRun r = cli({"sweep", "--config", cfg, "--out", dir.path.string(), "--threads", "2"});
  CHECK(r.code == 0);
  const json j = json::parse(slurp(dir.path / "sweep.json"));
  CHECK(j["cells"].size() == 2);
  for (const json& c : j["cells"]) {
    CHECK(c["freq_tauH"] == 0.0);
    CHECK(c["freq_collision"] == 0.0);
  }
  CHECK(j["run"]["threads"] == 2);
  CHECK(j.contains("version"));
  CHECK(j["spec"]["trials_per_cell"] == 100);
  const std::string csv = slurp(dir.path / "sweep.csv");
  CHECK(csv.find("\nepsilon,L,eps_sqrtL,n_trials,freq_tauH,freq_collision,ci_halfwidth_95,"
                 "paper_bound,n_faults") != std::string::npos);
}

TEST_CASE("cli barrier, sde and validate") {
  TempDir dir;
  const std::string cfg = write_config(
      dir.path, {{"validate", {{"drift_sign_grid", 300}, {"consistency_pairs", 2}}},
                 {"sde", {{"horizon", 2.0}}}});
  CHECK(cli({"barrier", "--config", cfg, "--out", dir.path.string()}).code == 0);
  const std::string bcsv = slurp(dir.path / "barrier.csv");
  CHECK(bcsv.find("\ny,phi,dphi,d2phi\n") != std::string::npos);
  const json bj = json::parse(slurp(dir.path / "barrier.json"));
  CHECK(bj["certificate"]["phi_lower"].get<double>() > 0.0);

  const CliRun s = cli({"sde", "--config", cfg, "--out", dir.path.string(), "--seed", "5"});
  CHECK(s.code == 0);
  const json rec = json::parse(slurp(dir.path / "sde_record.json"));
  CHECK(rec["record"]["seed"] == 5);
  CHECK(rec["config"]["seed"] == 5);

  const CliRun v = cli({"validate", "--config", cfg, "--out", dir.path.string()});
  CHECK(v.code == 0);
  const json report = json::parse(slurp(dir.path / "validation.json"));
  bool has_drift_sign = false;
  for (const json& c : report["checks"]) {
    CHECK(c.contains("measured"));
    CHECK(c.contains("bound"));
    CHECK(c["pass"] == true);
    has_drift_sign = has_drift_sign || c["name"] == "drift_sign_grid_max";
  }
  CHECK(has_drift_sign);
}
