#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "genepool/stats.hpp"

#ifndef GENEPOOL_CLI_PATH
#error "GENEPOOL_CLI_PATH must point at the genepool binary"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path log =
      fs::temp_directory_path() / ("genepool_cli_" + std::to_string(counter++) + ".log");
  const std::string cmd =
      std::string(GENEPOOL_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
#ifdef _WIN32
  r.exit_code = status;
#else
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#endif
  r.output = slurp(log);
  fs::remove(log);
  return r;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("genepool_test_" + tag);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("usage errors exit with code one") {
  CHECK(run_cli("").exit_code == 1);             // a subcommand is required
  CHECK(run_cli("simulate --no-such-flag").exit_code == 1);
  CHECK(run_cli("frobnicate").exit_code == 1);
  CHECK(run_cli("--version").exit_code == 0);
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("simulate --help").exit_code == 0);
}

TEST_CASE("simulate writes parseable artifacts with provenance") {
  const fs::path dir = fresh_dir("simulate");
  RunResult r = run_cli("simulate --seed 5 --out " + dir.string() +
                        " --length 300 --max-size 40 --parents 8 --births 400"
                        " --snapshot-every 200 --pair-budget 2000");
  REQUIRE(r.exit_code == 0);

  const std::string traj_csv = slurp(dir / "trajectory.csv");
  CHECK(traj_csv.find("# seed: 5") != std::string::npos);
  genepool::Trajectory traj = genepool::trajectory_from_csv(traj_csv);
  CHECK(traj.size() == 3);  // clocks 0, 200, 400
  CHECK(traj.back().clock == 400);

  genepool::MatchHistogram hist =
      genepool::histogram_from_csv(slurp(dir / "histogram.csv"));
  CHECK(hist.n == 300);
  CHECK(hist.n_pairs == 40ull * 39ull / 2ull);

  auto pmf = genepool::reference_curve_from_csv(slurp(dir / "reference.csv"));
  CHECK(pmf.size() == 301);

  CHECK(fs::exists(dir / "events.jsonl"));
  std::istringstream events(slurp(dir / "events.jsonl"));
  std::string line;
  std::size_t n_events = 0;
  while (std::getline(events, line)) {
    json ev = json::parse(line);
    CHECK(ev.contains("clock"));
    CHECK(ev.contains("child"));
    ++n_events;
  }
  CHECK(n_events == 400);
}

TEST_CASE("same seed reproduces byte-identical outputs") {
  const fs::path d1 = fresh_dir("repro1");
  const fs::path d2 = fresh_dir("repro2");
  const std::string args =
      " --length 200 --max-size 30 --parents 6 --births 300 --snapshot-every 100"
      " --pair-budget 1000";
  REQUIRE(run_cli("simulate --seed 11 --out " + d1.string() + args).exit_code == 0);
  REQUIRE(run_cli("simulate --seed 11 --out " + d2.string() + args).exit_code == 0);
  for (const char* name : {"trajectory.csv", "histogram.csv", "reference.csv", "events.jsonl"})
    CHECK(slurp(d1 / name) == slurp(d2 / name));

  const fs::path d3 = fresh_dir("repro3");
  REQUIRE(run_cli("simulate --seed 12 --out " + d3.string() + args).exit_code == 0);
  CHECK(slurp(d1 / "histogram.csv") != slurp(d3 / "histogram.csv"));
}

TEST_CASE("fewer parents concentrate the pool") {
  const fs::path d10 = fresh_dir("parents10");
  const fs::path d40 = fresh_dir("parents40");
  const std::string common =
      " --length 400 --max-size 40 --births 3000 --snapshot-every 3000 --pair-budget 5000";
  REQUIRE(run_cli("simulate --seed 21 --out " + d10.string() + common + " --parents 8")
              .exit_code == 0);
  REQUIRE(run_cli("simulate --seed 21 --out " + d40.string() + common + " --parents 40")
              .exit_code == 0);
  genepool::MatchHistogram few =
      genepool::histogram_from_csv(slurp(d10 / "histogram.csv"));
  genepool::MatchHistogram many =
      genepool::histogram_from_csv(slurp(d40 / "histogram.csv"));
  CHECK(few.mean() > many.mean());
}

TEST_CASE("json format emits json artifacts and echoes the effective config") {
  const fs::path dir = fresh_dir("jsonfmt");
  const fs::path cfg = fs::temp_directory_path() / "genepool_sim_cfg.json";
  {
    std::ofstream out(cfg);
    out << R"({"births": 100, "max_size": 30, "parents": 6, "length": 200})";
  }
  RunResult r = run_cli("simulate --seed 31 --config " + cfg.string() + " --births 200" +
                        " --format json --out " + dir.string());
  REQUIRE(r.exit_code == 0);

  json hist = json::parse(slurp(dir / "histogram.json"));
  genepool::MatchHistogram h = genepool::histogram_from_json(hist);
  CHECK(h.n == 200);
  // The flag wins over the config file, and the meta echo shows the merge.
  CHECK(hist["meta"]["config"]["births"] == 200);
  CHECK(hist["meta"]["config"]["max_size"] == 30);
  CHECK(hist["meta"]["seed"] == 31);
  CHECK_FALSE(fs::exists(dir / "histogram.csv"));
  fs::remove(cfg);
}

TEST_CASE("unknown config keys fail fast without partial outputs") {
  const fs::path dir = fresh_dir("badcfg");
  const fs::path cfg = fs::temp_directory_path() / "genepool_bad_cfg.json";
  {
    std::ofstream out(cfg);
    out << R"({"births": 100, "mistyped_key": 7})";
  }
  RunResult r = run_cli("simulate --seed 1 --config " + cfg.string() + " --out " + dir.string());
  CHECK(r.exit_code == 1);
  CHECK_FALSE(fs::exists(dir));
  fs::remove(cfg);

  const fs::path cfg2 = fs::temp_directory_path() / "genepool_bad_json.json";
  {
    std::ofstream out(cfg2);
    out << "{ not json";
  }
  RunResult r2 =
      run_cli("simulate --seed 1 --config " + cfg2.string() + " --out " + dir.string());
  CHECK(r2.exit_code == 1);
  CHECK_FALSE(fs::exists(dir));
  fs::remove(cfg2);
}

TEST_CASE("invalid parameter values are rejected before any output") {
  const fs::path dir = fresh_dir("badparam");
  RunResult r = run_cli("simulate --seed 1 --out " + dir.string() +
                        " --max-size 10 --parents 20 --births 10");
  CHECK(r.exit_code == 1);
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("keyexchange reports recovery results") {
  const fs::path dir = fresh_dir("kx");
  RunResult r = run_cli("keyexchange --seed 41 --out " + dir.string() +
                        " --length 500 --max-size 40 --parents 8 --births 1500"
                        " --trials 3 --family 6 --window 25");
  REQUIRE(r.exit_code == 0);

  json report = json::parse(slurp(dir / "keyexchange_report.json"));
  CHECK(report["trials"] == 3);
  const double rate = report["success_rate"].get<double>();
  CHECK(rate >= 0.0);
  CHECK(rate <= 1.0);
  CHECK(report["runs"].size() == 3);

  CHECK(json::parse(slurp(dir / "conditional_table.json")).at("table").contains("counts"));
  CHECK(json::parse(slurp(dir / "bundle.json")).at("bundle").contains("payload"));
  const std::string table_csv = slurp(dir / "conditional_table.csv");
  CHECK(table_csv.find("local,A,B") != std::string::npos);
}

TEST_CASE("challenge reports work separation and the analytic block") {
  const fs::path dir = fresh_dir("challenge");
  RunResult r = run_cli("challenge --seed 51 --out " + dir.string() +
                        " --length 400 --max-size 40 --parents 8 --births 1500"
                        " --indices 3 --budget 17576 --trials 4 --analytic-n 10");
  REQUIRE(r.exit_code == 0);

  json report = json::parse(slurp(dir / "challenge_report.json"));
  CHECK(report["trials"] == 4);
  CHECK(report["relative"]["work"].size() == 4);
  CHECK(report["alien"]["work"].size() == 4);

  const json& analytics = report["analytics"];
  CHECK(analytics["search_space"]["rows"].size() == 11);
  // Sum of the exact row counts must cover the whole tuple space: spot-check
  // the k = analytic_n row, which is always exactly one tuple.
  CHECK(analytics["search_space"]["rows"].back()["count"] == "1");
  CHECK(analytics["two_index_block"]["tier01_candidates"] == 51);
  CHECK(analytics["two_index_block"]["target_prefix"] == "45");
  CHECK(analytics["work_ratio"].size() == 2);
}

TEST_CASE("attack consumes exported scenarios and reproduces bytewise") {
  const fs::path exp = fresh_dir("export");
  REQUIRE(run_cli("export --out " + exp.string()).exit_code == 0);
  for (const char* name : {"simulate_config.json", "keyexchange_config.json",
                           "challenge_config.json", "attack_scenario.json"})
    CHECK(fs::exists(exp / name));

  // Shrink the bundled scenario so the end-to-end path stays fast.
  json scen = json::parse(slurp(exp / "attack_scenario.json"));
  scen["births"] = 2000;
  scen["population"]["max_size"] = 50;
  scen["population"]["length"] = 300;
  scen["random_adversaries"] = 3;
  scen["clones"] = 2;
  scen["index_count"] = 3;
  scen["budget"] = 17576;
  scen["committee_size"] = 3;
  scen["calibration_trials"] = 20;
  scen["legitimate_checks"] = 5;
  const fs::path cfg = fs::temp_directory_path() / "genepool_attack_cfg.json";
  {
    std::ofstream out(cfg);
    out << scen.dump(2);
  }

  const fs::path d1 = fresh_dir("attack1");
  const fs::path d2 = fresh_dir("attack2");
  REQUIRE(run_cli("attack --config " + cfg.string() + " --out " + d1.string()).exit_code == 0);
  REQUIRE(run_cli("attack --config " + cfg.string() + " --out " + d2.string()).exit_code == 0);

  json report = json::parse(slurp(d1 / "detection_report.json"));
  CHECK(report["report"]["detection"]["adversary_checks"] == 3);
  CHECK(report["report"]["clone_detection"]["all_clones_flagged"] == true);
  CHECK(report["report"]["config"]["births"] == 2000);
  CHECK(slurp(d1 / "detection_report.json") == slurp(d2 / "detection_report.json"));
  fs::remove(cfg);
}
