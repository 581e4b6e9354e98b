#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "uavswarm/errors.hpp"
#include "uavswarm/experiment.hpp"

using namespace uavswarm;

namespace {

ParseError parse_failure(const std::string& text) {
  try {
    parse_experiment(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected a parse error");
  return ParseError("");
}

ExperimentSpec tiny() {
  ExperimentSpec s;
  s.devices = 6;
  s.uavs = 2;
  s.channels = 2;
  s.region_radius = 30.0;
  s.seed = 11;
  return s;
}

}  // namespace

TEST_CASE("config parse errors carry line and field") {
  auto e = parse_failure("{\n  \"devices\": 10,\n  \"uavs\": \"four\"\n}\n");
  CHECK(e.line() == 3);
  CHECK(e.field() == "uavs");

  e = parse_failure("{\n  \"devices\": 10,\n\n  \"colour\": 1\n}\n");
  CHECK(e.line() == 4);
  CHECK(e.field() == "colour");

  e = parse_failure("{\n  \"mode\": {\"time\": \"sometimes\"}\n}\n");
  CHECK(e.field() == "time");
  CHECK(e.line() == 2);

  e = parse_failure("{\n  \"ensemble\": 0\n}\n");
  CHECK(e.field() == "ensemble");
  CHECK(e.line() == 2);

  e = parse_failure("{\n  \"devices\": 10,\n  \"uavs\": 2,,\n}\n");
  CHECK(e.line() == 3);
}

TEST_CASE("config round trip") {
  ExperimentSpec s = tiny();
  s.modes = {{TimeMode::eta, Infra::uav, SchedulePolicy::far_first, Access::ofdma},
             {TimeMode::ota, Infra::bs, SchedulePolicy::optimal, Access::tdma}};
  s.sweep = {"rho_dbm", -28.0, 5.0, -18.0};
  s.ensemble = 3;
  ExperimentSpec t = parse_experiment(experiment_to_text(s));
  CHECK(experiment_to_text(t) == experiment_to_text(s));
  CHECK(t.modes.size() == 2);
  CHECK(t.modes[1].label() == s.modes[1].label());
  CHECK(t.radio.rho == doctest::Approx(s.radio.rho).epsilon(1e-12));
}

TEST_CASE("sweep argument") {
  SweepSpec s = parse_sweep("p_ut_dbm=60:5:75");
  CHECK(s.name == "p_ut_dbm");
  auto v = s.values();
  REQUIRE(v.size() == 4);
  CHECK(v.front() == 60.0);
  CHECK(v.back() == 75.0);
  CHECK(parse_sweep("devices=10:10:30").values() == std::vector<double>{10.0, 20.0, 30.0});
  CHECK(SweepSpec{}.values().size() == 1);
  CHECK_THROWS_AS(parse_sweep("p_ut_dbm=60:5"), ParseError);
  CHECK_THROWS_AS(parse_sweep("height=1:1:2"), ParseError);
  CHECK_THROWS_AS(parse_sweep("rho_dbm=a:1:2"), ParseError);
}

TEST_CASE("one row per run and byte-identical reruns") {
  ExperimentSpec s = tiny();
  s.modes = {ModeSpec{}, {TimeMode::eta, Infra::uav, SchedulePolicy::optimal, Access::ofdma}};
  s.sweep = {"channels", 1.0, 1.0, 2.0};
  auto a = run_experiment(s);
  REQUIRE(a.size() == 4);
  CHECK(a[0].sweep_value == 1.0);
  CHECK(a[1].sweep_value == 1.0);
  CHECK(a[2].sweep_value == 2.0);
  CHECK(a[0].mode != a[1].mode);
  for (const auto& r : a) CHECK(r.status == "ok");
  auto b = run_experiment(s);
  CHECK(results_csv(a, false) == results_csv(b, false));
  CHECK(summary_csv(a, true) == summary_csv(b, true));
  s.parallel = false;
  CHECK(results_csv(run_experiment(s), false) == results_csv(a, false));
}

TEST_CASE("ensemble members use consecutive seeds") {
  ExperimentSpec s = tiny();
  s.ensemble = 3;
  auto rows = run_experiment(s);
  REQUIRE(rows.size() == 3);
  for (int e = 0; e < 3; ++e) CHECK(rows[e].seed == s.seed + e);
  CHECK(rows[0].scenario_hash != rows[1].scenario_hash);
}

TEST_CASE("outputs on disk") {
  ExperimentSpec s = tiny();
  auto rows = run_experiment(s);
  auto dir = std::filesystem::temp_directory_path() / "uavswarm_test_outputs";
  std::filesystem::remove_all(dir);
  write_outputs(dir, s, rows);
  for (const char* f : {"results.csv", "summary.csv", "manifest.json"})
    CHECK(std::filesystem::exists(dir / f));
  std::ifstream in(dir / "results.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("sweep_name,sweep_value,mode,seed,status", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("scenario hash equals the git blob id of the scenario text") {
  Scenario scn = make_scenario(tiny(), 0.0, 5);
  std::string h = scenario_hash(scn);
  CHECK(h.size() == 40);
  CHECK(h == scenario_hash(scenario_from_text(scenario_to_text(scn))));
  auto path = std::filesystem::temp_directory_path() / "uavswarm_scenario.json";
  {
    std::ofstream out(path, std::ios::binary);
    out << scenario_to_text(scn);
  }
  std::string cmd = "git hash-object " + path.string() + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[64] = {};
  bool got = std::fgets(buf, sizeof buf, p) != nullptr;
  pclose(p);
  std::filesystem::remove(path);
  if (got) CHECK(std::string(buf, 40) == h);
  else MESSAGE("git not available, blob id not cross-checked");
}
