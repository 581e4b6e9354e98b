#include <omp.h>

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "uavswarm/metrics.hpp"
#include "uavswarm/orchestrator.hpp"

using namespace uavswarm;

namespace {

Scenario small(int K, int N, int M, std::uint64_t seed, double radius = 30.0) {
  return generate_scenario(K, radius, seed, {}, {}, N, M);
}

bool same(const SolutionReport& a, const SolutionReport& b) {
  return a.sum_throughput == b.sum_throughput && a.trace == b.trace &&
         a.deployment.dl_positions == b.deployment.dl_positions &&
         a.deployment.ul_positions == b.deployment.ul_positions &&
         a.associations.dl_energy == b.associations.dl_energy &&
         a.associations.ul_info == b.associations.ul_info &&
         a.associations.ul_energy == b.associations.ul_energy && a.schedule.epoch == b.schedule.epoch &&
         a.time == b.time;
}

}  // namespace

TEST_CASE("one device and one UAV") {
  Scenario s = small(1, 1, 1, 4);
  SolutionReport r = run(s);
  CHECK(r.converged);
  CHECK(r.iterations <= 3);
  CHECK(r.flags.all_ok());
  Vec2 d = s.devices[0];
  CHECK(distance(r.deployment.dl_positions[0].xy(), d) < 1e-3);
  CHECK(distance(r.deployment.ul_positions[0].xy(), d) < 1e-3);
  CHECK(r.sum_throughput > 0.0);
}

TEST_CASE("enough channels gives a single epoch") {
  Scenario s = small(6, 1, 6, 2);
  SolutionReport r = run(s);
  CHECK(r.schedule.epochs_per_uav[0] == 1);
  for (int k : r.schedule.epoch) CHECK(k == 1);
  CHECK(r.flags.all_ok());
}

TEST_CASE("trace is nondecreasing and ends at the reported value") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    Scenario s = small(10, 2, 3, seed);
    SolutionReport r = run(s);
    REQUIRE(!r.trace.empty());
    for (std::size_t t = 1; t < r.trace.size(); ++t) CHECK(r.trace[t] >= r.trace[t - 1]);
    CHECK(r.trace.back() == doctest::Approx(r.sum_throughput).epsilon(1e-12));
    CHECK(r.flags.all_ok());
    auto want = oracle::throughputs(s, r.deployment, r.associations, r.schedule, r.time);
    double sum = 0.0;
    for (double v : want) sum += v;
    CHECK(r.sum_throughput == doctest::Approx(sum).epsilon(1e-12));
  }
}

TEST_CASE("reruns are identical and the serial path matches the parallel one") {
  Scenario s = small(12, 3, 2, 9, 40.0);
  RunOptions par;
  omp_set_num_threads(4);
  SolutionReport a = run(s, par);
  SolutionReport b = run(s, par);
  CHECK(same(a, b));
  RunOptions ser = par;
  ser.parallel = false;
  SolutionReport c = run(s, ser);
  CHECK(same(a, c));
}

TEST_CASE("optimal time split is at least as good as the even split") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Scenario s = small(8, 2, 2, seed);
    RunOptions eta;
    eta.time_mode = TimeMode::eta;
    SolutionReport o = run(s);
    SolutionReport e = run(s, eta);
    CHECK(e.time.tau0 == doctest::Approx(0.5 * s.hover_time));
    CHECK(e.time.tau1 == doctest::Approx(0.5 * s.hover_time));
    CHECK(e.sum_throughput <= o.sum_throughput * (1.0 + 1e-9));
  }
}

TEST_CASE("base station mode keeps the fixed layout") {
  Scenario s = small(10, 2, 3, 5, 80.0);
  RunOptions o;
  o.infra = Infra::bs;
  SolutionReport r = run(s, o);
  BsLayout l = bs_layout(s.region_radius);
  REQUIRE(r.deployment.uav_count() == 4);
  for (int j = 0; j < 4; ++j) {
    CHECK(r.deployment.dl_positions[j] == l.positions[j]);
    CHECK(r.deployment.ul_positions[j] == l.positions[j]);
  }
}

TEST_CASE("initial state") {
  Scenario s = small(9, 3, 2, 6);
  RunState st = initial_state(s, {});
  CHECK(st.deployment.uav_count() == 3);
  for (const Vec3& u : st.deployment.dl_positions) CHECK(u.z == 40.0);
  for (int i = 0; i < 9; ++i) CHECK(st.associations.ul_info.row_sum(i) == 1);
  CHECK(st.time.tau0 + st.time.tau1 == doctest::Approx(s.hover_time));
}
