#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "uavswarm/errors.hpp"
#include "uavswarm/time_sched.hpp"

using namespace uavswarm;

namespace {

SolverCoefficients bare(std::vector<double> th0, std::vector<double> th1, std::vector<int> L,
                        double gamma) {
  SolverCoefficients c;
  c.theta0 = std::move(th0);
  c.theta1 = std::move(th1);
  c.epochs = std::move(L);
  c.gamma = gamma;
  return c;
}

AssociationState one_uav(int K) {
  AssociationState a{BinaryMatrix(K, 1), BinaryMatrix(K, 1), BinaryMatrix(K, 1)};
  for (int i = 0; i < K; ++i) {
    a.dl_energy.set(i, 0, true);
    a.ul_info.set(i, 0, true);
    a.ul_energy.set(i, 0, true);
  }
  return a;
}

double schedule_value(const SolverCoefficients& c, const Schedule& s, const TimeAllocation& t, int L) {
  double v = 0.0;
  for (std::size_t i = 0; i < s.epoch.size(); ++i)
    v += marginal_benefit(c, int(i), s.epoch[i], L, t, true);
  return v;
}

}  // namespace

TEST_CASE("coefficients with one UAV and one device") {
  auto t = fixture::make(1, 1, 1, 3, 10.0);
  auto c = compute_coefficients(t.scn, t.dep, t.assoc, t.sched, t.time);
  double g = oracle::gain(t.dep.dl_positions[0], t.scn.devices[0], t.scn.channel);
  double gu = oracle::gain(t.dep.ul_positions[0], t.scn.devices[0], t.scn.channel);
  double eps = t.scn.radio.epsilon();
  CHECK(c.theta0[0] == doctest::Approx(eps * gu * g).epsilon(1e-12));
  CHECK(c.theta1[0] == doctest::Approx(eps * gu * gu).epsilon(1e-12));
}

TEST_CASE("coefficients match a direct evaluation on a three-device toy") {
  auto t = fixture::make(3, 2, 1, 17, 30.0);
  REQUIRE(fixture::covered(t));
  t.time = {0.4, 0.6};
  auto c = compute_coefficients(t.scn, t.dep, t.assoc, t.sched, t.time);
  double eps = t.scn.radio.epsilon();
  double worst = -1.0;
  int wi = -1;
  for (int i = 0; i < 3; ++i) {
    double GD = 0, GB = 0, gU = 0, others = 0;
    int owner = -1;
    for (int j = 0; j < 2; ++j) {
      double gd = oracle::gain(t.dep.dl_positions[j], t.scn.devices[i], t.scn.channel);
      double gu = oracle::gain(t.dep.ul_positions[j], t.scn.devices[i], t.scn.channel);
      if (t.assoc.dl_energy(i, j)) GD += gd;
      if (t.assoc.ul_energy(i, j)) GB += gu;
      if (t.assoc.ul_info(i, j)) gU = gu, owner = j;
    }
    for (int j = 0; j < 2; ++j)
      if (j != owner && t.assoc.ul_energy(i, j))
        others += oracle::gain(t.dep.ul_positions[j], t.scn.devices[i], t.scn.channel);
    int L = t.sched.epochs_per_uav[owner];
    int k = t.sched.epoch[i];
    CHECK(c.epochs[i] == L);
    CHECK(c.theta0[i] == doctest::Approx(eps * gU * GD).epsilon(1e-12));
    CHECK(c.theta1[i] == doctest::Approx(eps * gU * GB).epsilon(1e-12));
    CHECK(c.phi[i] == doctest::Approx(0.6 / (eps * L * gU)).epsilon(1e-12));
    CHECK(c.lambda_cap[i] == doctest::Approx(0.6 / (eps * L * GD)).epsilon(1e-12));
    CHECK(c.iota[i] == doctest::Approx(eps * (k - 1) * others).epsilon(1e-12));
    for (int j = 0; j < 2; ++j)
      CHECK(c.chi[i][j] ==
            doctest::Approx(t.sched.epochs_per_uav[j] * 0.4 * GD + (k - 1) * 0.6 * GB).epsilon(1e-12));
    double r = 0.6 * c.gamma / (eps * gU * GD * L * 0.4 + eps * gU * GB * (k - 1) * 0.6);
    if (r > worst) worst = r, wi = i;
  }
  CHECK(c.varpi == doctest::Approx(worst).epsilon(1e-12));
  CHECK(c.argmax_device == wi);
}

TEST_CASE("w indicators") {
  auto c = bare({1.0}, {0.0}, {1}, 5.0);
  auto w = compute_w(c, {0.5, 0.5}, {1});
  CHECK(w[0][0] == 1);
  c.gamma = 1e-12;
  CHECK(compute_w(c, {0.5, 0.5}, {1})[0][0] == 0);

  auto d = bare({0.3}, {0.8}, {6}, 2.0);
  auto ws = compute_w(d, {0.3, 0.7}, {6});
  for (int k = 1; k < 6; ++k) CHECK(ws[0][k] <= ws[0][k - 1]);
  CHECK(ws[0][0] == 1);
  CHECK(ws[0][5] == 0);
}

TEST_CASE("varpi is the largest active ratio") {
  auto c = bare({2.0, 0.5, 4.0}, {1.0, 1.0, 1.0}, {2, 2, 2}, 3.0);
  Schedule s{{1, 2, 1}, {2}};
  TimeAllocation t{0.5, 0.5};
  double best = -1.0;
  int bi = -1;
  for (int i = 0; i < 3; ++i) {
    int k = s.epoch[i];
    double r = 0.5 * 3.0 / (c.theta0[i] * 2 * 0.5 + c.theta1[i] * (k - 1) * 0.5);
    if (r > best) best = r, bi = i;
  }
  auto v = compute_varpi(c, s, t);
  CHECK(v.value == doctest::Approx(best));
  CHECK(v.device == bi);
  CHECK(v.epoch == s.epoch[bi]);

  auto single = bare({2.0}, {0.0}, {1}, 0.5);
  CHECK(compute_varpi(single, Schedule{{1}, {1}}, t).value == doctest::Approx(0.25));
  CHECK_THROWS_AS(compute_varpi(bare({}, {}, {}, 1.0), Schedule{}, t), StateError);
}

TEST_CASE("top-M epoch selection") {
  auto a = one_uav(3);
  auto c = bare({3.0, 1.0, 2.0}, {0.0, 0.0, 0.0}, {2, 2, 2}, 1e-9);
  auto s = build_schedule(c, {0.5, 0.5}, 2, a);
  CHECK(s.epoch == std::vector<int>{2, 1, 2});
  CHECK_NOTHROW(s.validate(a, 2));

  auto big = one_uav(20);
  auto c20 = bare(std::vector<double>(20, 1.0), std::vector<double>(20, 0.5), std::vector<int>(20, 2), 1e-9);
  auto back = build_schedule(c20, {0.5, 0.5}, 12, big);
  auto fwd = build_schedule(c20, {0.5, 0.5}, 12, big, ScheduleMethod::greedy, FillOrder::forward);
  CHECK(back.epochs_per_uav[0] == 2);
  CHECK(back.members(big, 0, 2).size() == 12);
  CHECK(back.members(big, 0, 1).size() == 8);
  CHECK(fwd.members(big, 0, 1).size() == 8);
  CHECK(fwd.members(big, 0, 2).size() == 12);
}

TEST_CASE("schedules against the partition oracle") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0.05, 3.0);
  auto a = one_uav(5);
  int greedy_hits = 0;
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> th0(5), th1(5);
    for (int i = 0; i < 5; ++i) th0[i] = U(rng), th1[i] = U(rng);
    double gamma = 0.2 + U(rng);
    auto c = bare(th0, th1, std::vector<int>(5, 3), gamma);
    TimeAllocation t{0.2 + 0.2 * U(rng), 0.0};
    t.tau1 = 1.0 - t.tau0;
    auto ref = oracle::brute_partition(5, 3, 2, [&](int i, int k) {
      double s = th0[i] * 3 * t.tau0 + th1[i] * (k - 1) * t.tau1;
      double v = t.tau1 / 3 * std::log(1.0 + s / t.tau1);
      double r = t.tau1 * gamma / s;
      return r >= 1.0 ? v - r : v;
    });
    Schedule rs{ref, {3}};
    double best = schedule_value(c, rs, t, 3);
    auto exact = build_schedule(c, t, 2, a, ScheduleMethod::exact);
    CHECK(schedule_value(c, exact, t, 3) == doctest::Approx(best).epsilon(1e-12));
    auto greedy = build_schedule(c, t, 2, a);
    CHECK_NOTHROW(greedy.validate(a, 2));
    CHECK(schedule_value(c, greedy, t, 3) <= best + 1e-12);
    greedy_hits += std::abs(schedule_value(c, greedy, t, 3) - best) <= 1e-12 * std::abs(best);
  }
  MESSAGE("greedy backward fill optimal on " << greedy_hits << " of 40 toy instances");
  CHECK(greedy_hits > 0);
}

TEST_CASE("near-first and far-first rings") {
  Scenario scn;
  scn.devices = {{3, 0}, {1, 0}, {4, 0}, {2, 0}};
  scn.uav_count = 1;
  scn.channel_count = 2;
  Deployment dep;
  dep.dl_positions = {{0, 0, 40}};
  dep.ul_positions = {{0, 0, 40}};
  auto a = one_uav(4);
  auto nf = heuristic_schedule(SchedulePolicy::near_first, scn, dep, a, 2);
  auto ff = heuristic_schedule(SchedulePolicy::far_first, scn, dep, a, 2);
  CHECK(nf.epoch == std::vector<int>{2, 1, 2, 1});
  CHECK(ff.epoch == std::vector<int>{1, 2, 1, 2});
  auto single_nf = heuristic_schedule(SchedulePolicy::near_first, scn, dep, a, 4);
  auto single_ff = heuristic_schedule(SchedulePolicy::far_first, scn, dep, a, 4);
  CHECK(single_nf == single_ff);
  CHECK(single_nf.epochs_per_uav[0] == 1);

  scn.devices = {{0, 2}, {2, 0}, {0, 5}};
  auto a3 = one_uav(3);
  auto tie = heuristic_schedule(SchedulePolicy::near_first, scn, dep, a3, 1);
  CHECK(tie.epoch == std::vector<int>{1, 2, 3});
  CHECK_THROWS_AS(heuristic_schedule(SchedulePolicy::optimal, scn, dep, a3, 1), ParameterError);
}

TEST_CASE("closed-form binding split") {
  auto c = bare({5.0}, {0.0}, {1}, 5.0);
  Schedule s{{1}, {1}};
  auto sol = optimal_time(c, s);
  CHECK(sol.branch == TimeCase::binding);
  CHECK(sol.time.tau0 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sol.time.tau1 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sol.time.tau1 * 5.0 / (5.0 * sol.time.tau0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("slack split matches a 1e-4 grid on single devices") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(0.1, 20.0);
  int slack = 0;
  for (int trial = 0; trial < 30; ++trial) {
    double th0 = U(rng), th1 = U(rng);
    int k = 1 + int(rng() % 3), L = 3;
    auto c = bare({th0}, {th1}, {L}, 1e-3);
    Schedule s{{k}, {L}};
    TimeSolution sol;
    try {
      sol = optimal_time(c, s);
    } catch (const BracketError&) {
      CHECK(k > 1);
      CHECK(p1_derivative(p1_terms(c, s), 1e-6, 1.0) <= 0.0);
      continue;
    }
    if (sol.branch != TimeCase::slack) continue;
    ++slack;
    std::vector<oracle::TimeTerm> terms{{th0, th1, k, L}};
    auto g = oracle::time_grid(terms, c.gamma, 1.0, 1e-4);
    CHECK(std::abs(sol.time.tau0 - g.tau0) <= 1e-4);
    CHECK(sol.time.tau0 + sol.time.tau1 == doctest::Approx(1.0).epsilon(1e-15));
    double v = oracle::sum_throughput(terms, sol.time.tau0, sol.time.tau1);
    CHECK(v >= g.value * (1.0 - 1e-12));
    CHECK(std::abs(p1_derivative(p1_terms(c, s), sol.time.tau0, 1.0)) < 1e-6);
  }
  CHECK(slack >= 10);
}

TEST_CASE("scan agrees with the characterization") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(0.2, 6.0);
  for (int trial = 0; trial < 20; ++trial) {
    auto c = bare({U(rng), U(rng), U(rng)}, {U(rng), U(rng), U(rng)}, {2, 2, 2}, 0.5 * U(rng));
    Schedule s{{1, 2, 2}, {2}};
    auto b = scan_time(c, s);
    TimeSolution a;
    try {
      a = optimal_time(c, s);
    } catch (const BracketError&) {
      // stationarity has no interior root: the objective falls along the whole bracket
      CHECK(p1_derivative(p1_terms(c, s), 1e-6, 1.0) <= 0.0);
      CHECK(b.time.tau0 < 1e-3);
      continue;
    }
    auto terms = p1_terms(c, s);
    double va = p1_objective(terms, a.time, c.gamma), vb = p1_objective(terms, b.time, c.gamma);
    CHECK(va >= vb * (1.0 - 1e-6));
  }
}

TEST_CASE("tau0 requirement") {
  // tau1 gamma = Theta0 L tau0 with Theta1 = 0: tau0 = gamma/(gamma + Theta0 L)
  CHECK(tau0_requirement(2.0, 0.0, 1, 1, 2.0, 1.0) == doctest::Approx(0.5));
  CHECK(tau0_requirement(2.0, 10.0, 3, 2, 2.0, 1.0) == 0.0);
  CHECK(snr_ratio(2.0, 0.0, 1, 1, {0.5, 0.5}, 2.0) == doctest::Approx(1.0));
}
