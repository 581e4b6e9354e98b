// Small hand-built states for the module tests.
#ifndef UAVSWARM_TESTS_FIXTURES_HPP
#define UAVSWARM_TESTS_FIXTURES_HPP

#include <random>
#include <vector>

#include "oracles.hpp"
#include "uavswarm/model.hpp"
#include "uavswarm/time_sched.hpp"

namespace fixture {

using namespace uavswarm;

struct Toy {
  Scenario scn;
  Deployment dep;
  AssociationState assoc;
  Schedule sched;
  TimeAllocation time;
};

// Devices uniform in a disc of `radius`, UAVs on a ring of radius/2 at altitude h (DL) and h2
// (UL). I and B hold every EH-feasible UAV, A the nearest one, schedule near-first.
inline Toy make(int K, int N, int M, std::uint64_t seed, double radius = 40.0, double h = 40.0,
                double h2 = 60.0, double p_dbm = 75.0, double rho_dbm = -18.0) {
  Toy t;
  RadioParams r;
  r.p_ut = dbm_to_watt(p_dbm);
  r.rho = dbm_to_watt(rho_dbm);
  t.scn = generate_scenario(K, radius, seed, {}, r, N, M);
  t.scn.region_radius = radius;
  for (int j = 0; j < N; ++j) {
    double a = 2.0 * M_PI * (j + 0.25) / N;
    double rr = N == 1 ? 0.0 : radius / 2.0;
    t.dep.dl_positions.push_back({rr * std::cos(a), rr * std::sin(a), h});
    t.dep.ul_positions.push_back({rr * std::cos(a), rr * std::sin(a), h2});
  }
  t.assoc = {BinaryMatrix(K, N), BinaryMatrix(K, N), BinaryMatrix(K, N)};
  for (int i = 0; i < K; ++i) {
    auto fd = oracle::eh_feasible(t.scn, t.dep.dl_positions, i);
    auto fu = oracle::eh_feasible(t.scn, t.dep.ul_positions, i);
    int near = 0;
    for (int j = 0; j < N; ++j) {
      t.assoc.dl_energy.set(i, j, fd[j]);
      t.assoc.ul_energy.set(i, j, fu[j]);
      if (distance(t.dep.ul_positions[j].xy(), t.scn.devices[i]) <
          distance(t.dep.ul_positions[near].xy(), t.scn.devices[i]))
        near = j;
    }
    t.assoc.ul_info.set(i, near, true);
  }
  t.sched = heuristic_schedule(SchedulePolicy::near_first, t.scn, t.dep, t.assoc, M);
  return t;
}

// Coefficients whose own varpi selects `branch`, reached by rescaling the SNR threshold.
// Forcing the branch flag instead can give binding coefficients with negative denominators.
inline bool coefficients_in(Toy& t, TimeCase branch, SolverCoefficients& out) {
  for (int attempt = 0; attempt < 60; ++attempt) {
    out = compute_coefficients(t.scn, t.dep, t.assoc, t.sched, t.time);
    if (out.branch == branch) return true;
    t.scn.radio.gamma *= branch == TimeCase::binding ? 2.0 : 0.5;
  }
  return false;
}

inline bool covered(const Toy& t) {
  for (int i = 0; i < t.scn.device_count(); ++i)
    if (t.assoc.dl_energy.row_sum(i) == 0 || t.assoc.ul_energy.row_sum(i) == 0) return false;
  return true;
}

}  // namespace fixture

#endif
