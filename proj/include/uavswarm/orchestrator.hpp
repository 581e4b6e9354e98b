#ifndef UAVSWARM_ORCHESTRATOR_HPP
#define UAVSWARM_ORCHESTRATOR_HPP

#include <string>
#include <vector>

#include "uavswarm/model.hpp"
#include "uavswarm/placement.hpp"
#include "uavswarm/time_sched.hpp"

namespace uavswarm {

enum class TimeMode { ota, eta };
enum class Infra { uav, bs };
enum class Access { ofdma, tdma };

struct RunOptions {
  SchedulePolicy policy = SchedulePolicy::optimal;
  TimeMode time_mode = TimeMode::ota;
  Infra infra = Infra::uav;
  Access access = Access::ofdma;
  double eps = 1e-4;
  int max_iters = 50;
  bool parallel = true;
  bool scan_time = false;  // grid search instead of the stationarity characterization
  double init_altitude = 40.0;
  PlacementOptions placement;
};

struct RunState {
  int iteration = 0;
  Scenario scenario;
  Deployment deployment;
  AssociationState associations;
  Schedule schedule;
  TimeAllocation time;
  std::vector<double> trace;
  double value = 0.0;
};

/// Angular-partition centroids at a common altitude, EH-feasible I and B, nearest-UAV A,
/// near-first schedule and an even time split.
RunState initial_state(const Scenario& scn, const RunOptions& opts);

/// Alternating optimization. Every accepted step keeps the sum throughput nondecreasing.
SolutionReport run(const Scenario& scn, const RunOptions& opts = {});

std::string to_string(SchedulePolicy p);
std::string to_string(TimeMode m);
std::string to_string(Infra m);
std::string to_string(Access m);

}  // namespace uavswarm

#endif
