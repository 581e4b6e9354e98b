#ifndef UAVSWARM_METRICS_HPP
#define UAVSWARM_METRICS_HPP

#include <vector>

#include "uavswarm/model.hpp"

namespace uavswarm {

/// Four fixed base stations covering the deployment disc.
struct BsLayout {
  std::vector<Vec3> positions;
  double coverage_radius = 0.0;
};

constexpr double kBsHeight = 40.0;

BsLayout bs_layout(double region_radius);
bool bs_covers(const BsLayout& layout, Vec2 p);

/// Rates and throughputs evaluated from the raw energy budgets (nats).
SolutionReport throughput_report(const Scenario& scn, const Deployment& dep,
                                 const AssociationState& assoc, const Schedule& sched,
                                 const TimeAllocation& time);

/// (sum x)^2 / (n sum x^2). Throws DomainError on an all-zero or empty vector.
double jain(const std::vector<double>& throughputs);

/// Same state with one device per epoch (L = C) in near-first order.
SolutionReport tdma_mode(const Scenario& scn, const Deployment& dep, const AssociationState& assoc,
                         const TimeAllocation& time);

/// Constraint checker that shares no code with the solvers.
FeasibilityFlags check_solution(const Scenario& scn, const Deployment& dep,
                                const AssociationState& assoc, const Schedule& sched,
                                const TimeAllocation& time);

inline double nats_to_bits(double v) { return v / 0.6931471805599453; }

}  // namespace uavswarm

#endif
