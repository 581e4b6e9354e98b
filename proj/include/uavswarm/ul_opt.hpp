#ifndef UAVSWARM_UL_OPT_HPP
#define UAVSWARM_UL_OPT_HPP

#include <vector>

#include "uavswarm/model.hpp"
#include "uavswarm/numerics.hpp"
#include "uavswarm/placement.hpp"

namespace uavswarm {

/// Fractional instance over the B row of device i (its UL UAV fixed by A).
FractionalInstance ul_energy_instance(const Scenario& scn, const Deployment& dep,
                                      const AssociationState& assoc, const SolverCoefficients& coeff,
                                      int device);

BinaryMatrix ul_energy_associate(const Scenario& scn, const Deployment& dep,
                                 const SolverCoefficients& coeff, const Schedule& sched,
                                 const AssociationState& assoc);

/// Score and SNR admissibility of device i sending to candidate UAV j.
struct UlInfoScores {
  std::vector<std::vector<double>> score;          // K x N
  std::vector<std::vector<std::uint8_t>> allowed;  // K x N
};

UlInfoScores ul_info_scores(const Scenario& scn, const Deployment& dep, const SolverCoefficients& coeff,
                            const Schedule& sched, const AssociationState& assoc);

enum class UlAssignMethod { per_device, hungarian_capacity };

struct UlInfoResult {
  BinaryMatrix ul_info;
  std::vector<int> epochs_per_uav;
};

UlInfoResult ul_info_associate(const Scenario& scn, const Deployment& dep,
                               const SolverCoefficients& coeff, const Schedule& sched,
                               const AssociationState& assoc,
                               UlAssignMethod method = UlAssignMethod::per_device);

/// Ratio terms of the UL objective for one UAV (devices with A(i,uav) = 1).
PlacementProblem ul_problem(const Scenario& scn, const Deployment& dep, const AssociationState& assoc,
                            const SolverCoefficients& coeff, int uav);

PlacementResult ul_place(const Scenario& scn, const Deployment& dep, const AssociationState& assoc,
                         const SolverCoefficients& coeff, const Schedule& sched, int uav, Vec3 init,
                         const PlacementOptions& opts = {});

}  // namespace uavswarm

#endif
