#ifndef UAVSWARM_DL_OPT_HPP
#define UAVSWARM_DL_OPT_HPP

#include "uavswarm/model.hpp"
#include "uavswarm/numerics.hpp"
#include "uavswarm/placement.hpp"

namespace uavswarm {

/// Row-wise fractional instance for device i over the DL positions.
FractionalInstance dl_instance(const Scenario& scn, const Deployment& dep,
                               const SolverCoefficients& coeff, int device);

BinaryMatrix dl_associate(const Scenario& scn, const Deployment& dep, const SolverCoefficients& coeff,
                          const Schedule& sched);

struct DlAlpha {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double alpha3 = 0.0;
};

DlAlpha dl_alpha(const SolverCoefficients& coeff, int device);

/// Ratio terms of the DL objective of one UAV (devices with I(i,uav) = 1).
PlacementProblem dl_problem(const Scenario& scn, const AssociationState& assoc,
                            const SolverCoefficients& coeff, int uav);

PlacementResult dl_place(const Scenario& scn, const AssociationState& assoc,
                         const SolverCoefficients& coeff, const Schedule& sched, int uav, Vec3 init,
                         const PlacementOptions& opts = {});

}  // namespace uavswarm

#endif
