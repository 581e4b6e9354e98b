#include "uavswarm/dl_opt.hpp"

#include <algorithm>

#include "uavswarm/channel.hpp"
#include "uavswarm/errors.hpp"

namespace uavswarm {

FractionalInstance dl_instance(const Scenario& scn, const Deployment& dep,
                               const SolverCoefficients& coeff, int device) {
  int N = dep.uav_count();
  int k = std::max(1, coeff.epoch[device]);
  double lift = 1.0 + coeff.theta1[device] * (k - 1);
  FractionalInstance inst;
  inst.a.assign(N, 0.0);
  inst.b.assign(N, 0.0);
  inst.priority.assign(N, 0.0);
  if (coeff.branch == TimeCase::slack) {
    inst.a0 = inst.b0 = coeff.phi[device] * lift;
  } else {
    inst.a0 = 1.0;
    inst.b0 = lift;
  }
  for (int j = 0; j < N; ++j) {
    double g = average_gain(dep.dl_positions[j], scn.devices[device], scn.channel);
    inst.priority[j] = g;
    if (scn.radio.p_ut * g < scn.radio.rho) {
      inst.a[j] = kMasked;
      continue;
    }
    if (coeff.branch == TimeCase::slack) {
      inst.a[j] = -coeff.time.tau1 * g;
      inst.b[j] = coeff.time.tau0 * g;
    } else {
      inst.a[j] = 0.0;
      inst.b[j] = coeff.gamma_cap[device] * g;
    }
  }
  return inst;
}

BinaryMatrix dl_associate(const Scenario& scn, const Deployment& dep, const SolverCoefficients& coeff,
                          const Schedule&) {
  int K = scn.device_count();
  int N = dep.uav_count();
  BinaryMatrix I(K, N);
  for (int i = 0; i < K; ++i) {
    FractionalInstance inst = dl_instance(scn, dep, coeff, i);
    FractionalResult r;
    try {
      r = dinkelbach_select(inst);
    } catch (const CoverageError&) {
      throw CoverageError("device " + std::to_string(i) + " is outside every DL energy disc", i);
    }
    for (int j = 0; j < N; ++j) I.set(i, j, r.x[j] != 0);
  }
  return I;
}

DlAlpha dl_alpha(const SolverCoefficients& coeff, int device) {
  int k = std::max(1, coeff.epoch[device]);
  double lift = 1.0 + coeff.theta1[device] * (k - 1);
  DlAlpha a;
  if (coeff.branch == TimeCase::slack) {
    a.alpha1 = coeff.phi[device] * lift;
    a.alpha2 = coeff.time.tau0;
    a.alpha3 = 1.0;
  } else {
    a.alpha1 = lift;
    a.alpha2 = coeff.gamma_cap[device];
    a.alpha3 = coeff.gamma_cap[device] / lift;
  }
  return a;
}

PlacementProblem dl_problem(const Scenario& scn, const AssociationState& assoc,
                            const SolverCoefficients& coeff, int uav) {
  PlacementProblem p;
  p.channel = scn.channel;
  p.altitude = scn.altitude;
  double k0 = scn.channel.kappa0();
  double eh_limit = scn.radio.p_ut / (k0 * k0 * scn.radio.rho);
  for (int i : assoc.dl_served(uav)) {
    DlAlpha a = dl_alpha(coeff, i);
    RatioTerm t;
    t.pos = scn.devices[i];
    t.b = false;
    t.phi1 = a.alpha3;
    t.rho1 = a.alpha1;
    t.rho2 = a.alpha2;
    t.f_limit = eh_limit;
    p.terms.push_back(t);
  }
  return p;
}

PlacementResult dl_place(const Scenario& scn, const AssociationState& assoc,
                         const SolverCoefficients& coeff, const Schedule&, int uav, Vec3 init,
                         const PlacementOptions& opts) {
  PlacementProblem p = dl_problem(scn, assoc, coeff, uav);
  return place_uav(p, init, opts);
}

}  // namespace uavswarm
