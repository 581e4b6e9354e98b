#include "uavswarm/ul_opt.hpp"

#include <algorithm>
#include <cmath>

#include "uavswarm/channel.hpp"
#include "uavswarm/errors.hpp"

namespace uavswarm {

FractionalInstance ul_energy_instance(const Scenario& scn, const Deployment& dep,
                                      const AssociationState& assoc, const SolverCoefficients& coeff,
                                      int device) {
  int N = dep.uav_count();
  int owner = assoc.ul_uav(device);
  int k = std::max(1, coeff.epoch[device]);
  double eps = coeff.epsilon;
  double D_own = path_loss(dep.ul_positions[owner], scn.devices[device], scn.channel);
  FractionalInstance inst;
  inst.a.assign(N, 0.0);
  inst.b.assign(N, 0.0);
  inst.priority.assign(N, 0.0);
  if (coeff.branch == TimeCase::slack) {
    double lam = coeff.lambda_cap[device];
    inst.a0 = -1.0;
    inst.b0 = lam * D_own + coeff.time.tau0;
  } else {
    double om = coeff.omega_cap[device];
    inst.a0 = -om;
    inst.b0 = om + D_own;
  }
  for (int n = 0; n < N; ++n) {
    double g = average_gain(dep.ul_positions[n], scn.devices[device], scn.channel);
    inst.priority[n] = g;
    if (scn.radio.p_ut * g < scn.radio.rho) {
      inst.a[n] = kMasked;
      continue;
    }
    if (coeff.branch == TimeCase::slack) {
      inst.a[n] = 0.0;
      inst.b[n] = eps * coeff.lambda_cap[device] * (k - 1) * g;
    } else {
      inst.a[n] = -eps * (k - 1) * g;
      inst.b[n] = eps * (k - 1) * g;
    }
  }
  return inst;
}

BinaryMatrix ul_energy_associate(const Scenario& scn, const Deployment& dep,
                                 const SolverCoefficients& coeff, const Schedule&,
                                 const AssociationState& assoc) {
  int K = scn.device_count();
  int N = dep.uav_count();
  BinaryMatrix B(K, N);
  for (int i = 0; i < K; ++i) {
    FractionalInstance inst = ul_energy_instance(scn, dep, assoc, coeff, i);
    FractionalResult r;
    try {
      r = dinkelbach_select(inst);
    } catch (const CoverageError&) {
      throw CoverageError("device " + std::to_string(i) + " is outside every UL energy disc", i);
    }
    for (int n = 0; n < N; ++n) B.set(i, n, r.x[n] != 0);
  }
  return B;
}

UlInfoScores ul_info_scores(const Scenario& scn, const Deployment& dep, const SolverCoefficients& coeff,
                            const Schedule& sched, const AssociationState& assoc) {
  int K = scn.device_count();
  int N = dep.uav_count();
  int M = scn.channel_count;
  double eps = coeff.epsilon;
  const auto& t = coeff.time;
  UlInfoScores s;
  s.score.assign(K, std::vector<double>(N, 0.0));
  s.allowed.assign(K, std::vector<std::uint8_t>(N, 0));
  for (int i = 0; i < K; ++i) {
    double GD = coeff.g_dl_sum[i];
    double GB = coeff.g_ul_sum[i];
    for (int j = 0; j < N; ++j) {
      int load = assoc.ul_count(j) + (assoc.ul_info(i, j) ? 0 : 1);
      int L = epochs_needed(load, M);
      int k = std::min(std::max(1, sched.epoch[i]), L);
      double D = path_loss(dep.ul_positions[j], scn.devices[i], scn.channel);
      double energy = eps * (k - 1) * GB;
      if (coeff.branch == TimeCase::slack) {
        double lam = t.tau1 / (eps * L * GD);
        s.score[i][j] = 1.0 / (lam * D + lam * energy + t.tau0);
      } else {
        double om = coeff.omega_cap[i];
        s.score[i][j] = (om + energy) / (om + energy + D);
      }
      double chi = L * t.tau0 * GD + (k - 1) * t.tau1 * GB;
      s.allowed[i][j] = t.tau1 * coeff.gamma * D / eps <= chi * (1.0 + 1e-12);
    }
  }
  return s;
}

UlInfoResult ul_info_associate(const Scenario& scn, const Deployment& dep,
                               const SolverCoefficients& coeff, const Schedule& sched,
                               const AssociationState& assoc, UlAssignMethod method) {
  int K = scn.device_count();
  int N = dep.uav_count();
  UlInfoScores s = ul_info_scores(scn, dep, coeff, sched, assoc);
  UlInfoResult out;
  out.ul_info = BinaryMatrix(K, N);
  for (int i = 0; i < K; ++i) {
    bool any = false;
    for (int j = 0; j < N; ++j) any = any || s.allowed[i][j];
    if (!any)
      throw SnrInfeasibleError("device " + std::to_string(i) + " meets the SNR bound at no UAV", i,
                               std::max(1, sched.epoch[i]));
  }
  if (method == UlAssignMethod::per_device) {
    for (int i = 0; i < K; ++i) {
      int best = -1;
      for (int j = 0; j < N; ++j)
        if (s.allowed[i][j] && (best < 0 || s.score[i][j] > s.score[i][best])) best = j;
      out.ul_info.set(i, best, true);
    }
  } else {
    int cap = (K + N - 1) / N;
    std::vector<std::vector<double>> cost(K, std::vector<double>(N * cap));
    for (int i = 0; i < K; ++i)
      for (int j = 0; j < N; ++j)
        for (int c = 0; c < cap; ++c)
          cost[i][j * cap + c] = s.allowed[i][j] ? -s.score[i][j] : kMasked;
    Assignment a = hungarian(cost);
    for (int i = 0; i < K; ++i) {
      int col = a.row_to_col[i];
      if (col < 0 || !s.allowed[i][col / cap])
        throw SnrInfeasibleError("capacity-limited assignment left device " + std::to_string(i) +
                                     " without an admissible UAV",
                                 i, std::max(1, sched.epoch[i]));
      out.ul_info.set(i, col / cap, true);
    }
  }
  out.epochs_per_uav.assign(N, 0);
  for (int j = 0; j < N; ++j)
    out.epochs_per_uav[j] = epochs_needed(out.ul_info.col_sum(j), scn.channel_count);
  return out;
}

PlacementProblem ul_problem(const Scenario& scn, const Deployment& dep, const AssociationState& assoc,
                            const SolverCoefficients& coeff, int uav) {
  PlacementProblem p;
  p.channel = scn.channel;
  p.altitude = scn.altitude;
  double k0 = scn.channel.kappa0();
  double eps = coeff.epsilon;
  const auto& t = coeff.time;
  double eh_limit = scn.radio.p_ut / (k0 * k0 * scn.radio.rho);
  (void)dep;
  for (int i : assoc.ul_served(uav)) {
    int k = std::max(1, coeff.epoch[i]);
    int L = coeff.epochs[i];
    RatioTerm term;
    term.pos = scn.devices[i];
    term.b = assoc.ul_energy(i, uav);
    double iota = coeff.iota[i];
    if (coeff.branch == TimeCase::slack) {
      double lam = coeff.lambda_cap[i];
      term.phi1 = 1.0;
      term.phi2 = 0.0;
      term.rho1 = lam;
      term.rho2 = lam * iota + t.tau0;
      term.rho3 = eps * lam * (k - 1);
    } else {
      term.phi1 = iota + coeff.omega_cap[i];
      term.phi2 = eps * (k - 1);
      term.rho1 = 1.0;
      term.rho2 = term.phi1;
      term.rho3 = term.phi2;
    }
    double snr_limit = eps / (coeff.gamma * k0 * k0) *
                       (L * t.tau0 / t.tau1 * coeff.g_dl_sum[i] + (k - 1) * coeff.g_ul_sum[i]);
    term.f_limit = term.b ? std::min(snr_limit, eh_limit) : snr_limit;
    p.terms.push_back(term);
  }
  return p;
}

PlacementResult ul_place(const Scenario& scn, const Deployment& dep, const AssociationState& assoc,
                         const SolverCoefficients& coeff, const Schedule&, int uav, Vec3 init,
                         const PlacementOptions& opts) {
  PlacementProblem p = ul_problem(scn, dep, assoc, coeff, uav);
  return place_uav(p, init, opts);
}

}  // namespace uavswarm
