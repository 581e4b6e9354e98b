#include "uavswarm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uavswarm/channel.hpp"
#include "uavswarm/errors.hpp"

namespace uavswarm {

namespace {

constexpr double kRelTol = 1e-9;

struct DeviceBudget {
  double g_info = 0.0;
  double snr = 0.0;
  double slot = 0.0;  // tau1 / L
};

DeviceBudget device_budget(const Scenario& scn, const Deployment& dep, const AssociationState& assoc,
                           const Schedule& sched, const TimeAllocation& time, int i) {
  const RadioParams& r = scn.radio;
  int j = assoc.ul_uav(i);
  int L = sched.epochs_per_uav[j];
  int k = sched.epoch[i];
  double slot = time.tau1 / L;
  double e0 = 0.0;
  for (int n : assoc.dl_providers(i))
    e0 += r.eh_eff * r.p_ut * time.tau0 * average_gain(dep.dl_positions[n], scn.devices[i], scn.channel);
  double ek = 0.0;
  for (int n : assoc.ul_providers(i))
    ek += r.eh_eff * r.p_ut * (k - 1) * slot *
          average_gain(dep.ul_positions[n], scn.devices[i], scn.channel);
  DeviceBudget b;
  b.g_info = average_gain(dep.ul_positions[j], scn.devices[i], scn.channel);
  b.slot = slot;
  b.snr = b.g_info * (e0 + ek) / (slot * r.noise_power);
  return b;
}

void check_consistent(const Scenario& scn, const Deployment& dep, const AssociationState& assoc,
                      const Schedule& sched, int channels) {
  int K = scn.device_count();
  int N = dep.uav_count();
  if (int(dep.ul_positions.size()) != N) throw StateError("DL and UL position counts differ");
  for (const BinaryMatrix* m : {&assoc.dl_energy, &assoc.ul_info, &assoc.ul_energy})
    if (m->rows() != K || m->cols() != N) throw StateError("association matrix has the wrong shape");
  if (int(sched.epoch.size()) != K || int(sched.epochs_per_uav.size()) != N)
    throw StateError("schedule has the wrong shape");
  assoc.validate();
  sched.validate(assoc, channels);
}

SolutionReport evaluate(const Scenario& scn, const Deployment& dep, const AssociationState& assoc,
                        const Schedule& sched, const TimeAllocation& time, int channels) {
  check_consistent(scn, dep, assoc, sched, channels);
  int K = scn.device_count();
  SolutionReport rep;
  rep.per_device_rate.assign(K, 0.0);
  rep.per_device_throughput.assign(K, 0.0);
  rep.decodable.assign(K, 0);
  for (int i = 0; i < K; ++i) {
    DeviceBudget b = device_budget(scn, dep, assoc, sched, time, i);
    rep.per_device_rate[i] = std::log1p(b.snr);
    rep.decodable[i] = b.snr >= scn.radio.gamma * (1.0 - kRelTol);
    if (rep.decodable[i]) rep.per_device_throughput[i] = b.slot * rep.per_device_rate[i];
    rep.sum_throughput += rep.per_device_throughput[i];
  }
  rep.jain = rep.sum_throughput > 0.0 ? jain(rep.per_device_throughput) : 0.0;
  rep.deployment = dep;
  rep.associations = assoc;
  rep.schedule = sched;
  rep.time = time;
  int N = dep.uav_count();
  for (int j = 0; j < N; ++j) {
    rep.mean_dl_altitude += dep.dl_positions[j].z / N;
    rep.mean_ul_altitude += dep.ul_positions[j].z / N;
    rep.mean_dl_coverage +=
        std::max(0.0, eh_horizontal_radius(dep.dl_positions[j].z, scn.channel, scn.radio)) / N;
  }
  return rep;
}

}  // namespace

BsLayout bs_layout(double region_radius) {
  if (!(region_radius > 0.0)) throw ParameterError("region radius must be positive");
  double h = region_radius / 2.0;
  BsLayout l;
  l.positions = {{h, h, kBsHeight}, {-h, h, kBsHeight}, {-h, -h, kBsHeight}, {h, -h, kBsHeight}};
  l.coverage_radius = region_radius * std::sqrt(2.0) / 2.0;
  return l;
}

bool bs_covers(const BsLayout& layout, Vec2 p) {
  for (const Vec3& b : layout.positions)
    if (distance(b.xy(), p) <= layout.coverage_radius * (1.0 + kRelTol)) return true;
  return false;
}

SolutionReport throughput_report(const Scenario& scn, const Deployment& dep,
                                 const AssociationState& assoc, const Schedule& sched,
                                 const TimeAllocation& time) {
  SolutionReport rep = evaluate(scn, dep, assoc, sched, time, scn.channel_count);
  rep.flags = check_solution(scn, dep, assoc, sched, time);
  return rep;
}

double jain(const std::vector<double>& x) {
  if (x.empty()) throw DomainError("Jain index of an empty vector");
  double s = 0.0, s2 = 0.0;
  for (double v : x) {
    s += v;
    s2 += v * v;
  }
  if (s2 == 0.0) throw DomainError("Jain index is undefined for an all-zero vector");
  return s * s / (double(x.size()) * s2);
}

SolutionReport tdma_mode(const Scenario& scn, const Deployment& dep, const AssociationState& assoc,
                         const TimeAllocation& time) {
  int K = scn.device_count();
  int N = dep.uav_count();
  Schedule s;
  s.epoch.assign(K, 1);
  s.epochs_per_uav.assign(N, 0);
  for (int j = 0; j < N; ++j) {
    std::vector<int> served = assoc.ul_served(j);
    Vec2 hub = dep.ul_positions[j].xy();
    std::stable_sort(served.begin(), served.end(), [&](int p, int q) {
      return distance(hub, scn.devices[p]) < distance(hub, scn.devices[q]);
    });
    s.epochs_per_uav[j] = int(served.size());
    for (int r = 0; r < int(served.size()); ++r) s.epoch[served[r]] = r + 1;
  }
  Scenario one = scn;
  one.channel_count = 1;
  SolutionReport rep = evaluate(one, dep, assoc, s, time, 1);
  rep.flags = check_solution(one, dep, assoc, s, time);
  return rep;
}

FeasibilityFlags check_solution(const Scenario& scn, const Deployment& dep,
                                const AssociationState& assoc, const Schedule& sched,
                                const TimeAllocation& time) {
  FeasibilityFlags f;
  int K = scn.device_count();
  int N = dep.uav_count();
  int M = scn.channel_count;
  const RadioParams& r = scn.radio;
  f.time_ok = time.tau0 > 0.0 && time.tau1 > 0.0 &&
              time.tau0 + time.tau1 <= scn.hover_time * (1.0 + kRelTol);
  for (int i = 0; i < K; ++i) {
    int dl = 0, ul = 0, ue = 0;
    for (int j = 0; j < N; ++j) {
      if (assoc.dl_energy(i, j)) {
        ++dl;
        if (r.p_ut * average_gain(dep.dl_positions[j], scn.devices[i], scn.channel) <
            r.rho * (1.0 - kRelTol))
          f.eh_dl_ok = false;
      }
      if (assoc.ul_energy(i, j)) {
        ++ue;
        if (r.p_ut * average_gain(dep.ul_positions[j], scn.devices[i], scn.channel) <
            r.rho * (1.0 - kRelTol))
          f.eh_ul_ok = false;
      }
      ul += assoc.ul_info(i, j);
    }
    f.dl_service_ok = f.dl_service_ok && dl >= 1;
    f.ul_service_ok = f.ul_service_ok && ul == 1;
    f.ul_energy_service_ok = f.ul_energy_service_ok && ue >= 1;
  }
  if (int(sched.epoch.size()) != K || int(sched.epochs_per_uav.size()) != N) {
    f.schedule_ok = false;
  } else {
    for (int j = 0; j < N; ++j) {
      int C = 0;
      for (int i = 0; i < K; ++i) C += assoc.ul_info(i, j);
      int L = sched.epochs_per_uav[j];
      if (L != (C + M - 1) / M) f.schedule_ok = false;
      std::vector<int> load(std::max(L, 0) + 1, 0);
      for (int i = 0; i < K; ++i) {
        if (!assoc.ul_info(i, j)) continue;
        int k = sched.epoch[i];
        if (k < 1 || k > L) {
          f.schedule_ok = false;
          continue;
        }
        if (++load[k] > M) f.schedule_ok = false;
      }
    }
  }
  for (int j = 0; j < N; ++j)
    for (const Vec3& u : {dep.dl_positions[j], dep.ul_positions[j]})
      if (u.z < scn.altitude.min - 1e-9 || u.z > scn.altitude.max + 1e-9) f.altitude_ok = false;
  if (f.time_ok && f.ul_service_ok && f.schedule_ok) {
    for (int i = 0; i < K; ++i) {
      DeviceBudget b = device_budget(scn, dep, assoc, sched, time, i);
      double ratio = b.snr > 0.0 ? r.gamma / b.snr : std::numeric_limits<double>::infinity();
      f.worst_snr_ratio = std::max(f.worst_snr_ratio, ratio);
      if (ratio > 1.0 + kRelTol) ++f.snr_violations;
    }
  }
  return f;
}

}  // namespace uavswarm
