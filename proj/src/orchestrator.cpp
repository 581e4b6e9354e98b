#include "uavswarm/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "uavswarm/channel.hpp"
#include "uavswarm/dl_opt.hpp"
#include "uavswarm/errors.hpp"
#include "uavswarm/metrics.hpp"
#include "uavswarm/ul_opt.hpp"

namespace uavswarm {

std::string to_string(SchedulePolicy p) {
  switch (p) {
    case SchedulePolicy::optimal: return "optimal";
    case SchedulePolicy::near_first: return "nf";
    case SchedulePolicy::far_first: return "ff";
  }
  return "?";
}
std::string to_string(TimeMode m) { return m == TimeMode::ota ? "ota" : "eta"; }
std::string to_string(Infra m) { return m == Infra::uav ? "uav" : "bs"; }
std::string to_string(Access m) { return m == Access::ofdma ? "ofdma" : "tdma"; }

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Candidate {
  Deployment dep;
  AssociationState assoc;
  Schedule sched;
  TimeAllocation time;
};

[[noreturn]] void rethrow_annotated(const Error& e, int iteration) {
  std::string msg = "iteration " + std::to_string(iteration) + ": " + e.what();
  if (auto* c = dynamic_cast<const CoverageError*>(&e)) throw CoverageError(msg, c->device());
  switch (e.error_class()) {
    case ErrorClass::parameter: throw ParameterError(msg);
    case ErrorClass::domain: throw DomainError(msg);
    case ErrorClass::infeasible: throw InfeasibleRegionError(msg);
    case ErrorClass::solver: throw SolverError(msg);
    case ErrorClass::state: throw StateError(msg);
    default: throw InternalError(msg);
  }
}

class Loop {
public:
  Loop(const Scenario& scn, const RunOptions& opts) : scn_(scn), opts_(opts) {}

  RunState init();
  void iterate(RunState& st);

private:
  const Scenario& scn_;
  const RunOptions& opts_;

  int channels() const { return scn_.channel_count; }
  bool fixed_positions() const { return opts_.infra == Infra::bs; }

  double value(const Candidate& c) const;
  void retime(Candidate& c) const;
  void reschedule(Candidate& c) const;
  bool offer(RunState& st, Candidate c) const;
  Candidate snapshot(const RunState& st) const {
    return {st.deployment, st.associations, st.schedule, st.time};
  }
  SolverCoefficients coefficients(const RunState& st) const {
    return compute_coefficients(scn_, st.deployment, st.associations, st.schedule, st.time);
  }
  bool repair_ul_energy(Candidate& c) const;
  PlacementOptions placement_opts(int iteration, int uav, int phase) const {
    PlacementOptions p = opts_.placement;
    p.seed = opts_.placement.seed * 0x9E3779B97F4A7C15ull + std::uint64_t(iteration) * 1000003u +
             std::uint64_t(uav) * 7919u + std::uint64_t(phase);
    return p;
  }

  void step_schedule_time(RunState& st) const;
  void step_dl_assoc(RunState& st) const;
  void step_dl_place(RunState& st) const;
  void step_ul_energy(RunState& st) const;
  void step_ul_info(RunState& st) const;
  void step_ul_place(RunState& st) const;
};

double Loop::value(const Candidate& c) const {
  try {
    return throughput_report(scn_, c.dep, c.assoc, c.sched, c.time).sum_throughput;
  } catch (const StateError&) {
    return kNegInf;
  }
}

void Loop::retime(Candidate& c) const {
  double T = scn_.hover_time;
  if (opts_.time_mode == TimeMode::eta) {
    c.time = {0.5 * T, 0.5 * T};
    return;
  }
  SolverCoefficients coeff = compute_coefficients(scn_, c.dep, c.assoc, c.sched, c.time);
  try {
    c.time = opts_.scan_time ? scan_time(coeff, c.sched, T).time : optimal_time(coeff, c.sched, T).time;
  } catch (const BracketError&) {
    c.time = scan_time(coeff, c.sched, T).time;
  } catch (const StateError&) {
    // nothing decodable at any split; keep the current one
  }
}

void Loop::reschedule(Candidate& c) const {
  if (opts_.policy != SchedulePolicy::optimal) {
    c.sched = heuristic_schedule(opts_.policy, scn_, c.dep, c.assoc, channels());
    return;
  }
  Schedule probe = empty_schedule(c.assoc, channels());
  if (c.sched.epochs_per_uav == probe.epochs_per_uav && c.sched.epoch.size() == probe.epoch.size())
    probe = c.sched;
  SolverCoefficients coeff = compute_coefficients(scn_, c.dep, c.assoc, probe, c.time);
  c.sched = build_schedule(coeff, c.time, channels(), c.assoc, ScheduleMethod::exact);
}

// Accepts the better of the candidate as given and with a re-optimized time split, if it improves.
bool Loop::offer(RunState& st, Candidate c) const {
  double v = value(c);
  Candidate t = c;
  try {
    retime(t);
    double vt = value(t);
    if (vt > v) {
      v = vt;
      c = std::move(t);
    }
  } catch (const Error&) {
  }
  if (!(v > st.value)) return false;
  st.deployment = std::move(c.dep);
  st.associations = std::move(c.assoc);
  st.schedule = std::move(c.sched);
  st.time = c.time;
  st.value = v;
  return true;
}

bool Loop::repair_ul_energy(Candidate& c) const {
  int K = scn_.device_count();
  int N = c.dep.uav_count();
  const RadioParams& r = scn_.radio;
  for (int i = 0; i < K; ++i) {
    int best = -1;
    double best_g = 0.0;
    int kept = 0;
    for (int n = 0; n < N; ++n) {
      double g = average_gain(c.dep.ul_positions[n], scn_.devices[i], scn_.channel);
      bool ok = r.p_ut * g >= r.rho;
      if (ok && g > best_g) {
        best_g = g;
        best = n;
      }
      if (c.assoc.ul_energy(i, n) && !ok) c.assoc.ul_energy.set(i, n, false);
      kept += c.assoc.ul_energy(i, n);
    }
    if (kept == 0) {
      if (best < 0) return false;
      c.assoc.ul_energy.set(i, best, true);
    }
  }
  return true;
}

RunState Loop::init() {
  RunState st;
  st.scenario = scn_;
  int K = scn_.device_count();
  int N = scn_.uav_count;
  Deployment& dep = st.deployment;
  if (opts_.infra == Infra::bs) {
    BsLayout bs = bs_layout(scn_.region_radius);
    for (int i = 0; i < K; ++i)
      if (!bs_covers(bs, scn_.devices[i]))
        throw CoverageError("device " + std::to_string(i) + " lies outside every base-station disc", i);
    dep.dl_positions = bs.positions;
    dep.ul_positions = bs.positions;
    N = int(bs.positions.size());
  } else {
    std::vector<int> idx(K);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> ang(K);
    for (int i = 0; i < K; ++i) ang[i] = std::atan2(scn_.devices[i].y, scn_.devices[i].x);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return ang[a] < ang[b]; });
    for (int j = 0; j < N; ++j) {
      int lo = K * j / N, hi = K * (j + 1) / N;
      Vec3 c{0.0, 0.0, opts_.init_altitude};
      for (int q = lo; q < hi; ++q) {
        c.x += scn_.devices[idx[q]].x / (hi - lo);
        c.y += scn_.devices[idx[q]].y / (hi - lo);
      }
      dep.dl_positions.push_back(c);
    }
    dep.ul_positions = dep.dl_positions;
  }

  auto reachable = [&](const std::vector<Vec3>& pos, int i) {
    for (const Vec3& u : pos)
      if (scn_.radio.p_ut * average_gain(u, scn_.devices[i], scn_.channel) >= scn_.radio.rho)
        return true;
    return false;
  };
  auto first_unreached = [&]() {
    for (int i = 0; i < K; ++i)
      if (!reachable(dep.dl_positions, i)) return i;
    return -1;
  };
  int miss = first_unreached();
  if (miss >= 0 && opts_.infra == Infra::uav) {
    double best_h = opts_.init_altitude, best_r = -1.0;
    for (int q = 0; q <= 300; ++q) {
      double h = scn_.altitude.min + (scn_.altitude.max - scn_.altitude.min) * q / 300.0;
      double r = eh_horizontal_radius(h, scn_.channel, scn_.radio);
      if (r > best_r) {
        best_r = r;
        best_h = h;
      }
    }
    for (auto* v : {&dep.dl_positions, &dep.ul_positions})
      for (Vec3& u : *v) u.z = best_h;
    miss = first_unreached();
  }
  if (miss >= 0)
    throw CoverageError("device " + std::to_string(miss) + " harvests below the threshold from every UAV",
                        miss);

  AssociationState& a = st.associations;
  a.dl_energy = BinaryMatrix(K, N);
  a.ul_info = BinaryMatrix(K, N);
  a.ul_energy = BinaryMatrix(K, N);
  for (int i = 0; i < K; ++i) {
    int nearest = 0;
    for (int j = 0; j < N; ++j) {
      bool ok = scn_.radio.p_ut * average_gain(dep.dl_positions[j], scn_.devices[i], scn_.channel) >=
                scn_.radio.rho;
      a.dl_energy.set(i, j, ok);
      a.ul_energy.set(i, j, ok);
      if (distance(dep.ul_positions[j].xy(), scn_.devices[i]) <
          distance(dep.ul_positions[nearest].xy(), scn_.devices[i]))
        nearest = j;
    }
    a.ul_info.set(i, nearest, true);
  }
  SchedulePolicy first =
      opts_.policy == SchedulePolicy::optimal ? SchedulePolicy::near_first : opts_.policy;
  st.schedule = heuristic_schedule(first, scn_, dep, a, channels());
  st.time = {0.5 * scn_.hover_time, 0.5 * scn_.hover_time};
  st.value = value(snapshot(st));
  if (opts_.time_mode == TimeMode::ota) offer(st, snapshot(st));
  st.trace.push_back(st.value);
  return st;
}

void Loop::step_schedule_time(RunState& st) const {
  Candidate c = snapshot(st);
  reschedule(c);
  offer(st, std::move(c));
  offer(st, snapshot(st));
}

void Loop::step_dl_assoc(RunState& st) const {
  Candidate c = snapshot(st);
  c.assoc.dl_energy = dl_associate(scn_, c.dep, coefficients(st), c.sched);
  offer(st, std::move(c));
}

void Loop::step_ul_energy(RunState& st) const {
  Candidate c = snapshot(st);
  c.assoc.ul_energy = ul_energy_associate(scn_, c.dep, coefficients(st), c.sched, c.assoc);
  offer(st, std::move(c));
}

void Loop::step_ul_info(RunState& st) const {
  Candidate c = snapshot(st);
  try {
    c.assoc.ul_info = ul_info_associate(scn_, c.dep, coefficients(st), c.sched, c.assoc).ul_info;
  } catch (const SnrInfeasibleError&) {
    return;
  }
  if (c.assoc.ul_info == st.associations.ul_info) return;
  reschedule(c);
  offer(st, std::move(c));
}

void Loop::step_dl_place(RunState& st) const {
  if (fixed_positions()) return;
  int N = st.deployment.uav_count();
  SolverCoefficients coeff = coefficients(st);
  std::vector<std::optional<Vec3>> moved(N);
#pragma omp parallel for schedule(dynamic) if (opts_.parallel)
  for (int j = 0; j < N; ++j) {
    try {
      moved[j] = dl_place(scn_, st.associations, coeff, st.schedule, j, st.deployment.dl_positions[j],
                          placement_opts(st.iteration, j, 0))
                     .position;
    } catch (const Error&) {
    }
  }
  Candidate batch = snapshot(st);
  for (int j = 0; j < N; ++j)
    if (moved[j]) batch.dep.dl_positions[j] = *moved[j];
  if (offer(st, std::move(batch))) return;
  for (int j = 0; j < N; ++j) {
    if (!moved[j]) continue;
    Candidate c = snapshot(st);
    c.dep.dl_positions[j] = *moved[j];
    offer(st, std::move(c));
  }
}

void Loop::step_ul_place(RunState& st) const {
  if (fixed_positions()) return;
  int N = st.deployment.uav_count();
  SolverCoefficients coeff = coefficients(st);
  std::vector<std::optional<Vec3>> moved(N);
#pragma omp parallel for schedule(dynamic) if (opts_.parallel)
  for (int j = 0; j < N; ++j) {
    try {
      moved[j] = ul_place(scn_, st.deployment, st.associations, coeff, st.schedule, j,
                          st.deployment.ul_positions[j], placement_opts(st.iteration, j, 1))
                     .position;
    } catch (const Error&) {
    }
  }
  auto propose = [&](Candidate c) {
    if (!repair_ul_energy(c)) return false;
    if (opts_.policy != SchedulePolicy::optimal) reschedule(c);
    return offer(st, std::move(c));
  };
  Candidate batch = snapshot(st);
  for (int j = 0; j < N; ++j)
    if (moved[j]) batch.dep.ul_positions[j] = *moved[j];
  if (propose(std::move(batch))) return;
  for (int j = 0; j < N; ++j) {
    if (!moved[j]) continue;
    Candidate c = snapshot(st);
    c.dep.ul_positions[j] = *moved[j];
    propose(std::move(c));
  }
}

void Loop::iterate(RunState& st) {
  ++st.iteration;
  double before = st.value;
  step_schedule_time(st);
  step_dl_assoc(st);
  step_dl_place(st);
  step_ul_energy(st);
  step_ul_info(st);
  step_ul_place(st);
  if (st.value < before - 1e-9 * std::abs(before))
    throw InternalError("sum throughput decreased across an outer iteration");
  st.trace.push_back(st.value);
}

}  // namespace

RunState initial_state(const Scenario& scn, const RunOptions& opts) {
  Scenario s = scn;
  if (opts.access == Access::tdma) s.channel_count = 1;
  if (opts.infra == Infra::bs) s.uav_count = 4;
  s.validate();
  Loop loop(s, opts);
  return loop.init();
}

SolutionReport run(const Scenario& scn, const RunOptions& opts) {
  if (opts.max_iters < 1 || !(opts.eps > 0.0)) throw ParameterError("max_iters >= 1 and eps > 0 required");
  Scenario s = scn;
  if (opts.access == Access::tdma) s.channel_count = 1;
  if (opts.infra == Infra::bs) s.uav_count = 4;
  s.validate();
  Loop loop(s, opts);
  RunState st = loop.init();
  bool converged = false;
  while (st.iteration < opts.max_iters) {
    double before = st.value;
    try {
      loop.iterate(st);
    } catch (const Error& e) {
      rethrow_annotated(e, st.iteration);
    }
    double growth = before > 0.0 ? (st.value - before) / before : (st.value > 0.0 ? 1.0 : 0.0);
    if (growth < opts.eps) {
      converged = true;
      break;
    }
  }
  SolutionReport rep = throughput_report(s, st.deployment, st.associations, st.schedule, st.time);
  rep.trace = st.trace;
  rep.iterations = st.iteration;
  rep.converged = converged;
  rep.branch = compute_coefficients(s, st.deployment, st.associations, st.schedule, st.time).branch;
  return rep;
}

}  // namespace uavswarm
