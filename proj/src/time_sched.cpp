#include "uavswarm/time_sched.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uavswarm/channel.hpp"
#include "uavswarm/errors.hpp"
#include "uavswarm/numerics.hpp"

namespace uavswarm {

namespace {

constexpr double kBracketEps = 1e-6;
constexpr double kBindingTol = 1e-9;

}  // namespace

LinkGains compute_gains(const Scenario& scn, const Deployment& dep, const AssociationState& assoc) {
  int K = scn.device_count();
  int N = dep.uav_count();
  LinkGains lg;
  lg.dl.assign(K, std::vector<double>(N, 0.0));
  lg.ul.assign(K, std::vector<double>(N, 0.0));
  lg.g_ul.assign(K, 0.0);
  lg.g_dl_sum.assign(K, 0.0);
  lg.g_ul_sum.assign(K, 0.0);
  for (int i = 0; i < K; ++i) {
    for (int j = 0; j < N; ++j) {
      lg.dl[i][j] = average_gain(dep.dl_positions[j], scn.devices[i], scn.channel);
      lg.ul[i][j] = average_gain(dep.ul_positions[j], scn.devices[i], scn.channel);
      if (assoc.dl_energy(i, j)) lg.g_dl_sum[i] += lg.dl[i][j];
      if (assoc.ul_energy(i, j)) lg.g_ul_sum[i] += lg.ul[i][j];
      if (assoc.ul_info(i, j)) lg.g_ul[i] = lg.ul[i][j];
    }
    if (!(lg.g_ul[i] > 0.0) || !(lg.g_dl_sum[i] > 0.0))
      throw StateError("device " + std::to_string(i) + " has a zero-gain active link");
  }
  return lg;
}

double snr_ratio(double theta0, double theta1, int k, int L, const TimeAllocation& time,
                 double gamma) {
  double den = theta0 * L * time.tau0 + theta1 * (k - 1) * time.tau1;
  return time.tau1 * gamma / den;
}

double tau0_requirement(double theta0, double theta1, int k, int L, double gamma, double hover) {
  double a = theta0 * L;
  double b = theta1 * (k - 1);
  if (gamma <= b) return 0.0;
  return hover * (gamma - b) / (gamma - b + a);
}

namespace {

bool decodable_pair(double theta0, double theta1, int k, int L, double gamma, double hover) {
  return tau0_requirement(theta0, theta1, k, L, gamma, hover) < (1.0 - kBracketEps) * hover;
}

}  // namespace

Varpi compute_varpi(const SolverCoefficients& coeff, const Schedule& sched,
                    const TimeAllocation& time, double hover) {
  int K = int(coeff.theta0.size());
  if (K == 0 || sched.epoch.empty()) throw StateError("compute_varpi: empty schedule");
  Varpi v;
  v.value = -1.0;
  for (int i = 0; i < K; ++i) {
    int k = sched.epoch[i];
    int L = coeff.epochs[i];
    if (k < 1) continue;
    if (!decodable_pair(coeff.theta0[i], coeff.theta1[i], k, L, coeff.gamma, hover)) continue;
    double r = snr_ratio(coeff.theta0[i], coeff.theta1[i], k, L, time, coeff.gamma);
    if (r > v.value) v = {r, i, k};
  }
  if (v.device < 0) v.value = 0.0;
  return v;
}

SolverCoefficients compute_coefficients(const Scenario& scn, const Deployment& dep,
                                        const AssociationState& assoc, const Schedule& sched,
                                        const TimeAllocation& time) {
  return compute_coefficients(scn, compute_gains(scn, dep, assoc), assoc, sched, time);
}

SolverCoefficients compute_coefficients(const Scenario& scn, const LinkGains& gains,
                                        const AssociationState& assoc, const Schedule& sched,
                                        const TimeAllocation& time) {
  int K = scn.device_count();
  int N = assoc.ul_info.cols();
  double eps = scn.radio.epsilon();
  SolverCoefficients c;
  c.time = time;
  c.gamma = scn.radio.gamma;
  c.epsilon = eps;
  c.epoch = sched.epoch;
  c.epochs.assign(K, 1);
  c.g_ul = gains.g_ul;
  c.g_dl_sum = gains.g_dl_sum;
  c.g_ul_sum = gains.g_ul_sum;
  c.theta0.assign(K, 0.0);
  c.theta1.assign(K, 0.0);
  c.phi.assign(K, 0.0);
  c.gamma_cap.assign(K, 0.0);
  c.lambda_cap.assign(K, 0.0);
  c.omega_cap.assign(K, 0.0);
  c.iota.assign(K, 0.0);
  c.chi.assign(K, std::vector<double>(N, 0.0));
  std::vector<int> owner(K);
  for (int i = 0; i < K; ++i) {
    owner[i] = assoc.ul_uav(i);
    c.epochs[i] = sched.epochs_per_uav[owner[i]];
    c.theta0[i] = eps * gains.g_ul[i] * gains.g_dl_sum[i];
    c.theta1[i] = eps * gains.g_ul[i] * gains.g_ul_sum[i];
    c.phi[i] = time.tau1 / (eps * c.epochs[i] * gains.g_ul[i]);
    c.lambda_cap[i] = time.tau1 / (eps * c.epochs[i] * gains.g_dl_sum[i]);
    int k = std::max(1, sched.epoch[i]);
    double others = 0.0;
    for (int n = 0; n < N; ++n)
      if (n != owner[i] && assoc.ul_energy(i, n)) others += gains.ul[i][n];
    c.iota[i] = eps * (k - 1) * others;
    for (int j = 0; j < N; ++j)
      c.chi[i][j] = sched.epochs_per_uav[j] * time.tau0 * gains.g_dl_sum[i] +
                    (k - 1) * time.tau1 * gains.g_ul_sum[i];
  }
  Varpi v = compute_varpi(c, sched, time, scn.hover_time);
  c.varpi = v.value;
  c.argmax_device = v.device;
  c.argmax_epoch = v.epoch;
  c.branch = v.value >= 1.0 - kBindingTol ? TimeCase::binding : TimeCase::slack;
  if (v.device >= 0) {
    int m = v.device;
    double head = (c.gamma - c.theta1[m] * (v.epoch - 1)) / c.theta0[m];
    for (int i = 0; i < K; ++i) {
      c.gamma_cap[i] = eps * gains.g_ul[i] * head;
      c.omega_cap[i] = eps * gains.g_dl_sum[i] * head;
    }
  }
  c.w = compute_w(c, time, c.epochs);
  return c;
}

std::vector<std::vector<std::uint8_t>> compute_w(const SolverCoefficients& coeff,
                                                 const TimeAllocation& time,
                                                 const std::vector<int>& epochs_per_device) {
  int K = int(coeff.theta0.size());
  std::vector<std::vector<std::uint8_t>> w(K);
  for (int i = 0; i < K; ++i) {
    int L = epochs_per_device[i];
    w[i].assign(L, 0);
    for (int k = 1; k <= L; ++k)
      w[i][k - 1] = snr_ratio(coeff.theta0[i], coeff.theta1[i], k, L, time, coeff.gamma) >= 1.0;
  }
  return w;
}

double marginal_benefit(const SolverCoefficients& coeff, int device, int k, int L,
                        const TimeAllocation& time, bool penalized) {
  double s = coeff.theta0[device] * L * time.tau0 + coeff.theta1[device] * (k - 1) * time.tau1;
  double v = time.tau1 / L * std::log1p(s / time.tau1);
  double ratio = time.tau1 * coeff.gamma / s;
  if (penalized && ratio >= 1.0) v -= ratio;
  return v;
}

Schedule empty_schedule(const AssociationState& assoc, int channels) {
  Schedule s;
  int K = assoc.ul_info.rows();
  int N = assoc.ul_info.cols();
  s.epoch.assign(K, 1);
  s.epochs_per_uav.assign(N, 0);
  for (int j = 0; j < N; ++j) s.epochs_per_uav[j] = epochs_needed(assoc.ul_count(j), channels);
  return s;
}

Schedule build_schedule(const SolverCoefficients& coeff, const TimeAllocation& time, int channels,
                        const AssociationState& assoc, ScheduleMethod method, FillOrder order) {
  if (channels < 1) throw ParameterError("channel count must be >= 1");
  Schedule s = empty_schedule(assoc, channels);
  int N = assoc.ul_info.cols();
  for (int j = 0; j < N; ++j) {
    std::vector<int> served = assoc.ul_served(j);
    int C = int(served.size());
    if (C == 0) continue;
    int L = s.epochs_per_uav[j];
    if (method == ScheduleMethod::exact) {
      // devices x (L*M) slots
      int slots = L * channels;
      std::vector<std::vector<double>> cost(C, std::vector<double>(slots, 0.0));
      for (int r = 0; r < C; ++r)
        for (int q = 0; q < slots; ++q)
          cost[r][q] = -marginal_benefit(coeff, served[r], q / channels + 1, L, time, true);
      Assignment a = hungarian(cost);
      for (int r = 0; r < C; ++r) s.epoch[served[r]] = a.row_to_col[r] / channels + 1;
      continue;
    }
    std::vector<char> taken(C, 0);
    int remaining = C;
    for (int step = 0; step < L; ++step) {
      int k = order == FillOrder::backward ? L - step : step + 1;
      // forward fill must leave at most M per later epoch
      int quota = order == FillOrder::backward
                      ? std::min(channels, remaining)
                      : std::max(0, remaining - channels * (L - step - 1));
      if (order == FillOrder::forward) quota = std::min(quota, channels);
      std::vector<int> cand;
      for (int r = 0; r < C; ++r)
        if (!taken[r]) cand.push_back(r);
      std::stable_sort(cand.begin(), cand.end(), [&](int p, int q) {
        return marginal_benefit(coeff, served[p], k, L, time, true) >
               marginal_benefit(coeff, served[q], k, L, time, true);
      });
      for (int t = 0; t < quota; ++t) {
        taken[cand[t]] = 1;
        s.epoch[served[cand[t]]] = k;
      }
      remaining -= quota;
    }
  }
  return s;
}

Schedule heuristic_schedule(SchedulePolicy policy, const Scenario& scn, const Deployment& dep,
                            const AssociationState& assoc, int channels) {
  if (policy == SchedulePolicy::optimal)
    throw ParameterError("heuristic_schedule handles only the near-first and far-first policies");
  Schedule s = empty_schedule(assoc, channels);
  int N = assoc.ul_info.cols();
  for (int j = 0; j < N; ++j) {
    std::vector<int> served = assoc.ul_served(j);
    int C = int(served.size());
    if (C == 0) continue;
    Vec2 hub = dep.ul_positions[j].xy();
    std::vector<double> dist(C);
    for (int r = 0; r < C; ++r) dist[r] = distance(hub, scn.devices[served[r]]);
    std::vector<int> idx(C);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int p, int q) {
      if (dist[p] != dist[q]) return dist[p] < dist[q];
      return served[p] < served[q];
    });
    int L = s.epochs_per_uav[j];
    int inner = C - channels * (L - 1);
    // ring 0 is the innermost group, ring L-1 the outermost
    for (int pos = 0; pos < C; ++pos) {
      int ring = pos < inner ? 0 : 1 + (pos - inner) / channels;
      int k = policy == SchedulePolicy::near_first ? ring + 1 : L - ring;
      s.epoch[served[idx[pos]]] = k;
    }
  }
  return s;
}

std::vector<P1Term> p1_terms(const SolverCoefficients& coeff, const Schedule& sched) {
  std::vector<P1Term> out;
  for (std::size_t i = 0; i < coeff.theta0.size(); ++i) {
    int k = sched.epoch[i];
    int L = coeff.epochs[i];
    out.push_back({coeff.theta0[i] * L, coeff.theta1[i] * (k - 1), L});
  }
  return out;
}

double p1_objective(const std::vector<P1Term>& terms, const TimeAllocation& time, double gamma) {
  double v = 0.0;
  for (const auto& t : terms) {
    double s = t.a * time.tau0 + t.b * time.tau1;
    if (time.tau1 * gamma > s * (1.0 + 1e-12)) continue;
    v += time.tau1 / t.L * std::log1p(s / time.tau1);
  }
  return v;
}

double p1_derivative(const std::vector<P1Term>& terms, double tau0, double hover) {
  double tau1 = hover - tau0;
  double v = 0.0;
  for (const auto& t : terms) {
    double D = t.a * tau0 + (1.0 + t.b) * tau1;
    v += (t.a * hover / D - std::log(D / tau1)) / t.L;
  }
  return v;
}

namespace {

// active terms are those some split can decode
std::vector<P1Term> active_terms(const SolverCoefficients& coeff, const Schedule& sched,
                                 double hover, TimeSolution& sol) {
  std::vector<P1Term> act;
  sol.required_tau0 = 0.0;
  sol.undecodable = 0;
  for (std::size_t i = 0; i < coeff.theta0.size(); ++i) {
    int k = sched.epoch[i];
    int L = coeff.epochs[i];
    double req = tau0_requirement(coeff.theta0[i], coeff.theta1[i], k, L, coeff.gamma, hover);
    if (req >= (1.0 - kBracketEps) * hover) {
      ++sol.undecodable;
      continue;
    }
    act.push_back({coeff.theta0[i] * L, coeff.theta1[i] * (k - 1), L});
    if (req > sol.required_tau0) {
      sol.required_tau0 = req;
      sol.binding_device = int(i);
      sol.binding_epoch = k;
    }
  }
  return act;
}

}  // namespace

TimeSolution optimal_time(const SolverCoefficients& coeff, const Schedule& sched, double hover) {
  TimeSolution sol;
  auto act = active_terms(coeff, sched, hover, sol);
  if (act.empty()) throw StateError("optimal_time: no decodable device at any time split");
  double lo = kBracketEps * hover, hi = (1.0 - kBracketEps) * hover;
  auto f = [&](double t0) { return p1_derivative(act, t0, hover); };
  double flo = f(lo);
  double fhi = f(hi);
  if (flo > 0.0 && fhi < 0.0) {
    sol.stationary_tau0 = bisect_root(f, lo, hi, 1e-13 * hover);
  } else if (flo <= 0.0 && sol.required_tau0 > lo) {
    // the requirement dominates anyway
    sol.stationary_tau0 = lo;
  } else {
    throw BracketError("optimal_time: stationarity has no sign change on the bracket (f(lo)=" +
                       std::to_string(flo) + ", f(hi)=" + std::to_string(fhi) + ")");
  }
  if (sol.required_tau0 > sol.stationary_tau0) {
    int m = sol.binding_device;
    int n = sol.binding_epoch;
    double head = coeff.gamma - coeff.theta1[m] * (n - 1);
    double den = head + coeff.theta0[m] * coeff.epochs[m];
    sol.time = {hover * head / den, hover * coeff.theta0[m] * coeff.epochs[m] / den};
    sol.branch = TimeCase::binding;
  } else {
    sol.time = {sol.stationary_tau0, hover - sol.stationary_tau0};
    sol.branch = TimeCase::slack;
    sol.binding_device = -1;
    sol.binding_epoch = -1;
  }
  return sol;
}

TimeSolution scan_time(const SolverCoefficients& coeff, const Schedule& sched, double hover,
                       int grid) {
  TimeSolution sol;
  auto terms = p1_terms(coeff, sched);
  active_terms(coeff, sched, hover, sol);
  auto obj = [&](double t0) { return p1_objective(terms, {t0, hover - t0}, coeff.gamma); };
  double lo = kBracketEps * hover, hi = (1.0 - kBracketEps) * hover;
  double best_t = lo, best_v = obj(lo);
  for (int q = 1; q <= grid; ++q) {
    double t = lo + (hi - lo) * q / grid;
    double v = obj(t);
    if (v > best_v) {
      best_v = v;
      best_t = t;
    }
  }
  double step = (hi - lo) / grid;
  // the objective jumps where a pair becomes decodable, so keep the refinement one-sided safe
  ScalarMax ref = golden_section_max(obj, std::max(lo, best_t - step), std::min(hi, best_t + step),
                                     1e-12 * hover);
  if (ref.value > best_v) best_t = ref.arg;
  if (sol.required_tau0 > lo && std::abs(best_t - sol.required_tau0) < step) {
    double v = obj(sol.required_tau0);
    if (v >= obj(best_t)) best_t = sol.required_tau0;
  }
  sol.time = {best_t, hover - best_t};
  sol.stationary_tau0 = best_t;
  sol.branch = best_t <= sol.required_tau0 * (1.0 + 1e-9) ? TimeCase::binding : TimeCase::slack;
  return sol;
}

}  // namespace uavswarm
