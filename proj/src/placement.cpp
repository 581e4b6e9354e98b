#include "uavswarm/placement.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "uavswarm/errors.hpp"

namespace uavswarm {

namespace {

double numerator(const RatioTerm& t, double D) { return t.b ? t.phi1 * D + t.phi2 : t.phi1; }
double denominator(const RatioTerm& t, double D) {
  return t.b ? (t.rho1 * D + t.rho2) * D + t.rho3 : t.rho1 * D + t.rho2;
}

double loss_at(const PlacementProblem& p, Vec3 u, Vec2 s) { return path_loss(u, s, p.channel); }

double F_at(const PlacementProblem& p, Vec3 u, Vec2 s) {
  return excess_path_function(distance(u, s), u.z, p.channel);
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

double term_ratio(const RatioTerm& t, double D) { return numerator(t, D) / denominator(t, D); }

double ratio_sum(const PlacementProblem& p, Vec3 u) {
  double v = 0.0;
  for (const auto& t : p.terms) v += term_ratio(t, loss_at(p, u, t.pos));
  return v;
}

double transformed_value(const PlacementProblem& p, Vec3 u, const std::vector<double>& slack) {
  double v = 0.0;
  for (std::size_t q = 0; q < p.terms.size(); ++q) {
    const auto& t = p.terms[q];
    double D = loss_at(p, u, t.pos);
    double xi = slack[q];
    v += 2.0 * xi * std::sqrt(numerator(t, D)) - xi * xi * denominator(t, D);
  }
  return v;
}

std::vector<double> optimal_slack(const PlacementProblem& p, Vec3 u) {
  std::vector<double> xi(p.terms.size());
  for (std::size_t q = 0; q < p.terms.size(); ++q) {
    double D = loss_at(p, u, p.terms[q].pos);
    xi[q] = std::sqrt(numerator(p.terms[q], D)) / denominator(p.terms[q], D);
  }
  return xi;
}

bool placement_feasible(const PlacementProblem& p, Vec3 u, double rel_tol) {
  if (u.z < p.altitude.min * (1.0 - 1e-12) || u.z > p.altitude.max * (1.0 + 1e-12)) return false;
  for (const auto& t : p.terms)
    if (std::isfinite(t.f_limit) && F_at(p, u, t.pos) > t.f_limit * (1.0 + rel_tol)) return false;
  return true;
}

bool discs_at(const PlacementProblem& p, double h, DiscConstraintSet& out) {
  out.centers.clear();
  out.radii.clear();
  double f_h = excess_path_function(h, h, p.channel);
  for (const auto& t : p.terms) {
    if (!std::isfinite(t.f_limit)) continue;
    if (!(t.f_limit * (1.0 - 1e-8) > f_h)) return false;
    // shrink slightly so projected points stay feasible after rounding
    double d = coverage_radius(t.f_limit * (1.0 - 1e-8), h, p.channel);
    double r = std::sqrt(std::max(0.0, d * d - h * h));
    if (r < 1e-9) return false;
    out.centers.push_back(t.pos);
    out.radii.push_back(r);
  }
  return true;
}

CccpLine cccp_line(const RatioTerm& t, const QuadraticFit& fit, double kappa0) {
  double s1 = std::sqrt(t.phi1) * kappa0;
  double b2 = t.phi1 * kappa0 * kappa0 * fit.k3 + t.phi2;
  if (b2 >= 0.0) return {std::sqrt(2.0) * s1, std::sqrt(2.0 * b2), s1 * std::sqrt(b2)};
  // sqrt(A^2 + b2) is concave in A once b2 < 0; a slope-1 line touching it at the smallest
  // reachable A stays below it for every larger A
  double a = std::max({0.0, s1 * (fit.k1 * fit.d_lo + fit.k2), std::sqrt(-b2)});
  double beta = a - std::sqrt(std::max(0.0, a * a + b2));
  return {2.0 * s1, -2.0 * beta, a};
}

double cccp_bound(const RatioTerm& t, double xi, double d, const QuadraticFit& fit, double kappa0) {
  CccpLine l = cccp_line(t, fit, kappa0);
  return xi * (l.slope * (fit.k1 * d + fit.k2) + l.offset);
}

double cccp_tight_distance(const RatioTerm& t, const QuadraticFit& fit, double kappa0) {
  CccpLine l = cccp_line(t, fit, kappa0);
  return (l.touch / (std::sqrt(t.phi1) * kappa0) - fit.k2) / fit.k1;
}

namespace {

QuadraticFit fit_for(const PlacementProblem& p, double h) {
  double hi = 3.0 * h;
  double f_h = excess_path_function(h, h, p.channel);
  for (const auto& t : p.terms)
    if (std::isfinite(t.f_limit) && t.f_limit > f_h)
      hi = std::max(hi, coverage_radius(t.f_limit, h, p.channel));
  return fit_quadratic(h, p.channel, h, hi, 200);
}

struct SurrogateEval {
  double value;
  Vec2 grad;
};

// Concave lower model of the transformed objective at altitude h, linearised at un.
SurrogateEval surrogate(const PlacementProblem& p, const std::vector<double>& xi,
                        const QuadraticFit& fit, double h, Vec2 un, Vec2 u) {
  double k0 = p.channel.kappa0();
  double k02 = k0 * k0;
  SurrogateEval e{0.0, {0.0, 0.0}};
  for (std::size_t q = 0; q < p.terms.size(); ++q) {
    const auto& t = p.terms[q];
    double dx = u.x - t.pos.x, dy = u.y - t.pos.y;
    double d = std::sqrt(dx * dx + dy * dy + h * h);
    double lin = std::max(0.0, fit.k1 * d + fit.k2);
    double Ff = lin * lin + fit.k3;
    double dF = 2.0 * lin * fit.k1;
    if (Ff < 0.0) {
      Ff = 0.0;
      dF = 0.0;
    }
    double x2 = xi[q] * xi[q];
    double coef;  // d(value)/dd
    if (!t.b) {
      e.value -= x2 * t.rho1 * k02 * Ff;
      coef = -x2 * t.rho1 * k02 * dF;
    } else {
      double Ub = x2 * (t.rho1 * k02 * k02 * Ff * Ff + t.rho2 * k02 * Ff);
      e.value -= Ub;
      coef = -x2 * (2.0 * t.rho1 * k02 * k02 * Ff + t.rho2 * k02) * dF;
      // gradient of c at un
      double ndx = un.x - t.pos.x, ndy = un.y - t.pos.y;
      double nd = std::sqrt(ndx * ndx + ndy * ndy + h * h);
      double slope = xi[q] * cccp_line(t, fit, k0).slope * fit.k1 / nd;
      double gx = slope * ndx, gy = slope * ndy;
      e.value += gx * (u.x - un.x) + gy * (u.y - un.y);
      e.grad.x += gx;
      e.grad.y += gy;
    }
    e.grad.x += coef * dx / d;
    e.grad.y += coef * dy / d;
  }
  return e;
}

double surrogate_step(const PlacementProblem& p, const std::vector<double>& xi,
                      const QuadraticFit& fit) {
  double k02 = p.channel.kappa0() * p.channel.kappa0();
  double curv = 0.0;
  for (std::size_t q = 0; q < p.terms.size(); ++q) {
    const auto& t = p.terms[q];
    double x2 = xi[q] * xi[q];
    double w = t.b ? x2 * (2.0 * t.rho1 * k02 * k02 * fit(fit.d_hi) + t.rho2 * k02) : x2 * t.rho1 * k02;
    curv += 2.0 * w * fit.k1 * fit.k1;
  }
  return curv > 0.0 ? 1.0 / curv : 1.0;
}

ScalarMax search_altitude(const PlacementProblem& p, const ScalarFn& f, double current) {
  double lo = p.altitude.min, hi = p.altitude.max;
  ScalarMax best{current, f(current)};
  ScalarMax g = golden_section_max(f, lo, hi, 1e-4);
  if (g.value > best.value) best = g;
  for (int q = 0; q < 50; ++q) {
    double h = lo + (hi - lo) * q / 49.0;
    double v = f(h);
    if (v > best.value) best = {h, v};
  }
  return best;
}

Vec3 make_feasible(const PlacementProblem& p, Vec3 start) {
  start.z = std::clamp(start.z, p.altitude.min, p.altitude.max);
  if (placement_feasible(p, start)) return start;
  std::vector<double> hs;
  hs.push_back(start.z);
  for (int q = 0; q < 60; ++q) hs.push_back(p.altitude.min + (p.altitude.max - p.altitude.min) * q / 59.0);
  std::stable_sort(hs.begin() + 1, hs.end(),
                   [&](double a, double b) { return std::abs(a - start.z) < std::abs(b - start.z); });
  DiscConstraintSet cs;
  for (double h : hs) {
    if (!discs_at(p, h, cs)) continue;
    try {
      Vec2 xy = project_discs(start.xy(), cs);
      Vec3 u{xy.x, xy.y, h};
      if (placement_feasible(p, u)) return u;
    } catch (const InfeasibleRegionError&) {
    }
  }
  throw InfeasibleRegionError("no altitude admits a point inside every coverage disc");
}

Vec2 numeric_gradient(const PlacementProblem& p, Vec2 u, double h) {
  const double e = 1e-4;
  double fx = ratio_sum(p, {u.x + e, u.y, h}) - ratio_sum(p, {u.x - e, u.y, h});
  double fy = ratio_sum(p, {u.x, u.y + e, h}) - ratio_sum(p, {u.x, u.y - e, h});
  return {fx / (2 * e), fy / (2 * e)};
}

// Exact ascent over the plane at altitude h, started from the projection of `from`.
bool plane_best(const PlacementProblem& p, double h, Vec2 from, Vec3& out, double& value) {
  DiscConstraintSet cs;
  if (!discs_at(p, h, cs)) return false;
  Vec2 s;
  try {
    s = project_discs(from, cs);
  } catch (const InfeasibleRegionError&) {
    return false;
  }
  PlanarObjective exact{[&](Vec2 v) { return ratio_sum(p, {v.x, v.y, h}); },
                        [&](Vec2 v) { return numeric_gradient(p, v, h); }};
  PlanarMax m = maximize_over_discs(exact, cs, s, 1.0);
  Vec3 c{m.point.x, m.point.y, h};
  if (!placement_feasible(p, c)) return false;
  out = c;
  value = ratio_sum(p, c);
  return true;
}

// Altitude search over the best horizontal position per altitude. Moves along coverage
// boundaries that alternating x-y / altitude steps cannot follow.
void refine_profile(const PlacementProblem& p, PlacementResult& r) {
  Vec2 from = r.position.xy();
  auto profile = [&](double h) {
    Vec3 c;
    double v;
    return plane_best(p, h, from, c, v) ? v : kNegInf;
  };
  ScalarMax coarse = search_altitude(p, profile, r.position.z);
  double span = (p.altitude.max - p.altitude.min) / 49.0;
  double lo = std::max(p.altitude.min, coarse.arg - span);
  double hi = std::min(p.altitude.max, coarse.arg + span);
  ScalarMax fine = lo < hi ? golden_section_max(profile, lo, hi, 1e-4) : coarse;
  if (fine.value < coarse.value) fine = coarse;
  Vec3 c;
  double v;
  if (!plane_best(p, fine.arg, from, c, v) || !(v > r.value)) return;
  r.position = c;
  r.value = v;
  r.slack = optimal_slack(p, c);
  r.trace.push_back(v);
}

PlacementResult run_start(const PlacementProblem& p, Vec3 u, const PlacementOptions& opts) {
  PlacementResult r;
  std::vector<double> xi = optimal_slack(p, u);
  double V = ratio_sum(p, u);
  r.trace.push_back(V);
  QuadraticFit fit = fit_for(p, u.z);
  DiscConstraintSet cs;
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    Vec3 before = u;
    if (!discs_at(p, u.z, cs)) throw InternalError("current placement lost feasibility");
    double step = surrogate_step(p, xi, fit);
    Vec2 un = u.xy();
    double qn = transformed_value(p, u, xi);
    for (int inner = 0; inner < opts.cccp_iters; ++inner) {
      PlanarObjective obj{
          [&](Vec2 v) { return surrogate(p, xi, fit, u.z, un, v).value; },
          [&](Vec2 v) { return surrogate(p, xi, fit, u.z, un, v).grad; }};
      PlanarMax m = maximize_over_discs(obj, cs, un, step);
      Vec3 cand{m.point.x, m.point.y, u.z};
      double qc = transformed_value(p, cand, xi);
      if (!(qc >= qn) || !placement_feasible(p, cand)) break;
      double move = distance(m.point, un);
      un = m.point;
      qn = qc;
      if (move < opts.cccp_move) break;
    }
    u = {un.x, un.y, u.z};
    auto alt = [&](double h) {
      Vec3 v{un.x, un.y, h};
      if (!placement_feasible(p, v)) return kNegInf;
      return transformed_value(p, v, xi);
    };
    ScalarMax hbest = search_altitude(p, alt, u.z);
    u.z = hbest.arg;
    if (std::abs(u.z - fit.altitude) > 0.1 * fit.altitude) fit = fit_for(p, u.z);
    xi = optimal_slack(p, u);
    double Vn = ratio_sum(p, u);
    r.trace.push_back(Vn);
    double moved = std::sqrt((u.x - before.x) * (u.x - before.x) + (u.y - before.y) * (u.y - before.y) +
                             (u.z - before.z) * (u.z - before.z));
    bool flat = std::abs(Vn - V) <= opts.tol * std::max(std::abs(V), 1e-300);
    V = Vn;
    if (flat && moved < 1e-3) {
      ++it;
      break;
    }
  }
  if (opts.polish) {
    for (int round = 0; round < 100; ++round) {
      double start = V;
      if (!discs_at(p, u.z, cs)) break;
      double h = u.z;
      PlanarObjective exact{[&](Vec2 v) { return ratio_sum(p, {v.x, v.y, h}); },
                            [&](Vec2 v) { return numeric_gradient(p, v, h); }};
      PlanarMax m = maximize_over_discs(exact, cs, u.xy(), 1.0);
      Vec3 cand{m.point.x, m.point.y, h};
      if (placement_feasible(p, cand) && ratio_sum(p, cand) > V) {
        u = cand;
        V = ratio_sum(p, u);
      }
      auto alt = [&](double z) {
        Vec3 v{u.x, u.y, z};
        if (!placement_feasible(p, v)) return kNegInf;
        return ratio_sum(p, v);
      };
      ScalarMax hbest = search_altitude(p, alt, u.z);
      if (hbest.value > V) {
        u.z = hbest.arg;
        V = hbest.value;
      }
      if (V - start <= opts.tol * std::abs(start)) break;
    }
    r.trace.push_back(V);
  }
  r.position = u;
  r.value = V;
  r.slack = optimal_slack(p, u);
  r.iterations = it;
  return r;
}

}  // namespace

PlacementResult place_uav(const PlacementProblem& p, Vec3 init, const PlacementOptions& opts) {
  if (p.terms.empty()) {
    PlacementResult r;
    r.position = init;
    return r;
  }
  Vec2 centroid{0.0, 0.0};
  for (const auto& t : p.terms) {
    centroid.x += t.pos.x;
    centroid.y += t.pos.y;
  }
  centroid.x /= double(p.terms.size());
  centroid.y /= double(p.terms.size());
  double spread = 0.0;
  for (const auto& t : p.terms) spread = std::max(spread, distance(centroid, t.pos));

  std::vector<Vec3> starts{init, {centroid.x, centroid.y, init.z}};
  std::mt19937_64 rng(opts.seed);
  auto uniform = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };
  for (int q = 1; q < opts.restarts; ++q) {
    double r = 0.5 * spread * std::sqrt(uniform());
    double a = 2.0 * std::numbers::pi * uniform();
    starts.push_back({centroid.x + r * std::cos(a), centroid.y + r * std::sin(a), init.z});
  }
  if (opts.restarts <= 0) starts.resize(1);

  PlacementResult best;
  bool have = false;
  for (const Vec3& s : starts) {
    Vec3 u;
    try {
      u = make_feasible(p, s);
    } catch (const InfeasibleRegionError&) {
      continue;
    }
    PlacementResult r = run_start(p, u, opts);
    if (!have || r.value > best.value) {
      best = std::move(r);
      have = true;
    }
  }
  if (!have) throw InfeasibleRegionError("placement: coverage discs have no common point");
  if (opts.polish) refine_profile(p, best);
  return best;
}

}  // namespace uavswarm
