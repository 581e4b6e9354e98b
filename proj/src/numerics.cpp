#include "uavswarm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uavswarm/errors.hpp"

namespace uavswarm {

double bisect_root(const ScalarFn& f, double lo, double hi, double tol) {
  if (!(lo < hi)) throw ParameterError("bisect_root: lo must be below hi");
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi) || std::isnan(flo) || std::isnan(fhi))
    throw BracketError("bisect_root: no sign change on [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "], f(lo)=" + std::to_string(flo) +
                       " f(hi)=" + std::to_string(fhi));
  for (int it = 0; it < 400 && hi - lo > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ScalarMax golden_section_max(const ScalarFn& f, double lo, double hi, double tol) {
  if (!(lo < hi)) throw ParameterError("golden_section_max: lo must be below hi");
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  ScalarMax best{0.5 * (a + b), f(0.5 * (a + b))};
  for (auto [x, v] : {std::pair{c, fc}, std::pair{d, fd}, std::pair{lo, f(lo)}, std::pair{hi, f(hi)}})
    if (v > best.value) best = {x, v};
  return best;
}

double fractional_ratio(const FractionalInstance& inst, const std::vector<std::uint8_t>& x) {
  double num = inst.a0, den = inst.b0;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j]) {
      num += inst.a[j];
      den += inst.b[j];
    }
  return num / den;
}

namespace {

// argmin over x of sum (a_j - r b_j) x_j with sum x >= min_ones; strict keeps only clearly
// negative terms so that ties resolve toward fewer ones.
std::vector<std::uint8_t> parametric_step(const FractionalInstance& inst, double r, double tol) {
  std::size_t n = inst.a.size();
  std::vector<std::uint8_t> x(n, 0);
  std::vector<int> rest;
  int ones = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(inst.a[j])) continue;
    double c = inst.a[j] - r * inst.b[j];
    if (c < -tol) {
      x[j] = 1;
      ++ones;
    } else {
      rest.push_back(int(j));
    }
  }
  if (ones < inst.min_ones) {
    auto prio = [&](int j) { return inst.priority.empty() ? 0.0 : inst.priority[j]; };
    std::stable_sort(rest.begin(), rest.end(), [&](int p, int q) {
      double cp = inst.a[p] - r * inst.b[p], cq = inst.a[q] - r * inst.b[q];
      if (std::abs(cp - cq) > tol) return cp < cq;
      if (prio(p) != prio(q)) return prio(p) > prio(q);
      return p < q;
    });
    for (int j : rest) {
      if (ones >= inst.min_ones) break;
      x[j] = 1;
      ++ones;
    }
  }
  return x;
}

double parametric_value(const FractionalInstance& inst, const std::vector<std::uint8_t>& x, double r) {
  double v = inst.a0 - r * inst.b0;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j]) v += inst.a[j] - r * inst.b[j];
  return v;
}

double scale_of(const FractionalInstance& inst, double r) {
  double s = std::abs(inst.a0) + std::abs(r * inst.b0);
  for (std::size_t j = 0; j < inst.a.size(); ++j)
    if (std::isfinite(inst.a[j])) s += std::abs(inst.a[j]) + std::abs(r * inst.b[j]);
  return s;
}

}  // namespace

FractionalResult dinkelbach_select(const FractionalInstance& inst) {
  std::size_t n = inst.a.size();
  if (inst.b.size() != n) throw ParameterError("dinkelbach_select: a and b differ in length");
  int finite = 0;
  for (double a : inst.a) finite += std::isfinite(a) ? 1 : 0;
  if (finite == 0) throw CoverageError("no admissible index: every entry is masked");
  if (finite < inst.min_ones) throw CoverageError("fewer admissible indices than required");

  FractionalResult res;
  res.x.assign(n, 0);
  for (std::size_t j = 0; j < n; ++j) res.x[j] = std::isfinite(inst.a[j]) ? 1 : 0;
  res.ratio = fractional_ratio(inst, res.x);
  for (int it = 0; it < 200; ++it) {
    res.iterations = it + 1;
    double tol = 1e-13 * scale_of(inst, res.ratio);
    auto x = parametric_step(inst, res.ratio, 0.0);
    double f = parametric_value(inst, x, res.ratio);
    if (f >= -tol) break;
    double r = fractional_ratio(inst, x);
    if (!(r < res.ratio)) break;
    res.x = std::move(x);
    res.ratio = r;
  }
  // among optimal selections prefer the one with fewest ones
  double tol = 1e-12 * scale_of(inst, res.ratio);
  auto lean = parametric_step(inst, res.ratio, tol);
  double r = fractional_ratio(inst, lean);
  if (r <= res.ratio + 1e-12 * std::max(1.0, std::abs(res.ratio)) &&
      std::count(lean.begin(), lean.end(), 1) < std::count(res.x.begin(), res.x.end(), 1)) {
    res.x = std::move(lean);
    res.ratio = std::min(res.ratio, r);
  }
  return res;
}

Assignment hungarian(const std::vector<std::vector<double>>& cost) {
  if (cost.empty() || cost[0].empty()) throw ParameterError("hungarian: empty cost matrix");
  int rows = int(cost.size());
  int cols = int(cost[0].size());
  for (const auto& row : cost)
    if (int(row.size()) != cols) throw ParameterError("hungarian: ragged cost matrix");
  int n = std::max(rows, cols);
  double maxabs = 0.0;
  for (const auto& row : cost)
    for (double c : row)
      if (std::isfinite(c)) maxabs = std::max(maxabs, std::abs(c));
  double penalty = (maxabs + 1.0) * (n + 1) * 4.0;
  std::vector<std::vector<double>> a(n + 1, std::vector<double>(n + 1, 0.0));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a[i + 1][j + 1] = std::isfinite(cost[i][j]) ? cost[i][j] : penalty;

  // potentials method, 1-based
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = a[i0][j] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  Assignment out;
  out.row_to_col.assign(rows, -1);
  for (int j = 1; j <= n; ++j) {
    int i = p[j];
    if (i >= 1 && i <= rows && j <= cols) {
      out.row_to_col[i - 1] = j - 1;
      out.cost += cost[i - 1][j - 1];
    }
  }
  return out;
}

bool DiscConstraintSet::contains(Vec2 p, double slack) const {
  return max_violation(p) <= slack;
}

double DiscConstraintSet::max_violation(Vec2 p) const {
  double v = 0.0;
  for (std::size_t q = 0; q < centers.size(); ++q)
    v = std::max(v, distance(p, centers[q]) - radii[q]);
  return v;
}

namespace {

Vec2 project_one(Vec2 p, Vec2 c, double r) {
  double dx = p.x - c.x, dy = p.y - c.y;
  double d = std::hypot(dx, dy);
  if (d <= r) return p;
  return {c.x + dx * r / d, c.y + dy * r / d};
}

}  // namespace

Vec2 project_discs_dykstra(Vec2 p, const DiscConstraintSet& cs) {
  if (cs.centers.empty()) return p;
  if (cs.centers.size() != cs.radii.size()) throw ParameterError("disc set size mismatch");
  for (double r : cs.radii)
    if (!(r > 0.0)) throw InfeasibleRegionError("disc with non-positive radius");
  if (cs.contains(p, 0.0)) return p;
  std::size_t m = cs.centers.size();
  if (m == 1) return project_one(p, cs.centers[0], cs.radii[0]);

  std::vector<Vec2> incr(m, Vec2{0.0, 0.0});
  Vec2 x = p;
  for (int cycle = 0; cycle < 20000; ++cycle) {
    Vec2 start = x;
    for (std::size_t q = 0; q < m; ++q) {
      Vec2 y{x.x + incr[q].x, x.y + incr[q].y};
      Vec2 z = project_one(y, cs.centers[q], cs.radii[q]);
      incr[q] = {y.x - z.x, y.y - z.y};
      x = z;
    }
    double moved = distance(start, x);
    if (moved < 1e-13 * (1.0 + std::hypot(x.x, x.y)) && cs.contains(x, 1e-9)) break;
  }
  double viol = cs.max_violation(x);
  if (viol > 1e-8) {
    // pull strictly inside with a few cyclic projections; Dykstra's iterate can sit on the
    // boundary of the last disc while slightly outside an earlier one
    for (int it = 0; it < 200 && viol > 1e-8; ++it) {
      for (std::size_t q = 0; q < m; ++q) x = project_one(x, cs.centers[q], cs.radii[q]);
      viol = cs.max_violation(x);
    }
    if (viol > 1e-8)
      throw InfeasibleRegionError("disc intersection appears empty (violation " +
                                  std::to_string(viol) + " m)");
  }
  return x;
}

// In the plane the projection has at most two active circles, so it is either a single-disc
// projection or a pairwise circle intersection point; take the nearest feasible candidate.
Vec2 project_discs(Vec2 p, const DiscConstraintSet& cs) {
  if (cs.centers.empty()) return p;
  if (cs.centers.size() != cs.radii.size()) throw ParameterError("disc set size mismatch");
  for (double r : cs.radii)
    if (!(r > 0.0)) throw InfeasibleRegionError("disc with non-positive radius");
  if (cs.contains(p, 0.0)) return p;
  std::size_t m = cs.centers.size();
  double tol = 1e-10;
  for (double r : cs.radii) tol = std::max(tol, 1e-12 * r);
  Vec2 best = p;
  double best_d = std::numeric_limits<double>::infinity();
  auto consider = [&](Vec2 c) {
    double d = distance(c, p);
    if (d < best_d && cs.max_violation(c) <= tol) {
      best = c;
      best_d = d;
    }
  };
  for (std::size_t q = 0; q < m; ++q) consider(project_one(p, cs.centers[q], cs.radii[q]));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) {
      Vec2 c0 = cs.centers[a], c1 = cs.centers[b];
      double r0 = cs.radii[a], r1 = cs.radii[b];
      double dx = c1.x - c0.x, dy = c1.y - c0.y;
      double d = std::hypot(dx, dy);
      if (d == 0.0 || d > r0 + r1 || d < std::abs(r0 - r1)) continue;
      double along = (r0 * r0 - r1 * r1 + d * d) / (2.0 * d);
      double h = std::sqrt(std::max(0.0, r0 * r0 - along * along));
      Vec2 mid{c0.x + along * dx / d, c0.y + along * dy / d};
      consider({mid.x - h * dy / d, mid.y + h * dx / d});
      consider({mid.x + h * dy / d, mid.y - h * dx / d});
    }
  if (std::isfinite(best_d)) {
    // pull onto the feasible side of rounding
    for (int it = 0; it < 3 && cs.max_violation(best) > 0.0; ++it)
      for (std::size_t q = 0; q < m; ++q) best = project_one(best, cs.centers[q], cs.radii[q]);
    return best;
  }
  return project_discs_dykstra(p, cs);
}

PlanarMax maximize_over_discs(const PlanarObjective& obj, const DiscConstraintSet& cs, Vec2 init,
                              double initial_step) {
  PlanarMax out;
  Vec2 u = project_discs(init, cs);
  double fu = obj.value(u);
  double t = initial_step > 0.0 ? initial_step : 1.0;
  int it = 0;
  for (; it < 5000; ++it) {
    Vec2 g = obj.gradient(u);
    bool accepted = false;
    Vec2 next = u;
    double fnext = fu;
    if (!std::isfinite(g.x) || !std::isfinite(g.y)) break;
    for (int bt = 0; bt < 60; ++bt) {
      Vec2 trial{u.x + t * g.x, u.y + t * g.y};
      if (!std::isfinite(trial.x) || !std::isfinite(trial.y)) {
        t *= 0.5;
        continue;
      }
      Vec2 cand = project_discs(trial, cs);
      double dx = cand.x - u.x, dy = cand.y - u.y;
      double fc = obj.value(cand);
      if (fc >= fu + g.x * dx + g.y * dy - (dx * dx + dy * dy) / (2.0 * t) - 1e-15 * std::abs(fu)) {
        next = cand;
        fnext = fc;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    double step = distance(next, u);
    bool stalled = fnext - fu <= 1e-14 * std::abs(fu);
    if (fnext >= fu) {
      u = next;
      fu = fnext;
    }
    if (step < 1e-7 || (stalled && step < 1e-4)) break;
    t = std::min(t * 2.0, 1e12);
  }
  out.point = u;
  out.value = fu;
  out.iterations = it;
  return out;
}

}  // namespace uavswarm
