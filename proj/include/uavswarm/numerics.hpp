#ifndef UAVSWARM_NUMERICS_HPP
#define UAVSWARM_NUMERICS_HPP

#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "uavswarm/model.hpp"

namespace uavswarm {

using ScalarFn = std::function<double(double)>;

double bisect_root(const ScalarFn& f, double lo, double hi, double tol);

struct ScalarMax {
  double arg = 0.0;
  double value = 0.0;
};

ScalarMax golden_section_max(const ScalarFn& f, double lo, double hi, double tol);

constexpr double kMasked = std::numeric_limits<double>::infinity();

/// min (a0 + sum a_j x_j) / (b0 + sum b_j x_j) over x in {0,1}^N with sum x >= min_ones.
/// a_j = kMasked forbids x_j = 1.
struct FractionalInstance {
  double a0 = 0.0;
  double b0 = 0.0;
  std::vector<double> a;
  std::vector<double> b;
  int min_ones = 1;
  // optional tie-break when forced picks are needed: larger priority wins, then lower index
  std::vector<double> priority;
};

struct FractionalResult {
  std::vector<std::uint8_t> x;
  double ratio = 0.0;
  int iterations = 0;
};

double fractional_ratio(const FractionalInstance& inst, const std::vector<std::uint8_t>& x);

FractionalResult dinkelbach_select(const FractionalInstance& inst);

struct Assignment {
  std::vector<int> row_to_col;  // -1 when matched to a padding column
  double cost = 0.0;
};

/// Minimum-cost matching on the zero-padded square matrix. Infinite entries are replaced by a
/// dominating finite penalty.
Assignment hungarian(const std::vector<std::vector<double>>& cost);

struct DiscConstraintSet {
  std::vector<Vec2> centers;
  std::vector<double> radii;

  bool contains(Vec2 p, double slack = 1e-8) const;
  double max_violation(Vec2 p) const;
};

/// Euclidean projection onto the intersection of discs. Throws InfeasibleRegionError when empty.
Vec2 project_discs(Vec2 p, const DiscConstraintSet& cs);
/// Same via Dykstra's alternating projections; slower, used as a fallback and cross-check.
Vec2 project_discs_dykstra(Vec2 p, const DiscConstraintSet& cs);

struct PlanarObjective {
  std::function<double(Vec2)> value;
  std::function<Vec2(Vec2)> gradient;
};

struct PlanarMax {
  Vec2 point;
  double value = 0.0;
  int iterations = 0;
};

/// Projected gradient ascent with backtracking for a concave objective.
PlanarMax maximize_over_discs(const PlanarObjective& obj, const DiscConstraintSet& cs, Vec2 init,
                              double initial_step = 1.0);

}  // namespace uavswarm

#endif
