#ifndef UAVSWARM_PLACEMENT_HPP
#define UAVSWARM_PLACEMENT_HPP

#include <cstdint>
#include <limits>
#include <vector>

#include "uavswarm/channel.hpp"
#include "uavswarm/model.hpp"
#include "uavswarm/numerics.hpp"

namespace uavswarm {

/// One ratio of a per-UAV sum-of-ratios objective.
///   b = 0: phi1 / (rho1 D + rho2)
///   b = 1: (phi1 D + phi2) / (rho1 D^2 + rho2 D + rho3)
/// where D is the average path loss to the UAV. f_limit caps F(d) at the device.
struct RatioTerm {
  Vec2 pos;
  bool b = false;
  double phi1 = 1.0;
  double phi2 = 0.0;
  double rho1 = 1.0;
  double rho2 = 0.0;
  double rho3 = 0.0;
  double f_limit = std::numeric_limits<double>::infinity();
};

struct PlacementProblem {
  std::vector<RatioTerm> terms;
  ChannelParams channel;
  AltitudeBounds altitude;
};

struct PlacementOptions {
  int restarts = 5;        // starts besides the given one
  int max_iters = 100;
  double tol = 1e-6;
  int cccp_iters = 30;
  double cccp_move = 1e-4;
  bool polish = true;
  std::uint64_t seed = 0;
};

struct PlacementResult {
  Vec3 position;
  double value = 0.0;
  std::vector<double> slack;
  std::vector<double> trace;  // value after each outer iteration of the winning start
  int iterations = 0;
};

double term_ratio(const RatioTerm& t, double D);
double ratio_sum(const PlacementProblem& p, Vec3 u);
/// Exact quadratic-transform objective for fixed slacks.
double transformed_value(const PlacementProblem& p, Vec3 u, const std::vector<double>& slack);
std::vector<double> optimal_slack(const PlacementProblem& p, Vec3 u);
bool placement_feasible(const PlacementProblem& p, Vec3 u, double rel_tol = 1e-10);

/// Horizontal discs at altitude h. Returns false when some device is out of reach even overhead.
bool discs_at(const PlacementProblem& p, double h, DiscConstraintSet& out);

/// c = xi (slope (k1 d + k2) + offset) bounds 2 xi sqrt(phi1 D + phi2) from below under the
/// quadratic fit, with equality where sqrt(phi1) kappa0 (k1 d + k2) = touch.
struct CccpLine {
  double slope = 0.0;
  double offset = 0.0;
  double touch = 0.0;
};

CccpLine cccp_line(const RatioTerm& t, const QuadraticFit& fit, double kappa0);
double cccp_bound(const RatioTerm& t, double xi, double d, const QuadraticFit& fit, double kappa0);
/// Distance at which c(u) touches 2 xi sqrt(phi1 D + phi2) when D follows the fit.
double cccp_tight_distance(const RatioTerm& t, const QuadraticFit& fit, double kappa0);

PlacementResult place_uav(const PlacementProblem& p, Vec3 init, const PlacementOptions& opts);

}  // namespace uavswarm

#endif
