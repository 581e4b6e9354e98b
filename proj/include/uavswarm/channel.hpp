#ifndef UAVSWARM_CHANNEL_HPP
#define UAVSWARM_CHANNEL_HPP

#include "uavswarm/model.hpp"

namespace uavswarm {

struct LinkGeometry {
  double distance = 0.0;  // m
  double altitude = 0.0;  // m

  double elevation_deg() const;
  static LinkGeometry between(Vec3 uav, Vec2 ground) { return {uavswarm::distance(uav, ground), uav.z}; }
};

/// F(d) ~ (k1 d + k2)^2 + k3 at a fixed altitude.
struct QuadraticFit {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double altitude = 0.0;
  double d_lo = 0.0;
  double d_hi = 0.0;
  double max_rel_error = 0.0;

  double operator()(double d) const {
    double t = k1 * d + k2;
    return t * t + k3;
  }
};

double los_probability(const LinkGeometry& geom, const ChannelParams& ch);

/// Blended excess loss mu_LoS Pr_LoS + mu_NLoS Pr_NLoS.
double excess_loss(const LinkGeometry& geom, const ChannelParams& ch);

double average_gain(const LinkGeometry& geom, const ChannelParams& ch);
inline double average_gain(Vec3 uav, Vec2 ground, const ChannelParams& ch) {
  return average_gain(LinkGeometry::between(uav, ground), ch);
}
/// D-bar = 1/g.
double path_loss(const LinkGeometry& geom, const ChannelParams& ch);
inline double path_loss(Vec3 uav, Vec2 ground, const ChannelParams& ch) {
  return path_loss(LinkGeometry::between(uav, ground), ch);
}

/// F(d) = d^2 [mu_LoS Pr_LoS + mu_NLoS Pr_NLoS]; requires d >= h > 0.
double excess_path_function(double d, double h, const ChannelParams& ch);

QuadraticFit fit_quadratic(double h, const ChannelParams& ch, double d_lo, double d_hi,
                           int samples = 200);

/// Unique d >= h with F(d) = limit.
double coverage_radius(double limit, double h, const ChannelParams& ch);

/// Horizontal radius of the EH disc at altitude h: sqrt(d0^2 - h^2), d0 from P/(kappa0^2 rho).
/// Returns a negative value when not even the overhead point is covered.
double eh_horizontal_radius(double h, const ChannelParams& ch, const RadioParams& radio);

/// Fit over [h, max(3h, d_cov)] where d_cov is the EH coverage radius (falls back to 3h).
QuadraticFit fit_for_altitude(double h, const ChannelParams& ch, const RadioParams& radio);

}  // namespace uavswarm

#endif
