#include "uavswarm/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "uavswarm/errors.hpp"
#include "uavswarm/numerics.hpp"

namespace uavswarm {

double LinkGeometry::elevation_deg() const {
  double s = std::clamp(altitude / distance, -1.0, 1.0);
  return 180.0 / std::numbers::pi * std::asin(s);
}

namespace {

void check_geometry(const LinkGeometry& g) {
  if (!(g.distance > 0.0)) throw DomainError("link distance must be positive");
  if (!(g.altitude > 0.0)) throw DomainError("UAV altitude must be positive");
  if (g.altitude > g.distance * (1.0 + 1e-12))
    throw DomainError("altitude exceeds link distance");
}

}  // namespace

double los_probability(const LinkGeometry& geom, const ChannelParams& ch) {
  check_geometry(geom);
  return 1.0 / (1.0 + ch.beta * std::exp(-ch.psi * (geom.elevation_deg() - ch.beta)));
}

double excess_loss(const LinkGeometry& geom, const ChannelParams& ch) {
  double p = los_probability(geom, ch);
  return p * ch.mu_los + (1.0 - p) * ch.mu_nlos;
}

double path_loss(const LinkGeometry& geom, const ChannelParams& ch) {
  double kd = ch.kappa0() * geom.distance;
  return std::pow(kd, ch.path_exponent) * excess_loss(geom, ch);
}

double average_gain(const LinkGeometry& geom, const ChannelParams& ch) {
  return 1.0 / path_loss(geom, ch);
}

double excess_path_function(double d, double h, const ChannelParams& ch) {
  if (!(h > 0.0)) throw DomainError("altitude must be positive");
  if (d < h * (1.0 - 1e-12)) throw DomainError("distance below altitude");
  d = std::max(d, h);
  return d * d * excess_loss({d, h}, ch);
}

QuadraticFit fit_quadratic(double h, const ChannelParams& ch, double d_lo, double d_hi,
                           int samples) {
  if (samples < 3) throw ParameterError("fit needs at least 3 samples");
  if (d_lo < h * (1.0 - 1e-12) || !(d_hi > d_lo))
    throw ParameterError("fit range must satisfy h <= d_lo < d_hi");
  // normal equations in the scaled variable t = d / d_hi
  double s[5] = {0, 0, 0, 0, 0};
  double r[3] = {0, 0, 0};
  std::vector<double> ds(samples), fs(samples);
  for (int n = 0; n < samples; ++n) {
    double d = d_lo + (d_hi - d_lo) * n / (samples - 1);
    double f = excess_path_function(d, h, ch);
    ds[n] = d;
    fs[n] = f;
    double t = d / d_hi;
    double p = 1.0;
    for (int q = 0; q < 5; ++q) {
      s[q] += p;
      if (q < 3) r[q] += p * f;
      p *= t;
    }
  }
  // [s4 s3 s2; s3 s2 s1; s2 s1 s0] [A B C]^T = [r2 r1 r0]
  double m[3][4] = {{s[4], s[3], s[2], r[2]}, {s[3], s[2], s[1], r[1]}, {s[2], s[1], s[0], r[0]}};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int row = col + 1; row < 3; ++row)
      if (std::abs(m[row][col]) > std::abs(m[piv][col])) piv = row;
    std::swap(m[col], m[piv]);
    for (int row = 0; row < 3; ++row) {
      if (row == col) continue;
      double f = m[row][col] / m[col][col];
      for (int c = col; c < 4; ++c) m[row][c] -= f * m[col][c];
    }
  }
  double a = m[0][3] / m[0][0] / (d_hi * d_hi);
  double b = m[1][3] / m[1][1] / d_hi;
  double c = m[2][3] / m[2][2];
  if (!(a > 0.0) || !std::isfinite(a)) throw FitError("quadratic fit is not convex", a, b, c);

  QuadraticFit fit;
  fit.k1 = std::sqrt(a);
  fit.k2 = b / (2.0 * fit.k1);
  fit.k3 = c - b * b / (4.0 * a);
  fit.altitude = h;
  fit.d_lo = d_lo;
  fit.d_hi = d_hi;
  for (int n = 0; n < samples; ++n)
    fit.max_rel_error = std::max(fit.max_rel_error, std::abs(fit(ds[n]) - fs[n]) / fs[n]);
  return fit;
}

double coverage_radius(double limit, double h, const ChannelParams& ch) {
  double f_h = excess_path_function(h, h, ch);
  if (!(limit > f_h))
    throw CoverageError("coverage limit is below the overhead value; UAV covers nothing");
  // F(d) >= mu_los d^2, so sqrt(limit / mu_los) bounds the root from above
  double hi = std::max(h * 1.0000001, std::sqrt(limit / ch.mu_los) * 1.01 + 1e-9);
  while (excess_path_function(hi, h, ch) < limit) hi *= 2.0;
  auto f = [&](double d) { return excess_path_function(d, h, ch) - limit; };
  return bisect_root(f, h, hi, 1e-9 * h);
}

double eh_horizontal_radius(double h, const ChannelParams& ch, const RadioParams& radio) {
  double limit = radio.p_ut / (ch.kappa0() * ch.kappa0() * radio.rho);
  if (!(limit > excess_path_function(h, h, ch))) return -1.0;
  double d0 = coverage_radius(limit, h, ch);
  return std::sqrt(std::max(0.0, d0 * d0 - h * h));
}

QuadraticFit fit_for_altitude(double h, const ChannelParams& ch, const RadioParams& radio) {
  double hi = 3.0 * h;
  double limit = radio.p_ut / (ch.kappa0() * ch.kappa0() * radio.rho);
  if (limit > excess_path_function(h, h, ch)) hi = std::max(hi, coverage_radius(limit, h, ch));
  return fit_quadratic(h, ch, h, hi, 200);
}

}  // namespace uavswarm
