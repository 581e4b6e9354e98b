#ifndef UAVSWARM_MODEL_HPP
#define UAVSWARM_MODEL_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace uavswarm {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  Vec2 xy() const { return {x, y}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }
inline double distance(Vec3 uav, Vec2 ground) {
  return std::sqrt((uav.x - ground.x) * (uav.x - ground.x) +
                   (uav.y - ground.y) * (uav.y - ground.y) + uav.z * uav.z);
}

// Unit conversions. Powers are carried in watts internally; configs use dBm.
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

/// Probabilistic air-to-ground channel constants (urban, 2 GHz by default).
struct ChannelParams {
  double beta = 11.95;
  double psi = 0.14;
  double carrier_freq = 2.0e9;   // Hz
  double light_speed = 3.0e8;    // m/s
  double path_exponent = 2.0;
  double mu_los = db_to_linear(3.0);
  double mu_nlos = db_to_linear(23.0);

  /// 4*pi*f_c/c, in 1/m.
  double kappa0() const { return 4.0 * std::numbers::pi * carrier_freq / light_speed; }

  /// Pure line-of-sight limit (beta -> 0 makes Pr_LoS identically 1).
  static ChannelParams pure_los(double mu_los_linear = db_to_linear(3.0));

  void validate() const;
};

struct RadioParams {
  double p_ut = dbm_to_watt(75.0);          // W
  double eh_eff = 0.5;                      // eta * delta
  double rho = dbm_to_watt(-18.0);          // W
  double gamma = db_to_linear(5.0);         // linear SNR threshold
  double noise_power = dbm_to_watt(-120.0); // W

  /// eta*delta*P_ut/N0, identical for every device.
  double epsilon() const { return eh_eff * p_ut / noise_power; }

  void validate() const;
};

struct AltitudeBounds {
  double min = 1.0;
  double max = 150.0;
};

struct Scenario {
  std::vector<Vec2> devices;   // ground devices, z = 0
  int uav_count = 1;
  int channel_count = 1;
  double hover_time = 1.0;
  double region_radius = 80.0; // radius of the deployment disc
  ChannelParams channel;
  RadioParams radio;
  AltitudeBounds altitude;
  std::uint64_t seed = 0;

  int device_count() const { return static_cast<int>(devices.size()); }
  Vec3 device3(int i) const { return {devices[i].x, devices[i].y, 0.0}; }
  void validate() const;
};

/// Draws k devices uniformly over a disc of the given radius (inverse-CDF sampling).
Scenario generate_scenario(int k, double radius, std::uint64_t seed, const ChannelParams& channel,
                           const RadioParams& radio, int uav_count = 1, int channel_count = 1);

/// Scenario <-> JSON text. Devices are written as [x, y] pairs in meters.
std::string scenario_to_text(const Scenario& scn);
Scenario scenario_from_text(std::string_view text);

struct Deployment {
  std::vector<Vec3> dl_positions;
  std::vector<Vec3> ul_positions;
  std::vector<double> dl_slack;  // quadratic-transform slack per device (DL)
  std::vector<double> ul_slack;  // same, UL

  int uav_count() const { return static_cast<int>(dl_positions.size()); }
};

/// Dense row-major 0/1 matrix.
class BinaryMatrix {
public:
  BinaryMatrix() = default;
  BinaryMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(std::size_t(rows) * cols, 0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool operator()(int r, int c) const { return data_[std::size_t(r) * cols_ + c] != 0; }
  void set(int r, int c, bool v) { data_[std::size_t(r) * cols_ + c] = v ? 1 : 0; }
  int row_sum(int r) const;
  int col_sum(int c) const;
  std::vector<int> row_ones(int r) const;
  std::vector<int> col_ones(int c) const;

  friend bool operator==(const BinaryMatrix&, const BinaryMatrix&) = default;

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint8_t> data_;
};

/// I (DL energy), A (UL information) and B (UL energy) association matrices, K x N.
struct AssociationState {
  BinaryMatrix dl_energy;
  BinaryMatrix ul_info;
  BinaryMatrix ul_energy;

  /// UAV collecting device i's data (the single 1 in row i of A).
  int ul_uav(int device) const;
  std::vector<int> dl_providers(int device) const { return dl_energy.row_ones(device); }
  std::vector<int> ul_providers(int device) const { return ul_energy.row_ones(device); }
  std::vector<int> ul_served(int uav) const { return ul_info.col_ones(uav); }
  std::vector<int> dl_served(int uav) const { return dl_energy.col_ones(uav); }
  int ul_count(int uav) const { return ul_info.col_sum(uav); }

  /// Throws StateError when a row-sum constraint is violated.
  void validate() const;
};

inline int epochs_needed(int served, int channels) {
  return served == 0 ? 0 : (served + channels - 1) / channels;
}

/// Epoch index per device (1-based) plus the number of epochs of every UAV.
struct Schedule {
  std::vector<int> epoch;
  std::vector<int> epochs_per_uav;

  int max_epochs() const;
  /// s_{i,k}: 1 iff device i transmits in epoch k.
  bool scheduled(int device, int k) const { return epoch[device] == k; }
  /// Devices of a UAV transmitting in epoch k.
  std::vector<int> members(const AssociationState& assoc, int uav, int k) const;

  /// Checks each device is in exactly one epoch of its UAV and no epoch holds more than M.
  void validate(const AssociationState& assoc, int channels) const;

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

struct TimeAllocation {
  double tau0 = 0.5;
  double tau1 = 0.5;
  void validate(double hover_time) const;
  friend bool operator==(const TimeAllocation&, const TimeAllocation&) = default;
};

/// Which branch of the optimal time characterization is active.
enum class TimeCase {
  slack,    // every SNR constraint is slack at the optimum (varpi < 1)
  binding,  // the worst SNR constraint is tight (varpi >= 1)
};

/// Per-device coefficients derived from the current gains, time split and schedule.
/// Each device is evaluated at its own scheduled epoch k_i and its UL UAV's L.
struct SolverCoefficients {
  // copied in so downstream steps are self-contained
  TimeAllocation time;
  double gamma = 0.0;
  double epsilon = 0.0;
  TimeCase branch = TimeCase::slack;

  std::vector<int> epoch;        // k_i
  std::vector<int> epochs;       // L of the device's UL UAV
  std::vector<double> g_ul;      // gain to the UL (information) UAV
  std::vector<double> g_dl_sum;  // sum of DL gains over I row
  std::vector<double> g_ul_sum;  // sum of UL gains over B row

  std::vector<double> theta0;
  std::vector<double> theta1;
  std::vector<double> phi;
  std::vector<double> gamma_cap;
  std::vector<double> lambda_cap;
  std::vector<double> omega_cap;
  std::vector<double> iota;              // others-only UL energy term at k_i
  std::vector<std::vector<double>> chi;  // K x N
  std::vector<std::vector<std::uint8_t>> w;  // K x L_i

  double varpi = 0.0;
  int argmax_device = -1;  // m
  int argmax_epoch = -1;   // n
};

/// Per-constraint diagnostics from an independent checker.
struct FeasibilityFlags {
  bool time_ok = true;           // tau > 0, tau0 + tau1 <= T_hov
  bool dl_service_ok = true;     // every I row has a 1
  bool ul_service_ok = true;     // every A row has exactly one 1
  bool ul_energy_service_ok = true;  // every B row has a 1
  bool eh_dl_ok = true;          // P g >= rho on every I entry
  bool eh_ul_ok = true;          // P g >= rho on every B entry
  bool schedule_ok = true;       // one epoch per device, <= M per epoch
  bool altitude_ok = true;
  int snr_violations = 0;        // devices failing the decoding threshold
  double worst_snr_ratio = 0.0;  // max over devices of gamma / SNR

  bool all_ok() const {
    return time_ok && dl_service_ok && ul_service_ok && ul_energy_service_ok && eh_dl_ok &&
           eh_ul_ok && schedule_ok && altitude_ok && snr_violations == 0;
  }
};

struct SolutionReport {
  std::vector<double> per_device_rate;        // nats per channel use
  std::vector<double> per_device_throughput;  // nats; zero when undecodable
  std::vector<std::uint8_t> decodable;
  double sum_throughput = 0.0;
  double jain = 0.0;
  std::vector<double> trace;
  FeasibilityFlags flags;

  // final solution
  Deployment deployment;
  AssociationState associations;
  Schedule schedule;
  TimeAllocation time;
  TimeCase branch = TimeCase::slack;
  int iterations = 0;
  bool converged = false;

  double mean_dl_altitude = 0.0;
  double mean_ul_altitude = 0.0;
  double mean_dl_coverage = 0.0;  // horizontal EH coverage radius at the DL altitude
};

}  // namespace uavswarm

#endif
