#ifndef UAVSWARM_EXPERIMENT_HPP
#define UAVSWARM_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uavswarm/model.hpp"
#include "uavswarm/orchestrator.hpp"

namespace uavswarm {

struct ModeSpec {
  TimeMode time = TimeMode::ota;
  Infra infra = Infra::uav;
  SchedulePolicy policy = SchedulePolicy::optimal;
  Access access = Access::ofdma;

  std::string label() const;
};

/// Swept variable. Names: p_ut_dbm, rho_dbm, gamma_db, devices, uavs, channels, radius, none.
struct SweepSpec {
  std::string name = "none";
  double lo = 0.0;
  double step = 1.0;
  double hi = 0.0;

  std::vector<double> values() const;
};

struct ExperimentSpec {
  // generator parameters, used when no explicit scenario is given
  int devices = 80;
  int uavs = 4;
  int channels = 12;
  double region_radius = 80.0;
  double hover_time = 1.0;
  ChannelParams channel;
  RadioParams radio;
  AltitudeBounds altitude;
  std::optional<Scenario> scenario;

  std::vector<ModeSpec> modes{ModeSpec{}};
  SweepSpec sweep;
  int ensemble = 1;
  std::uint64_t seed = 1;
  bool bits = false;
  bool parallel = true;

  double eps = 1e-4;
  int max_iters = 50;
  PlacementOptions placement;

  void validate() const;
};

/// JSON config. Errors carry the offending line and field.
ExperimentSpec parse_experiment(std::string_view text);
std::string experiment_to_text(const ExperimentSpec& spec);
SweepSpec parse_sweep(std::string_view arg);  // NAME=LO:STEP:HI

Scenario make_scenario(const ExperimentSpec& spec, double sweep_value, std::uint64_t seed);

/// Git blob hash (SHA-1 of "blob <len>\0" + canonical scenario text).
std::string scenario_hash(const Scenario& scn);

struct RunRow {
  std::string sweep_name;
  double sweep_value = 0.0;
  std::string mode;
  std::uint64_t seed = 0;
  std::string status = "ok";
  int error_code = 0;
  std::string error;
  double sum_throughput = 0.0;
  double jain = 0.0;
  double mean_dl_altitude = 0.0;
  double mean_ul_altitude = 0.0;
  double mean_dl_coverage = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string scenario_hash;
};

/// Rows in (sweep value, mode, seed) order.
std::vector<RunRow> run_experiment(const ExperimentSpec& spec);

std::string results_csv(const std::vector<RunRow>& rows, bool bits);
std::string summary_csv(const std::vector<RunRow>& rows, bool bits);
std::string manifest_text(const ExperimentSpec& spec, const std::vector<RunRow>& rows);

/// Writes results.csv, summary.csv and manifest.json into dir.
void write_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec,
                   const std::vector<RunRow>& rows);

}  // namespace uavswarm

#endif
