#include "uavswarm/model.hpp"

#include <algorithm>
#include <random>

#include <json.hpp>

#include "uavswarm/errors.hpp"

namespace uavswarm {

using nlohmann::json;

const char* to_string(ErrorClass c) {
  switch (c) {
    case ErrorClass::parameter: return "parameter";
    case ErrorClass::parse: return "parse";
    case ErrorClass::io: return "io";
    case ErrorClass::domain: return "domain";
    case ErrorClass::coverage: return "coverage";
    case ErrorClass::infeasible: return "infeasible";
    case ErrorClass::solver: return "solver";
    case ErrorClass::state: return "state";
    case ErrorClass::internal: return "internal";
  }
  return "unknown";
}

ChannelParams ChannelParams::pure_los(double mu_los_linear) {
  ChannelParams ch;
  ch.beta = 0.0;
  ch.mu_los = mu_los_linear;
  ch.mu_nlos = mu_los_linear * 10.0;
  return ch;
}

void ChannelParams::validate() const {
  if (!(carrier_freq > 0.0) || !(light_speed > 0.0))
    throw ParameterError("carrier frequency and light speed must be positive");
  if (path_exponent != 2.0) throw ParameterError("only path exponent 2 is supported");
  if (!(mu_los > 1.0) || !(mu_nlos > mu_los))
    throw ParameterError("excess losses must satisfy mu_nlos > mu_los > 1");
  if (beta < 0.0 || psi < 0.0) throw ParameterError("LoS constants must be non-negative");
}

void RadioParams::validate() const {
  if (!(p_ut > 0.0) || !(rho > 0.0) || !(gamma > 0.0) || !(noise_power > 0.0))
    throw ParameterError("radio powers and thresholds must be positive");
  if (!(eh_eff > 0.0) || eh_eff > 1.0) throw ParameterError("eh_eff must lie in (0,1]");
}

void Scenario::validate() const {
  if (devices.empty()) throw ParameterError("scenario has no devices");
  if (uav_count < 1) throw ParameterError("uav_count must be >= 1");
  if (channel_count < 1) throw ParameterError("channel_count must be >= 1");
  if (!(hover_time > 0.0)) throw ParameterError("hover_time must be positive");
  if (!(altitude.min > 0.0) || !(altitude.max > altitude.min))
    throw ParameterError("altitude bounds must satisfy 0 < min < max");
  channel.validate();
  radio.validate();
}

Scenario generate_scenario(int k, double radius, std::uint64_t seed, const ChannelParams& channel,
                           const RadioParams& radio, int uav_count, int channel_count) {
  if (k < 1) throw ParameterError("device count must be >= 1");
  if (!(radius > 0.0)) throw ParameterError("radius must be positive");
  Scenario scn;
  scn.uav_count = uav_count;
  scn.channel_count = channel_count;
  scn.region_radius = radius;
  scn.channel = channel;
  scn.radio = radio;
  scn.seed = seed;
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };
  scn.devices.reserve(k);
  for (int i = 0; i < k; ++i) {
    double r = radius * std::sqrt(uniform());
    double a = 2.0 * std::numbers::pi * uniform();
    scn.devices.push_back({r * std::cos(a), r * std::sin(a)});
  }
  scn.validate();
  return scn;
}

std::string scenario_to_text(const Scenario& scn) {
  json j;
  json devs = json::array();
  for (const auto& d : scn.devices) devs.push_back({d.x, d.y});
  j["devices"] = devs;
  j["uav_count"] = scn.uav_count;
  j["channel_count"] = scn.channel_count;
  j["hover_time"] = scn.hover_time;
  j["region_radius"] = scn.region_radius;
  j["seed"] = scn.seed;
  j["altitude"] = {{"min", scn.altitude.min}, {"max", scn.altitude.max}};
  const auto& c = scn.channel;
  j["channel"] = {{"beta", c.beta},
                  {"psi", c.psi},
                  {"carrier_freq", c.carrier_freq},
                  {"light_speed", c.light_speed},
                  {"path_exponent", c.path_exponent},
                  {"mu_los", c.mu_los},
                  {"mu_nlos", c.mu_nlos}};
  const auto& r = scn.radio;
  j["radio"] = {{"p_ut", r.p_ut},
                {"eh_eff", r.eh_eff},
                {"rho", r.rho},
                {"gamma", r.gamma},
                {"noise_power", r.noise_power}};
  return j.dump(2) + "\n";
}

namespace {

template <class T>
void read_field(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad value for '") + key + "': " + e.what(), -1, key);
  }
}

}  // namespace

Scenario scenario_from_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // byte offset -> line number
    std::size_t pos = std::min<std::size_t>(e.byte, text.size());
    int line = 1 + int(std::count(text.begin(), text.begin() + pos, '\n'));
    throw ParseError(std::string("scenario: ") + e.what(), line);
  }
  if (!j.is_object()) throw ParseError("scenario must be an object");
  if (!j.contains("devices") || !j["devices"].is_array())
    throw ParseError("scenario: missing device list", -1, "devices");
  Scenario scn;
  for (const auto& d : j["devices"]) {
    if (!d.is_array() || d.size() != 2 || !d[0].is_number() || !d[1].is_number())
      throw ParseError("scenario: device entries must be [x, y]", -1, "devices");
    scn.devices.push_back({d[0].get<double>(), d[1].get<double>()});
  }
  read_field(j, "uav_count", scn.uav_count);
  read_field(j, "channel_count", scn.channel_count);
  read_field(j, "hover_time", scn.hover_time);
  read_field(j, "region_radius", scn.region_radius);
  read_field(j, "seed", scn.seed);
  if (j.contains("altitude")) {
    read_field(j["altitude"], "min", scn.altitude.min);
    read_field(j["altitude"], "max", scn.altitude.max);
  }
  if (j.contains("channel")) {
    const auto& c = j["channel"];
    read_field(c, "beta", scn.channel.beta);
    read_field(c, "psi", scn.channel.psi);
    read_field(c, "carrier_freq", scn.channel.carrier_freq);
    read_field(c, "light_speed", scn.channel.light_speed);
    read_field(c, "path_exponent", scn.channel.path_exponent);
    read_field(c, "mu_los", scn.channel.mu_los);
    read_field(c, "mu_nlos", scn.channel.mu_nlos);
  }
  if (j.contains("radio")) {
    const auto& r = j["radio"];
    read_field(r, "p_ut", scn.radio.p_ut);
    read_field(r, "eh_eff", scn.radio.eh_eff);
    read_field(r, "rho", scn.radio.rho);
    read_field(r, "gamma", scn.radio.gamma);
    read_field(r, "noise_power", scn.radio.noise_power);
  }
  scn.validate();
  return scn;
}

int BinaryMatrix::row_sum(int r) const {
  int s = 0;
  for (int c = 0; c < cols_; ++c) s += (*this)(r, c);
  return s;
}

int BinaryMatrix::col_sum(int c) const {
  int s = 0;
  for (int r = 0; r < rows_; ++r) s += (*this)(r, c);
  return s;
}

std::vector<int> BinaryMatrix::row_ones(int r) const {
  std::vector<int> out;
  for (int c = 0; c < cols_; ++c)
    if ((*this)(r, c)) out.push_back(c);
  return out;
}

std::vector<int> BinaryMatrix::col_ones(int c) const {
  std::vector<int> out;
  for (int r = 0; r < rows_; ++r)
    if ((*this)(r, c)) out.push_back(r);
  return out;
}

int AssociationState::ul_uav(int device) const {
  for (int j = 0; j < ul_info.cols(); ++j)
    if (ul_info(device, j)) return j;
  throw StateError("device " + std::to_string(device) + " has no UL information UAV");
}

void AssociationState::validate() const {
  int k = dl_energy.rows();
  if (ul_info.rows() != k || ul_energy.rows() != k || ul_info.cols() != dl_energy.cols() ||
      ul_energy.cols() != dl_energy.cols())
    throw StateError("association matrices have mismatched shapes");
  for (int i = 0; i < k; ++i) {
    if (dl_energy.row_sum(i) < 1)
      throw StateError("device " + std::to_string(i) + " has no DL energy provider");
    if (ul_info.row_sum(i) != 1)
      throw StateError("device " + std::to_string(i) + " must have exactly one UL UAV");
    if (ul_energy.row_sum(i) < 1)
      throw StateError("device " + std::to_string(i) + " has no UL energy provider");
  }
}

int Schedule::max_epochs() const {
  int m = 0;
  for (int l : epochs_per_uav) m = std::max(m, l);
  return m;
}

std::vector<int> Schedule::members(const AssociationState& assoc, int uav, int k) const {
  std::vector<int> out;
  for (int i : assoc.ul_served(uav))
    if (epoch[i] == k) out.push_back(i);
  return out;
}

void Schedule::validate(const AssociationState& assoc, int channels) const {
  int k = assoc.ul_info.rows();
  int n = assoc.ul_info.cols();
  if (int(epoch.size()) != k || int(epochs_per_uav.size()) != n)
    throw StateError("schedule shape does not match associations");
  for (int j = 0; j < n; ++j) {
    int c = assoc.ul_count(j);
    if (epochs_per_uav[j] != epochs_needed(c, channels))
      throw StateError("UAV " + std::to_string(j) + " epoch count inconsistent with its load");
    std::vector<int> load(epochs_per_uav[j] + 1, 0);
    for (int i : assoc.ul_served(j)) {
      if (epoch[i] < 1 || epoch[i] > epochs_per_uav[j])
        throw StateError("device " + std::to_string(i) + " scheduled outside its UAV's epochs");
      if (++load[epoch[i]] > channels)
        throw StateError("epoch " + std::to_string(epoch[i]) + " of UAV " + std::to_string(j) +
                         " exceeds the channel count");
    }
  }
}

void TimeAllocation::validate(double hover_time) const {
  if (!(tau0 > 0.0) || !(tau1 > 0.0) || tau0 + tau1 > hover_time * (1.0 + 1e-12))
    throw StateError("time allocation violates positivity or the hover budget");
}

}  // namespace uavswarm
