#include "uavswarm/experiment.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "uavswarm/errors.hpp"
#include "uavswarm/metrics.hpp"

namespace uavswarm {

using json = nlohmann::ordered_json;

namespace {

int line_of(std::string_view text, std::string_view key) {
  std::string quoted = "\"" + std::string(key) + "\"";
  auto pos = text.find(quoted);
  if (pos == std::string_view::npos) return -1;
  return 1 + int(std::count(text.begin(), text.begin() + pos, '\n'));
}

struct Reader {
  std::string_view text;

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    throw ParseError("config: field '" + key + "': " + why, line_of(text, key), key);
  }

  template <class T>
  void get(const json& obj, const char* key, T& out) const {
    if (!obj.contains(key)) return;
    try {
      out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
      fail(key, e.what());
    }
  }

  void only(const json& obj, std::initializer_list<const char*> keys, const char* where) const {
    if (!obj.is_object()) fail(where, "expected an object");
    for (const auto& [k, v] : obj.items()) {
      bool known = false;
      for (const char* a : keys) known = known || k == a;
      if (!known) fail(k, "unknown field");
    }
  }
};

template <class E>
E parse_enum(const Reader& rd, const json& obj, const char* key, E fallback,
             std::initializer_list<std::pair<const char*, E>> names) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) rd.fail(key, "expected a string");
  std::string s = obj[key].get<std::string>();
  for (const auto& [n, v] : names)
    if (s == n) return v;
  rd.fail(key, "unknown value '" + s + "'");
}

ModeSpec parse_mode(const Reader& rd, const json& m) {
  rd.only(m, {"time", "infra", "policy", "access"}, "modes");
  ModeSpec s;
  s.time = parse_enum(rd, m, "time", s.time, {{"ota", TimeMode::ota}, {"eta", TimeMode::eta}});
  s.infra = parse_enum(rd, m, "infra", s.infra, {{"uav", Infra::uav}, {"bs", Infra::bs}});
  s.policy = parse_enum(rd, m, "policy", s.policy,
                        {{"optimal", SchedulePolicy::optimal},
                         {"nf", SchedulePolicy::near_first},
                         {"ff", SchedulePolicy::far_first}});
  s.access = parse_enum(rd, m, "access", s.access, {{"ofdma", Access::ofdma}, {"tdma", Access::tdma}});
  return s;
}

double parse_number(std::string_view s, const std::string& what) {
  double v = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ParseError("sweep: bad number '" + std::string(s) + "'", -1, what);
  return v;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

// dB values written back after a linear round trip, snapped to 1e-12 dB
double tidy(double db) { return std::round(db * 1e12) / 1e12; }

json config_json(const ExperimentSpec& s) {
  json j;
  j["devices"] = s.devices;
  j["uavs"] = s.uavs;
  j["channels"] = s.channels;
  j["region_radius"] = s.region_radius;
  j["hover_time"] = s.hover_time;
  j["radio"] = {{"p_ut_dbm", tidy(watt_to_dbm(s.radio.p_ut))},
                {"rho_dbm", tidy(watt_to_dbm(s.radio.rho))},
                {"gamma_db", tidy(linear_to_db(s.radio.gamma))},
                {"noise_dbm", tidy(watt_to_dbm(s.radio.noise_power))},
                {"eh_eff", s.radio.eh_eff}};
  j["channel"] = {{"beta", s.channel.beta},
                  {"psi", s.channel.psi},
                  {"carrier_freq", s.channel.carrier_freq},
                  {"mu_los_db", tidy(linear_to_db(s.channel.mu_los))},
                  {"mu_nlos_db", tidy(linear_to_db(s.channel.mu_nlos))}};
  j["altitude"] = {{"min", s.altitude.min}, {"max", s.altitude.max}};
  if (s.scenario) j["scenario"] = json::parse(scenario_to_text(*s.scenario));
  json modes = json::array();
  for (const auto& m : s.modes)
    modes.push_back({{"time", to_string(m.time)},
                     {"infra", to_string(m.infra)},
                     {"policy", to_string(m.policy)},
                     {"access", to_string(m.access)}});
  j["modes"] = modes;
  j["sweep"] = {{"name", s.sweep.name}, {"lo", s.sweep.lo}, {"step", s.sweep.step}, {"hi", s.sweep.hi}};
  j["ensemble"] = s.ensemble;
  j["seed"] = s.seed;
  j["bits"] = s.bits;
  j["parallel"] = s.parallel;
  j["solver"] = {{"eps", s.eps},
                 {"max_iters", s.max_iters},
                 {"restarts", s.placement.restarts},
                 {"placement_iters", s.placement.max_iters},
                 {"polish", s.placement.polish}};
  return j;
}

const std::set<std::string> kSweepNames = {"none",     "p_ut_dbm", "rho_dbm",  "gamma_db",
                                           "devices",  "uavs",     "channels", "radius"};

}  // namespace

std::string ModeSpec::label() const {
  return to_string(time) + "/" + to_string(infra) + "/" + to_string(policy) + "/" + to_string(access);
}

std::vector<double> SweepSpec::values() const {
  if (name == "none") return {0.0};
  int n = int(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> v;
  for (int q = 0; q < n; ++q) v.push_back(lo + q * step);
  return v;
}

void ExperimentSpec::validate() const {
  if (!kSweepNames.count(sweep.name)) throw ParseError("unknown sweep variable '" + sweep.name + "'", -1, "sweep");
  if (sweep.name != "none" && (!(sweep.step > 0.0) || sweep.hi < sweep.lo))
    throw ParseError("sweep range is empty", -1, "sweep");
  if (ensemble < 1) throw ParseError("ensemble must be >= 1", -1, "ensemble");
  if (modes.empty()) throw ParseError("at least one mode is required", -1, "modes");
  if (devices < 1 || uavs < 1 || channels < 1)
    throw ParseError("devices, uavs and channels must be >= 1", -1, "devices");
  if (scenario && sweep.name == "devices")
    throw ParseError("a fixed scenario cannot sweep the device count", -1, "sweep");
  if (!(eps > 0.0) || max_iters < 1) throw ParseError("solver eps/max_iters out of range", -1, "solver");
}

SweepSpec parse_sweep(std::string_view arg) {
  auto eq = arg.find('=');
  auto c1 = arg.find(':', eq);
  auto c2 = c1 == std::string_view::npos ? c1 : arg.find(':', c1 + 1);
  if (eq == std::string_view::npos || c1 == std::string_view::npos || c2 == std::string_view::npos)
    throw ParseError("sweep must look like NAME=LO:STEP:HI", -1, "sweep");
  SweepSpec s;
  s.name = std::string(arg.substr(0, eq));
  s.lo = parse_number(arg.substr(eq + 1, c1 - eq - 1), "sweep");
  s.step = parse_number(arg.substr(c1 + 1, c2 - c1 - 1), "sweep");
  s.hi = parse_number(arg.substr(c2 + 1), "sweep");
  if (!kSweepNames.count(s.name)) throw ParseError("unknown sweep variable '" + s.name + "'", -1, "sweep");
  return s;
}

ExperimentSpec parse_experiment(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t pos = std::min<std::size_t>(e.byte, text.size());
    throw ParseError(std::string("config: ") + e.what(),
                     1 + int(std::count(text.begin(), text.begin() + pos, '\n')));
  }
  Reader rd{text};
  rd.only(j,
          {"devices", "uavs", "channels", "region_radius", "hover_time", "radio", "channel", "altitude",
           "scenario", "modes", "mode", "sweep", "ensemble", "seed", "bits", "parallel", "solver"},
          "config");
  ExperimentSpec s;
  rd.get(j, "devices", s.devices);
  rd.get(j, "uavs", s.uavs);
  rd.get(j, "channels", s.channels);
  rd.get(j, "region_radius", s.region_radius);
  rd.get(j, "hover_time", s.hover_time);
  if (j.contains("radio")) {
    const json& r = j["radio"];
    rd.only(r, {"p_ut_dbm", "rho_dbm", "gamma_db", "noise_dbm", "eh_eff"}, "radio");
    double v;
    if (r.contains("p_ut_dbm")) { rd.get(r, "p_ut_dbm", v); s.radio.p_ut = dbm_to_watt(v); }
    if (r.contains("rho_dbm")) { rd.get(r, "rho_dbm", v); s.radio.rho = dbm_to_watt(v); }
    if (r.contains("gamma_db")) { rd.get(r, "gamma_db", v); s.radio.gamma = db_to_linear(v); }
    if (r.contains("noise_dbm")) { rd.get(r, "noise_dbm", v); s.radio.noise_power = dbm_to_watt(v); }
    rd.get(r, "eh_eff", s.radio.eh_eff);
  }
  if (j.contains("channel")) {
    const json& c = j["channel"];
    rd.only(c, {"beta", "psi", "carrier_freq", "mu_los_db", "mu_nlos_db"}, "channel");
    rd.get(c, "beta", s.channel.beta);
    rd.get(c, "psi", s.channel.psi);
    rd.get(c, "carrier_freq", s.channel.carrier_freq);
    double v;
    if (c.contains("mu_los_db")) { rd.get(c, "mu_los_db", v); s.channel.mu_los = db_to_linear(v); }
    if (c.contains("mu_nlos_db")) { rd.get(c, "mu_nlos_db", v); s.channel.mu_nlos = db_to_linear(v); }
  }
  if (j.contains("altitude")) {
    rd.only(j["altitude"], {"min", "max"}, "altitude");
    rd.get(j["altitude"], "min", s.altitude.min);
    rd.get(j["altitude"], "max", s.altitude.max);
  }
  if (j.contains("scenario")) {
    try {
      s.scenario = scenario_from_text(j["scenario"].dump());
    } catch (const Error& e) {
      rd.fail("scenario", e.what());
    }
  }
  if (j.contains("mode") && j.contains("modes")) rd.fail("mode", "give either 'mode' or 'modes'");
  if (j.contains("mode")) s.modes = {parse_mode(rd, j["mode"])};
  if (j.contains("modes")) {
    if (!j["modes"].is_array()) rd.fail("modes", "expected an array");
    s.modes.clear();
    for (const auto& m : j["modes"]) s.modes.push_back(parse_mode(rd, m));
  }
  if (j.contains("sweep")) {
    const json& w = j["sweep"];
    if (w.is_string()) {
      try {
        s.sweep = parse_sweep(w.get<std::string>());
      } catch (const ParseError& e) {
        rd.fail("sweep", e.what());
      }
    } else {
      rd.only(w, {"name", "lo", "step", "hi"}, "sweep");
      rd.get(w, "name", s.sweep.name);
      rd.get(w, "lo", s.sweep.lo);
      rd.get(w, "step", s.sweep.step);
      rd.get(w, "hi", s.sweep.hi);
    }
  }
  rd.get(j, "ensemble", s.ensemble);
  rd.get(j, "seed", s.seed);
  rd.get(j, "bits", s.bits);
  rd.get(j, "parallel", s.parallel);
  if (j.contains("solver")) {
    const json& o = j["solver"];
    rd.only(o, {"eps", "max_iters", "restarts", "placement_iters", "polish"}, "solver");
    rd.get(o, "eps", s.eps);
    rd.get(o, "max_iters", s.max_iters);
    rd.get(o, "restarts", s.placement.restarts);
    rd.get(o, "placement_iters", s.placement.max_iters);
    rd.get(o, "polish", s.placement.polish);
  }
  try {
    s.validate();
  } catch (const ParseError& e) {
    throw ParseError(e.what(), line_of(text, e.field()), e.field());
  }
  return s;
}

std::string experiment_to_text(const ExperimentSpec& spec) { return config_json(spec).dump(2) + "\n"; }

Scenario make_scenario(const ExperimentSpec& spec, double v, std::uint64_t seed) {
  ExperimentSpec s = spec;
  const std::string& n = spec.sweep.name;
  if (n == "p_ut_dbm") s.radio.p_ut = dbm_to_watt(v);
  else if (n == "rho_dbm") s.radio.rho = dbm_to_watt(v);
  else if (n == "gamma_db") s.radio.gamma = db_to_linear(v);
  else if (n == "devices") s.devices = int(std::lround(v));
  else if (n == "uavs") s.uavs = int(std::lround(v));
  else if (n == "channels") s.channels = int(std::lround(v));
  else if (n == "radius") s.region_radius = v;
  Scenario scn;
  if (s.scenario) {
    scn = *s.scenario;
    if (n == "p_ut_dbm" || n == "rho_dbm" || n == "gamma_db") scn.radio = s.radio;
    if (n == "uavs") scn.uav_count = s.uavs;
    if (n == "channels") scn.channel_count = s.channels;
    if (n == "radius") scn.region_radius = s.region_radius;
  } else {
    scn = generate_scenario(s.devices, s.region_radius, seed, s.channel, s.radio, s.uavs, s.channels);
    scn.hover_time = s.hover_time;
    scn.altitude = s.altitude;
  }
  scn.validate();
  return scn;
}

std::string scenario_hash(const Scenario& scn) {
  std::string body = scenario_to_text(scn);
  std::string blob = "blob " + std::to_string(body.size()) + '\0' + body;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), md, &len, EVP_sha1(), nullptr) != 1)
    throw InternalError("SHA-1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int q = 0; q < len; ++q) {
    out += hex[md[q] >> 4];
    out += hex[md[q] & 15];
  }
  return out;
}

std::vector<RunRow> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<double> values = spec.sweep.values();
  struct Job {
    double value;
    int mode;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (double v : values)
    for (int m = 0; m < int(spec.modes.size()); ++m)
      for (int e = 0; e < spec.ensemble; ++e) jobs.push_back({v, m, spec.seed + std::uint64_t(e)});
  std::vector<RunRow> rows(jobs.size());
  bool outer = spec.parallel && jobs.size() > 1;
#pragma omp parallel for schedule(dynamic) if (outer)
  for (std::size_t q = 0; q < jobs.size(); ++q) {
    const Job& jb = jobs[q];
    const ModeSpec& m = spec.modes[jb.mode];
    RunRow& row = rows[q];
    row.sweep_name = spec.sweep.name;
    row.sweep_value = jb.value;
    row.mode = m.label();
    row.seed = jb.seed;
    try {
      Scenario scn = make_scenario(spec, jb.value, jb.seed);
      row.scenario_hash = scenario_hash(scn);
      RunOptions o;
      o.policy = m.policy;
      o.time_mode = m.time;
      o.infra = m.infra;
      o.access = m.access;
      o.eps = spec.eps;
      o.max_iters = spec.max_iters;
      o.parallel = spec.parallel && !outer;
      o.placement = spec.placement;
      o.placement.seed = jb.seed;
      SolutionReport rep = run(scn, o);
      row.sum_throughput = rep.sum_throughput;
      row.jain = rep.jain;
      row.mean_dl_altitude = rep.mean_dl_altitude;
      row.mean_ul_altitude = rep.mean_ul_altitude;
      row.mean_dl_coverage = rep.mean_dl_coverage;
      row.iterations = rep.iterations;
      row.converged = rep.converged;
    } catch (const Error& e) {
      row.status = "error";
      row.error_code = int(e.error_class());
      row.error = e.what();
    } catch (const std::exception& e) {
      row.status = "error";
      row.error_code = int(ErrorClass::internal);
      row.error = e.what();
    }
  }
  return rows;
}

std::string results_csv(const std::vector<RunRow>& rows, bool bits) {
  auto u = [bits](double v) { return bits ? nats_to_bits(v) : v; };
  std::string out =
      "sweep_name,sweep_value,mode,seed,status,error_code,unit,sum_throughput,jain,mean_dl_altitude,"
      "mean_ul_altitude,mean_dl_coverage,iterations,converged,scenario_hash,error\n";
  for (const auto& r : rows) {
    out += r.sweep_name + "," + fmt(r.sweep_value) + "," + r.mode + "," + std::to_string(r.seed) + "," +
           r.status + "," + std::to_string(r.error_code) + "," + (bits ? "bits" : "nats") + "," +
           fmt(u(r.sum_throughput)) + "," + fmt(r.jain) + "," + fmt(r.mean_dl_altitude) + "," +
           fmt(r.mean_ul_altitude) + "," + fmt(r.mean_dl_coverage) + "," + std::to_string(r.iterations) +
           "," + (r.converged ? "1" : "0") + "," + r.scenario_hash + "," + csv_quote(r.error) + "\n";
  }
  return out;
}

std::string summary_csv(const std::vector<RunRow>& rows, bool bits) {
  struct Acc {
    std::string name;
    double value = 0.0;
    std::string mode;
    int runs = 0, failures = 0;
    double sum = 0, jain = 0, dl = 0, ul = 0, cov = 0, iters = 0;
  };
  std::vector<Acc> groups;
  std::map<std::pair<double, std::string>, std::size_t> index;
  for (const auto& r : rows) {
    auto key = std::make_pair(r.sweep_value, r.mode);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, groups.size()).first;
      groups.push_back({r.sweep_name, r.sweep_value, r.mode});
    }
    Acc& a = groups[it->second];
    ++a.runs;
    if (r.status != "ok") {
      ++a.failures;
      continue;
    }
    a.sum += bits ? nats_to_bits(r.sum_throughput) : r.sum_throughput;
    a.jain += r.jain;
    a.dl += r.mean_dl_altitude;
    a.ul += r.mean_ul_altitude;
    a.cov += r.mean_dl_coverage;
    a.iters += r.iterations;
  }
  std::string out =
      "sweep_name,sweep_value,mode,runs,failures,unit,mean_sum_throughput,mean_jain,mean_dl_altitude,"
      "mean_ul_altitude,mean_dl_coverage,mean_iterations\n";
  for (const auto& a : groups) {
    int ok = a.runs - a.failures;
    auto m = [ok](double v) { return ok > 0 ? fmt(v / ok) : std::string(); };
    out += a.name + "," + fmt(a.value) + "," + a.mode + "," + std::to_string(a.runs) + "," +
           std::to_string(a.failures) + "," + (bits ? "bits" : "nats") + "," + m(a.sum) + "," + m(a.jain) +
           "," + m(a.dl) + "," + m(a.ul) + "," + m(a.cov) + "," + m(a.iters) + "\n";
  }
  return out;
}

std::string manifest_text(const ExperimentSpec& spec, const std::vector<RunRow>& rows) {
  json j;
  j["tool"] = "uav_sweep";
  j["config"] = config_json(spec);
  j["unit"] = spec.bits ? "bits" : "nats";
  j["files"] = {"results.csv", "summary.csv"};
  j["rows"] = rows.size();
  int failures = 0;
  json scen = json::array();
  std::set<std::string> seen;
  for (const auto& r : rows) {
    failures += r.status != "ok";
    std::string key = fmt(r.sweep_value) + "/" + std::to_string(r.seed);
    if (r.scenario_hash.empty() || !seen.insert(key).second) continue;
    scen.push_back({{"sweep_value", r.sweep_value}, {"seed", r.seed}, {"hash", r.scenario_hash}});
  }
  j["failures"] = failures;
  j["scenarios"] = scen;
  return j.dump(2) + "\n";
}

void write_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec,
                   const std::vector<RunRow>& rows) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorClass::io, "cannot create " + dir.string() + ": " + ec.message());
  auto put = [&](const char* name, const std::string& body) {
    std::ofstream f(dir / name, std::ios::binary);
    f << body;
    if (!f) throw Error(ErrorClass::io, "cannot write " + (dir / name).string());
  };
  put("results.csv", results_csv(rows, spec.bits));
  put("summary.csv", summary_csv(rows, spec.bits));
  put("manifest.json", manifest_text(spec, rows));
}

}  // namespace uavswarm
