#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "uavswarm/errors.hpp"
#include "uavswarm/experiment.hpp"

using namespace uavswarm;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorClass::io, "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sweeps the full-duplex UAV data-collection optimizer over a parameter range"};
  std::string config, sweep, policy, time_mode, infra, access, out = "out";
  std::uint64_t seed = 0;
  int ensemble = 0;
  bool bits = false, serial = false;
  app.add_option("--config", config, "JSON experiment file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "base seed (member e uses seed + e)");
  app.add_option("--sweep", sweep, "NAME=LO:STEP:HI");
  app.add_option("--policy", policy, "schedule policy")->check(CLI::IsMember({"optimal", "nf", "ff"}));
  app.add_option("--time", time_mode, "time allocation")->check(CLI::IsMember({"ota", "eta"}));
  app.add_option("--infra", infra, "aerial or fixed base stations")->check(CLI::IsMember({"uav", "bs"}));
  app.add_option("--access", access, "uplink access")->check(CLI::IsMember({"ofdma", "tdma"}));
  app.add_option("--ensemble", ensemble, "runs per sweep point")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "output directory");
  app.add_flag("--bits", bits, "report throughput in bits instead of nats");
  app.add_flag("--serial", serial, "disable OpenMP fan-out");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : int(ErrorClass::parameter);
  }

  try {
    ExperimentSpec spec;
    if (!config.empty()) spec = parse_experiment(slurp(config));
    if (app.count("--seed")) spec.seed = seed;
    if (!sweep.empty()) spec.sweep = parse_sweep(sweep);
    if (ensemble > 0) spec.ensemble = ensemble;
    if (bits) spec.bits = true;
    if (serial) spec.parallel = false;
    if (!policy.empty() || !time_mode.empty() || !infra.empty() || !access.empty()) {
      ModeSpec m = spec.modes.front();
      if (!policy.empty())
        m.policy = policy == "nf" ? SchedulePolicy::near_first
                   : policy == "ff" ? SchedulePolicy::far_first : SchedulePolicy::optimal;
      if (!time_mode.empty()) m.time = time_mode == "eta" ? TimeMode::eta : TimeMode::ota;
      if (!infra.empty()) m.infra = infra == "bs" ? Infra::bs : Infra::uav;
      if (!access.empty()) m.access = access == "tdma" ? Access::tdma : Access::ofdma;
      spec.modes = {m};
    }
    spec.validate();

    auto t0 = std::chrono::steady_clock::now();
    std::vector<RunRow> rows = run_experiment(spec);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_outputs(out, spec, rows);

    std::cout << summary_csv(rows, spec.bits);
    int failed = 0, first = 0;
    for (const auto& r : rows)
      if (r.status != "ok") {
        if (!failed) first = r.error_code;
        ++failed;
        std::cerr << "run " << r.mode << " seed " << r.seed << ": " << r.error << "\n";
      }
    std::fprintf(stderr, "%zu runs, %d failed, %.2f s, outputs in %s\n", rows.size(), failed, secs,
                 out.c_str());
    return failed == int(rows.size()) ? first : 0;
  } catch (const ParseError& e) {
    std::cerr << "parse error";
    if (e.line() > 0) std::cerr << " at line " << e.line();
    if (!e.field().empty()) std::cerr << " (field " << e.field() << ")";
    std::cerr << ": " << e.what() << "\n";
    return int(e.error_class());
  } catch (const Error& e) {
    std::cerr << to_string(e.error_class()) << " error: " << e.what() << "\n";
    return int(e.error_class());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return int(ErrorClass::internal);
  }
}
