#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "uavswarm/orchestrator.hpp"

using namespace uavswarm;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

// Usage: bench_placement [K] [N] [M] [repeats]
int main(int argc, char** argv) {
  int K = argc > 1 ? std::atoi(argv[1]) : 80;
  int N = argc > 2 ? std::atoi(argv[2]) : 4;
  int M = argc > 3 ? std::atoi(argv[3]) : 12;
  int reps = argc > 4 ? std::atoi(argv[4]) : 3;
  std::printf("threads available: %d\n", omp_get_max_threads());
  std::printf("%-6s %-10s %-10s %-14s %s\n", "seed", "serial_s", "omp_s", "sum_nats", "identical");
  double ts = 0.0, tp = 0.0;
  bool all_same = true;
  for (int r = 0; r < reps; ++r) {
    Scenario scn = generate_scenario(K, 80.0, 1000 + r, {}, {}, N, M);
    RunOptions o;
    o.placement.seed = 1000 + r;
    o.parallel = false;
    auto t0 = std::chrono::steady_clock::now();
    SolutionReport a = run(scn, o);
    double s = seconds_since(t0);
    o.parallel = true;
    t0 = std::chrono::steady_clock::now();
    SolutionReport b = run(scn, o);
    double p = seconds_since(t0);
    bool same = a.trace == b.trace && a.deployment.dl_positions == b.deployment.dl_positions &&
                a.deployment.ul_positions == b.deployment.ul_positions;
    all_same = all_same && same;
    ts += s;
    tp += p;
    std::printf("%-6d %-10.3f %-10.3f %-14.6f %s\n", 1000 + r, s, p, a.sum_throughput, same ? "yes" : "NO");
  }
  std::printf("total serial %.3f s, parallel %.3f s, speedup %.2fx\n", ts, tp, tp > 0 ? ts / tp : 0.0);
  return all_same ? 0 : 1;
}
