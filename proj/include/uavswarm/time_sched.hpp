#ifndef UAVSWARM_TIME_SCHED_HPP
#define UAVSWARM_TIME_SCHED_HPP

#include <vector>

#include "uavswarm/model.hpp"

namespace uavswarm {

/// Per-device gain sums for the current deployment and associations.
struct LinkGains {
  std::vector<double> g_ul;      // gain to the UL information UAV
  std::vector<double> g_dl_sum;  // over the I row
  std::vector<double> g_ul_sum;  // over the B row
  std::vector<std::vector<double>> dl;  // K x N gains at DL positions
  std::vector<std::vector<double>> ul;  // K x N gains at UL positions
};

LinkGains compute_gains(const Scenario& scn, const Deployment& dep, const AssociationState& assoc);

/// Populates every coefficient at the given time split and schedule.
SolverCoefficients compute_coefficients(const Scenario& scn, const Deployment& dep,
                                        const AssociationState& assoc, const Schedule& sched,
                                        const TimeAllocation& time);

/// Same, from precomputed gains.
SolverCoefficients compute_coefficients(const Scenario& scn, const LinkGains& gains,
                                        const AssociationState& assoc, const Schedule& sched,
                                        const TimeAllocation& time);

/// tau1 gamma / (Theta0 L tau0 + Theta1 (k-1) tau1).
double snr_ratio(double theta0, double theta1, int k, int L, const TimeAllocation& time,
                 double gamma);

/// Smallest tau0 (with tau1 = T - tau0) meeting the SNR bound; 0 when always met.
double tau0_requirement(double theta0, double theta1, int k, int L, double gamma, double hover);

struct Varpi {
  double value = 0.0;
  int device = -1;
  int epoch = -1;
};

/// max over active pairs of the SNR ratio. Pairs that cannot be decoded at any split are skipped.
Varpi compute_varpi(const SolverCoefficients& coeff, const Schedule& sched,
                    const TimeAllocation& time, double hover = 1.0);

/// w[i][k-1] for k = 1..L of the device's UAV.
std::vector<std::vector<std::uint8_t>> compute_w(const SolverCoefficients& coeff,
                                                 const TimeAllocation& time,
                                                 const std::vector<int>& epochs_per_device);

/// Marginal benefit of device i transmitting in epoch k (with the w penalty).
double marginal_benefit(const SolverCoefficients& coeff, int device, int k, int L,
                        const TimeAllocation& time, bool penalized);

enum class FillOrder { backward, forward };
enum class ScheduleMethod { greedy, exact };

/// Greedy top-M epoch filling (backward from L by default) or exact slot assignment.
Schedule build_schedule(const SolverCoefficients& coeff, const TimeAllocation& time, int channels,
                        const AssociationState& assoc, ScheduleMethod method = ScheduleMethod::greedy,
                        FillOrder order = FillOrder::backward);

enum class SchedulePolicy { optimal, near_first, far_first };

Schedule heuristic_schedule(SchedulePolicy policy, const Scenario& scn, const Deployment& dep,
                            const AssociationState& assoc, int channels);

/// Epoch counts from the UL association alone, devices all at epoch 1 placeholder.
Schedule empty_schedule(const AssociationState& assoc, int channels);

/// One term of the time-allocation objective: a = Theta0 L, b = Theta1 (k-1).
struct P1Term {
  double a = 0.0;
  double b = 0.0;
  int L = 1;
};

std::vector<P1Term> p1_terms(const SolverCoefficients& coeff, const Schedule& sched);

/// Sum of (tau1/L) ln(1 + (a tau0 + b tau1)/tau1) over terms decodable at this split.
double p1_objective(const std::vector<P1Term>& terms, const TimeAllocation& time, double gamma);

/// d/dtau0 of the undecoded-inclusive objective along tau0 + tau1 = T.
double p1_derivative(const std::vector<P1Term>& terms, double tau0, double hover);

struct TimeSolution {
  TimeAllocation time;
  TimeCase branch = TimeCase::slack;
  double stationary_tau0 = 0.0;  // root of the stationarity condition
  double required_tau0 = 0.0;    // largest per-pair SNR requirement
  int binding_device = -1;
  int binding_epoch = -1;
  int undecodable = 0;           // pairs excluded because no split can decode them
};

/// Optimal split on tau0 + tau1 = T. Throws BracketError when the stationarity condition
/// has no sign change on the bracket.
TimeSolution optimal_time(const SolverCoefficients& coeff, const Schedule& sched, double hover = 1.0);

/// Grid scan plus golden refinement of the effective objective; used for verification and as a
/// fallback.
TimeSolution scan_time(const SolverCoefficients& coeff, const Schedule& sched, double hover = 1.0,
                       int grid = 2000);

}  // namespace uavswarm

#endif
