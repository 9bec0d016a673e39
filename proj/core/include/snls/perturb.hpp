#pragma once

#include "snls/picard.hpp"

namespace snls::perturb {

/// Greedy eta-smallness partition of a reference trajectory.
struct IntervalPartition {
  std::vector<double> breakpoints;          // t_0 < ... < t_J
  std::vector<std::size_t> snapshot_index;  // indices into the record times
  std::vector<double> interval_norms;       // measured norm per interval

  std::size_t interval_count() const { return interval_norms.size(); }
};

/// Left-to-right greedy partition: each breakpoint is the largest snapshot
/// time keeping the interval norm <= eta.
IntervalPartition partition_by_smallness(const TrajectoryRecord& w, double eta,
                                         const StrichartzPair& pair);

struct LinearSmallnessRow {
  int interval = 0;
  double value = 0.0;
  double bound = 0.0;  // 2 eta (1 + tol)
  bool pass = false;
};

/// Free evolution S(t - t_j) w(t_j) measured over each interval; the
/// nonlinear smallness of w forces this below 2 eta.
std::vector<LinearSmallnessRow> linear_smallness_check(
    const TrajectoryRecord& w, const IntervalPartition& partition, double eta,
    double tolerance = 0.05);

/// e(t) = N(v + f)(t) - N(v)(t), pointwise on shared nodes.
std::vector<GridField> error_term(const std::vector<GridField>& v,
                                  const std::vector<GridField>& f,
                                  const NonlinearitySpec& spec,
                                  bool dealias = true);

/// Dual-pair space-time norm of the error: L^{2(d+2)/(d+4)}_{t,x} for k = 0
/// (and explicit p), L^{q_d'} W^{1,r_d'} for k = 1.
double dual_norm_of_error(const std::vector<double>& times,
                          const std::vector<GridField>& e,
                          const NonlinearitySpec& spec);

struct ReferenceComparison {
  double sup_distance = 0.0;        // L^infty L^2 (k=0) or L^infty H^1 (k=1)
  double spacetime_distance = 0.0;  // contraction-pair distance
};

/// Distances between two trajectories on shared time nodes.
ReferenceComparison compare_to_reference(const TrajectoryRecord& v,
                                         const TrajectoryRecord& w,
                                         const NonlinearitySpec& spec);

/// C_j = C_1 (C_{j-1} + 1); returns C_1..C_J.
std::vector<double> cj_recursion(double C1, int J);

struct CjRequirement {
  int j = 0;
  double Cj = 0.0;
  double eps_cap_eta = 0.0;   // largest eps with C0 * C_j * eps <= eta
  double eps_cap_eps0 = 0.0;  // largest eps with (C_j + 1) eps < eps0
};

std::vector<CjRequirement> cj_requirements(double C1, int J, double C0,
                                           double eta, double eps0);

struct HolderBound {
  double C = 0.0;      // ||f||_{L^q_t L^r_x([0,T])}
  double theta = 0.0;  // 1/q_pair - 1/q
  double q = 0.0;
};

struct HolderRow {
  double t_lo = 0.0, t_hi = 0.0;
  double norm = 0.0;
  double cap = 0.0;
  double ratio = 0.0;
};

struct HolderCheck {
  HolderBound bound;
  double worst_ratio = 0.0;
  std::vector<HolderRow> rows;
};

/// Hoelder-in-time smallness: on every dyadic subinterval I,
/// ||f||_{L^{q_pair} L^r (I)} <= C |I|^theta. Exact mathematics on shared
/// quadrature nodes, so ratios stay <= 1 up to roundoff.
HolderCheck holder_smallness_check(const std::vector<double>& times,
                                   const std::vector<GridField>& path,
                                   double q, const StrichartzPair& pair,
                                   int max_depth);

struct AssemblyRow {
  int index = 0;
  double t_lo = 0.0, t_hi = 0.0;
  double w_norm = 0.0;
  double linear_norm = 0.0;
  bool pass_linear = false;
  double forcing_norm = 0.0;
  bool pass_forcing = false;
  double lwp_lhs = 0.0;
  double solution_norm = 0.0;
  double solution_bound = 0.0;
  bool pass_lwp = false;
  double error_dual_norm = 0.0;
  double error_bound = 0.0;
  bool pass_error = false;
  double sup_distance = 0.0;
  double spacetime_distance = 0.0;

  bool all_pass() const {
    return pass_linear && pass_forcing && pass_lwp && pass_error;
  }
};

struct AssemblyReport {
  std::vector<AssemblyRow> rows;
  double eta = 0.0;
  double epsilon = 0.0;
  double final_time = 0.0;
  bool reached_horizon = false;
  bool all_pass = false;
  double fitted_C1 = 0.0;
  std::vector<double> cj;
};

/// The long-time existence algorithm run as a computation: reference
/// solution, eta-partition, per-interval threshold / error / closeness
/// checks, breakpoints advanced until the horizon or the first failure.
/// epsilon scales the forcing amplitude (the perturbation budget knob).
AssemblyReport long_time_assembly(const GridField& u0,
                                  const PathForcing& forcing_unit,
                                  const NonlinearitySpec& spec,
                                  const SolverConfig& config, double T,
                                  double eta, double epsilon,
                                  double tolerance = 0.05);

}  // namespace snls::perturb
