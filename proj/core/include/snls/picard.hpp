#pragma once

#include "snls/dynamics.hpp"

namespace snls::picard {

/// Smallness configuration of the local contraction argument. eta0 is not a
/// constructive constant; it is measured (largest eta with observed
/// contraction) rather than hardcoded.
struct ThresholdConfig {
  double eta = 0.1;
  double eta0 = 1.0;
  double t0 = 0.0;
  double t1 = 1.0;
};

/// Space-time distance in the contraction norm of the local theory:
/// diagonal L^q_{t,x} for k = 0 / explicit p, L^{q_d} W^{1,r_d} for k = 1.
double contraction_distance(const std::vector<double>& times,
                            const std::vector<GridField>& a,
                            const std::vector<GridField>& b,
                            const NonlinearitySpec& spec);

/// Contraction norm of a single time series.
double contraction_norm(const std::vector<double>& times,
                        const std::vector<GridField>& series,
                        const NonlinearitySpec& spec);

/// Duhamel map Gamma v(t) = S(t-t0) u0 - i int_{t0}^t S(t-t') N(v+f) dt'
/// evaluated on the sampled nodes (trapezoidal in t', S exact).
std::vector<GridField> gamma_map(const std::vector<double>& times,
                                 const std::vector<GridField>& v,
                                 const GridField& u0,
                                 const std::vector<GridField>& f,
                                 const NonlinearitySpec& spec,
                                 bool dealias = true);

struct IterateTrace {
  std::vector<double> times;
  std::vector<std::vector<GridField>> iterates;  // P_1, P_2, ...
  std::vector<double> distances;                 // ||P_{j+1} - P_j||
  std::vector<double> ratios;                    // d_{j+1} / d_j
};

/// P_1 = S(t-t0) u0, P_{j+1} = Gamma P_j; J iterates with distances in the
/// contraction norm. Ratios above 1 are reported, never an error.
IterateTrace picard_iterates(const GridField& u0,
                             const std::vector<double>& times,
                             const std::vector<GridField>& f,
                             const NonlinearitySpec& spec, int J,
                             bool dealias = true);

struct FixedPointResult {
  std::vector<double> times;
  std::vector<GridField> solution;
  int iterations = 0;
  double final_distance = 0.0;
  bool converged = false;
};

/// Iterates Gamma until successive distance < tol (or max_iterations).
FixedPointResult picard_fixed_point(const GridField& u0,
                                    const std::vector<double>& times,
                                    const std::vector<GridField>& f,
                                    const NonlinearitySpec& spec, double tol,
                                    int max_iterations, bool dealias = true);

struct ThresholdReport {
  double free_norm = 0.0;
  double forcing_norm = 0.0;
  double lhs = 0.0;
  double eta = 0.0;
  bool passes_threshold = false;
  bool ran_solver = false;
  double solution_norm = 0.0;
  double bound = 0.0;  // 2 eta
  bool within_bound = false;
};

/// Lemma-3.1/4.1 check: if ||S(t-t0)u0|| + ||f|| <= eta on the interval, the
/// solution norm must come out <= 2 eta (5% discretization slack).
ThresholdReport lwp_threshold_check(const GridField& u0, PathForcing& forcing,
                                    const NonlinearitySpec& spec,
                                    const SolverConfig& config, double eta,
                                    double tolerance = 0.05);

/// Free-evolution series S(t - times[0]) u0 on the given nodes.
std::vector<GridField> free_evolution_series(const GridField& u0,
                                             const std::vector<double>& times);

}  // namespace snls::picard
