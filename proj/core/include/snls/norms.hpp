#pragma once

#include "snls/exponents.hpp"
#include "snls/grid.hpp"

namespace snls {

/// Discrete L^r norm: (sum |u|^r * cell_volume)^{1/r}; max norm for r = inf.
double lebesgue_norm(const GridField& field, double r);

/// H^s norm via <xi>^s weights on orthonormal coefficients; the homogeneous
/// variant uses |xi|^s and excludes the zero mode. A homogeneous norm with
/// s < 0 and nonzero mean is rejected (zero-mode singularity).
double sobolev_norm(const GridField& field, double s, bool homogeneous = false);

/// W^{1,r} norm with spectral gradients:
/// (||f||_{L^r}^r + || |grad f| ||_{L^r}^r)^{1/r}, max-combination for r = inf.
double w1r_norm(const GridField& field, double r);

/// Bessel-potential norm ||<grad>^s f||_{L^r} for fractional-order mixed
/// spaces W^{s,r}.
double bessel_norm(const GridField& field, double s, double r);

/// Time-sampled space-time field with its measuring pair.
struct SpaceTimeSample {
  std::vector<double> times;
  std::vector<GridField> snapshots;
  StrichartzPair pair;
};

void validate_sample(const SpaceTimeSample& sample);

/// Trapezoidal L^q norm in time of precomputed spatial norms.
double time_lq_norm(const std::vector<double>& times,
                    const std::vector<double>& spatial_norms, double q);

/// Mixed L^q_t L^r_x norm of the sample (trapezoidal in time).
double strichartz_norm(const SpaceTimeSample& sample);

/// Mixed L^q_t W^{1,r}_x norm over explicit snapshots.
double strichartz_w1r_norm(const std::vector<double>& times,
                           const std::vector<GridField>& snapshots,
                           const StrichartzPair& pair);

/// Smooth frequency projection P_N: multiplies coefficients by
/// chi(|xi|/N) with chi = 1 on [0,1], cos^2 taper on (1,2), 0 on [2,inf).
GridField project_PN(const GridField& field, double N);

/// Value of the smooth cutoff profile chi at rho = |xi|/N.
double projection_cutoff(double rho);

/// Spatial part of the dilation u^lambda(x) = lambda^{-2/(p-1)} u(x/lambda):
/// same samples scaled in amplitude, living on the grid with length
/// lambda * L. lambda must be a positive integer or reciprocal integer.
GridField rescale_field(const GridField& field, double lambda, double p);

}  // namespace snls
