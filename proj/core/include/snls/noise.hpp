#pragma once

#include <cstdint>
#include <optional>

#include "snls/grid.hpp"
#include "snls/norms.hpp"
#include "snls/rng.hpp"

namespace snls {

/// Diagonal Hilbert-Schmidt multiplier: phi e_m = sigma_m e_m in the
/// volume-normalized Fourier basis e_m = L^{-d/2} e^{i xi_m x}.
///
/// Nyquist weights are zeroed at construction so the operator matches what
/// the solvers propagate, keeping hs_norm consistent with the injected noise.
class MultiplierOperator {
 public:
  MultiplierOperator() = default;  // empty placeholder, no grid attached
  MultiplierOperator(GridPtr grid, std::vector<double> weights);

  /// sigma_m = amplitude * <xi_m>^{-decay}.
  static MultiplierOperator decay(GridPtr grid, double amplitude, double decay);

  static MultiplierOperator zero(GridPtr grid);

  const GridPtr& grid() const { return grid_; }
  const std::vector<double>& weights() const { return weights_; }

  bool is_zero() const;

  MultiplierOperator truncated(double N) const;

  friend MultiplierOperator operator+(const MultiplierOperator& a,
                                      const MultiplierOperator& b);

 private:
  GridPtr grid_;
  std::vector<double> weights_;
};

/// ||phi||_{HS(L^2; H^s)} = (sum <xi>^{2s} sigma^2)^{1/2}; the homogeneous
/// flag uses |xi|^{2s} instead (HS(L^2; Hdot^s)).
double hs_norm(const MultiplierOperator& op, double s, bool homogeneous = false);

/// Causal per-mode complex Brownian increment source. Each complex increment
/// over [t, t+delta] is (g1 + i g2) sqrt(delta) with independent standard
/// normal components per mode; modes are mutually independent.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t step() const { return step_; }

  /// Next per-mode increment vector; advances the stream by one step.
  std::vector<Complex> sample_increment(const SpectralGrid& grid, double delta);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t step_ = 0;
};

/// Stochastic convolution Psi(t) = -i int_0^t S(t-t') phi dW(t'), kept as
/// orthonormal-basis coefficients. The one-step update
///   Psi(t+delta) = S(delta)[Psi(t) - i phi dW]
/// is exact in law for diagonal phi: the rotated circular Gaussian increment
/// has the same distribution as the true per-mode Wiener integral, with
/// variance 2 sigma^2 delta.
class ConvolutionState {
 public:
  ConvolutionState(GridPtr grid, const MultiplierOperator& op,
                   NoiseStream stream);

  double time() const { return time_; }
  const std::vector<Complex>& coefficients() const { return coeff_; }
  const NoiseStream& stream() const { return stream_; }

  void advance(double delta);

  /// Physical-space field of Psi at the current time.
  GridField field() const;

  /// ||Psi(t)||_{L^2}^2 directly from coefficients (Parseval).
  double l2_norm_squared() const;

 private:
  GridPtr grid_;
  MultiplierOperator op_;
  NoiseStream stream_;
  double time_ = 0.0;
  std::vector<Complex> coeff_;
};

/// Monte Carlo moment estimates for an ensemble of convolution paths.
struct ConvolutionPathStats {
  double sup_hs_moment = 0.0;       // E[ sup_t ||Psi(t)||_{H^s}^p ]
  double sup_hs_se = 0.0;
  double mixed_moment = 0.0;        // E[ ||Psi||_{L^q_t W^{s,r}}^p ]
  double mixed_se = 0.0;
  double hs_operator_power = 0.0;   // ||phi||_{HS(L^2;H^s)}^p
  double sup_ratio = 0.0;           // sup moment / operator power
};

/// Simulates `paths` convolution trajectories on [0, T] with `steps` uniform
/// steps and estimates the moments of Lemma-2.2 type with exponent p.
ConvolutionPathStats convolution_path_stats(
    const GridPtr& grid, const MultiplierOperator& op, std::uint64_t seed,
    int paths, double T, int steps, double s, double p, double q, double r);

}  // namespace snls
