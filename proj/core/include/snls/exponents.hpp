#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>

namespace snls {

/// Exact rational exponent. Admissibility of a Strichartz pair is an exact
/// scaling identity, so equality tests must not go through floating point.
/// Infinity is encoded as num=1, den=0.
struct Exponent {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Exponent() = default;
  Exponent(std::int64_t n, std::int64_t d);
  Exponent(std::int64_t n) : Exponent(n, 1) {}

  static Exponent infinity() {
    Exponent e;
    e.num = 1;
    e.den = 0;
    return e;
  }

  bool is_infinite() const { return den == 0; }
  double value() const {
    return is_infinite() ? std::numeric_limits<double>::infinity()
                         : static_cast<double>(num) / static_cast<double>(den);
  }

  /// Hoelder conjugate q' with 1/q + 1/q' = 1.
  Exponent conjugate() const;

  friend bool operator==(const Exponent& a, const Exponent& b) {
    return a.num == b.num && a.den == b.den;
  }
};

Exponent operator+(const Exponent& a, const Exponent& b);
Exponent operator*(const Exponent& a, const Exponent& b);
Exponent reciprocal(const Exponent& a);

/// Space-time exponent pair (q, r) for the mixed norm L^q_t L^r_x.
struct StrichartzPair {
  Exponent q;
  Exponent r;
};

/// Schroedinger admissibility: 2/q + d/r = d/2 with 2 <= q, r <= infinity and
/// (q, r, d) != (2, infinity, 2). Checked in exact rational arithmetic.
bool is_admissible(const StrichartzPair& pair, int dimension);

/// Diagonal mass-critical pair q = r = 2(d+2)/d.
StrichartzPair diagonal_pair(int dimension);

/// Dual of the diagonal pair: q = r = 2(d+2)/(d+4).
StrichartzPair diagonal_dual_pair(int dimension);

/// Energy-critical working pair (q_d, r_d) = (2d/(d-2), 2d^2/(d^2-2d+4)),
/// d >= 3.
StrichartzPair energy_pair(int dimension);

/// rho_d = 2d^2/(d-2)^2, the Sobolev-embedding target of W^{1,r_d}.
Exponent energy_rho(int dimension);

/// Scaling-critical Sobolev index s = d/2 - 2/(p-1) of the dilation symmetry.
double scaling_critical_index(int dimension, double p);

}  // namespace snls
