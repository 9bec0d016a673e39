#include "snls/exponents.hpp"

#include <numeric>

namespace snls {

namespace {

Exponent normalized(std::int64_t num, std::int64_t den) {
  if (den == 0) {
    if (num <= 0) throw std::invalid_argument("exponent: invalid infinity");
    return Exponent::infinity();
  }
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  Exponent e;
  e.num = g ? num / g : num;
  e.den = g ? den / g : den;
  return e;
}

}  // namespace

Exponent::Exponent(std::int64_t n, std::int64_t d) { *this = normalized(n, d); }

Exponent Exponent::conjugate() const {
  if (is_infinite()) return Exponent(1, 1);
  if (num == den) return Exponent::infinity();
  return normalized(num, num - den);
}

Exponent operator+(const Exponent& a, const Exponent& b) {
  if (a.is_infinite() || b.is_infinite()) return Exponent::infinity();
  return normalized(a.num * b.den + b.num * a.den, a.den * b.den);
}

Exponent operator*(const Exponent& a, const Exponent& b) {
  if (a.is_infinite() || b.is_infinite()) return Exponent::infinity();
  return normalized(a.num * b.num, a.den * b.den);
}

Exponent reciprocal(const Exponent& a) {
  if (a.is_infinite()) return Exponent(0, 1);
  if (a.num == 0) return Exponent::infinity();
  return normalized(a.den, a.num);
}

bool is_admissible(const StrichartzPair& pair, int dimension) {
  const auto in_range = [](const Exponent& e) {
    if (e.is_infinite()) return true;
    return e.num >= 2 * e.den;  // e >= 2
  };
  if (!in_range(pair.q) || !in_range(pair.r)) return false;
  if (dimension == 2 && pair.q == Exponent(2) && pair.r.is_infinite())
    return false;
  // 2/q + d/r == d/2, exactly.
  const Exponent lhs = Exponent(2) * reciprocal(pair.q) +
                       Exponent(dimension) * reciprocal(pair.r);
  return lhs == Exponent(dimension, 2);
}

StrichartzPair diagonal_pair(int dimension) {
  const Exponent e(2 * (dimension + 2), dimension);
  return {e, e};
}

StrichartzPair diagonal_dual_pair(int dimension) {
  const Exponent e(2 * (dimension + 2), dimension + 4);
  return {e, e};
}

StrichartzPair energy_pair(int dimension) {
  if (dimension < 3)
    throw std::invalid_argument("energy_pair: requires dimension >= 3");
  const std::int64_t d = dimension;
  return {Exponent(2 * d, d - 2), Exponent(2 * d * d, d * d - 2 * d + 4)};
}

Exponent energy_rho(int dimension) {
  if (dimension < 3)
    throw std::invalid_argument("energy_rho: requires dimension >= 3");
  const std::int64_t d = dimension;
  return Exponent(2 * d * d, (d - 2) * (d - 2));
}

double scaling_critical_index(int dimension, double p) {
  if (p <= 1.0)
    throw std::invalid_argument("scaling_critical_index: requires p > 1");
  return 0.5 * dimension - 2.0 / (p - 1.0);
}

}  // namespace snls
