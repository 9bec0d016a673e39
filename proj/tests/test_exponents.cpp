#include <doctest.h>

#include "snls/exponents.hpp"

using namespace snls;

TEST_CASE("admissibility: known pairs") {
  // d=2 diagonal mass-critical pair (4,4)
  CHECK(is_admissible({Exponent(4), Exponent(4)}, 2));
  // d=3 energy working pair (6, 18/7)
  CHECK(is_admissible({Exponent(6), Exponent(18, 7)}, 3));
  // (2, inf, 2) satisfies the scaling relation but is excluded
  CHECK_FALSE(is_admissible({Exponent(2), Exponent::infinity()}, 2));
  // d=1: (4, inf) sits on the scaling line
  CHECK(is_admissible({Exponent(4), Exponent::infinity()}, 1));
}

TEST_CASE("admissibility: (inf, 2) for every dimension") {
  for (int d = 1; d <= 4; ++d)
    CHECK(is_admissible({Exponent::infinity(), Exponent(2)}, d));
}

TEST_CASE("admissibility holds exactly for the diagonal pair in every d") {
  for (int d = 1; d <= 4; ++d) {
    const StrichartzPair pair = diagonal_pair(d);
    CHECK(is_admissible(pair, d));
    // Perturbed numerator must fail: the check is exact, not approximate.
    StrichartzPair off = pair;
    off.q = Exponent(pair.q.num + 1, pair.q.den);
    CHECK_FALSE(is_admissible(off, d));
  }
}

TEST_CASE("range constraint: q, r >= 2") {
  CHECK_FALSE(is_admissible({Exponent(6, 5), Exponent(3)}, 1));
}

TEST_CASE("energy pair values") {
  const StrichartzPair p3 = energy_pair(3);
  CHECK(p3.q == Exponent(6));
  CHECK(p3.r == Exponent(18, 7));
  CHECK(energy_rho(3) == Exponent(18));
  CHECK(is_admissible(energy_pair(4), 4));
  CHECK_THROWS(energy_pair(2));
}

TEST_CASE("conjugates") {
  CHECK(Exponent(6).conjugate() == Exponent(6, 5));
  CHECK(Exponent(18, 7).conjugate() == Exponent(18, 11));
  CHECK(Exponent(1).conjugate().is_infinite());
  CHECK(Exponent::infinity().conjugate() == Exponent(1));
  // Diagonal dual: 2(d+2)/(d+4)
  const StrichartzPair dual = diagonal_dual_pair(1);
  CHECK(dual.q == Exponent(6, 5));
  CHECK(diagonal_pair(1).q.conjugate() == dual.q);
}

TEST_CASE("scaling critical index") {
  CHECK(scaling_critical_index(2, 3.0) == doctest::Approx(0.0));
  CHECK(scaling_critical_index(3, 5.0) == doctest::Approx(1.0));
  CHECK(scaling_critical_index(3, 3.0) == doctest::Approx(0.5));
  CHECK_THROWS(scaling_critical_index(1, 1.0));
}
