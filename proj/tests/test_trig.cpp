#include "doctest.h"

#include <cmath>

#include "cgq/trig.hpp"

using namespace cgq;

namespace {
TrigPolynomial z(int var, int nvars, int power = 1) {
  std::vector<Int> e(nvars, 0);
  e[var] = power;
  return TrigPolynomial::monomial(e, 1.0);
}
}  // namespace

TEST_CASE("laurent arithmetic") {
  TrigPolynomial z1 = z(0, 2), z2 = z(1, 2);
  TrigPolynomial p = (z1 + z2) * (z1 + z2 * Complex(-1.0));
  // z1^2 - z2^2: the cross terms cancel exactly.
  CHECK(p.terms().size() == 2);
  std::vector<double> theta = {0.3, 1.1};
  Complex want = std::exp(Complex(0, 2 * 0.3)) - std::exp(Complex(0, 2 * 1.1));
  CHECK(std::abs(p.evaluate(theta) - want) < 1e-14);
}

TEST_CASE("star flips exponents and conjugates") {
  TrigPolynomial p = z(0, 1) * Complex(0.0, 2.0);
  TrigPolynomial s = p.star();
  REQUIRE(s.terms().size() == 1);
  const auto& [e, c] = *s.terms().begin();
  CHECK(e[0] == -1);
  CHECK(std::abs(c - Complex(0.0, -2.0)) < 1e-15);
  // p * p.star() has constant term |c|^2.
  TrigPolynomial m = p * s;
  CHECK(std::abs(m.evaluate({0.7}) - Complex(4.0, 0.0)) < 1e-14);
}

TEST_CASE("sup norm bounds") {
  TrigPolynomial p = z(0, 1) + TrigPolynomial::constant(1, 1.0);
  auto s = p.sup_norm();
  CHECK(s.coeff_bound == doctest::Approx(2.0));
  CHECK(s.grid_max == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(s.grid_max <= s.coeff_bound + 1e-12);
}

TEST_CASE("restriction reindexes exponents through the pairing matrix") {
  // Restrict z1^a z2^b along the diagonal circle: exponent becomes a + b.
  TrigPolynomial p = z(0, 2, 2) * z(1, 2, 1);
  IntMatrix basis(2, 1);
  basis << 1, 1;
  TrigPolynomial r = p.restrict_exponents(basis);
  REQUIRE(r.terms().size() == 1);
  CHECK(r.terms().begin()->first[0] == 3);

  // Collapsing distinct exponents that pair equally merges coefficients.
  TrigPolynomial q = z(0, 2) + z(1, 2);
  TrigPolynomial rq = q.restrict_exponents(basis);
  REQUIRE(rq.terms().size() == 1);
  CHECK(std::abs(rq.terms().begin()->second - Complex(2.0)) < 1e-15);
}

TEST_CASE("tiny coefficients are dropped") {
  TrigPolynomial p = z(0, 1) + z(0, 1) * Complex(-1.0);
  CHECK(p.is_zero());
}
