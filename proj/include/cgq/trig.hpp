#pragma once

#include <map>
#include <vector>

#include "cgq/lattice.hpp"
#include "cgq/types.hpp"

namespace cgq {

// Finite Laurent combination sum_a c_a z^a on an nvars-dimensional torus,
// exponents exact integers. Terms with |c| <= kDropTol are dropped on insert.
class TrigPolynomial {
 public:
  static constexpr double kDropTol = 1e-15;
  using Exponent = std::vector<Int>;

  TrigPolynomial() = default;
  explicit TrigPolynomial(int nvars) : nvars_(nvars) {}

  static TrigPolynomial constant(int nvars, Complex c);
  static TrigPolynomial monomial(const Exponent& e, Complex c);

  int nvars() const { return nvars_; }
  const std::map<Exponent, Complex>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const Exponent& e, Complex c);

  TrigPolynomial operator+(const TrigPolynomial& o) const;
  TrigPolynomial operator*(const TrigPolynomial& o) const;
  TrigPolynomial operator*(Complex c) const;
  // Pointwise complex conjugate on the torus: conj coefficients, negate exponents.
  TrigPolynomial star() const;

  Complex evaluate(const std::vector<double>& angles) const;

  // Max modulus over a uniform grid (points per dimension chosen by rank),
  // together with the analytic upper bound sum |c_a|.
  struct SupNorm {
    double grid_max = 0.0;
    double coeff_bound = 0.0;
  };
  SupNorm sup_norm(int points_per_dim = 0) const;

  // Push exponents through integer pairings: variable k of the result pairs the
  // weight with column k of `pairings` (nvars x new_nvars). Collisions merge.
  TrigPolynomial restrict_exponents(const IntMatrix& pairings) const;

  bool approx_equal(const TrigPolynomial& o, double tol) const;

 private:
  int nvars_ = 0;
  std::map<Exponent, Complex> terms_;
};

// Default grid density per torus rank (dense enough for the sup estimates,
// bounded work at rank 4).
int default_grid_points(int rank);

}  // namespace cgq
