#include "doctest.h"

#include <cmath>

#include "cgq/fock.hpp"
#include "cgq/linop.hpp"

using namespace cgq;

namespace {
TruncatedOperator minus(const TruncatedOperator& a, const TruncatedOperator& b) {
  return op_add(a, op_scale(-1.0, b));
}
}  // namespace

TEST_CASE("single factor building blocks") {
  const int N = 12;
  const double q = 0.5;
  TruncatedOperator s = shift(N);
  CHECK(std::abs(s.entry(1, 0) - Complex(1.0)) < 1e-15);
  CHECK(std::abs(s.entry(0, 0)) < 1e-15);
  TruncatedOperator c = weight_c(q, N);
  CHECK(std::abs(c.entry(3, 3) - Complex(std::sqrt(1 - std::pow(q, 6)))) < 1e-15);
  TruncatedOperator d = weight_d(q, N);
  CHECK(std::abs(d.entry(4, 4) - Complex(std::pow(q, 4))) < 1e-15);
  // S^* S = 1 exactly, S S^* = 1 - p0.
  TruncatedOperator ss = op_mul(op_adjoint(s), s);
  CHECK(guard_block(minus(ss, op_identity(1, N))).abs_max() < 1e-15);
}

TEST_CASE("su2 generator relations on guard bands") {
  for (double q : {0.3, 0.5, 0.8}) {
    const int N = 24;
    auto t = su2_generators(q, N);
    auto resid = [&](const TruncatedOperator& a) {
      return guard_block(a).abs_max();
    };
    CHECK(resid(minus(op_mul(t[0][0], t[1][0]), op_scale(q, op_mul(t[1][0], t[0][0])))) <
          1e-13);
    CHECK(resid(minus(op_mul(t[0][0], t[0][1]), op_scale(q, op_mul(t[0][1], t[0][0])))) <
          1e-13);
    CHECK(resid(minus(op_mul(t[0][1], t[1][0]), op_mul(t[1][0], t[0][1]))) < 1e-15);
    CHECK(resid(minus(minus(op_mul(t[0][0], t[1][1]), op_mul(t[1][1], t[0][0])),
                      op_scale(q - 1.0 / q, op_mul(t[0][1], t[1][0])))) < 1e-13);
    TruncatedOperator det = minus(
        minus(op_mul(t[0][0], t[1][1]), op_scale(q, op_mul(t[0][1], t[1][0]))),
        op_identity(1, N));
    CHECK(resid(det) < 1e-13);
    // The boundary defect of the truncated determinant is exactly q^{2N} - 1.
    CHECK(std::abs(std::abs(det.entry(N - 1, N - 1)) - (1.0 - std::pow(q, 2.0 * N))) <
          1e-14);
    // Star relations tie the corners.
    CHECK(resid(minus(op_adjoint(t[0][0]), t[1][1])) < 1e-15);
    CHECK(resid(op_add(op_adjoint(t[0][1]), op_scale(q, t[1][0]))) < 1e-15);
  }
}

TEST_CASE("guard blocks agree across cutoffs") {
  // Products tracked with guards must agree entrywise with the same product
  // computed at a higher cutoff, inside the guard box.
  const double q = 0.4;
  auto small = su2_generators(q, 12);
  auto big = su2_generators(q, 24);
  TruncatedOperator ps = op_mul(small[0][0], op_mul(small[0][1], small[1][1]));
  TruncatedOperator pb = op_mul(big[0][0], op_mul(big[0][1], big[1][1]));
  TruncatedOperator gs = guard_block(ps);
  for (int i = 0; i < 12 - ps.guard; ++i)
    for (int j = 0; j < 12 - ps.guard; ++j)
      CHECK(std::abs(ps.entry(i, j) - pb.entry(i, j)) < 1e-15);
  CHECK(gs.side() <= ps.side());
}

TEST_CASE("tensor coefficients expand into letter products") {
  const double q = 0.6;
  const int N = 12;
  auto unit = [](int dim, int k) {
    VectorXc v = VectorXc::Zero(dim);
    v[k] = 1.0;
    return v;
  };
  // Basis slots of the square factor as products of single-slot letters.
  for (int J = 0; J < 4; ++J)
    for (int I = 0; I < 4; ++I) {
      TruncatedOperator got = su2_tensor_coefficient(q, 2, unit(4, J), unit(4, I), N);
      TruncatedOperator first = su2_tensor_coefficient(
          q, 1, unit(2, (J >> 1) & 1), unit(2, (I >> 1) & 1), N);
      TruncatedOperator second =
          su2_tensor_coefficient(q, 1, unit(2, J & 1), unit(2, I & 1), N);
      CHECK(guard_block(minus(got, op_mul(first, second))).abs_max() < 1e-14);
    }

  // The q-singlet is invariant, so its diagonal coefficient is the unit: with
  // u = (e01 - q e10)/sqrt(1+q^2) the image is the identity (the quantum
  // determinant collapses through the t relations).
  VectorXc u = VectorXc::Zero(4);
  u[1] = 1.0 / std::sqrt(1.0 + q * q);
  u[2] = -q / std::sqrt(1.0 + q * q);
  TruncatedOperator inv = su2_tensor_coefficient(q, 2, u, u, N);
  CHECK(guard_block(minus(inv, op_identity(1, N))).abs_max() < 1e-13);
}

TEST_CASE("spin coefficients agree with tensor coefficients on the spin basis") {
  const double q = 0.5;
  const int N = 10;
  for (int two_l : {1, 2, 3}) {
    MatrixXd basis = spin_basis(q, two_l);
    for (int m = 0; m <= two_l; ++m)
      for (int n = 0; n <= two_l; ++n) {
        TruncatedOperator got = spin_coefficient_operator(q, two_l, m, n, N);
        TruncatedOperator want = su2_tensor_coefficient(
            q, two_l, basis.col(m).cast<Complex>(), basis.col(n).cast<Complex>(), N);
        CHECK(guard_block(minus(got, want)).abs_max() < 1e-12);
      }
  }
}

TEST_CASE("spin blocks") {
  const double q = 0.5;
  const int N = 10;
  for (int two_l : {1, 2, 3, 4}) {
    MatrixXd basis = spin_basis(q, two_l);
    CHECK(basis.cols() == two_l + 1);
    CHECK((basis.transpose() * basis -
           MatrixXd::Identity(two_l + 1, two_l + 1)).cwiseAbs().maxCoeff() < 1e-12);
  }
  // Spin 1/2 recovers the generators.
  auto t = su2_generators(q, N);
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n) {
      TruncatedOperator got = spin_coefficient_operator(q, 1, m, n, N);
      CHECK(guard_block(minus(got, t[m][n])).abs_max() < 1e-14);
    }
}

TEST_CASE("word images multiply and match symbols at the top corner") {
  const double q = 0.5;
  const int N = 16;
  std::vector<Su2Letter> word = {{0, 0, false}, {0, 0, true}};
  TruncatedOperator img = su2_word_image(q, word, N);
  auto t = su2_generators(q, N);
  TruncatedOperator want = op_mul(t[0][0], op_adjoint(t[0][0]));
  CHECK(guard_block(minus(img, want)).abs_max() < 1e-14);

  TrigPolynomial sym = su2_symbol(word);
  REQUIRE(sym.terms().size() == 1);
  CHECK(sym.terms().begin()->first[0] == 0);

  std::vector<Su2Letter> off = {{0, 1, false}};
  CHECK(su2_symbol(off).is_zero());
}

TEST_CASE("norm estimates agree with dense svd") {
  const double q = 0.5;
  const int N = 14;
  auto t = su2_generators(q, N);
  TruncatedOperator a = op_add(t[0][0], op_scale(Complex(0, 0.5), t[0][1]));
  MatrixXc dense = a.to_dense();
  Eigen::JacobiSVD<MatrixXc> svd(dense);
  CHECK(norm_estimate(a) == doctest::Approx(svd.singularValues()[0]).epsilon(1e-9));
}

TEST_CASE("tail compressions expose compactness") {
  const double q = 0.5;
  const int N = 32;
  // diag(q^n) is compact: tail estimate decays to zero.
  EssentialNormEstimate en = essential_norm_estimate(weight_d(q, N));
  REQUIRE(en.values.size() >= 2);
  CHECK(en.value < 1e-4);
  CHECK(en.values.front() > en.value);
  // The identity is not compact: the estimate stays at 1.
  EssentialNormEstimate id = essential_norm_estimate(op_identity(1, N));
  CHECK(id.value == doctest::Approx(1.0));
}
