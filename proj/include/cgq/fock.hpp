#pragma once

#include <array>
#include <vector>

#include "cgq/trig.hpp"
#include "cgq/types.hpp"

namespace cgq {

// Operator on the truncated m-fold Fock space, basis e_{n_1} (x) ... (x) e_{n_m}
// with 0 <= n_t < N, index n_1 slowest. Truncation convention: the shift sends
// the last basis vector of a factor to 0.
//
// `guard` tracks entry exactness: every matrix entry whose row and column
// multi-indices have all components < N - guard equals the entry of the
// untruncated operator. `band` is the max per-factor bandwidth, used to keep
// guards tight under products: for banded factors the product is exact where
// both factors are exact and every nonzero summand index stays below N, giving
// guard(AB) = min(gA + gB + 1, max(gA + bA, gB + bB)).
struct TruncatedOperator {
  int factors = 1;
  int cutoff = 0;
  int guard = 0;
  int band = 0;
  bool is_dense = true;
  MatrixXc dmat;
  SparseXc smat;

  Eigen::Index side() const;
  Complex entry(Eigen::Index r, Eigen::Index c) const;
  MatrixXc to_dense() const;
  VectorXc apply(const VectorXc& v) const;
  VectorXc apply_adjoint(const VectorXc& v) const;
  double abs_max() const;
};

// Side threshold below which operators are stored dense (1024^2 complex = 16 MB).
inline constexpr Eigen::Index kDenseSideLimit = 1024;

TruncatedOperator make_operator(int factors, int cutoff, MatrixXc m, int guard, int band);
TruncatedOperator make_operator(int factors, int cutoff, SparseXc m, int guard, int band);
TruncatedOperator op_identity(int factors, int cutoff);
TruncatedOperator op_zero(int factors, int cutoff);

TruncatedOperator op_add(const TruncatedOperator& a, const TruncatedOperator& b);
TruncatedOperator op_mul(const TruncatedOperator& a, const TruncatedOperator& b);
TruncatedOperator op_scale(Complex c, const TruncatedOperator& a);
TruncatedOperator op_adjoint(const TruncatedOperator& a);
TruncatedOperator op_tensor(const TruncatedOperator& a, const TruncatedOperator& b);

// Restriction to the guard-respecting block: all multi-index components < N - g
// (g defaults to the operator's own guard). Result is a (N-g)^m-sided operator.
TruncatedOperator guard_block(const TruncatedOperator& a, int g = -1);

// Compression Q_k A Q_k, where Q_k kills basis vectors with any component < k.
TruncatedOperator tail_compression(const TruncatedOperator& a, int k);

// --- su2 building blocks (single factor) ---

TruncatedOperator shift(int N);                     // e_n -> e_{n+1}, guard 1
TruncatedOperator weight_c(double q, int N);        // diag sqrt(1 - q^{2n})
TruncatedOperator weight_d(double q, int N);        // diag q^n

// Images of the 2x2 coefficient block: [0][0] -> S^* C_q, [0][1] -> q d_q,
// [1][0] -> -d_q, [1][1] -> C_q S.
std::array<std::array<TruncatedOperator, 2>, 2> su2_generators(double q, int N);

// Image of the coefficient <. eta, xi> of the 2l-fold tensor power of the
// fundamental representation (eta, xi of size 2^{2l}, slot 0 = highest).
TruncatedOperator su2_tensor_coefficient(double q, int two_l, const VectorXc& eta,
                                         const VectorXc& xi, int N);

// Orthonormal weight basis of the spin-l submodule inside the 2l-fold tensor
// power, columns top to bottom (2l + 1 of them).
MatrixXd spin_basis(double q, int two_l);

// Image of the spin-l coefficient with acted weight vector m and bra weight
// vector n, 0 <= m, n <= 2l; guard <= 2l.
TruncatedOperator spin_coefficient_operator(double q, int two_l, int m, int n, int N);

// --- symbols ---

// One letter of a word in the quantum-SU(2) coefficients: block indices and a
// star flag.
struct Su2Letter {
  int a = 0, b = 0;
  bool starred = false;
};

// Boundary symbol: t11 -> z, t22 -> conj(z), off-diagonal letters -> 0,
// stars -> pointwise conjugate; multiplicative over the word.
TrigPolynomial su2_symbol(const std::vector<Su2Letter>& word);

TruncatedOperator su2_word_image(double q, const std::vector<Su2Letter>& word, int N);

// --- norms ---

// Largest singular value: exact dense SVD for side <= 512, otherwise a blocked
// Krylov estimate (deterministic start).
double norm_estimate(const TruncatedOperator& a, double tol = 1e-11);

struct EssentialNormEstimate {
  std::vector<int> ks;
  std::vector<double> values;  // ||Q_k A Q_k|| per k
  double value = 0.0;          // at the largest k
};

// Tail compressions at k in `ks` (default N/4, 3N/8, N/2).
EssentialNormEstimate essential_norm_estimate(const TruncatedOperator& a,
                                              std::vector<int> ks = {});

}  // namespace cgq
