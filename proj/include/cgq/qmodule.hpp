#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cgq/weyl.hpp"

namespace cgq {

// Quantum integer [m]_q = (q^m - q^-m) / (q - q^-1).
double q_integer(Int m, double q);
// Gaussian binomial in the balanced convention used by the Serre relations.
double q_binomial(Int k, Int j, double q);

// Finite-dimensional highest-weight module for the quantized enveloping algebra
// of the given root system at real deformation parameter 0 < q < 1, carrying an
// inner product for which E_i^* = F_i K_i and K_i^* = K_i. Matrices are real in
// this basis (all structure constants are rational in q along the recursion and
// the basis phases are pinned, so no imaginary parts ever enter).
//
// Basis vectors are weight-homogeneous, grouped by weight space, ordered by
// (depth, lexicographic weight); basis index 0 is the highest-weight vector.
struct QModule {
  RootSystem rs;
  double q = 0.5;
  IntVector highest;                 // fundamental-weight coordinates of lambda
  int dim = 0;
  std::vector<IntVector> weights;    // distinct weights in storage order
  std::vector<int> weight_offset;    // first basis index of each weight space
  std::vector<int> weight_dim;
  std::vector<int> weight_of_basis;  // basis index -> weight slot
  std::vector<MatrixXd> E, F;        // one dim x dim matrix per simple root
  MatrixXd Kexp;                     // Kexp(i, b) = pairing weight_b(H_i); K_i = diag(q_i^Kexp)

  double qi(int i) const;
  VectorXd k_diagonal(int i) const;             // diagonal of K_i
  int weight_slot(const IntVector& weight) const;  // -1 if absent
  std::string key() const;                      // cache identity: group/q/lambda
};

using ModulePtr = std::shared_ptr<const QModule>;

// Builds the module, or throws: non-dominant weight, non-finite type, dimension
// above `dim_limit`, or a Gram spectrum entering the rank-decision guard band
// (relative cutoff 1e-9, guard window [1e-11, 1e-7]).
ModulePtr build_module(const RootSystem& rs, double q, const IntVector& lambda,
                       int dim_limit = 256);

// Basis index of the extremal vector of weight w(lambda) (a 1-dim weight space).
int extremal_index(const QModule& m, const WeylGroup& g, int w);

// Orthonormal basis (columns) of the smallest E/K-invariant subspace containing
// the extremal vector of weight w(lambda).
MatrixXd borel_submodule(const QModule& m, const WeylGroup& g, int w);

// Matrix coefficient handle: the functional a -> <a eta, xi>.
struct MatrixCoefficient {
  ModulePtr module;
  VectorXc eta, xi;
};

MatrixCoefficient coefficient(const ModulePtr& m, const VectorXc& eta, const VectorXc& xi);
MatrixCoefficient basis_coefficient(const ModulePtr& m, int eta_idx, int xi_idx);

// Word algebra over coefficient factors; the empty word is the unit.
struct AlgebraFactor {
  MatrixCoefficient coeff;
  bool starred = false;
};
struct AlgebraTerm {
  Complex scale = 1.0;
  std::vector<AlgebraFactor> word;
};
struct AlgebraElement {
  std::vector<AlgebraTerm> terms;

  static AlgebraElement unit();
  static AlgebraElement from_coefficient(const MatrixCoefficient& c, bool starred = false);
  AlgebraElement operator*(const AlgebraElement& o) const;
  AlgebraElement operator+(const AlgebraElement& o) const;
  AlgebraElement scaled(Complex c) const;
  AlgebraElement adjoint() const;
};

// (C_{w lambda, lambda})^* C_{w lambda, lambda} for the module's highest weight.
AlgebraElement upsilon(const ModulePtr& m, const WeylGroup& g, int w);

}  // namespace cgq
