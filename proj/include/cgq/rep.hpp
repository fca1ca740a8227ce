#pragma once

#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "cgq/fock.hpp"
#include "cgq/lattice.hpp"
#include "cgq/qmodule.hpp"
#include "cgq/trig.hpp"
#include "cgq/weyl.hpp"

namespace cgq {

// Decomposition of a module into strings for one simple direction (E_i, F_i,
// K_i): string s is an orthonormal chain of 2l+1 columns, top annihilated by
// E_i, each later column proportional to the F_i image of the previous one.
struct StringDecomposition {
  std::vector<MatrixXd> strings;  // module_dim x (two_l + 1)
  std::vector<int> two_l;
};

StringDecomposition string_decomposition(const QModule& m, int i);

// One-direction images of all unit coefficients of a module on the truncated
// Fock space: block(a, b) is the image of the functional x -> <x e_a, e_b>.
struct LegTensor {
  int dim = 0;
  int cutoff = 0;
  int guard = 0;
  int band = 0;
  std::vector<MatrixXc> blocks;  // dim * dim blocks, index a * dim + b

  const MatrixXc& block(int a, int b) const { return blocks[a * dim + b]; }
};
using LegPtr = std::shared_ptr<const LegTensor>;

// Cached per (module, direction, cutoff); the deformation parameter for the
// direction is q^{d_i} with q taken from the module.
LegPtr leg_tensor(const ModulePtr& m, int i, int cutoff);

// --- lazy operators on (C^N)^{(x) factors} ---

class FockOp {
 public:
  virtual ~FockOp() = default;
  virtual int factors() const = 0;
  virtual int cutoff() const = 0;
  virtual VectorXc apply(const VectorXc& x) const = 0;
  virtual VectorXc apply_adjoint(const VectorXc& x) const = 0;
  // Sparse materialization; fails (false) past the nonzero cap.
  virtual bool materialize_sparse(SparseXc& out, std::int64_t nnz_cap) const = 0;

  Eigen::Index side() const;
  int guard = 0;
  int band = 0;
};
using FockOpPtr = std::shared_ptr<const FockOp>;

FockOpPtr lift(TruncatedOperator t);
// Coproduct chain: legs t = 1..m, sum over index paths of elementary tensors
// legs[t].block(j_{t-1}, j_t); j_0 is contracted with eta and j_m with
// conj(xi).
FockOpPtr chain_op(std::vector<LegPtr> legs, VectorXc eta, VectorXc xi);
FockOpPtr compose(std::vector<FockOpPtr> fs);  // fs[0] applied last
FockOpPtr adjoint_op(FockOpPtr f);
FockOpPtr combine(std::vector<std::pair<Complex, FockOpPtr>> terms);
FockOpPtr mask_op(FockOpPtr f, int k);  // Q_k f Q_k, Q_k kills any index < k
// R_k f R_k, R_k kills only the finite box (all indices < k); finite corank,
// so the norms bound the Calkin norm from above and converge to it.
FockOpPtr box_mask_op(FockOpPtr f, int k);
// Compression onto the finite box [0,k)^m; at the guard bound this is a true
// compression of the untruncated operator.
FockOpPtr box_block_op(FockOpPtr f, int k);
FockOpPtr tensor_op(FockOpPtr a, FockOpPtr b);

MatrixXc materialize(const FockOp& f);  // small sides only
std::optional<SparseXc> sparse_of(const FockOp& f, std::int64_t nnz_cap = 30000000);

// Largest singular value: exact for side <= 512, else Krylov on a sparse
// materialization when one fits, else matrix-free Krylov.
double op_norm(const FockOp& f, int basis_budget = 96,
               std::uint64_t seed = 0x9e3779b97f4a7c15ull);
std::vector<double> top_singular_values(const FockOp& f, int k, int block = 4,
                                        int basis_budget = 256,
                                        std::uint64_t seed = 0x9e3779b97f4a7c15ull);

// --- representations attached to reduced words ---

class Representation {
 public:
  Representation(double q, std::vector<int> word, int cutoff);

  double q() const { return q_; }
  const std::vector<int>& word() const { return word_; }
  int cutoff() const { return cutoff_; }

  FockOpPtr image(const MatrixCoefficient& c) const;
  FockOpPtr image(const AlgebraElement& x) const;

 private:
  double q_ = 0.5;
  std::vector<int> word_;
  int cutoff_ = 0;
  mutable std::map<std::pair<std::string, int>, LegPtr> legs_;

  LegPtr leg(const ModulePtr& m, int i) const;
};

// (pi_{r1} boxtimes pi_{r2})(c), the coproduct split across two factors.
FockOpPtr boxtimes_image(const Representation& r1, const Representation& r2,
                         const MatrixCoefficient& c);

// Right torus translation: the functional picks up the character of the
// weight of its bra vector.
MatrixCoefficient torus_twist(const MatrixCoefficient& c,
                              const std::vector<double>& theta);
AlgebraElement torus_twist(const AlgebraElement& x, const std::vector<double>& theta);

// --- torus restriction ---

// Exact restriction of a coefficient to the diagonal torus: sum over basis
// weights of conj(xi_b) eta_b z^{weight_b}; extended multiplicatively to words.
TrigPolynomial torus_symbol(const MatrixCoefficient& c);
TrigPolynomial torus_symbol(const AlgebraElement& x);

// One-dimensional point evaluation (the character at a torus point).
Complex point_character(const AlgebraElement& x, const std::vector<double>& theta);

// Sum of operators weighted by characters of a sublattice torus; models the
// boundary transform of a representation across one Bruhat cover.
struct CharacterSumTerm {
  Complex scale;
  FockOpPtr op;
  IntVector exponent;
};

struct RestrictedCharacterSum {
  TorusLattice lattice;
  std::vector<CharacterSumTerm> terms;

  // sup over a uniform grid on the lattice torus of the operator norm
  double grid_norm(int points_per_dim = 0) const;
  double coefficient_bound() const;  // sum of |scale| * ||op||
};

// Splits every factor by the weight of its bra vector (the right torus
// translation twists exactly by that weight, negated under a star) and groups
// the resulting products by lattice exponent. Fails (nullopt) only when the
// split produces too many combinations to handle.
std::optional<RestrictedCharacterSum> restricted_character_sum(
    const Representation& rep, const AlgebraElement& x, const TorusLattice& lat);

// Dimension of the joint commutant of the given matrices (count of near-zero
// eigenvalues of the commutation form); dense, small sides only.
int commutant_dimension(const std::vector<MatrixXc>& ops, double tol = 1e-8);

}  // namespace cgq
