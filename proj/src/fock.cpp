#include "cgq/fock.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

#include "cgq/linop.hpp"

namespace cgq {
namespace {

Eigen::Index ipow(Eigen::Index base, int e) {
  Eigen::Index r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

std::vector<int> digits_of(Eigen::Index idx, int cutoff, int factors) {
  std::vector<int> d(factors);
  for (int t = factors - 1; t >= 0; --t) {
    d[t] = static_cast<int>(idx % cutoff);
    idx /= cutoff;
  }
  return d;
}

bool all_below(Eigen::Index idx, int cutoff, int factors, int bound) {
  for (int t = 0; t < factors; ++t) {
    if (idx % cutoff >= bound) return false;
    idx /= cutoff;
  }
  return true;
}

bool any_below(Eigen::Index idx, int cutoff, int factors, int bound) {
  for (int t = 0; t < factors; ++t) {
    if (idx % cutoff < bound) return true;
    idx /= cutoff;
  }
  return false;
}

void check_shape(const TruncatedOperator& a, const TruncatedOperator& b) {
  if (a.factors != b.factors || a.cutoff != b.cutoff)
    throw std::invalid_argument("operator shape mismatch");
}

SparseXc to_sparse(const TruncatedOperator& a) {
  if (!a.is_dense) return a.smat;
  SparseXc s(a.dmat.rows(), a.dmat.cols());
  std::vector<Eigen::Triplet<Complex>> trips;
  for (Eigen::Index c = 0; c < a.dmat.cols(); ++c)
    for (Eigen::Index r = 0; r < a.dmat.rows(); ++r)
      if (a.dmat(r, c) != Complex(0.0)) trips.emplace_back(r, c, a.dmat(r, c));
  s.setFromTriplets(trips.begin(), trips.end());
  return s;
}

}  // namespace

Eigen::Index TruncatedOperator::side() const { return ipow(cutoff, factors); }

Complex TruncatedOperator::entry(Eigen::Index r, Eigen::Index c) const {
  return is_dense ? dmat(r, c) : smat.coeff(r, c);
}

MatrixXc TruncatedOperator::to_dense() const {
  return is_dense ? dmat : MatrixXc(smat);
}

VectorXc TruncatedOperator::apply(const VectorXc& v) const {
  return is_dense ? VectorXc(dmat * v) : VectorXc(smat * v);
}

VectorXc TruncatedOperator::apply_adjoint(const VectorXc& v) const {
  return is_dense ? VectorXc(dmat.adjoint() * v) : VectorXc(smat.adjoint() * v);
}

double TruncatedOperator::abs_max() const {
  if (is_dense) return dmat.size() == 0 ? 0.0 : dmat.cwiseAbs().maxCoeff();
  double m = 0.0;
  for (int k = 0; k < smat.outerSize(); ++k)
    for (SparseXc::InnerIterator it(smat, k); it; ++it)
      m = std::max(m, std::abs(it.value()));
  return m;
}

TruncatedOperator make_operator(int factors, int cutoff, MatrixXc m, int guard,
                                int band) {
  TruncatedOperator op;
  op.factors = factors;
  op.cutoff = cutoff;
  op.guard = std::max(0, guard);
  op.band = std::clamp(band, 0, cutoff);
  const Eigen::Index side = ipow(cutoff, factors);
  if (m.rows() != side || m.cols() != side)
    throw std::invalid_argument("operator matrix does not match cutoff^factors");
  if (side <= kDenseSideLimit) {
    op.is_dense = true;
    op.dmat = std::move(m);
  } else {
    op.is_dense = false;
    TruncatedOperator tmp;
    tmp.is_dense = true;
    tmp.dmat = std::move(m);
    op.smat = to_sparse(tmp);
  }
  return op;
}

TruncatedOperator make_operator(int factors, int cutoff, SparseXc m, int guard,
                                int band) {
  TruncatedOperator op;
  op.factors = factors;
  op.cutoff = cutoff;
  op.guard = std::max(0, guard);
  op.band = std::clamp(band, 0, cutoff);
  const Eigen::Index side = ipow(cutoff, factors);
  if (m.rows() != side || m.cols() != side)
    throw std::invalid_argument("operator matrix does not match cutoff^factors");
  if (side <= kDenseSideLimit) {
    op.is_dense = true;
    op.dmat = MatrixXc(m);
  } else {
    op.is_dense = false;
    m.prune(Complex(0.0));
    op.smat = std::move(m);
  }
  return op;
}

TruncatedOperator op_identity(int factors, int cutoff) {
  const Eigen::Index side = ipow(cutoff, factors);
  if (side <= kDenseSideLimit)
    return make_operator(factors, cutoff, MatrixXc(MatrixXc::Identity(side, side)), 0, 0);
  SparseXc s(side, side);
  s.setIdentity();
  return make_operator(factors, cutoff, std::move(s), 0, 0);
}

TruncatedOperator op_zero(int factors, int cutoff) {
  const Eigen::Index side = ipow(cutoff, factors);
  if (side <= kDenseSideLimit)
    return make_operator(factors, cutoff, MatrixXc(MatrixXc::Zero(side, side)), 0, 0);
  return make_operator(factors, cutoff, SparseXc(side, side), 0, 0);
}

TruncatedOperator op_add(const TruncatedOperator& a, const TruncatedOperator& b) {
  check_shape(a, b);
  const int guard = std::max(a.guard, b.guard);
  const int band = std::max(a.band, b.band);
  if (a.is_dense && b.is_dense)
    return make_operator(a.factors, a.cutoff, MatrixXc(a.dmat + b.dmat), guard, band);
  return make_operator(a.factors, a.cutoff, SparseXc(to_sparse(a) + to_sparse(b)),
                       guard, band);
}

TruncatedOperator op_mul(const TruncatedOperator& a, const TruncatedOperator& b) {
  check_shape(a, b);
  // Exactness where both factors are exact and the inner index cannot escape:
  // the inner index s obeys |r - s| <= band(a) and |s - c| <= band(b)
  // componentwise, so s stays below the cutoff and inside both exact regions.
  const int guard = std::min(a.guard + b.guard + 1,
                             std::max(a.guard + a.band, b.guard + b.band));
  const int band = std::min(a.band + b.band, a.cutoff);
  if (a.is_dense && b.is_dense)
    return make_operator(a.factors, a.cutoff, MatrixXc(a.dmat * b.dmat), guard, band);
  return make_operator(a.factors, a.cutoff, SparseXc(to_sparse(a) * to_sparse(b)),
                       guard, band);
}

TruncatedOperator op_scale(Complex c, const TruncatedOperator& a) {
  if (a.is_dense)
    return make_operator(a.factors, a.cutoff, MatrixXc(c * a.dmat), a.guard, a.band);
  return make_operator(a.factors, a.cutoff, SparseXc(c * a.smat), a.guard, a.band);
}

TruncatedOperator op_adjoint(const TruncatedOperator& a) {
  if (a.is_dense)
    return make_operator(a.factors, a.cutoff, MatrixXc(a.dmat.adjoint()), a.guard,
                         a.band);
  return make_operator(a.factors, a.cutoff, SparseXc(a.smat.adjoint()), a.guard,
                       a.band);
}

TruncatedOperator op_tensor(const TruncatedOperator& a, const TruncatedOperator& b) {
  if (a.cutoff != b.cutoff)
    throw std::invalid_argument("tensor factors need a common cutoff");
  const int factors = a.factors + b.factors;
  const int guard = std::max(a.guard, b.guard);
  const int band = std::max(a.band, b.band);
  const Eigen::Index side_b = ipow(a.cutoff, b.factors);
  const Eigen::Index side = ipow(a.cutoff, factors);

  const SparseXc sa = to_sparse(a);
  const SparseXc sb = to_sparse(b);
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(sa.nonZeros()) * sb.nonZeros());
  for (int ka = 0; ka < sa.outerSize(); ++ka)
    for (SparseXc::InnerIterator ia(sa, ka); ia; ++ia)
      for (int kb = 0; kb < sb.outerSize(); ++kb)
        for (SparseXc::InnerIterator ib(sb, kb); ib; ++ib)
          trips.emplace_back(ia.row() * side_b + ib.row(),
                             ia.col() * side_b + ib.col(), ia.value() * ib.value());
  SparseXc s(side, side);
  s.setFromTriplets(trips.begin(), trips.end());
  return make_operator(factors, a.cutoff, std::move(s), guard, band);
}

TruncatedOperator guard_block(const TruncatedOperator& a, int g) {
  if (g < 0) g = a.guard;
  const int inner = a.cutoff - g;
  if (inner <= 0) throw std::invalid_argument("guard consumes the whole cutoff");
  const Eigen::Index side = ipow(inner, a.factors);

  auto remap = [&](Eigen::Index idx) {
    const auto d = digits_of(idx, a.cutoff, a.factors);
    Eigen::Index out = 0;
    for (int t = 0; t < a.factors; ++t) out = out * inner + d[t];
    return out;
  };

  std::vector<Eigen::Triplet<Complex>> trips;
  const SparseXc s = to_sparse(a);
  for (int k = 0; k < s.outerSize(); ++k)
    for (SparseXc::InnerIterator it(s, k); it; ++it)
      if (all_below(it.row(), a.cutoff, a.factors, inner) &&
          all_below(it.col(), a.cutoff, a.factors, inner))
        trips.emplace_back(remap(it.row()), remap(it.col()), it.value());
  SparseXc blk(side, side);
  blk.setFromTriplets(trips.begin(), trips.end());
  return make_operator(a.factors, inner, std::move(blk), 0, std::min(a.band, inner));
}

TruncatedOperator tail_compression(const TruncatedOperator& a, int k) {
  std::vector<Eigen::Triplet<Complex>> trips;
  const SparseXc s = to_sparse(a);
  for (int o = 0; o < s.outerSize(); ++o)
    for (SparseXc::InnerIterator it(s, o); it; ++it)
      if (!any_below(it.row(), a.cutoff, a.factors, k) &&
          !any_below(it.col(), a.cutoff, a.factors, k))
        trips.emplace_back(it.row(), it.col(), it.value());
  SparseXc c(s.rows(), s.cols());
  c.setFromTriplets(trips.begin(), trips.end());
  return make_operator(a.factors, a.cutoff, std::move(c), a.guard, a.band);
}

TruncatedOperator shift(int N) {
  MatrixXc m = MatrixXc::Zero(N, N);
  for (int n = 0; n + 1 < N; ++n) m(n + 1, n) = 1.0;
  return make_operator(1, N, std::move(m), 0, 1);
}

TruncatedOperator weight_c(double q, int N) {
  MatrixXc m = MatrixXc::Zero(N, N);
  for (int n = 0; n < N; ++n) m(n, n) = std::sqrt(1.0 - std::pow(q, 2.0 * n));
  return make_operator(1, N, std::move(m), 0, 0);
}

TruncatedOperator weight_d(double q, int N) {
  MatrixXc m = MatrixXc::Zero(N, N);
  for (int n = 0; n < N; ++n) m(n, n) = std::pow(q, n);
  return make_operator(1, N, std::move(m), 0, 0);
}

std::array<std::array<TruncatedOperator, 2>, 2> su2_generators(double q, int N) {
  // All four are entry-exact: every stored entry agrees with the untruncated
  // operator (the shift simply lacks the row that would leave the space).
  MatrixXc t11 = MatrixXc::Zero(N, N), t12 = MatrixXc::Zero(N, N),
           t21 = MatrixXc::Zero(N, N), t22 = MatrixXc::Zero(N, N);
  for (int n = 0; n < N; ++n) {
    const double cn = std::sqrt(1.0 - std::pow(q, 2.0 * n));
    const double dn = std::pow(q, n);
    if (n > 0) t11(n - 1, n) = cn;               // S^* C_q
    t12(n, n) = q * dn;                          // q d_q
    t21(n, n) = -dn;                             // -d_q
    if (n + 1 < N) t22(n + 1, n) = std::sqrt(1.0 - std::pow(q, 2.0 * (n + 1)));  // C_q S
  }
  std::array<std::array<TruncatedOperator, 2>, 2> t;
  t[0][0] = make_operator(1, N, std::move(t11), 0, 1);
  t[0][1] = make_operator(1, N, std::move(t12), 0, 0);
  t[1][0] = make_operator(1, N, std::move(t21), 0, 0);
  t[1][1] = make_operator(1, N, std::move(t22), 0, 1);
  return t;
}

TruncatedOperator su2_tensor_coefficient(double q, int two_l, const VectorXc& eta,
                                         const VectorXc& xi, int N) {
  const Eigen::Index dim = Eigen::Index(1) << two_l;
  if (eta.size() != dim || xi.size() != dim)
    throw std::invalid_argument("tensor coefficient vectors have wrong size");
  if (two_l == 0)
    return op_scale(std::conj(xi[0]) * eta[0], op_identity(1, N));

  const auto t = su2_generators(q, N);
  TruncatedOperator acc = op_zero(1, N);
  for (Eigen::Index I = 0; I < dim; ++I) {
    if (xi[I] == Complex(0.0)) continue;
    for (Eigen::Index J = 0; J < dim; ++J) {
      if (eta[J] == Complex(0.0)) continue;
      // The coefficient between the product basis vectors v_J (acted) and v_I
      // (bra) is the algebra product of one 2x2 coefficient per tensor slot,
      // slot 1 (most significant bit) leftmost, acted digit first.
      TruncatedOperator prod =
          t[(J >> (two_l - 1)) & 1][(I >> (two_l - 1)) & 1];
      for (int s = two_l - 2; s >= 0; --s)
        prod = op_mul(prod, t[(J >> s) & 1][(I >> s) & 1]);
      acc = op_add(acc, op_scale(std::conj(xi[I]) * eta[J], prod));
    }
  }
  return acc;
}

MatrixXd spin_basis(double q, int two_l) {
  const Eigen::Index dim = Eigen::Index(1) << two_l;
  MatrixXd basis = MatrixXd::Zero(dim, two_l + 1);
  basis(0, 0) = 1.0;
  if (two_l == 0) return basis;

  // Lowering operator of the tensor power in the orthonormal product basis:
  // acts as F on one slot and as K^{-1} on every slot to its right.
  MatrixXd ftot = MatrixXd::Zero(dim, dim);
  const double f = std::pow(q, -0.5);
  for (Eigen::Index J = 0; J < dim; ++J)
    for (int s = 0; s < two_l; ++s) {
      if ((J >> (two_l - 1 - s)) & 1) continue;  // slot already lowered
      double w = f;
      for (int r = s + 1; r < two_l; ++r)
        w *= ((J >> (two_l - 1 - r)) & 1) ? q : 1.0 / q;
      ftot(J | (Eigen::Index(1) << (two_l - 1 - s)), J) += w;
    }

  for (int m = 1; m <= two_l; ++m) {
    VectorXd v = ftot * basis.col(m - 1);
    basis.col(m) = v / v.norm();
  }
  return basis;
}

TruncatedOperator spin_coefficient_operator(double q, int two_l, int m, int n, int N) {
  const MatrixXd b = spin_basis(q, two_l);
  return su2_tensor_coefficient(q, two_l, b.col(m).cast<Complex>(),
                                b.col(n).cast<Complex>(), N);
}

TrigPolynomial su2_symbol(const std::vector<Su2Letter>& word) {
  TrigPolynomial sym = TrigPolynomial::constant(1, 1.0);
  for (const auto& l : word) {
    Int e;
    if (l.a == 0 && l.b == 0)
      e = 1;
    else if (l.a == 1 && l.b == 1)
      e = -1;
    else
      return TrigPolynomial(1);  // off-diagonal letters vanish on the boundary
    if (l.starred) e = -e;
    sym = sym * TrigPolynomial::monomial({e}, 1.0);
  }
  return sym;
}

TruncatedOperator su2_word_image(double q, const std::vector<Su2Letter>& word, int N) {
  const auto t = su2_generators(q, N);
  TruncatedOperator acc = op_identity(1, N);
  for (const auto& l : word) {
    const TruncatedOperator& g = t[l.a][l.b];
    acc = op_mul(acc, l.starred ? op_adjoint(g) : g);
  }
  return acc;
}

double norm_estimate(const TruncatedOperator& a, double) {
  if (a.is_dense) {
    Eigen::BDCSVD<MatrixXc> svd(a.dmat);
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  }
  return operator_norm(a.smat);
}

EssentialNormEstimate essential_norm_estimate(const TruncatedOperator& a,
                                              std::vector<int> ks) {
  const int N = a.cutoff;
  if (ks.empty()) ks = {N / 4, 3 * N / 8, N / 2};
  for (int& k : ks) k = std::clamp(k, 1, std::max(1, N - 1));
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  EssentialNormEstimate est;
  est.ks = ks;
  for (int k : ks) est.values.push_back(norm_estimate(tail_compression(a, k)));
  est.value = est.values.empty() ? 0.0 : est.values.back();
  return est;
}

}  // namespace cgq
