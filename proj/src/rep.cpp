#include "cgq/rep.hpp"

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

bool any_below(Eigen::Index idx, int cutoff, int factors, int bound) {
  for (int t = 0; t < factors; ++t) {
    if (idx % cutoff < bound) return true;
    idx /= cutoff;
  }
  return false;
}

void pin_phase(VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > 1e-12) {
      if (v[i] < 0) v = -v;
      return;
    }
}

SparseXc dense_to_sparse(const MatrixXc& m) {
  SparseXc s(m.rows(), m.cols());
  std::vector<Eigen::Triplet<Complex>> trips;
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (m(r, c) != Complex(0.0)) trips.emplace_back(r, c, m(r, c));
  s.setFromTriplets(trips.begin(), trips.end());
  return s;
}

SparseXc kron_sparse(const SparseXc& a, const SparseXc& b) {
  SparseXc out(a.rows() * b.rows(), a.cols() * b.cols());
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(a.nonZeros()) * b.nonZeros());
  for (int ka = 0; ka < a.outerSize(); ++ka)
    for (SparseXc::InnerIterator ia(a, ka); ia; ++ia)
      for (int kb = 0; kb < b.outerSize(); ++kb)
        for (SparseXc::InnerIterator ib(b, kb); ib; ++ib)
          trips.emplace_back(ia.row() * b.rows() + ib.row(),
                             ia.col() * b.cols() + ib.col(),
                             ia.value() * ib.value());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

// y_slice = M * x_slice along tensor slot `t` of an m-fold N-space vector.
void mode_accumulate(const MatrixXc& mat, const VectorXc& x, int t, int m, int N,
                     VectorXc& y) {
  const Eigen::Index inner = ipow(N, m - 1 - t);
  const Eigen::Index outer = ipow(N, t);
  for (Eigen::Index o = 0; o < outer; ++o) {
    Eigen::Map<const MatrixXc> xin(x.data() + o * N * inner, inner, N);
    Eigen::Map<MatrixXc> yout(y.data() + o * N * inner, inner, N);
    yout.noalias() += xin * mat.transpose();
  }
}

}  // namespace

// --- string decomposition ---

StringDecomposition string_decomposition(const QModule& m, int i) {
  const int dim = m.dim;
  const MatrixXd& E = m.E[i];
  const MatrixXd& F = m.F[i];

  StringDecomposition sd;
  for (std::size_t w = 0; w < m.weights.size(); ++w) {
    const int off = m.weight_offset[w];
    const int wd = m.weight_dim[w];
    MatrixXd block = E.middleCols(off, wd);

    MatrixXd kernel;
    if (block.norm() == 0.0) {
      kernel = MatrixXd::Identity(wd, wd);
    } else {
      Eigen::JacobiSVD<MatrixXd> svd(block, Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      int rank = 0;
      for (Eigen::Index s = 0; s < sv.size(); ++s)
        if (sv[s] > 1e-9 * sv[0]) ++rank;
      if (rank == wd) continue;  // no highest vector for direction i here
      kernel = svd.matrixV().rightCols(wd - rank);
    }

    const Int two_l = m.Kexp(i, off) >= 0 ? static_cast<Int>(std::llround(m.Kexp(i, off)))
                                          : -1;
    if (two_l < 0)
      throw std::runtime_error("string top with negative weight pairing");

    for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
      VectorXd top = VectorXd::Zero(dim);
      top.segment(off, wd) = kernel.col(c);
      pin_phase(top);

      MatrixXd chain(dim, two_l + 1);
      chain.col(0) = top;
      for (Int k = 0; k < two_l; ++k) {
        VectorXd nxt = F * chain.col(k);
        const double nn = nxt.norm();
        if (!(nn > 1e-12))
          throw std::runtime_error("string shorter than its weight pairing");
        chain.col(k + 1) = nxt / nn;
      }
      sd.strings.push_back(std::move(chain));
      sd.two_l.push_back(static_cast<int>(two_l));
    }
  }

  // Joint re-orthonormalization; exact orthogonality holds in exact
  // arithmetic, this removes accumulated dust deterministically.
  int total = 0;
  for (auto& s : sd.strings) total += static_cast<int>(s.cols());
  if (total != dim)
    throw std::runtime_error("string decomposition does not fill the module");

  std::vector<VectorXd> flat;
  flat.reserve(total);
  for (auto& s : sd.strings)
    for (Eigen::Index c = 0; c < s.cols(); ++c) flat.push_back(s.col(c));
  for (std::size_t v = 0; v < flat.size(); ++v) {
    VectorXd& x = flat[v];
    for (std::size_t u = 0; u < v; ++u) x -= flat[u].dot(x) * flat[u];
    const double nn = x.norm();
    if (nn < 0.5)
      throw std::runtime_error("string vectors nearly dependent");
    x /= nn;
  }
  {
    std::size_t pos = 0;
    for (auto& s : sd.strings)
      for (Eigen::Index c = 0; c < s.cols(); ++c) s.col(c) = flat[pos++];
  }

  // Closure: F maps each string vector onto the next one (or to zero).
  for (std::size_t s = 0; s < sd.strings.size(); ++s) {
    const MatrixXd& chain = sd.strings[s];
    for (Eigen::Index k = 0; k <= sd.two_l[s]; ++k) {
      VectorXd img = F * chain.col(k);
      if (k < sd.two_l[s]) img -= chain.col(k + 1).dot(img) * chain.col(k + 1);
      if (img.norm() > 1e-9 * (1.0 + F.norm()))
        throw std::runtime_error("string closure residual too large");
    }
  }
  return sd;
}

// --- leg tensors ---

LegPtr leg_tensor(const ModulePtr& m, int i, int cutoff) {
  const double qi = std::pow(m->q, static_cast<double>(m->rs.sym[i]));
  const StringDecomposition sd = string_decomposition(*m, i);

  auto leg = std::make_shared<LegTensor>();
  leg->dim = m->dim;
  leg->cutoff = cutoff;

  std::map<int, std::vector<TruncatedOperator>> spin;
  for (int s = 0; s < static_cast<int>(sd.strings.size()); ++s) {
    const int L = sd.two_l[s];
    if (spin.count(L)) continue;
    auto& ops = spin[L];
    for (int mm = 0; mm <= L; ++mm)
      for (int nn = 0; nn <= L; ++nn)
        ops.push_back(spin_coefficient_operator(qi, L, mm, nn, cutoff));
    for (const auto& op : ops) {
      leg->guard = std::max(leg->guard, op.guard);
      leg->band = std::max(leg->band, op.band);
    }
  }

  leg->blocks.assign(static_cast<std::size_t>(m->dim) * m->dim,
                     MatrixXc::Zero(cutoff, cutoff));
  for (int a = 0; a < m->dim; ++a)
    for (int b = 0; b < m->dim; ++b) {
      MatrixXc& acc = leg->blocks[a * m->dim + b];
      for (std::size_t s = 0; s < sd.strings.size(); ++s) {
        const int L = sd.two_l[s];
        const MatrixXd& chain = sd.strings[s];
        for (int mm = 0; mm <= L; ++mm) {
          if (chain(a, mm) == 0.0) continue;
          for (int nn = 0; nn <= L; ++nn) {
            const double coef = chain(a, mm) * chain(b, nn);
            if (coef == 0.0) continue;
            acc += coef * spin[L][mm * (L + 1) + nn].to_dense();
          }
        }
      }
    }
  return leg;
}

// --- lazy operator classes ---

Eigen::Index FockOp::side() const { return ipow(cutoff(), factors()); }

namespace {

class LiftOp final : public FockOp {
 public:
  explicit LiftOp(TruncatedOperator t) : t_(std::move(t)) {
    guard = t_.guard;
    band = t_.band;
  }
  int factors() const override { return t_.factors; }
  int cutoff() const override { return t_.cutoff; }
  VectorXc apply(const VectorXc& x) const override { return t_.apply(x); }
  VectorXc apply_adjoint(const VectorXc& x) const override {
    return t_.apply_adjoint(x);
  }
  bool materialize_sparse(SparseXc& out, std::int64_t cap) const override {
    if (t_.is_dense) {
      out = dense_to_sparse(t_.dmat);
    } else {
      out = t_.smat;
    }
    return out.nonZeros() <= cap;
  }

 private:
  TruncatedOperator t_;
};

class ChainOp final : public FockOp {
 public:
  ChainOp(std::vector<LegPtr> legs, VectorXc eta, VectorXc xi, int cutoff)
      : legs_(std::move(legs)), eta_(std::move(eta)), xi_(std::move(xi)), N_(cutoff) {
    for (const auto& l : legs_) {
      guard = std::max(guard, l->guard);
      band = std::max(band, l->band);
    }
  }
  int factors() const override { return static_cast<int>(legs_.size()); }
  int cutoff() const override { return N_; }

  // The coproduct expansion threads the acted index through the legs left to
  // right: leg t contributes block(j_{t-1}, j_t), j_0 contracted with eta,
  // j_m with conj(xi).
  VectorXc apply(const VectorXc& x) const override {
    const int m = factors();
    const int dim = static_cast<int>(eta_.size());
    std::vector<VectorXc> cur(dim);
    for (int j = 0; j < dim; ++j)
      if (eta_[j] != Complex(0.0)) cur[j] = eta_[j] * x;
    for (int t = 1; t <= m; ++t) {
      const LegTensor& leg = *legs_[t - 1];
      std::vector<VectorXc> nxt(dim);
      for (int j = 0; j < dim; ++j) {
        if (cur[j].size() == 0) continue;
        for (int k = 0; k < dim; ++k) {
          const MatrixXc& blk = leg.block(j, k);
          if (blk.isZero(0.0)) continue;
          if (nxt[k].size() == 0) nxt[k] = VectorXc::Zero(x.size());
          mode_accumulate(blk, cur[j], t - 1, m, N_, nxt[k]);
        }
      }
      cur = std::move(nxt);
    }
    VectorXc y = VectorXc::Zero(x.size());
    for (int k = 0; k < dim; ++k)
      if (cur[k].size() != 0 && xi_[k] != Complex(0.0))
        y += std::conj(xi_[k]) * cur[k];
    return y;
  }

  VectorXc apply_adjoint(const VectorXc& x) const override {
    const int m = factors();
    const int dim = static_cast<int>(eta_.size());
    std::vector<VectorXc> cur(dim);
    for (int k = 0; k < dim; ++k)
      if (xi_[k] != Complex(0.0)) cur[k] = xi_[k] * x;
    for (int t = m; t >= 1; --t) {
      const LegTensor& leg = *legs_[t - 1];
      std::vector<VectorXc> nxt(dim);
      for (int k = 0; k < dim; ++k) {
        if (cur[k].size() == 0) continue;
        for (int j = 0; j < dim; ++j) {
          const MatrixXc blk = leg.block(j, k).adjoint();
          if (blk.isZero(0.0)) continue;
          if (nxt[j].size() == 0) nxt[j] = VectorXc::Zero(x.size());
          mode_accumulate(blk, cur[k], t - 1, m, N_, nxt[j]);
        }
      }
      cur = std::move(nxt);
    }
    VectorXc y = VectorXc::Zero(x.size());
    for (int j = 0; j < dim; ++j)
      if (cur[j].size() != 0 && eta_[j] != Complex(0.0))
        y += std::conj(eta_[j]) * cur[j];
    return y;
  }

  bool materialize_sparse(SparseXc& out, std::int64_t cap) const override {
    const int m = factors();
    const int dim = static_cast<int>(eta_.size());
    if (m == 0) {
      out = SparseXc(1, 1);
      Complex v = 0.0;
      for (int k = 0; k < dim; ++k) v += eta_[k] * std::conj(xi_[k]);
      if (v != Complex(0.0)) out.insert(0, 0) = v;
      out.makeCompressed();
      return true;
    }
    std::vector<SparseXc> cur(dim);
    for (int k = 0; k < dim; ++k) {
      SparseXc acc(N_, N_);
      for (int j = 0; j < dim; ++j)
        if (eta_[j] != Complex(0.0))
          acc = acc + SparseXc(eta_[j] * dense_to_sparse(legs_[0]->block(j, k)));
      cur[k] = acc;
    }
    for (int t = 2; t <= m; ++t) {
      std::vector<SparseXc> nxt(dim);
      std::int64_t nnz = 0;
      for (int k = 0; k < dim; ++k) {
        SparseXc acc(ipow(N_, t), ipow(N_, t));
        for (int j = 0; j < dim; ++j) {
          if (cur[j].nonZeros() == 0) continue;
          const SparseXc blk = dense_to_sparse(legs_[t - 1]->block(j, k));
          if (blk.nonZeros() == 0) continue;
          acc = acc + kron_sparse(cur[j], blk);
        }
        nnz += acc.nonZeros();
        if (nnz > cap) return false;
        nxt[k] = std::move(acc);
      }
      cur = std::move(nxt);
    }
    SparseXc acc(ipow(N_, m), ipow(N_, m));
    for (int k = 0; k < dim; ++k)
      if (xi_[k] != Complex(0.0)) acc = acc + SparseXc(std::conj(xi_[k]) * cur[k]);
    acc.prune(Complex(0.0));
    out = std::move(acc);
    return out.nonZeros() <= cap;
  }

 private:
  std::vector<LegPtr> legs_;
  VectorXc eta_, xi_;
  int N_;
};

class ComposedOp final : public FockOp {
 public:
  explicit ComposedOp(std::vector<FockOpPtr> fs) : fs_(std::move(fs)) {
    guard = fs_[0]->guard;
    band = fs_[0]->band;
    for (std::size_t i = 1; i < fs_.size(); ++i) {
      const int g2 = fs_[i]->guard, b2 = fs_[i]->band;
      guard = std::min(guard + g2 + 1, std::max(guard + band, g2 + b2));
      band = std::min(band + b2, cutoff());
    }
  }
  int factors() const override { return fs_[0]->factors(); }
  int cutoff() const override { return fs_[0]->cutoff(); }
  VectorXc apply(const VectorXc& x) const override {
    VectorXc v = x;
    for (auto it = fs_.rbegin(); it != fs_.rend(); ++it) v = (*it)->apply(v);
    return v;
  }
  VectorXc apply_adjoint(const VectorXc& x) const override {
    VectorXc v = x;
    for (const auto& f : fs_) v = f->apply_adjoint(v);
    return v;
  }
  bool materialize_sparse(SparseXc& out, std::int64_t cap) const override {
    SparseXc acc;
    if (!fs_[0]->materialize_sparse(acc, cap)) return false;
    for (std::size_t i = 1; i < fs_.size(); ++i) {
      SparseXc next;
      if (!fs_[i]->materialize_sparse(next, cap)) return false;
      acc = SparseXc(acc * next);
      if (acc.nonZeros() > cap) return false;
    }
    out = std::move(acc);
    return true;
  }

 private:
  std::vector<FockOpPtr> fs_;
};

class AdjointOp final : public FockOp {
 public:
  explicit AdjointOp(FockOpPtr f) : f_(std::move(f)) {
    guard = f_->guard;
    band = f_->band;
  }
  int factors() const override { return f_->factors(); }
  int cutoff() const override { return f_->cutoff(); }
  VectorXc apply(const VectorXc& x) const override { return f_->apply_adjoint(x); }
  VectorXc apply_adjoint(const VectorXc& x) const override { return f_->apply(x); }
  bool materialize_sparse(SparseXc& out, std::int64_t cap) const override {
    SparseXc inner;
    if (!f_->materialize_sparse(inner, cap)) return false;
    out = inner.adjoint();
    return true;
  }

 private:
  FockOpPtr f_;
};

class SumOp final : public FockOp {
 public:
  explicit SumOp(std::vector<std::pair<Complex, FockOpPtr>> terms)
      : terms_(std::move(terms)) {
    for (const auto& [c, f] : terms_) {
      guard = std::max(guard, f->guard);
      band = std::max(band, f->band);
    }
  }
  int factors() const override { return terms_[0].second->factors(); }
  int cutoff() const override { return terms_[0].second->cutoff(); }
  VectorXc apply(const VectorXc& x) const override {
    VectorXc y = VectorXc::Zero(x.size());
    for (const auto& [c, f] : terms_)
      if (c != Complex(0.0)) y += c * f->apply(x);
    return y;
  }
  VectorXc apply_adjoint(const VectorXc& x) const override {
    VectorXc y = VectorXc::Zero(x.size());
    for (const auto& [c, f] : terms_)
      if (c != Complex(0.0)) y += std::conj(c) * f->apply_adjoint(x);
    return y;
  }
  bool materialize_sparse(SparseXc& out, std::int64_t cap) const override {
    SparseXc acc(terms_[0].second->side(), terms_[0].second->side());
    for (const auto& [c, f] : terms_) {
      if (c == Complex(0.0)) continue;
      SparseXc next;
      if (!f->materialize_sparse(next, cap)) return false;
      acc = acc + SparseXc(c * next);
      if (acc.nonZeros() > cap) return false;
    }
    out = std::move(acc);
    return true;
  }

 private:
  std::vector<std::pair<Complex, FockOpPtr>> terms_;
};

class MaskOp final : public FockOp {
 public:
  MaskOp(FockOpPtr f, int k) : f_(std::move(f)), k_(k) {
    guard = f_->guard;
    band = f_->band;
  }
  int factors() const override { return f_->factors(); }
  int cutoff() const override { return f_->cutoff(); }
  VectorXc project(const VectorXc& x) const {
    VectorXc y = x;
    for (Eigen::Index i = 0; i < y.size(); ++i)
      if (any_below(i, cutoff(), factors(), k_)) y[i] = 0.0;
    return y;
  }
  VectorXc apply(const VectorXc& x) const override {
    return project(f_->apply(project(x)));
  }
  VectorXc apply_adjoint(const VectorXc& x) const override {
    return project(f_->apply_adjoint(project(x)));
  }
  bool materialize_sparse(SparseXc& out, std::int64_t cap) const override {
    SparseXc inner;
    if (!f_->materialize_sparse(inner, cap)) return false;
    std::vector<Eigen::Triplet<Complex>> trips;
    for (int o = 0; o < inner.outerSize(); ++o)
      for (SparseXc::InnerIterator it(inner, o); it; ++it)
        if (!any_below(it.row(), cutoff(), factors(), k_) &&
            !any_below(it.col(), cutoff(), factors(), k_))
          trips.emplace_back(it.row(), it.col(), it.value());
    out = SparseXc(inner.rows(), inner.cols());
    out.setFromTriplets(trips.begin(), trips.end());
    return true;
  }

 private:
  FockOpPtr f_;
  int k_;
};

bool all_below(Eigen::Index idx, int cutoff, int factors, int bound) {
  for (int t = 0; t < factors; ++t) {
    if (idx % cutoff >= bound) return false;
    idx /= cutoff;
  }
  return true;
}

// Compression onto the finite box [0,k)^m. With k at the guard bound every
// surviving entry is exact, so the result is a genuine compression of the
// untruncated operator (in particular its norm cannot exceed the true norm).
class BoxBlockOp final : public FockOp {
 public:
  BoxBlockOp(FockOpPtr f, int k) : f_(std::move(f)), k_(k) {
    guard = f_->guard;
    band = f_->band;
  }
  int factors() const override { return f_->factors(); }
  int cutoff() const override { return f_->cutoff(); }
  VectorXc project(const VectorXc& x) const {
    VectorXc y = x;
    for (Eigen::Index i = 0; i < y.size(); ++i)
      if (!all_below(i, cutoff(), factors(), k_)) y[i] = 0.0;
    return y;
  }
  VectorXc apply(const VectorXc& x) const override {
    return project(f_->apply(project(x)));
  }
  VectorXc apply_adjoint(const VectorXc& x) const override {
    return project(f_->apply_adjoint(project(x)));
  }
  bool materialize_sparse(SparseXc& out, std::int64_t cap) const override {
    SparseXc inner;
    if (!f_->materialize_sparse(inner, cap)) return false;
    std::vector<Eigen::Triplet<Complex>> trips;
    for (int o = 0; o < inner.outerSize(); ++o)
      for (SparseXc::InnerIterator it(inner, o); it; ++it)
        if (all_below(it.row(), cutoff(), factors(), k_) &&
            all_below(it.col(), cutoff(), factors(), k_))
          trips.emplace_back(it.row(), it.col(), it.value());
    out = SparseXc(inner.rows(), inner.cols());
    out.setFromTriplets(trips.begin(), trips.end());
    return true;
  }

 private:
  FockOpPtr f_;
  int k_;
};

// Complement of the finite box [0,k)^m: a finite-corank compression, so its
// norm dominates the Calkin norm and converges to it as k grows.
class BoxMaskOp final : public FockOp {
 public:
  BoxMaskOp(FockOpPtr f, int k) : f_(std::move(f)), k_(k) {
    guard = f_->guard;
    band = f_->band;
  }
  int factors() const override { return f_->factors(); }
  int cutoff() const override { return f_->cutoff(); }
  VectorXc project(const VectorXc& x) const {
    VectorXc y = x;
    for (Eigen::Index i = 0; i < y.size(); ++i)
      if (all_below(i, cutoff(), factors(), k_)) y[i] = 0.0;
    return y;
  }
  VectorXc apply(const VectorXc& x) const override {
    return project(f_->apply(project(x)));
  }
  VectorXc apply_adjoint(const VectorXc& x) const override {
    return project(f_->apply_adjoint(project(x)));
  }
  bool materialize_sparse(SparseXc& out, std::int64_t cap) const override {
    SparseXc inner;
    if (!f_->materialize_sparse(inner, cap)) return false;
    std::vector<Eigen::Triplet<Complex>> trips;
    for (int o = 0; o < inner.outerSize(); ++o)
      for (SparseXc::InnerIterator it(inner, o); it; ++it)
        if (!all_below(it.row(), cutoff(), factors(), k_) &&
            !all_below(it.col(), cutoff(), factors(), k_))
          trips.emplace_back(it.row(), it.col(), it.value());
    out = SparseXc(inner.rows(), inner.cols());
    out.setFromTriplets(trips.begin(), trips.end());
    return true;
  }

 private:
  FockOpPtr f_;
  int k_;
};

class TensorOp final : public FockOp {
 public:
  TensorOp(FockOpPtr a, FockOpPtr b) : a_(std::move(a)), b_(std::move(b)) {
    guard = std::max(a_->guard, b_->guard);
    band = std::max(a_->band, b_->band);
  }
  int factors() const override { return a_->factors() + b_->factors(); }
  int cutoff() const override { return a_->cutoff(); }
  VectorXc apply(const VectorXc& x) const override { return do_apply(x, false); }
  VectorXc apply_adjoint(const VectorXc& x) const override {
    return do_apply(x, true);
  }
  bool materialize_sparse(SparseXc& out, std::int64_t cap) const override {
    SparseXc sa, sb;
    if (!a_->materialize_sparse(sa, cap) || !b_->materialize_sparse(sb, cap))
      return false;
    if (sa.nonZeros() * sb.nonZeros() > cap) return false;
    out = kron_sparse(sa, sb);
    return true;
  }

 private:
  VectorXc do_apply(const VectorXc& x, bool adj) const {
    const Eigen::Index sa = a_->side(), sb = b_->side();
    MatrixXc mid(sb, sa);
    for (Eigen::Index j = 0; j < sa; ++j) {
      VectorXc col = x.segment(j * sb, sb);
      mid.col(j) = adj ? b_->apply_adjoint(col) : b_->apply(col);
    }
    VectorXc y(x.size());
    for (Eigen::Index i = 0; i < sb; ++i) {
      VectorXc row = mid.row(i).transpose();
      VectorXc w = adj ? a_->apply_adjoint(row) : a_->apply(row);
      for (Eigen::Index j = 0; j < sa; ++j) y[j * sb + i] = w[j];
    }
    return y;
  }

  FockOpPtr a_, b_;
};

}  // namespace

FockOpPtr lift(TruncatedOperator t) { return std::make_shared<LiftOp>(std::move(t)); }

FockOpPtr chain_op(std::vector<LegPtr> legs, VectorXc eta, VectorXc xi) {
  if (legs.empty() && eta.size() != xi.size())
    throw std::invalid_argument("chain boundary vectors disagree");
  int cutoff = 0;
  for (const auto& l : legs) {
    if (l->dim != static_cast<int>(eta.size()) || l->dim != static_cast<int>(xi.size()))
      throw std::invalid_argument("chain leg dimension mismatch");
    if (cutoff == 0) cutoff = l->cutoff;
    if (l->cutoff != cutoff) throw std::invalid_argument("chain cutoff mismatch");
  }
  return std::make_shared<ChainOp>(std::move(legs), std::move(eta), std::move(xi),
                                   cutoff);
}

FockOpPtr compose(std::vector<FockOpPtr> fs) {
  if (fs.empty()) throw std::invalid_argument("empty composition");
  for (const auto& f : fs)
    if (f->factors() != fs[0]->factors() || f->cutoff() != fs[0]->cutoff())
      throw std::invalid_argument("composition shape mismatch");
  if (fs.size() == 1) return fs[0];
  return std::make_shared<ComposedOp>(std::move(fs));
}

FockOpPtr adjoint_op(FockOpPtr f) { return std::make_shared<AdjointOp>(std::move(f)); }

FockOpPtr combine(std::vector<std::pair<Complex, FockOpPtr>> terms) {
  if (terms.empty()) throw std::invalid_argument("empty combination");
  for (const auto& [c, f] : terms)
    if (f->factors() != terms[0].second->factors() ||
        f->cutoff() != terms[0].second->cutoff())
      throw std::invalid_argument("combination shape mismatch");
  if (terms.size() == 1 && terms[0].first == Complex(1.0)) return terms[0].second;
  return std::make_shared<SumOp>(std::move(terms));
}

FockOpPtr mask_op(FockOpPtr f, int k) {
  return std::make_shared<MaskOp>(std::move(f), k);
}

FockOpPtr box_mask_op(FockOpPtr f, int k) {
  return std::make_shared<BoxMaskOp>(std::move(f), k);
}

FockOpPtr box_block_op(FockOpPtr f, int k) {
  return std::make_shared<BoxBlockOp>(std::move(f), k);
}

FockOpPtr tensor_op(FockOpPtr a, FockOpPtr b) {
  if (a->cutoff() != b->cutoff())
    throw std::invalid_argument("tensor cutoff mismatch");
  return std::make_shared<TensorOp>(std::move(a), std::move(b));
}

MatrixXc materialize(const FockOp& f) {
  const Eigen::Index side = f.side();
  if (side > 2048) throw std::invalid_argument("side too large to materialize");
  MatrixXc out(side, side);
  VectorXc e = VectorXc::Zero(side);
  for (Eigen::Index c = 0; c < side; ++c) {
    e[c] = 1.0;
    out.col(c) = f.apply(e);
    e[c] = 0.0;
  }
  return out;
}

std::optional<SparseXc> sparse_of(const FockOp& f, std::int64_t nnz_cap) {
  SparseXc s;
  if (!f.materialize_sparse(s, nnz_cap)) return std::nullopt;
  return s;
}

double op_norm(const FockOp& f, int basis_budget, std::uint64_t seed) {
  const Eigen::Index side = f.side();
  if (side <= 512) {
    Eigen::BDCSVD<MatrixXc> svd(materialize(f));
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  }
  if (auto sp = sparse_of(f))
    return operator_norm(*sp, basis_budget, seed);
  auto gram = [&f](const VectorXc& x) { return f.apply_adjoint(f.apply(x)); };
  auto sv = topk_singular_values_gram(gram, side, 1, 2, basis_budget, seed);
  return sv.empty() ? 0.0 : sv[0];
}

std::vector<double> top_singular_values(const FockOp& f, int k, int block,
                                        int basis_budget, std::uint64_t seed) {
  const Eigen::Index side = f.side();
  if (side <= 512) {
    Eigen::BDCSVD<MatrixXc> svd(materialize(f));
    std::vector<double> out;
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(k, svd.singularValues().size());
         ++i)
      out.push_back(svd.singularValues()(i));
    return out;
  }
  if (auto sp = sparse_of(f))
    return topk_singular_values(*sp, k, block, basis_budget, seed);
  auto gram = [&f](const VectorXc& x) { return f.apply_adjoint(f.apply(x)); };
  return topk_singular_values_gram(gram, side, k, block, basis_budget, seed);
}

// --- representations ---

Representation::Representation(double q, std::vector<int> word, int cutoff)
    : q_(q), word_(std::move(word)), cutoff_(cutoff) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0, 1)");
  if (cutoff < 2) throw std::invalid_argument("cutoff too small");
}

LegPtr Representation::leg(const ModulePtr& m, int i) const {
  if (std::abs(m->q - q_) > 1e-15)
    throw std::invalid_argument("module deformation differs from representation");
  const auto key = std::make_pair(m->key(), i);
  auto it = legs_.find(key);
  if (it != legs_.end()) return it->second;
  LegPtr l = leg_tensor(m, i, cutoff_);
  legs_.emplace(key, l);
  return l;
}

FockOpPtr Representation::image(const MatrixCoefficient& c) const {
  std::vector<LegPtr> legs;
  legs.reserve(word_.size());
  for (int i : word_) legs.push_back(leg(c.module, i));
  return chain_op(std::move(legs), c.eta, c.xi);
}

FockOpPtr Representation::image(const AlgebraElement& x) const {
  if (x.terms.empty())
    return lift(op_zero(static_cast<int>(word_.size()), cutoff_));
  std::vector<std::pair<Complex, FockOpPtr>> terms;
  for (const auto& term : x.terms) {
    FockOpPtr op;
    if (term.word.empty()) {
      op = lift(op_identity(static_cast<int>(word_.size()), cutoff_));
    } else {
      std::vector<FockOpPtr> factors;
      for (const auto& f : term.word) {
        FockOpPtr fi = image(f.coeff);
        factors.push_back(f.starred ? adjoint_op(fi) : fi);
      }
      op = compose(std::move(factors));
    }
    terms.emplace_back(term.scale, op);
  }
  return combine(std::move(terms));
}

FockOpPtr boxtimes_image(const Representation& r1, const Representation& r2,
                         const MatrixCoefficient& c) {
  const int dim = c.module->dim;
  std::vector<std::pair<Complex, FockOpPtr>> terms;
  for (int k = 0; k < dim; ++k) {
    VectorXc ek = VectorXc::Zero(dim);
    ek[k] = 1.0;
    auto left = r1.image(coefficient(c.module, c.eta, ek));
    auto right = r2.image(coefficient(c.module, ek, c.xi));
    terms.emplace_back(Complex(1.0), tensor_op(left, right));
  }
  return combine(std::move(terms));
}

MatrixCoefficient torus_twist(const MatrixCoefficient& c,
                              const std::vector<double>& theta) {
  const int rank = c.module->rs.rank();
  if (static_cast<int>(theta.size()) != rank)
    throw std::invalid_argument("torus point has wrong rank");
  // Right translation: the functional picks up the character of the weight of
  // its bra vector.
  VectorXc xi = c.xi;
  for (int b = 0; b < c.module->dim; ++b) {
    const IntVector& mu = c.module->weights[c.module->weight_of_basis[b]];
    double phase = 0.0;
    for (int r = 0; r < rank; ++r) phase += static_cast<double>(mu[r]) * theta[r];
    xi[b] *= Complex(std::cos(phase), -std::sin(phase));
  }
  return coefficient(c.module, c.eta, xi);
}

AlgebraElement torus_twist(const AlgebraElement& x, const std::vector<double>& theta) {
  AlgebraElement out;
  for (const auto& term : x.terms) {
    AlgebraTerm t;
    t.scale = term.scale;
    for (const auto& f : term.word)
      t.word.push_back(AlgebraFactor{torus_twist(f.coeff, theta), f.starred});
    out.terms.push_back(std::move(t));
  }
  return out;
}

// --- torus restriction ---

TrigPolynomial torus_symbol(const MatrixCoefficient& c) {
  const int rank = c.module->rs.rank();
  TrigPolynomial p(rank);
  for (int b = 0; b < c.module->dim; ++b) {
    const Complex coef = std::conj(c.xi[b]) * c.eta[b];
    if (coef == Complex(0.0)) continue;
    const IntVector& mu = c.module->weights[c.module->weight_of_basis[b]];
    std::vector<Int> e(mu.data(), mu.data() + mu.size());
    p.add_term(e, coef);
  }
  return p;
}

TrigPolynomial torus_symbol(const AlgebraElement& x) {
  if (x.terms.empty()) return TrigPolynomial(0);
  int rank = 0;
  for (const auto& t : x.terms)
    for (const auto& f : t.word) rank = f.coeff.module->rs.rank();
  TrigPolynomial acc(rank);
  for (const auto& term : x.terms) {
    TrigPolynomial p = TrigPolynomial::constant(rank, term.scale);
    for (const auto& f : term.word) {
      TrigPolynomial s = torus_symbol(f.coeff);
      p = p * (f.starred ? s.star() : s);
    }
    acc = acc + p;
  }
  return acc;
}

Complex point_character(const AlgebraElement& x, const std::vector<double>& theta) {
  return torus_symbol(x).evaluate(theta);
}

// --- restricted character sums ---

double RestrictedCharacterSum::grid_norm(int points_per_dim) const {
  if (terms.empty()) return 0.0;
  const int d = lattice.rank();
  bool constant_phase = d == 0;
  if (!constant_phase) {
    constant_phase = true;
    for (const auto& t : terms)
      if (t.exponent != terms[0].exponent) {
        constant_phase = false;
        break;
      }
  }
  if (constant_phase) {
    std::vector<std::pair<Complex, FockOpPtr>> ts;
    for (const auto& t : terms) ts.emplace_back(t.scale, t.op);
    return op_norm(*combine(std::move(ts)));
  }

  const int pts = points_per_dim > 0 ? points_per_dim : default_grid_points(d);
  std::vector<int> idx(d, 0);
  double best = 0.0;
  while (true) {
    std::vector<std::pair<Complex, FockOpPtr>> ts;
    for (const auto& t : terms) {
      double phase = 0.0;
      for (int r = 0; r < d; ++r)
        phase += 2.0 * M_PI * idx[r] / pts * static_cast<double>(t.exponent[r]);
      ts.emplace_back(t.scale * Complex(std::cos(phase), std::sin(phase)), t.op);
    }
    best = std::max(best, op_norm(*combine(std::move(ts))));
    int r = d - 1;
    while (r >= 0 && ++idx[r] == pts) idx[r--] = 0;
    if (r < 0) break;
  }
  return best;
}

double RestrictedCharacterSum::coefficient_bound() const {
  double s = 0.0;
  for (const auto& t : terms) s += std::abs(t.scale) * op_norm(*t.op);
  return s;
}

std::optional<RestrictedCharacterSum> restricted_character_sum(
    const Representation& rep, const AlgebraElement& x, const TorusLattice& lat) {
  constexpr std::size_t kComboCap = 256;

  struct Piece {
    VectorXc xi;
    IntVector pair;  // lattice pairing of the weight, sign included
  };

  RestrictedCharacterSum out;
  out.lattice = lat;
  std::map<std::vector<Int>, std::vector<std::pair<Complex, FockOpPtr>>> grouped;

  for (const auto& term : x.terms) {
    // Split each factor by the weight of its bra vector; the right torus
    // translation twists exactly by that weight (negated under a star).
    std::vector<std::vector<Piece>> options;
    for (const auto& f : term.word) {
      const auto& m = *f.coeff.module;
      std::vector<Piece> opts;
      for (std::size_t w = 0; w < m.weights.size(); ++w) {
        VectorXc comp = VectorXc::Zero(m.dim);
        bool nonzero = false;
        for (int b = m.weight_offset[w]; b < m.weight_offset[w] + m.weight_dim[w];
             ++b) {
          comp[b] = f.coeff.xi[b];
          if (comp[b] != Complex(0.0)) nonzero = true;
        }
        if (!nonzero) continue;
        IntVector p = lat.pair_weight(m.weights[w]);
        if (f.starred) p = -p;
        opts.push_back(Piece{std::move(comp), std::move(p)});
      }
      if (opts.empty()) opts.push_back(Piece{VectorXc::Zero(m.dim),
                                             IntVector::Zero(lat.rank())});
      options.push_back(std::move(opts));
    }

    std::size_t combos = 1;
    for (const auto& o : options) {
      combos *= o.size();
      if (combos > kComboCap) return std::nullopt;
    }

    std::vector<std::size_t> pick(options.size(), 0);
    while (true) {
      IntVector e = IntVector::Zero(lat.rank());
      std::vector<FockOpPtr> factors;
      bool dead = false;
      for (std::size_t t = 0; t < options.size(); ++t) {
        const Piece& p = options[t][pick[t]];
        if (p.xi.isZero(0.0)) {
          dead = true;
          break;
        }
        e += p.pair;
        FockOpPtr fi =
            rep.image(coefficient(term.word[t].coeff.module,
                                  term.word[t].coeff.eta, p.xi));
        factors.push_back(term.word[t].starred ? adjoint_op(fi) : fi);
      }
      if (!dead) {
        FockOpPtr op = factors.empty()
                           ? lift(op_identity(
                                 static_cast<int>(rep.word().size()), rep.cutoff()))
                           : compose(std::move(factors));
        std::vector<Int> key(e.data(), e.data() + e.size());
        grouped[key].emplace_back(term.scale, op);
      }
      int t = static_cast<int>(options.size()) - 1;
      while (t >= 0 && ++pick[t] == options[t].size()) pick[t--] = 0;
      if (t < 0) break;
    }
  }

  for (auto& [key, ts] : grouped) {
    CharacterSumTerm t;
    t.scale = 1.0;
    t.op = combine(std::move(ts));
    t.exponent = Eigen::Map<const IntVector>(key.data(), key.size());
    out.terms.push_back(std::move(t));
  }
  return out;
}

int commutant_dimension(const std::vector<MatrixXc>& ops, double tol) {
  if (ops.empty()) return 0;
  const Eigen::Index n = ops[0].rows();
  if (n * n > 1024) throw std::invalid_argument("commutant probe side too large");
  MatrixXc L = MatrixXc::Zero(n * n, n * n);
  for (const MatrixXc& a : ops) {
    MatrixXc m = MatrixXc::Zero(n * n, n * n);
    // vec(AX - XA) = (I (x) A - A^T (x) I) vec(X), column-major vec
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) {
          m(i * n + r, i * n + c) += a(r, c);
          m(i * n + r, c * n + r) -= a(c, i);
        }
    L += m.adjoint() * m;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXc> eig(L);
  const double top = std::max(1.0, eig.eigenvalues().maxCoeff());
  int count = 0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i)
    if (eig.eigenvalues()[i] < tol * top) ++count;
  return count;
}

}  // namespace cgq
