#include "cgq/qmodule.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace cgq {

double q_integer(Int m, double q) {
  return (std::pow(q, static_cast<double>(m)) - std::pow(q, static_cast<double>(-m))) /
         (q - 1.0 / q);
}

double q_binomial(Int k, Int j, double q) {
  double v = 1.0;
  for (Int m = 0; m < j; ++m)
    v *= (std::pow(q, static_cast<double>(-(k - m))) - std::pow(q, static_cast<double>(k - m))) /
         (std::pow(q, static_cast<double>(-(m + 1))) - std::pow(q, static_cast<double>(m + 1)));
  return v;
}

double QModule::qi(int i) const { return std::pow(q, static_cast<double>(rs.sym[i])); }

VectorXd QModule::k_diagonal(int i) const {
  VectorXd d(dim);
  const double base = qi(i);
  for (int b = 0; b < dim; ++b) d[b] = std::pow(base, Kexp(i, b));
  return d;
}

int QModule::weight_slot(const IntVector& weight) const {
  for (std::size_t s = 0; s < weights.size(); ++s)
    if (weights[s] == weight) return static_cast<int>(s);
  return -1;
}

std::string QModule::key() const {
  std::ostringstream os;
  os << rs.name << "_q" << q << "_l";
  for (int i = 0; i < highest.size(); ++i) os << (i ? "-" : "") << highest[i];
  return os.str();
}

namespace {

constexpr double kRankCutoff = 1e-9;
constexpr double kGuardLow = 1e-11;
constexpr double kGuardHigh = 1e-7;
// A Gram matrix built purely from rounding noise still has a clean relative
// spectrum, so rank decisions also need an absolute reference. Eigenvalues
// are measured against the largest one accepted anywhere in the module.
constexpr double kZeroFloor = 1e-10;
constexpr double kZeroGuard = 1e-8;

struct WeightKey {
  std::vector<Int> v;
  bool operator<(const WeightKey& o) const { return v < o.v; }
};

WeightKey wkey(const IntVector& w) { return {{w.data(), w.data() + w.size()}}; }

// Per-weight-space data kept during the recursion.
struct Space {
  IntVector weight;          // fundamental coordinates
  int depth = 0;
  int dim = 0;
  int offset = -1;           // global basis offset, assigned at the end
  std::vector<MatrixXd> F;   // F[i]: this space -> space at weight - alpha_i
  std::vector<MatrixXd> E;   // E[i]: this space -> space at weight + alpha_i
};

}  // namespace

ModulePtr build_module(const RootSystem& rs, double q, const IntVector& lambda,
                       int dim_limit) {
  const int n = rs.rank();
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("need 0 < q < 1");
  if (lambda.size() != n) throw std::invalid_argument("weight arity mismatch");
  if ((lambda.array() < 0).any())
    throw std::invalid_argument("highest weight must be dominant");

  std::vector<double> qs(n);
  for (int i = 0; i < n; ++i) qs[i] = std::pow(q, static_cast<double>(rs.sym[i]));

  std::map<WeightKey, int> slot_of;
  std::vector<Space> spaces;
  {
    Space top;
    top.weight = lambda;
    top.depth = 0;
    top.dim = 1;
    top.F.assign(n, MatrixXd());
    top.E.assign(n, MatrixXd());
    slot_of[wkey(lambda)] = 0;
    spaces.push_back(std::move(top));
  }

  int total_dim = 1;
  double scale = 1.0;  // largest Gram eigenvalue accepted so far
  std::vector<int> frontier = {0};  // slots at the current depth

  for (int depth = 1; !frontier.empty(); ++depth) {
    if (depth > 256) throw std::runtime_error("weight recursion failed to terminate");

    // Candidate weights one alpha below the frontier, lexicographically sorted
    // to fix the storage order.
    std::map<WeightKey, std::vector<std::pair<int, int>>> cand;  // weight -> [(i, parent slot)]
    for (int ps : frontier)
      for (int i = 0; i < n; ++i) {
        IntVector mu = spaces[ps].weight - rs.cartan.col(i);
        cand[wkey(mu)].emplace_back(i, ps);
      }

    std::vector<int> next_frontier;
    for (auto& [mk, parents] : cand) {
      IntVector mu(n);
      for (int i = 0; i < n; ++i) mu[i] = mk.v[i];

      // Candidate vectors are F_i u over parent basis vectors u; enumerate them.
      struct Cand { int i, parent, u; };
      std::vector<Cand> cs;
      for (auto [i, ps] : parents)
        for (int u = 0; u < spaces[ps].dim; ++u) cs.push_back({i, ps, u});
      const int nc = static_cast<int>(cs.size());

      // E_i F_j v expanded in the space at mu + alpha_i, for every candidate
      // (j, v) and every parent direction i.
      // X[i][c]: column vector in the parent space of direction i.
      std::map<int, int> parent_slot;  // direction i -> slot of mu + alpha_i
      for (auto [i, ps] : parents) parent_slot[i] = ps;
      std::map<int, std::vector<VectorXd>> X;
      for (auto [i, psi] : parent_slot) {
        std::vector<VectorXd> xs(nc, VectorXd::Zero(spaces[psi].dim));
        for (int c = 0; c < nc; ++c) {
          const auto& [j, psj, v] = cs[c];
          // F_j (E_i v): E_i v lives at mu + alpha_j + alpha_i.
          const MatrixXd& Eij = spaces[psj].E[i];
          if (Eij.size() > 0) {
            IntVector up = spaces[psj].weight + rs.cartan.col(i);
            int slot_up = slot_of.at(wkey(up));
            const MatrixXd& Fdown = spaces[slot_up].F[j];
            if (Fdown.size() > 0) xs[c] += Fdown * Eij.col(v);
          }
          if (i == j) {
            Int m = spaces[psj].weight[i];  // weight(H_i) of v
            xs[c] += q_integer(m, qs[i]) * VectorXd::Unit(spaces[psj].dim, v);
          }
        }
        X[i] = std::move(xs);
      }

      // Gram matrix <F_i u, F_j v> = q_i^{-(mu+alpha_i)(H_i)} <u, X[i][(j,v)]>.
      MatrixXd G(nc, nc);
      for (int r = 0; r < nc; ++r) {
        const auto& [i, psi, u] = cs[r];
        const double kinv = std::pow(qs[i], -static_cast<double>(spaces[psi].weight[i]));
        for (int c = 0; c < nc; ++c) G(r, c) = kinv * X[i][c][u];
      }
      G = ((G + G.transpose()) * 0.5).eval();

      Eigen::SelfAdjointEigenSolver<MatrixXd> es(G);
      const VectorXd ev = es.eigenvalues();  // ascending
      const double emax = ev[nc - 1];
      if (emax <= kZeroFloor * scale) continue;  // weight string ends here
      if (emax < kZeroGuard * scale)
        throw std::runtime_error("Gram scale inside zero guard band at " +
                                 std::to_string(emax / scale));
      scale = std::max(scale, emax);
      int rank = 0;
      for (int k = 0; k < nc; ++k) {
        double rel = ev[k] / emax;
        if (rel > kGuardLow && rel < kGuardHigh)
          throw std::runtime_error("Gram spectrum inside rank guard band at " +
                                   std::to_string(rel));
        if (rel > kRankCutoff) ++rank;
      }
      if (rank == 0) continue;

      total_dim += rank;
      if (total_dim > dim_limit)
        throw std::runtime_error("module dimension exceeds limit " +
                                 std::to_string(dim_limit));

      // Orthonormal combos, largest eigenvalue first, first significant
      // coefficient made positive.
      MatrixXd T(rank, nc);
      for (int k = 0; k < rank; ++k) {
        VectorXd t = es.eigenvectors().col(nc - 1 - k) / std::sqrt(ev[nc - 1 - k]);
        double amax = t.cwiseAbs().maxCoeff();
        for (int c = 0; c < nc; ++c)
          if (std::abs(t[c]) > 1e-8 * amax) {
            if (t[c] < 0) t = -t;
            break;
          }
        T.row(k) = t.transpose();
      }

      Space sp;
      sp.weight = mu;
      sp.depth = depth;
      sp.dim = rank;
      sp.F.assign(n, MatrixXd());
      sp.E.assign(n, MatrixXd());

      // Coordinates of each candidate in the new basis: C = G T^T (nc x rank).
      MatrixXd coords = G * T.transpose();
      for (auto [i, psi] : parent_slot) {
        MatrixXd fblk = MatrixXd::Zero(rank, spaces[psi].dim);
        for (int c = 0; c < nc; ++c)
          if (cs[c].i == i) fblk.col(cs[c].u) = coords.row(c).transpose();
        spaces[psi].F[i] = fblk;
        // E_i b_k = sum_c T(k, c) X[i][c]
        MatrixXd eblk = MatrixXd::Zero(spaces[psi].dim, rank);
        for (int k = 0; k < rank; ++k)
          for (int c = 0; c < nc; ++c)
            if (T(k, c) != 0.0) eblk.col(k) += T(k, c) * X[i][c];
        sp.E[i] = eblk;
      }

      int slot = static_cast<int>(spaces.size());
      slot_of[wkey(mu)] = slot;
      spaces.push_back(std::move(sp));
      next_frontier.push_back(slot);
    }
    frontier = std::move(next_frontier);
  }

  // Assemble; spaces are already in (depth, lex weight) order by construction.
  auto mod = std::make_shared<QModule>();
  mod->rs = rs;
  mod->q = q;
  mod->highest = lambda;
  mod->dim = total_dim;
  int off = 0;
  for (auto& sp : spaces) {
    sp.offset = off;
    mod->weights.push_back(sp.weight);
    mod->weight_offset.push_back(off);
    mod->weight_dim.push_back(sp.dim);
    for (int k = 0; k < sp.dim; ++k) mod->weight_of_basis.push_back(
        static_cast<int>(mod->weights.size()) - 1);
    off += sp.dim;
  }
  mod->E.assign(n, MatrixXd::Zero(total_dim, total_dim));
  mod->F.assign(n, MatrixXd::Zero(total_dim, total_dim));
  mod->Kexp.resize(n, total_dim);
  for (std::size_t s = 0; s < spaces.size(); ++s) {
    const Space& sp = spaces[s];
    for (int i = 0; i < n; ++i) {
      for (int b = 0; b < sp.dim; ++b) mod->Kexp(i, sp.offset + b) =
          static_cast<double>(sp.weight[i]);
      if (sp.F[i].size() > 0) {
        int down = slot_of.at(wkey(IntVector(sp.weight - rs.cartan.col(i))));
        mod->F[i].block(spaces[down].offset, sp.offset, spaces[down].dim, sp.dim) = sp.F[i];
      }
      if (sp.E[i].size() > 0) {
        int up = slot_of.at(wkey(IntVector(sp.weight + rs.cartan.col(i))));
        mod->E[i].block(spaces[up].offset, sp.offset, spaces[up].dim, sp.dim) = sp.E[i];
      }
    }
  }
  return mod;
}

int extremal_index(const QModule& m, const WeylGroup& g, int w) {
  IntVector target = weyl_weight_action(g, w, m.highest);
  int slot = m.weight_slot(target);
  if (slot < 0) throw std::logic_error("extremal weight missing from module");
  if (m.weight_dim[slot] != 1)
    throw std::logic_error("extremal weight space is not one-dimensional");
  return m.weight_offset[slot];
}

MatrixXd borel_submodule(const QModule& m, const WeylGroup& g, int w) {
  const int n = m.rs.rank();
  std::vector<VectorXd> basis;
  basis.push_back(VectorXd::Unit(m.dim, extremal_index(m, g, w)));
  for (std::size_t head = 0; head < basis.size(); ++head) {
    for (int i = 0; i < n; ++i) {
      VectorXd v = m.E[i] * basis[head];
      const double scale = v.norm();
      if (scale < 1e-12) continue;
      for (const VectorXd& b : basis) v -= b.dot(v) * b;
      if (v.norm() > 1e-9 * scale) {
        v.normalize();
        for (int c = 0; c < m.dim; ++c)
          if (std::abs(v[c]) > 1e-8) {
            if (v[c] < 0) v = -v;
            break;
          }
        basis.push_back(v);
      }
    }
  }
  MatrixXd out(m.dim, static_cast<int>(basis.size()));
  for (std::size_t c = 0; c < basis.size(); ++c) out.col(static_cast<int>(c)) = basis[c];
  return out;
}

MatrixCoefficient coefficient(const ModulePtr& m, const VectorXc& eta, const VectorXc& xi) {
  if (eta.size() != m->dim || xi.size() != m->dim)
    throw std::invalid_argument("coefficient vector size mismatch");
  return {m, eta, xi};
}

MatrixCoefficient basis_coefficient(const ModulePtr& m, int eta_idx, int xi_idx) {
  return {m, VectorXc::Unit(m->dim, eta_idx), VectorXc::Unit(m->dim, xi_idx)};
}

AlgebraElement AlgebraElement::unit() {
  AlgebraElement e;
  e.terms.push_back({Complex(1.0), {}});
  return e;
}

AlgebraElement AlgebraElement::from_coefficient(const MatrixCoefficient& c, bool starred) {
  AlgebraElement e;
  e.terms.push_back({Complex(1.0), {AlgebraFactor{c, starred}}});
  return e;
}

AlgebraElement AlgebraElement::operator*(const AlgebraElement& o) const {
  AlgebraElement out;
  for (const auto& a : terms)
    for (const auto& b : o.terms) {
      AlgebraTerm t;
      t.scale = a.scale * b.scale;
      t.word = a.word;
      t.word.insert(t.word.end(), b.word.begin(), b.word.end());
      out.terms.push_back(std::move(t));
    }
  return out;
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& o) const {
  AlgebraElement out = *this;
  out.terms.insert(out.terms.end(), o.terms.begin(), o.terms.end());
  return out;
}

AlgebraElement AlgebraElement::scaled(Complex c) const {
  AlgebraElement out = *this;
  for (auto& t : out.terms) t.scale *= c;
  return out;
}

AlgebraElement AlgebraElement::adjoint() const {
  AlgebraElement out;
  for (const auto& t : terms) {
    AlgebraTerm a;
    a.scale = std::conj(t.scale);
    a.word.assign(t.word.rbegin(), t.word.rend());
    for (auto& f : a.word) f.starred = !f.starred;
    out.terms.push_back(std::move(a));
  }
  return out;
}

AlgebraElement upsilon(const ModulePtr& m, const WeylGroup& g, int w) {
  MatrixCoefficient c = basis_coefficient(m, extremal_index(*m, g, w), 0);
  AlgebraElement e;
  e.terms.push_back({Complex(1.0), {AlgebraFactor{c, true}, AlgebraFactor{c, false}}});
  return e;
}

}  // namespace cgq
