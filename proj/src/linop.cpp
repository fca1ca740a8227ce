#include "cgq/linop.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "cgq/prng.hpp"

namespace cgq {
namespace {

// Block Krylov Rayleigh-Ritz for a symmetric (Hermitian) PSD operator given by
// `gram_apply` (x -> A^H A x) on dimension n. Returns eigenvalue estimates,
// descending. Deterministic for fixed seed/budget.
template <typename Scalar>
std::vector<double> ritz_values(
    const std::function<DynVector<Scalar>(const DynVector<Scalar>&)>& gram_apply,
    Eigen::Index n, int block, int basis_budget, std::uint64_t seed) {
  using Vec = DynVector<Scalar>;
  using Mat = DynMatrix<Scalar>;

  block = static_cast<int>(std::min<Eigen::Index>(block, n));
  basis_budget = static_cast<int>(std::min<Eigen::Index>(basis_budget, n));
  if (block < 1 || basis_budget < 1) return {};

  SplitMix64 rng(seed);
  std::vector<Vec> basis;   // orthonormal Krylov vectors
  std::vector<Vec> images;  // gram_apply of each basis vector, same order
  basis.reserve(basis_budget);
  images.reserve(basis_budget);

  auto orthonormalize_into = [&](Vec v) -> bool {
    const double pre = v.norm();
    if (!(pre > 0.0)) return false;
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& b : basis) v -= b.dot(v) * b;
    const double post = v.norm();
    if (post < 1e-12 * pre || post < 1e-300) return false;
    basis.push_back(v / post);
    return true;
  };

  // Seed block.
  int seeded = 0;
  for (int c = 0; c < block && seeded < basis_budget; ++c) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = Scalar(rng.sreal());
    if (orthonormalize_into(std::move(v))) ++seeded;
  }
  if (basis.empty()) return {};

  std::size_t next_image = 0;
  while (static_cast<int>(basis.size()) < basis_budget || next_image < basis.size()) {
    if (next_image >= basis.size()) break;
    images.push_back(gram_apply(basis[next_image]));
    if (static_cast<int>(basis.size()) < basis_budget)
      orthonormalize_into(images.back());
    ++next_image;
  }

  const int m = static_cast<int>(images.size());
  Mat h(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) h(i, j) = basis[i].dot(images[j]);
  h = ((h + h.adjoint()) * Scalar(0.5)).eval();
  Eigen::SelfAdjointEigenSolver<Mat> eig(h);
  std::vector<double> vals;
  vals.reserve(m);
  for (int i = m - 1; i >= 0; --i) vals.push_back(std::max(0.0, eig.eigenvalues()[i]));
  return vals;
}

std::vector<double> sv_from_ritz(std::vector<double> vals, int k) {
  if (static_cast<int>(vals.size()) > k) vals.resize(k);
  for (double& v : vals) v = std::sqrt(v);
  return vals;
}

}  // namespace

std::vector<double> topk_singular_values(const LinearMap& a, int k, int block,
                                         int basis_budget, std::uint64_t seed) {
  std::function<VectorXd(const VectorXd&)> gram = [&a](const VectorXd& x) {
    VectorXd mid(a.rows()), out(a.cols());
    a.apply(x, mid);
    a.apply_adjoint(mid, out);
    return out;
  };
  return sv_from_ritz(ritz_values<double>(gram, a.cols(), block, basis_budget, seed), k);
}

double operator_norm(const LinearMap& a, int basis_budget, std::uint64_t seed) {
  auto sv = topk_singular_values(a, 1, 2, basis_budget, seed);
  return sv.empty() ? 0.0 : sv[0];
}

std::vector<double> topk_singular_values(const SparseXc& a, int k, int block,
                                         int basis_budget, std::uint64_t seed) {
  std::function<VectorXc(const VectorXc&)> gram = [&a](const VectorXc& x) {
    VectorXc mid = a * x;
    return VectorXc(a.adjoint() * mid);
  };
  return sv_from_ritz(ritz_values<Complex>(gram, a.cols(), block, basis_budget, seed),
                      k);
}

std::vector<double> topk_singular_values_gram(
    const std::function<VectorXc(const VectorXc&)>& gram, Eigen::Index n, int k,
    int block, int basis_budget, std::uint64_t seed) {
  return sv_from_ritz(ritz_values<Complex>(gram, n, block, basis_budget, seed), k);
}

double operator_norm(const SparseXc& a, int basis_budget, std::uint64_t seed) {
  auto sv = topk_singular_values(a, 1, 2, basis_budget, seed);
  return sv.empty() ? 0.0 : sv[0];
}

namespace {

Eigen::Index uf_find(std::vector<Eigen::Index>& p, Eigen::Index x) {
  while (p[x] != x) {
    p[x] = p[p[x]];
    x = p[x];
  }
  return x;
}

void uf_union(std::vector<Eigen::Index>& p, Eigen::Index a, Eigen::Index b) {
  a = uf_find(p, a);
  b = uf_find(p, b);
  if (a != b) p[b] = a;
}

}  // namespace

std::vector<double> clustered_singular_values(const SparseXc& a, int k,
                                              int max_cluster) {
  const Eigen::Index n = a.cols();
  if (k <= 0 || n == 0) return {};

  // Columns sharing a nonzero row belong to one cluster; A^H A is
  // block-diagonal over the clusters, so their spectra are independent.
  std::vector<Eigen::Index> parent(n);
  for (Eigen::Index j = 0; j < n; ++j) parent[j] = j;
  std::unordered_map<Eigen::Index, Eigen::Index> row_rep;
  row_rep.reserve(static_cast<std::size_t>(a.nonZeros()));
  for (Eigen::Index j = 0; j < a.outerSize(); ++j)
    for (SparseXc::InnerIterator it(a, j); it; ++it) {
      auto [pos, fresh] = row_rep.try_emplace(it.row(), j);
      if (!fresh) uf_union(parent, pos->second, j);
    }

  std::unordered_map<Eigen::Index, std::vector<Eigen::Index>> clusters;
  for (Eigen::Index j = 0; j < n; ++j) {
    SparseXc::InnerIterator it(a, j);
    if (!it) continue;  // structurally zero column: singular value 0
    clusters[uf_find(parent, j)].push_back(j);
  }

  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(n));
  for (const auto& [rep, cols] : clusters) {
    const int m = static_cast<int>(cols.size());
    if (m > max_cluster)
      throw std::runtime_error("column cluster of size " + std::to_string(m) +
                               " exceeds the dense limit");
    MatrixXc gram(m, m);
    for (int c = 0; c < m; ++c)
      for (int r = 0; r <= c; ++r) {
        // Merge the sorted row lists of the two columns.
        Complex acc(0.0);
        SparseXc::InnerIterator ir(a, cols[r]), ic(a, cols[c]);
        while (ir && ic) {
          if (ir.row() < ic.row())
            ++ir;
          else if (ic.row() < ir.row())
            ++ic;
          else {
            acc += std::conj(ir.value()) * ic.value();
            ++ir;
            ++ic;
          }
        }
        gram(r, c) = acc;
        gram(c, r) = std::conj(acc);
      }
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(gram, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      vals.push_back(std::sqrt(std::max(0.0, es.eigenvalues()[i])));
  }

  std::sort(vals.begin(), vals.end(), std::greater<double>());
  if (static_cast<int>(vals.size()) > k) vals.resize(k);
  while (static_cast<int>(vals.size()) < k && vals.size() < static_cast<std::size_t>(n))
    vals.push_back(0.0);  // zero columns round out the spectrum
  return vals;
}

}  // namespace cgq
