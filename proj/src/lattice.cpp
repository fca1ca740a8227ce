#include "cgq/lattice.hpp"

#include <algorithm>
#include <cstdlib>

namespace cgq {

IntMatrix hermite_normal_form(const IntMatrix& columns) {
  const int n = static_cast<int>(columns.rows());
  std::vector<IntVector> cols;
  for (int j = 0; j < columns.cols(); ++j)
    if (!columns.col(j).isZero()) cols.push_back(columns.col(j));

  int c = 0;  // next pivot column slot
  for (int r = 0; r < n && c < static_cast<int>(cols.size()); ++r) {
    // Euclid across columns c.. until at most one nonzero remains in row r.
    while (true) {
      int j0 = -1, j1 = -1;
      for (int j = c; j < static_cast<int>(cols.size()); ++j) {
        if (cols[j][r] == 0) continue;
        if (j0 < 0) j0 = j;
        else { j1 = j; break; }
      }
      if (j1 < 0) {
        if (j0 >= 0) std::swap(cols[c], cols[j0]);
        break;
      }
      if (std::abs(cols[j0][r]) > std::abs(cols[j1][r])) std::swap(cols[j0], cols[j1]);
      Int q = cols[j1][r] / cols[j0][r];
      cols[j1] -= q * cols[j0];
    }
    if (cols[c][r] == 0) continue;  // no pivot in this row
    if (cols[c][r] < 0) cols[c] = -cols[c];
    // Reduce pivot-row entries of the earlier columns into [0, pivot).
    for (int j = 0; j < c; ++j) {
      Int q = cols[j][r] / cols[c][r];
      if (cols[j][r] - q * cols[c][r] < 0) q -= 1;
      cols[j] -= q * cols[c];
    }
    ++c;
  }
  cols.resize(c);

  IntMatrix out(n, c);
  for (int j = 0; j < c; ++j) out.col(j) = cols[j];
  return out;
}

// Basis of span_Q(basis) intersected with Z^n: diagonalize U*basis*V by integer
// row and column operations while tracking U^{-1}; the first rank(basis) columns
// of U^{-1} generate the saturation.
static IntMatrix saturate_columns(const IntMatrix& basis) {
  const int n = static_cast<int>(basis.rows());
  const int m = static_cast<int>(basis.cols());
  IntMatrix work = basis;
  IntMatrix uinv = IntMatrix::Identity(n, n);

  int t = 0;
  for (; t < m && t < n; ++t) {
    while (true) {
      int pr = -1, pc = -1;
      Int best = 0;
      for (int i = t; i < n; ++i)
        for (int j = t; j < m; ++j)
          if (work(i, j) != 0 && (pr < 0 || std::abs(work(i, j)) < best)) {
            pr = i; pc = j; best = std::abs(work(i, j));
          }
      if (pr < 0) break;
      if (pr != t) {
        work.row(t).swap(work.row(pr));
        uinv.col(t).swap(uinv.col(pr));
      }
      if (pc != t) work.col(t).swap(work.col(pc));
      if (work(t, t) < 0) {
        work.row(t) = -work.row(t);
        uinv.col(t) = -uinv.col(t);
      }
      bool clean = true;
      for (int i = t + 1; i < n; ++i) {
        Int r = work(i, t) / work(t, t);
        if (r != 0) {
          work.row(i) -= r * work.row(t);
          uinv.col(t) += r * uinv.col(i);
        }
        if (work(i, t) != 0) clean = false;
      }
      for (int j = t + 1; j < m; ++j) {
        Int r = work(t, j) / work(t, t);
        if (r != 0) work.col(j) -= r * work.col(t);
        if (work(t, j) != 0) clean = false;
      }
      if (clean) break;
    }
    if (work(t, t) == 0) break;
  }
  return uinv.leftCols(t);
}

TorusLattice lattice_from_columns(int ambient, const IntMatrix& columns) {
  TorusLattice l;
  l.ambient = ambient;
  l.basis = hermite_normal_form(saturate_columns(hermite_normal_form(columns)));
  return l;
}

TorusLattice lattice_sum(const TorusLattice& a, const TorusLattice& b) {
  IntMatrix joined(a.ambient, a.rank() + b.rank());
  joined << a.basis, b.basis;
  return lattice_from_columns(a.ambient, joined);
}

bool lattice_equal(const TorusLattice& a, const TorusLattice& b) {
  return a.ambient == b.ambient && a.rank() == b.rank() && a.basis == b.basis;
}

bool lattice_span_subset(const TorusLattice& a, const TorusLattice& b) {
  if (a.rank() == 0) return true;
  if (a.rank() > b.rank()) return false;
  IntMatrix joined(a.ambient, a.rank() + b.rank());
  joined << b.basis, a.basis;
  return hermite_normal_form(joined).cols() == b.rank();
}

bool lattice_less(const TorusLattice& a, const TorusLattice& b) {
  if (a.rank() != b.rank()) return a.rank() < b.rank();
  for (int j = 0; j < a.rank(); ++j)
    for (int i = 0; i < a.ambient; ++i)
      if (a.basis(i, j) != b.basis(i, j)) return a.basis(i, j) < b.basis(i, j);
  return false;
}

TorusLattice torus_of_path(const WeylGroup& g, const BruhatPath& path) {
  const int n = g.rs.rank();
  IntMatrix cols(n, static_cast<int>(path.labels.size()));
  for (std::size_t j = 0; j < path.labels.size(); ++j)
    cols.col(static_cast<int>(j)) = g.rs.pos_coroots.col(path.labels[j]);
  return lattice_from_columns(n, cols);
}

std::vector<TorusLattice> torus_union(const WeylGroup& g, int v, int w) {
  std::vector<TorusLattice> out;
  for (const BruhatPath& path : enumerate_paths(g, v, w)) {
    TorusLattice l = torus_of_path(g, path);
    bool dup = false;
    for (const TorusLattice& have : out)
      if (lattice_equal(have, l)) { dup = true; break; }
    if (!dup) out.push_back(std::move(l));
  }
  std::sort(out.begin(), out.end(), lattice_less);
  return out;
}

}  // namespace cgq
