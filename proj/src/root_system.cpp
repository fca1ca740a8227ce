#include "cgq/root_system.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace cgq {

namespace {

constexpr int kMaxRank = 4;

// Lexicographic column order after height; fixes the storage order of the
// positive roots once and for all (everything downstream indexes into it).
bool root_less(const IntVector& a, const IntVector& b) {
  Int ha = a.sum(), hb = b.sum();
  if (ha != hb) return ha < hb;
  for (int i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

std::vector<Int> leading_minors(const IntMatrix& m) {
  // Integer determinants via fraction-free Gaussian elimination would be
  // overkill at rank <= 4; use doubles and round (entries are tiny).
  std::vector<Int> out;
  for (int k = 1; k <= m.rows(); ++k) {
    Eigen::MatrixXd top = m.topLeftCorner(k, k).cast<double>();
    out.push_back(static_cast<Int>(std::llround(top.determinant())));
  }
  return out;
}

}  // namespace

IntVector RootSystem::simple_reflect_weight(int i, const IntVector& weight) const {
  // alpha_i in fundamental-weight coordinates is the i-th column of the Cartan matrix.
  return weight - weight[i] * cartan.col(i);
}

IntVector RootSystem::reflect_weight(int gamma, const IntVector& weight) const {
  return weight - pairing(weight, gamma) * pos_root_weights.col(gamma);
}

RootSystem build_root_system(const IntMatrix& cartan) {
  const int n = static_cast<int>(cartan.rows());
  if (n < 1 || n > kMaxRank || cartan.cols() != n)
    throw std::invalid_argument("Cartan matrix must be square with rank 1.." +
                                std::to_string(kMaxRank));
  for (int i = 0; i < n; ++i) {
    if (cartan(i, i) != 2) throw std::invalid_argument("Cartan diagonal must be 2");
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (cartan(i, j) > 0) throw std::invalid_argument("off-diagonal entries must be <= 0");
      if ((cartan(i, j) == 0) != (cartan(j, i) == 0))
        throw std::invalid_argument("zero pattern must be symmetric");
    }
  }

  // Minimal positive symmetrizers: propagate d_j/d_i = a_ij/a_ji along edges,
  // then scale the rational solution to minimal positive integers.
  std::vector<long double> d(n, 0.0L);
  std::vector<int> todo;
  for (int start = 0; start < n; ++start) {
    if (d[start] != 0.0L) continue;
    d[start] = 1.0L;
    todo.assign(1, start);
    while (!todo.empty()) {
      int i = todo.back();
      todo.pop_back();
      for (int j = 0; j < n; ++j) {
        if (i == j || cartan(i, j) == 0) continue;
        long double dj = d[i] * static_cast<long double>(cartan(i, j)) /
                         static_cast<long double>(cartan(j, i));
        if (d[j] == 0.0L) {
          d[j] = dj;
          todo.push_back(j);
        } else if (std::abs(d[j] - dj) > 1e-9L) {
          throw std::invalid_argument("Cartan matrix is not symmetrizable");
        }
      }
    }
  }
  IntVector sym(n);
  for (int denom = 1; denom <= 24; ++denom) {
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      long double v = d[i] * denom;
      if (std::abs(v - std::llround(v)) > 1e-6L) ok = false;
    }
    if (ok) {
      for (int i = 0; i < n; ++i) sym[i] = static_cast<Int>(std::llround(d[i] * denom));
      break;
    }
    if (denom == 24) throw std::invalid_argument("could not scale symmetrizers");
  }
  Int g = 0;
  for (int i = 0; i < n; ++i) g = std::gcd(g, sym[i]);
  for (int i = 0; i < n; ++i) sym[i] /= g;

  // Finite type <=> symmetrized matrix positive definite.
  IntMatrix b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = sym[i] * cartan(i, j);
  if (!b.isApprox(b.transpose()))
    throw std::invalid_argument("symmetrization failed");
  for (Int minor : leading_minors(b))
    if (minor <= 0) throw std::invalid_argument("Cartan matrix is not of finite type");

  // Reflection closure starting from the simple roots. s_i on root coordinates:
  // c -> c - (sum_j a_ij c_j) e_i.
  auto key = [](const IntVector& v) {
    std::vector<Int> k(v.data(), v.data() + v.size());
    return k;
  };
  std::set<std::vector<Int>> seen;
  std::vector<IntVector> roots;
  for (int i = 0; i < n; ++i) {
    IntVector e = IntVector::Zero(n);
    e[i] = 1;
    roots.push_back(e);
    seen.insert(key(e));
  }
  for (std::size_t head = 0; head < roots.size(); ++head) {
    IntVector c = roots[head];
    for (int i = 0; i < n; ++i) {
      Int pair_i = cartan.row(i).dot(c);
      IntVector r = c;
      r[i] -= pair_i;
      if ((r.array() >= 0).all() && seen.insert(key(r)).second) roots.push_back(r);
    }
    if (roots.size() > 1024) throw std::invalid_argument("root closure diverged");
  }
  std::sort(roots.begin(), roots.end(), root_less);

  RootSystem rs;
  rs.cartan = cartan;
  rs.sym = sym;
  rs.name = "custom";
  const int p = static_cast<int>(roots.size());
  rs.pos_roots.resize(n, p);
  rs.pos_coroots.resize(n, p);
  rs.pos_root_weights.resize(n, p);
  for (int t = 0; t < p; ++t) {
    const IntVector& c = roots[t];
    rs.pos_roots.col(t) = c;
    rs.pos_root_weights.col(t) = cartan * c;
    Int norm2 = c.dot(b * c);  // (beta, beta) with (alpha_i, alpha_j) = d_i a_ij
    for (int j = 0; j < n; ++j) {
      Int num = 2 * sym[j] * c[j];
      if (num % norm2 != 0)
        throw std::invalid_argument("coroot coordinates not integral");
      rs.pos_coroots(j, t) = num / norm2;
    }
  }
  return rs;
}

IntMatrix cartan_matrix(const std::string& name) {
  if (name.size() != 2) throw std::invalid_argument("unknown group name: " + name);
  const char series = name[0];
  const int n = name[1] - '0';
  auto chain = [&](int len) {
    IntMatrix a = IntMatrix::Zero(len, len);
    for (int i = 0; i < len; ++i) {
      a(i, i) = 2;
      if (i + 1 < len) a(i, i + 1) = a(i + 1, i) = -1;
    }
    return a;
  };
  if (series == 'A' && n >= 1 && n <= 4) return chain(n);
  if (series == 'B' && n >= 2 && n <= 4) {
    IntMatrix a = chain(n);
    a(n - 1, n - 2) = -2;  // last simple root short
    return a;
  }
  if (series == 'C' && n >= 2 && n <= 4) {
    IntMatrix a = chain(n);
    a(n - 2, n - 1) = -2;  // last simple root long
    return a;
  }
  if (series == 'D' && n == 4) {
    IntMatrix a = IntMatrix::Zero(4, 4);
    for (int i = 0; i < 4; ++i) a(i, i) = 2;
    a(0, 1) = a(1, 0) = -1;
    a(1, 2) = a(2, 1) = -1;
    a(1, 3) = a(3, 1) = -1;
    return a;
  }
  if (series == 'G' && n == 2) {
    IntMatrix a(2, 2);
    a << 2, -1, -3, 2;  // alpha_1 long: d = (3, 1)
    return a;
  }
  throw std::invalid_argument("unknown group name: " + name);
}

RootSystem build_root_system(const std::string& name) {
  RootSystem rs = build_root_system(cartan_matrix(name));
  rs.name = name;
  return rs;
}

}  // namespace cgq
