#include "cgq/weyl.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace cgq {

namespace {

// Action of s_i as a signed permutation of the positive roots. alpha_i itself is
// the only positive root sent negative by s_i.
std::vector<int> simple_action(const RootSystem& rs, int i,
                               const std::map<std::vector<Int>, int>& index_of) {
  const int p = rs.positive_count();
  std::vector<int> act(p);
  for (int t = 0; t < p; ++t) {
    IntVector c = rs.pos_roots.col(t);
    Int pair_i = rs.cartan.row(i).dot(c);
    IntVector r = c;
    r[i] -= pair_i;
    int sign = 1;
    if ((r.array() <= 0).all() && (r.array() != 0).any()) {
      r = -r;
      sign = -1;
    }
    std::vector<Int> key(r.data(), r.data() + r.size());
    auto it = index_of.find(key);
    if (it == index_of.end()) throw std::logic_error("reflection left the root set");
    act[t] = sign * (it->second + 1);
  }
  return act;
}

std::vector<int> compose(const std::vector<int>& u, const std::vector<int>& v) {
  // (u v)(alpha_t) = u(v(alpha_t))
  std::vector<int> out(v.size());
  for (std::size_t t = 0; t < v.size(); ++t) {
    int s = v[t] > 0 ? 1 : -1;
    int mid = std::abs(v[t]) - 1;
    int img = u[mid];
    out[t] = s * img;
  }
  return out;
}

int neg_count(const std::vector<int>& act) {
  int c = 0;
  for (int x : act) c += (x < 0);
  return c;
}

}  // namespace

WeylGroup build_weyl_group(const RootSystem& rs) {
  WeylGroup g;
  g.rs = rs;
  const int n = rs.rank();
  const int p = rs.positive_count();

  std::map<std::vector<Int>, int> root_index;
  for (int t = 0; t < p; ++t) {
    IntVector c = rs.pos_roots.col(t);
    root_index[{c.data(), c.data() + c.size()}] = t;
  }
  std::vector<std::vector<int>> gen(n);
  for (int i = 0; i < n; ++i) gen[i] = simple_action(rs, i, root_index);

  std::map<std::vector<int>, int> elem_index;
  std::vector<int> idact(p);
  for (int t = 0; t < p; ++t) idact[t] = t + 1;
  g.action.push_back(idact);
  g.canonical_word.push_back({});
  g.length.push_back(0);
  elem_index[idact] = 0;

  // BFS in shortlex order: elements of length L processed in canonical order,
  // letters ascending, so the first word reaching an element is shortlex-minimal.
  for (std::size_t head = 0; head < g.action.size(); ++head) {
    g.right_mul_simple.push_back(std::vector<int>(n, -1));
    for (int i = 0; i < n; ++i) {
      std::vector<int> next = compose(g.action[head], gen[i]);
      auto [it, fresh] = elem_index.try_emplace(next, static_cast<int>(g.action.size()));
      if (fresh) {
        g.action.push_back(next);
        std::vector<int> word = g.canonical_word[head];
        word.push_back(i);
        g.canonical_word.push_back(word);
        g.length.push_back(static_cast<int>(word.size()));
      }
      g.right_mul_simple[head][i] = it->second;
    }
    if (g.action.size() > 1200) throw std::invalid_argument("Weyl group too large");
  }

  for (int w = 0; w < g.size(); ++w) {
    if (g.length[w] != neg_count(g.action[w]))
      throw std::logic_error("length/inversion mismatch");
    if (g.length[w] > g.length[g.longest]) g.longest = w;
  }

  g.reflection.resize(p);
  for (int t = 0; t < p; ++t) {
    // s_gamma(beta) = beta - beta(h_gamma) gamma on root coordinates.
    std::vector<int> act(p);
    for (int b = 0; b < p; ++b) {
      IntVector c = rs.pos_roots.col(b);
      IntVector m = rs.pos_root_weights.col(b);
      IntVector r = c - rs.pairing(m, t) * rs.pos_roots.col(t);
      int sign = 1;
      if ((r.array() <= 0).all() && (r.array() != 0).any()) {
        r = -r;
        sign = -1;
      }
      act[b] = sign * (root_index.at({r.data(), r.data() + r.size()}) + 1);
    }
    auto it = elem_index.find(act);
    if (it == elem_index.end()) throw std::logic_error("reflection not in group table");
    g.reflection[t] = it->second;
  }

  g.inverse.resize(g.size());
  for (int w = 0; w < g.size(); ++w) {
    std::vector<int> word = g.canonical_word[w];
    std::reverse(word.begin(), word.end());
    g.inverse[w] = weyl_from_word(g, word);
  }

  // Downward Bruhat closure: v <= w iff v = w or v <= r for some cover r of w,
  // filled in order of increasing length.
  {
    const int m = g.size();
    g.bruhat.assign(m, std::vector<char>(m, 0));
    std::vector<int> by_length(m);
    for (int i = 0; i < m; ++i) by_length[i] = i;
    std::sort(by_length.begin(), by_length.end(),
              [&](int a, int b) { return g.length[a] < g.length[b]; });
    for (int x : by_length) {
      g.bruhat[x][x] = 1;
      for (auto [r, gamma] : covers(g, x)) {
        (void)gamma;
        for (int v = 0; v < m; ++v) g.bruhat[v][x] |= g.bruhat[v][r];
      }
    }
  }
  return g;
}

int weyl_mult(const WeylGroup& g, int a, int b) {
  int r = a;
  for (int i : g.canonical_word[b]) r = g.right_mul_simple[r][i];
  return r;
}

int weyl_from_word(const WeylGroup& g, const std::vector<int>& word) {
  int r = 0;
  for (int i : word) {
    if (i < 0 || i >= g.rs.rank()) throw std::invalid_argument("letter out of range");
    r = g.right_mul_simple[r][i];
  }
  return r;
}

std::vector<std::vector<int>> reduced_words(const WeylGroup& g, int w) {
  if (w == 0) return {{}};
  std::vector<std::vector<int>> out;
  for (int i = 0; i < g.rs.rank(); ++i) {
    int v = g.right_mul_simple[w][i];
    if (g.length[v] != g.length[w] - 1) continue;
    for (auto word : reduced_words(g, v)) {
      word.push_back(i);
      out.push_back(std::move(word));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool bruhat_leq(const WeylGroup& g, int v, int w) {
  if (v < 0 || w < 0 || v >= g.size() || w >= g.size())
    throw std::out_of_range("element index outside the group table");
  return g.bruhat[v][w] != 0;
}

std::vector<std::pair<int, int>> covers(const WeylGroup& g, int w) {
  std::vector<std::pair<int, int>> out;
  for (int t = 0; t < g.rs.positive_count(); ++t) {
    int v = weyl_mult(g, w, g.reflection[t]);
    if (g.length[v] == g.length[w] - 1) out.emplace_back(v, t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<BruhatPath> enumerate_paths(const WeylGroup& g, int v, int w) {
  if (v == w) {
    BruhatPath trivial;
    trivial.verts = {v};
    return {trivial};
  }
  if (!bruhat_leq(g, v, w) || g.length[v] >= g.length[w]) return {};
  std::vector<BruhatPath> out;
  for (auto [r, gamma] : covers(g, w)) {
    if (!bruhat_leq(g, v, r)) continue;
    for (BruhatPath path : enumerate_paths(g, v, r)) {
      path.verts.push_back(w);
      path.labels.push_back(gamma);
      out.push_back(std::move(path));
    }
  }
  return out;
}

IntVector weyl_weight_action(const WeylGroup& g, int w, const IntVector& weight) {
  // w = s_{i1} ... s_{im} acts left to right on the target: apply the word back
  // to front so that (uv)(mu) = u(v(mu)).
  IntVector m = weight;
  const auto& word = g.canonical_word[w];
  for (auto it = word.rbegin(); it != word.rend(); ++it)
    m = g.rs.simple_reflect_weight(*it, m);
  return m;
}

}  // namespace cgq
