#include "doctest.h"

#include <algorithm>
#include <set>

#include "cgq/weyl.hpp"
#include "oracles.hpp"

using namespace cgq;

TEST_CASE("group orders and longest lengths") {
  struct Row { const char* name; int order; int longest_len; };
  for (Row row : {Row{"A1", 2, 1}, Row{"A2", 6, 3}, Row{"B2", 8, 4},
                  Row{"G2", 12, 6}, Row{"A3", 24, 6}}) {
    WeylGroup g = build_weyl_group(build_root_system(row.name));
    CHECK(g.size() == row.order);
    CHECK(g.size() == oracle::weyl_order_by_closure(g.rs));
    CHECK(g.length[g.longest] == row.longest_len);
    CHECK(weyl_mult(g, g.longest, g.longest) == 0);
    for (int w = 0; w < g.size(); ++w) {
      CHECK(weyl_mult(g, w, g.inverse[w]) == 0);
      CHECK(weyl_from_word(g, g.canonical_word[w]) == w);
      CHECK(static_cast<int>(g.canonical_word[w].size()) == g.length[w]);
    }
  }
}

TEST_CASE("reduced words against exhaustive enumeration") {
  for (const char* name : {"A2", "B2"}) {
    WeylGroup g = build_weyl_group(build_root_system(name));
    for (int w = 0; w < g.size(); ++w) {
      auto got = reduced_words(g, w);
      auto want = oracle::reduced_words_exhaustive(g, w);
      std::sort(got.begin(), got.end());
      std::sort(want.begin(), want.end());
      CHECK(got == want);
    }
  }
  WeylGroup a3 = build_weyl_group(build_root_system("A3"));
  CHECK(reduced_words(a3, a3.longest).size() == 16);
  WeylGroup a2 = build_weyl_group(build_root_system("A2"));
  CHECK(reduced_words(a2, a2.longest).size() == 2);
}

TEST_CASE("bruhat order equals the subword oracle") {
  for (const char* name : {"A2", "B2", "A3"}) {
    WeylGroup g = build_weyl_group(build_root_system(name));
    for (int v = 0; v < g.size(); ++v)
      for (int w = 0; w < g.size(); ++w)
        CHECK(bruhat_leq(g, v, w) == oracle::bruhat_by_subwords(g, v, w));
  }
}

TEST_CASE("covers against exhaustive reflection sweep") {
  for (const char* name : {"A2", "B2", "A3"}) {
    WeylGroup g = build_weyl_group(build_root_system(name));
    for (int w = 0; w < g.size(); ++w) {
      auto got = covers(g, w);
      std::sort(got.begin(), got.end());
      CHECK(got == oracle::covers_exhaustive(g, w));
      for (auto [v, gamma] : got) {
        CHECK(weyl_mult(g, v, g.reflection[gamma]) == w);
        CHECK(g.length[v] == g.length[w] - 1);
      }
    }
  }
  WeylGroup a2 = build_weyl_group(build_root_system("A2"));
  CHECK(covers(a2, a2.longest).size() == 2);
  CHECK(covers(a2, 0).empty());
}

TEST_CASE("saturated chains match the recursive count") {
  for (const char* name : {"A2", "B2"}) {
    WeylGroup g = build_weyl_group(build_root_system(name));
    for (int v = 0; v < g.size(); ++v)
      for (int w = 0; w < g.size(); ++w) {
        auto paths = enumerate_paths(g, v, w);
        if (!bruhat_leq(g, v, w)) {
          CHECK(paths.empty());
          continue;
        }
        CHECK(static_cast<long>(paths.size()) == oracle::count_chains(g, v, w));
        for (const BruhatPath& p : paths) {
          REQUIRE(!p.verts.empty());
          CHECK(p.verts.front() == v);
          CHECK(p.verts.back() == w);
          REQUIRE(p.labels.size() + 1 == p.verts.size());
          for (std::size_t j = 0; j < p.labels.size(); ++j) {
            CHECK(weyl_mult(g, p.verts[j], g.reflection[p.labels[j]]) ==
                  p.verts[j + 1]);
            CHECK(g.length[p.verts[j + 1]] == g.length[p.verts[j]] + 1);
          }
        }
      }
  }
}

TEST_CASE("weight action") {
  WeylGroup g = build_weyl_group(build_root_system("A2"));
  IntVector rho = g.rs.rho();
  IntVector neg = weyl_weight_action(g, g.longest, rho);
  CHECK(neg[0] == -1);
  CHECK(neg[1] == -1);
  // s_i omega_i = omega_i - alpha_i.
  for (int i = 0; i < 2; ++i) {
    IntVector omega = IntVector::Zero(2);
    omega[i] = 1;
    IntVector got = weyl_weight_action(g, weyl_from_word(g, {i}), omega);
    IntVector want = omega - g.rs.cartan.col(i);
    CHECK((got - want).cwiseAbs().maxCoeff() == 0);
  }
}
