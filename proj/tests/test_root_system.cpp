#include "doctest.h"

#include <set>
#include <vector>

#include "cgq/root_system.hpp"
#include "oracles.hpp"

using namespace cgq;

namespace {
std::set<std::vector<Int>> column_set(const IntMatrix& m) {
  std::set<std::vector<Int>> out;
  for (int c = 0; c < m.cols(); ++c) {
    std::vector<Int> col;
    for (int r = 0; r < m.rows(); ++r) col.push_back(m(r, c));
    out.insert(col);
  }
  return out;
}
}  // namespace

TEST_CASE("cartan matrices") {
  IntMatrix a2 = cartan_matrix("A2");
  CHECK(a2(0, 0) == 2);
  CHECK(a2(0, 1) == -1);
  CHECK(a2(1, 0) == -1);

  IntMatrix b2 = cartan_matrix("B2");
  CHECK(b2(0, 1) == -1);
  CHECK(b2(1, 0) == -2);

  IntMatrix g2 = cartan_matrix("G2");
  CHECK(g2(0, 1) == -1);
  CHECK(g2(1, 0) == -3);

  CHECK_THROWS_AS(cartan_matrix("Z9"), std::invalid_argument);
  CHECK_THROWS_AS(build_root_system("E8"), std::invalid_argument);
}

TEST_CASE("symmetrizers match the independent minimal solution") {
  for (const char* name : {"A1", "A2", "B2", "C3", "G2", "A3"}) {
    RootSystem rs = build_root_system(name);
    std::vector<int> d = oracle::symmetrizers(rs);
    REQUIRE(rs.sym.size() == static_cast<int>(d.size()));
    for (int i = 0; i < rs.rank(); ++i) CHECK(rs.sym[i] == d[i]);
  }
  CHECK(build_root_system("B2").sym[0] == 2);
  CHECK(build_root_system("B2").sym[1] == 1);
  CHECK(build_root_system("G2").sym[0] == 3);
}

TEST_CASE("positive root and coroot tables") {
  RootSystem a2 = build_root_system("A2");
  CHECK(a2.positive_count() == 3);
  CHECK(column_set(a2.pos_coroots) ==
        std::set<std::vector<Int>>{{1, 0}, {0, 1}, {1, 1}});

  RootSystem b2 = build_root_system("B2");
  CHECK(b2.positive_count() == 4);
  CHECK(column_set(b2.pos_coroots) ==
        std::set<std::vector<Int>>{{1, 0}, {0, 1}, {2, 1}, {1, 1}});

  CHECK(build_root_system("A3").positive_count() == 6);
  CHECK(build_root_system("G2").positive_count() == 6);

  // Root/coroot consistency: mu(h_gamma) by dot product equals the pairing of
  // the fundamental-coordinate root column with the weight.
  for (int p = 0; p < b2.positive_count(); ++p) {
    IntVector fcoords = b2.cartan * b2.pos_roots.col(p);
    for (int i = 0; i < 2; ++i) CHECK(b2.pos_root_weights(i, p) == fcoords[i]);
  }
}

TEST_CASE("pairing and rho") {
  RootSystem a2 = build_root_system("A2");
  IntVector rho = a2.rho();
  CHECK(rho.size() == 2);
  CHECK(rho[0] == 1);
  CHECK(rho[1] == 1);
  // rho pairs to the coroot height: 1, 1, 2 on A2 positives in some order.
  std::multiset<Int> vals;
  for (int p = 0; p < 3; ++p) vals.insert(a2.pairing(rho, p));
  CHECK(vals == std::multiset<Int>{1, 1, 2});
}
