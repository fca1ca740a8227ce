#include "doctest.h"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "cgq/root_system.hpp"
#include "cgq/verify.hpp"

using namespace cgq;

namespace {

double resid_named(const CheckReport& r, const std::string& name) {
  for (const auto& [k, v] : r.residuals)
    if (k == name) return v;
  FAIL("missing residual " << name << " in " << r.check_id);
  return 0.0;
}

double max_resid(const CheckReport& r) {
  double m = 0.0;
  for (const auto& [k, v] : r.residuals) m = std::max(m, v);
  return m;
}

IntVector make_weight(std::initializer_list<Int> vals) {
  IntVector v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (Int x : vals) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("tolerance table lists every knob and rejects unknown names") {
  Tolerances t = Tolerances::defaults();
  for (const char* name :
       {"su2-relation", "boundary-defect", "module-relation", "nonzero", "zero",
        "contraction", "alignment", "gap-floor", "tail-ratio", "untwist",
        "essnorm-stabilize", "monotonic-slack", "exact", "lemma5", "ratio-low",
        "ratio-high"})
    CHECK_NOTHROW(t.get(name));
  CHECK(t.get("su2-relation") == 1e-12);
  CHECK(t.get("zero") == 1e-6);
  CHECK(t.get("nonzero") == 1e-2);
  CHECK_THROWS_AS(t.get("no-such-knob"), std::invalid_argument);
  CHECK_THROWS_AS(t.set("no-such-knob", 1.0), std::invalid_argument);
  t.set("zero", 1e-3);
  CHECK(t.get("zero") == 1e-3);
}

TEST_CASE("generator relations hold on the guard band") {
  VerifyOptions o;
  o.q = 0.5;
  o.cutoff = 16;
  auto reports = check_su2(o);
  REQUIRE(reports.size() == 1);
  const CheckReport& r = reports[0];
  CHECK(r.check_id == "su2/relations");
  CHECK(r.verdict == Verdict::kPass);
  CHECK(max_resid(r) < 1e-12);
  CHECK(resid_named(r, "boundary_defect_error") < 1e-12);
}

TEST_CASE("module relations hold for the doubly generated weight") {
  VerifyOptions o;
  o.group = "A2";
  o.q = 0.7;
  CheckReport r = check_module_relations(o, make_weight({1, 1}));
  CHECK(r.check_id == "module/relations/1-1");
  CHECK(r.verdict == Verdict::kPass);
  CHECK(max_resid(r) < 1e-10);
  bool has_dim = false;
  for (const auto& [k, v] : r.inputs)
    if (k == "dim") {
      has_dim = true;
      CHECK(v == "8");
    }
  CHECK(has_dim);
}

TEST_CASE("invariant image checks pass per Weyl element at a small cutoff") {
  VerifyOptions o;
  o.group = "A2";
  o.cutoff = 10;
  auto reports = check_lemma2(o);
  REQUIRE(reports.size() == 6);
  for (const auto& r : reports) {
    INFO(r.check_id);
    CHECK(r.verdict == Verdict::kPass);
  }
}

TEST_CASE("norm table of invariant elements classifies the Bruhat order") {
  VerifyOptions o;
  o.group = "A2";
  o.cutoff = 10;
  auto reports = check_upsilon(o);
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].check_id == "upsilon/A2");
  CHECK(reports[0].verdict == Verdict::kPass);
  CHECK(reports[0].residuals.size() == 36);
}

TEST_CASE("boundary untwisting approximates essential norms in rank one") {
  VerifyOptions o;
  o.group = "A1";
  o.cutoff = 24;
  auto reports = check_untwist(o);
  REQUIRE(reports.size() == 1);
  const CheckReport& r = reports[0];
  CHECK(r.check_id == "untwist/A1/w=s1");
  CHECK(r.verdict == Verdict::kPass);
  double worst = 0.0;
  for (const auto& [k, v] : r.residuals)
    if (k.size() > 4 && k.substr(k.size() - 4) == ":res") worst = std::max(worst, v);
  CHECK(worst < 5e-2);
}

TEST_CASE("q scan steps shrink roughly linearly under grid refinement") {
  auto rs = build_root_system("A1");
  std::vector<double> grid{0.3, 0.4, 0.5, 0.6, 0.7};
  ScanResult s = scan_q(rs, make_weight({1}), {0}, grid, 12, true);
  REQUIRE(s.grid.size() == 5);
  REQUIRE(s.step_norms.size() == 4);
  CHECK(s.max_step > 0.0);
  REQUIRE(s.refined);
  REQUIRE(s.fine_grid.size() == 9);
  REQUIRE(s.fine_step_norms.size() == 8);
  CHECK(s.ratio > 0.2);
  CHECK(s.ratio < 0.8);
}

TEST_CASE("selector dispatch is validated and order is thread independent") {
  VerifyOptions o;
  o.group = "A2";
  o.cutoff = 10;
  CHECK_THROWS_AS(run_checks(o, "no-such-check"), std::invalid_argument);

  auto su2 = run_checks(o, "su2");
  REQUIRE(su2.size() == 1);
  CHECK(su2[0].check_id == "su2/relations");

  // The final report list is sorted by check_id.
  auto mods = run_checks(o, "module");
  REQUIRE(mods.size() == 3);
  CHECK(mods[0].check_id == "module/relations/0-1");
  CHECK(mods[1].check_id == "module/relations/1-0");
  CHECK(mods[2].check_id == "module/relations/1-1");

  auto seq = run_checks(o, "torus", 1);
  auto par = run_checks(o, "torus", 2);
  REQUIRE(seq.size() == par.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    CHECK(seq[i].check_id == par[i].check_id);
    CHECK(seq[i].verdict == par[i].verdict);
  }
}
