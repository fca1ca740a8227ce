// Acceptance gate: one line per criterion, exit 1 if any fails.
// Every tolerance and budget is pinned here, independent of library defaults.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "cgq/config.hpp"
#include "cgq/linop.hpp"
#include "cgq/qmodule.hpp"
#include "cgq/rep.hpp"
#include "cgq/report.hpp"
#include "cgq/root_system.hpp"
#include "cgq/verify.hpp"
#include "cgq/weyl.hpp"
#include "oracles.hpp"

using namespace cgq;

namespace {

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

int g_failed = 0;

void emit(int id, bool ok, double secs, double budget, const std::string& msg) {
  if (budget > 0 && secs > budget) ok = false;
  if (!ok) g_failed = 1;
  if (budget > 0)
    std::printf("criterion %2d: %s  %7.2fs (budget %.0fs)  %s\n", id,
                ok ? "PASS" : "FAIL", secs, budget, msg.c_str());
  else
    std::printf("criterion %2d: %s  %7.2fs  %s\n", id, ok ? "PASS" : "FAIL", secs,
                msg.c_str());
  std::fflush(stdout);
}

double resid(const CheckReport& r, const std::string& name) {
  for (const auto& [k, v] : r.residuals)
    if (k == name) return v;
  return std::nan("");
}

double max_resid_suffix(const CheckReport& r, const std::string& suffix) {
  double m = -1.0;
  for (const auto& [k, v] : r.residuals)
    if (k.size() >= suffix.size() &&
        k.compare(k.size() - suffix.size(), suffix.size(), suffix) == 0)
      m = std::max(m, v);
  return m;
}

IntVector wt(std::initializer_list<Int> vals) {
  IntVector v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (Int x : vals) v[i++] = x;
  return v;
}

std::vector<Int> to_key(const IntVector& v) {
  return std::vector<Int>(v.data(), v.data() + v.size());
}

char buf[256];

}  // namespace

int main() {
  // 1: generator relations and the determinant boundary defect, N = 32.
  {
    Stopwatch sw;
    bool ok = true;
    double worst = 0.0;
    for (double q : {0.3, 0.5, 0.8}) {
      VerifyOptions o;
      o.q = q;
      o.cutoff = 32;
      auto rs = check_su2(o);
      ok = ok && rs.size() == 1 && rs[0].verdict == Verdict::kPass;
      for (const auto& [k, v] : rs[0].residuals) {
        worst = std::max(worst, v);
        ok = ok && v < 1e-12;
      }
    }
    std::snprintf(buf, sizeof buf,
                  "defining relations and |det - (1 - q^2N)| at q in {0.3,0.5,0.8}, "
                  "N=32, worst residual %.2e < 1e-12",
                  worst);
    emit(1, ok, sw.elapsed(), 5.0, buf);
  }

  // 2: module relations at 1e-10 plus exact weight multiplicities.
  {
    Stopwatch sw;
    bool ok = true;
    double worst = 0.0;
    RootSystem rs = build_root_system("A2");
    for (const IntVector& lambda : {wt({1, 0}), wt({0, 1}), wt({1, 1})}) {
      for (double q : {0.3, 0.5, 0.8}) {
        VerifyOptions o;
        o.group = "A2";
        o.q = q;
        CheckReport r = check_module_relations(o, lambda);
        ok = ok && r.verdict == Verdict::kPass;
        for (const auto& [k, v] : r.residuals) {
          worst = std::max(worst, v);
          ok = ok && v < 1e-10;
        }
      }
      auto mult = oracle::freudenthal_multiplicities(rs, lambda);
      ModulePtr m = build_module(rs, 0.5, lambda);
      long total = 0;
      for (const auto& [w, c] : mult) total += c;
      ok = ok && total == m->dim;
      ok = ok && m->dim == oracle::weyl_dimension(rs, lambda);
      ok = ok && mult.size() == m->weights.size();
      for (std::size_t s = 0; s < m->weights.size(); ++s) {
        auto it = mult.find(to_key(m->weights[s]));
        ok = ok && it != mult.end() &&
             it->second == static_cast<long>(m->weight_dim[s]);
      }
    }
    std::snprintf(buf, sizeof buf,
                  "A2 module relations for omega1, omega2, omega1+omega2 at q in "
                  "{0.3,0.5,0.8}, worst residual %.2e < 1e-10; multiplicities equal "
                  "the recursive oracle",
                  worst);
    emit(2, ok, sw.elapsed(), 30.0, buf);
  }

  // 3: Bruhat order against the subword oracle, and the exact subtorus
  // identities across covers.
  {
    Stopwatch sw;
    bool ok = true;
    for (const char* name : {"A2", "B2", "A3"}) {
      RootSystem rs = build_root_system(name);
      WeylGroup g = build_weyl_group(rs);
      for (int v = 0; v < g.size(); ++v)
        for (int w = 0; w < g.size(); ++w)
          ok = ok && bruhat_leq(g, v, w) == oracle::bruhat_by_subwords(g, v, w);
    }
    for (const char* name : {"A2", "B2"}) {
      VerifyOptions o;
      o.group = name;
      auto tr = check_torus(o);
      ok = ok && tr.size() == 1;
      ok = ok && resid(tr[0], "union_identity_violations") == 0.0;
      ok = ok && resid(tr[0], "path_extension_violations") == 0.0;
    }
    emit(3, ok, sw.elapsed(), 10.0,
         "Bruhat tables equal the subword oracle on A2, B2, A3; cover-union and "
         "path-product lattice identities exact on A2 and B2");
  }

  // 4: reduced-word independence of the singular spectrum, N = 24, top 32.
  {
    Stopwatch sw;
    bool ok = true;
    double worst = 0.0;
    const double q = 0.5;
    const int N = 24;
    RootSystem rs = build_root_system("A2");
    ModulePtr mod = build_module(rs, q, wt({1, 0}));
    Representation ra(q, {0, 1, 0}, N);
    Representation rb(q, {1, 0, 1}, N);
    for (int a = 0; a < 3 && ok; ++a)
      for (int b = 0; b < 3; ++b) {
        MatrixCoefficient c = basis_coefficient(mod, a, b);
        // Torus grading keeps the column clusters small, so the spectra are
        // exact per-cluster eigensolves rather than Krylov estimates.
        auto spa = sparse_of(*ra.image(c));
        auto spb = sparse_of(*rb.image(c));
        if (!spa || !spb) {
          ok = false;
          break;
        }
        auto sa = clustered_singular_values(*spa, 32);
        auto sb = clustered_singular_values(*spb, 32);
        if (sa.size() != sb.size()) {
          ok = false;
          break;
        }
        for (std::size_t i = 0; i < sa.size(); ++i)
          worst = std::max(worst, std::abs(sa[i] - sb[i]));
      }
    ok = ok && worst < 1e-7;
    std::snprintf(buf, sizeof buf,
                  "top-32 singular values of all nine fundamental coefficient images "
                  "agree across both reduced words of w0, worst gap %.2e < 1e-7",
                  worst);
    emit(4, ok, sw.elapsed(), 120.0, buf);
  }

  // 5: Bruhat classification of the invariant-element norm table plus
  // alignment and spectral gap, A2 at N=20 and B2 at N=12.
  {
    Stopwatch sw;
    bool ok = true;
    std::string detail;
    for (auto [name, cutoff] : std::vector<std::pair<const char*, int>>{
             {"A2", 20}, {"B2", 12}}) {
      VerifyOptions o;
      o.group = name;
      o.cutoff = cutoff;
      if (o.tol.get("nonzero") != 1e-2 || o.tol.get("zero") != 1e-6) ok = false;
      auto up = check_upsilon(o);
      ok = ok && up.size() == 1 && up[0].verdict == Verdict::kPass;
      auto l2 = check_lemma2(o);
      for (const auto& r : l2) {
        ok = ok && r.verdict == Verdict::kPass;
        ok = ok && resid(r, "eigen_residual") < 1e-8;
        ok = ok && resid(r, "spectral_gap") > 0.0;
      }
    }
    emit(5, ok, sw.elapsed(), 300.0,
         "norm tables classify exactly as Bruhat >= with bands 1e-6 / 1e-2, vacuum "
         "alignment < 1e-8, spectral gap > 0 (A2 N=20, B2 N=12)");
  }

  // 6: torus bookkeeping: generator symbols exact, character evaluation on 20
  // random pairs, exact cover-composition lattices.
  {
    Stopwatch sw;
    bool ok = true;
    VerifyOptions o;
    o.group = "A2";
    auto tr = check_torus(o);
    ok = ok && tr.size() == 1 && tr[0].verdict == Verdict::kPass;
    ok = ok && resid(tr[0], "tau_gen:1") < 1e-12;
    ok = ok && resid(tr[0], "tau_gen:2") < 1e-12;
    ok = ok && resid(tr[0], "char_eval_max") < 1e-12;
    ok = ok && resid(tr[0], "cover_composition_violations") == 0.0;
    emit(6, ok, sw.elapsed(), 0.0,
         "diagonal symbols of the generators are exact monomials, point characters "
         "match the symbol route to 1e-12, cover compositions compose exactly");
  }

  // 7: essential norms against the untwisted boundary maximum, residual
  // < 5e-2 at N=24 and strictly smaller at N=48.
  {
    Stopwatch sw;
    bool ok = true;
    const std::vector<std::string> words{"s1.s2", "s2.s1", "s1.s2.s1"};
    std::map<std::string, double> res24, res48;
    for (int N : {24, 48}) {
      VerifyOptions o;
      o.group = "A2";
      o.cutoff = N;
      auto rs = check_untwist(o);
      for (const auto& r : rs)
        for (const auto& w : words)
          if (r.check_id == "untwist/A2/w=" + w) {
            ok = ok && r.verdict == Verdict::kPass;
            (N == 24 ? res24 : res48)[w] = max_resid_suffix(r, ":res");
          }
    }
    double worst24 = 0.0;
    for (const auto& w : words) {
      if (!res24.count(w) || !res48.count(w)) {
        ok = false;
        break;
      }
      worst24 = std::max(worst24, res24[w]);
      ok = ok && res24[w] < 5e-2 && res48[w] < res24[w];
    }
    std::snprintf(buf, sizeof buf,
                  "essential-norm estimates vs boundary maxima on s1.s2, s2.s1, w0: "
                  "worst residual %.2e < 5e-2 at N=24, strictly smaller at N=48",
                  worst24);
    emit(7, ok, sw.elapsed(), 600.0, buf);
  }

  // 8: norm monotonicity along the Bruhat order at N=24.
  {
    Stopwatch sw;
    VerifyOptions o;
    o.group = "A2";
    o.cutoff = 24;
    auto rs = check_monotonic(o);
    bool ok = rs.size() == 1 && rs[0].verdict == Verdict::kPass;
    emit(8, ok, sw.elapsed(), 0.0,
         "||pi_r(x)|| <= ||pi_w(x)|| + 1e-3 for all Bruhat pairs r <= w over the "
         "sample set at N=24");
  }

  // 9: q-continuity: exact rank-one oracle plus refinement ratio in [0.3, 0.7].
  {
    Stopwatch sw;
    bool ok = true;
    VerifyOptions o;
    o.group = "A2";
    auto rs = check_continuity(o);
    ok = ok && rs.size() == 2;
    for (const auto& r : rs) ok = ok && r.verdict == Verdict::kPass;
    double ratio = std::nan("");
    for (const auto& r : rs)
      if (r.check_id == "continuity/A2-w0") ratio = resid(r, "ratio");
    ok = ok && ratio >= 0.3 && ratio <= 0.7;
    std::snprintf(buf, sizeof buf,
                  "rank-one grid distances match the diagonal oracle to 1e-12; w0 "
                  "step ratio %.3f inside [0.3, 0.7]",
                  ratio);
    emit(9, ok, sw.elapsed(), 0.0, buf);
  }

  // 10: byte-identical report bodies for identical configs, and thread-count
  // independence of the aggregated order.
  {
    Stopwatch sw;
    bool ok = true;
    VerifyOptions o;
    o.group = "A2";
    o.cutoff = 10;
    auto a = run_checks(o, "upsilon", 1);
    auto b = run_checks(o, "upsilon", 1);
    ok = ok && strip_meta(render_reports(a, "json")) ==
                   strip_meta(render_reports(b, "json"));
    auto c1 = run_checks(o, "torus", 1);
    auto c2 = run_checks(o, "torus", 2);
    ok = ok && strip_meta(render_reports(c1, "json")) ==
                   strip_meta(render_reports(c2, "json"));
    emit(10, ok, sw.elapsed(), 0.0,
         "re-running identical configs reproduces report bodies byte for byte, "
         "with and without worker threads");
  }

  return g_failed;
}
