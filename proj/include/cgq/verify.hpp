#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cgq/qmodule.hpp"
#include "cgq/rep.hpp"

namespace cgq {

enum class Verdict { kPass, kFail, kInconclusive };
const char* verdict_name(Verdict v);

// One verification result. `residuals` are named values the verdict was
// computed from; `threshold` is the primary gate (per-residual gates that use
// other named tolerances are spelled out in `notes`). `runtime_seconds` is
// volatile and must only ever be serialized under a "meta" key.
struct CheckReport {
  std::string check_id;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<std::pair<std::string, double>> residuals;
  double threshold = 0.0;
  Verdict verdict = Verdict::kPass;
  double runtime_seconds = 0.0;
  std::vector<std::string> notes;
};

// Named tolerance table. defaults() lists every knob the checks read together
// with its default; lookups of unknown names throw.
struct Tolerances {
  std::map<std::string, double> named;

  static Tolerances defaults();
  double get(const std::string& name) const;
  void set(const std::string& name, double v);
};

struct VerifyOptions {
  std::string group = "A2";
  double q = 0.5;
  int cutoff = 20;
  int guard_policy = 0;  // extra guard margin on top of tracked guards
  Tolerances tol = Tolerances::defaults();
  std::uint64_t seed = 20260825;
  std::string cache_dir;  // empty: module caching off
};

// Default sample set: one highest-weight generator per fundamental module plus
// `n_random` seeded random words of length <= 2 in fundamental-module basis
// coefficients (optionally starred).
std::vector<std::pair<std::string, AlgebraElement>> sample_elements(
    const RootSystem& rs, double q, std::uint64_t seed, int n_random = 10);

// Generator relation residuals on guard bands plus the analytic boundary
// defect of the determinant relation.
std::vector<CheckReport> check_su2(const VerifyOptions& opts);

// Defining relations of the module matrices: commutators, K-conjugation,
// Serre relations, star compatibility.
CheckReport check_module_relations(const VerifyOptions& opts, const IntVector& lambda);

// Per Weyl element: contractivity on the guard box, tail-compression decay,
// lowest-vector eigenalignment and the spectral gap of the positive invariant
// image.
std::vector<CheckReport> check_lemma2(const VerifyOptions& opts);

// |W| x |W| table of ||pi_v(Upsilon_w)||, classified against Bruhat order with
// an enforced empty band between the zero and nonzero thresholds.
std::vector<CheckReport> check_upsilon(const VerifyOptions& opts);

// Norm monotonicity ||pi_r(x)|| <= ||pi_w(x)|| + slack along Bruhat order over
// the sample set.
std::vector<CheckReport> check_monotonic(const VerifyOptions& opts);

// Essential-norm estimate of pi_w(x) against the max over covers v of the
// twisted-boundary norm, per sample element; inconclusive when the estimate
// has not stabilized in k.
std::vector<CheckReport> check_untwist(const VerifyOptions& opts);

// Same-length separation: ||pi_w(Upsilon_v)|| nonzero iff w = v within each
// length class, computed through the full-torus character sum.
std::vector<CheckReport> check_boundary(const VerifyOptions& opts);

// Compression probe: powers of the invariant image give a projector p0, and
// p0 pi_w(C) p0 lands within tolerance of the unimodular multiple of p0
// predicted by the diagonal symbol.
std::vector<CheckReport> check_lemma5(const VerifyOptions& opts);

// Exact torus bookkeeping: diagonal symbols of the generators, character
// evaluation against the symbol route, path-product and union identities of
// the cover subtori, and restriction/multiplication commutation.
std::vector<CheckReport> check_torus(const VerifyOptions& opts);

// q-continuity: operator distances of coefficient images over a q grid with a
// step-halving ratio, and the exact diagonal oracle for the rank-one case.
std::vector<CheckReport> check_continuity(const VerifyOptions& opts);

// Grid scan used by check_continuity and the scan-q command: for each adjacent
// grid pair, the max image distance over all basis coefficient labels of the
// module; optionally the same at doubled density plus the ratio of maxima.
struct ScanResult {
  std::vector<double> grid;
  std::vector<double> step_norms;
  double max_step = 0.0;
  bool refined = false;
  std::vector<double> fine_grid;
  std::vector<double> fine_step_norms;
  double max_fine_step = 0.0;
  double ratio = 0.0;
};
ScanResult scan_q(const RootSystem& rs, const IntVector& lambda,
                  const std::vector<int>& word, const std::vector<double>& grid,
                  int cutoff, bool refine);

// Selector dispatch: all | su2 | module | lemma2 | upsilon | untwist |
// boundary | torus | continuity. Unknown selectors throw
// std::invalid_argument. `jobs`
// bounds concurrent check groups; output order is independent of timing.
std::vector<CheckReport> run_checks(const VerifyOptions& opts,
                                    const std::string& selector, int jobs = 1);

}  // namespace cgq
