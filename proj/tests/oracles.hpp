// Independent reference implementations used to cross-check the library.
// Everything here is computed from definitions by brute force, without calling
// the code paths under test.
#pragma once

#include <map>
#include <vector>

#include "cgq/qmodule.hpp"
#include "cgq/weyl.hpp"

namespace oracle {

// Order of the reflection group: closure of the weight-action matrices of the
// simple reflections under multiplication.
int weyl_order_by_closure(const cgq::RootSystem& rs);

// Bruhat comparison through the subword property: v <= w iff some subword of
// the canonical reduced word of w is a reduced word of v.
bool bruhat_by_subwords(const cgq::WeylGroup& g, int v, int w);

// All reduced words of w by exhaustive search over words of length l(w).
std::vector<std::vector<int>> reduced_words_exhaustive(const cgq::WeylGroup& g, int w);

// Cover pairs (v, gamma) with v s_gamma = w recomputed from scratch.
std::vector<std::pair<int, int>> covers_exhaustive(const cgq::WeylGroup& g, int w);

// Number of saturated Bruhat chains from v to w via the recomputed covers.
long count_chains(const cgq::WeylGroup& g, int v, int w);

// Minimal positive symmetrizers d_i with d_i a_ij = d_j a_ji.
std::vector<int> symmetrizers(const cgq::RootSystem& rs);

// Classical weight multiplicities of the highest-weight module by the
// Freudenthal recursion; keys are fundamental-weight coordinate vectors.
std::map<std::vector<cgq::Int>, long> freudenthal_multiplicities(
    const cgq::RootSystem& rs, const cgq::IntVector& lambda);

// Product form of the Weyl dimension formula.
long weyl_dimension(const cgq::RootSystem& rs, const cgq::IntVector& lambda);

// Balanced Gaussian binomial straight from the q-integer product definition.
double q_binomial_reference(cgq::Int k, cgq::Int j, double q);

}  // namespace oracle
