#pragma once

#include <vector>

#include "cgq/root_system.hpp"

namespace cgq {

// Full element table of a finite Weyl group. Elements are identified by their
// signed-permutation action on the positive roots; indices into `elements` are
// the handles used everywhere else. Index 0 is the identity.
struct WeylGroup {
  RootSystem rs;

  // action[w][t] = +-(u+1): w(alpha_t) = +-alpha_u. Signed one-based to keep 0 free.
  std::vector<std::vector<int>> action;
  std::vector<std::vector<int>> canonical_word;  // shortlex-minimal reduced word
  std::vector<int> length;
  std::vector<std::vector<int>> right_mul_simple;  // [w][i] -> index of w s_i
  std::vector<int> reflection;                     // [gamma] -> index of s_gamma
  std::vector<int> inverse;                        // [w] -> index of w^{-1}
  std::vector<std::vector<char>> bruhat;           // [v][w] -> v <= w in Bruhat order
  int longest = 0;

  int size() const { return static_cast<int>(action.size()); }
};

WeylGroup build_weyl_group(const RootSystem& rs);

// Group multiplication through the action table.
int weyl_mult(const WeylGroup& g, int a, int b);

// Index of the element given by a word in simple reflections (need not be reduced).
int weyl_from_word(const WeylGroup& g, const std::vector<int>& word);

// All reduced words for w, lexicographically sorted.
std::vector<std::vector<int>> reduced_words(const WeylGroup& g, int w);

bool bruhat_leq(const WeylGroup& g, int v, int w);

// Cover pairs below w: (v, gamma) with v s_gamma = w, l(v) = l(w) - 1.
// gamma is a positive-root index; for fixed (v, w) the label is unique.
std::vector<std::pair<int, int>> covers(const WeylGroup& g, int w);

// Saturated labeled chain v = verts[0] < verts[1] < ... < verts.back() = w with
// verts[j] s_{labels[j]} = verts[j+1].
struct BruhatPath {
  std::vector<int> verts;
  std::vector<int> labels;
};

// All saturated chains from v to w, deterministic order. Empty if !(v <= w);
// a single empty path if v == w.
std::vector<BruhatPath> enumerate_paths(const WeylGroup& g, int v, int w);

// w acting on a weight in fundamental-weight coordinates.
IntVector weyl_weight_action(const WeylGroup& g, int w, const IntVector& weight);

}  // namespace cgq
