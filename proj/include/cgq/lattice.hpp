#pragma once

#include <vector>

#include "cgq/weyl.hpp"

namespace cgq {

// Column-style Hermite normal form. Input columns generate a sublattice of Z^n;
// the result has one column per lattice rank, pivots positive, entries left of a
// pivot reduced into [0, pivot). Zero columns are dropped, so equal lattices
// produce identical matrices.
IntMatrix hermite_normal_form(const IntMatrix& columns);

// Sublattice of the coweight lattice Z^n (simple-coroot coordinates), stored
// saturated (span intersected with Z^n) and in canonical Hermite form, so two
// lattices are equal exactly when they generate the same subtorus.
struct TorusLattice {
  int ambient = 0;
  IntMatrix basis;  // n x rank, saturated HNF; rank 0 = trivial subgroup

  int rank() const { return static_cast<int>(basis.cols()); }

  // Integer pairings of a weight (fundamental-weight coordinates) with the
  // basis columns; the exponent vector of the restricted character z^mu.
  IntVector pair_weight(const IntVector& weight) const {
    IntVector out(rank());
    for (int k = 0; k < rank(); ++k) out[k] = weight.dot(basis.col(k));
    return out;
  }
};

TorusLattice lattice_from_columns(int ambient, const IntMatrix& columns);
TorusLattice lattice_sum(const TorusLattice& a, const TorusLattice& b);
bool lattice_equal(const TorusLattice& a, const TorusLattice& b);
bool lattice_less(const TorusLattice& a, const TorusLattice& b);  // canonical order

// span(a) contained in span(b), decided exactly over the integers.
bool lattice_span_subset(const TorusLattice& a, const TorusLattice& b);

// Lattice spanned by the coroots of the path labels.
TorusLattice torus_of_path(const WeylGroup& g, const BruhatPath& path);

// Canonically sorted, deduplicated lattices of all saturated chains v -> w.
std::vector<TorusLattice> torus_union(const WeylGroup& g, int v, int w);

}  // namespace cgq
