#pragma once

#include <string>
#include <vector>

#include "cgq/types.hpp"

namespace cgq {

// Finite root system data attached to a symmetrizable Cartan matrix of rank <= 4.
//
// Coordinate conventions used throughout:
//  * roots are stored in simple-root coordinates (beta = sum_j c_j alpha_j),
//  * weights in fundamental-weight coordinates (mu = sum_i m_i omega_i),
//  * coroots in simple-coroot coordinates (h = sum_j g_j H_j).
// The pairing mu(h) is then the plain integer dot product m . g, and the
// fundamental-weight coordinates of a root are A c (Cartan matrix times root
// coordinates).
struct RootSystem {
  IntMatrix cartan;           // a_ij = <alpha_j, alpha_i^vee>
  IntVector sym;              // minimal positive symmetrizers d_i, d_i a_ij = d_j a_ji
  IntMatrix pos_roots;        // columns: positive roots, simple-root coordinates
  IntMatrix pos_coroots;      // columns: their coroots, simple-coroot coordinates
  IntMatrix pos_root_weights; // columns: A * root, fundamental-weight coordinates
  std::string name;           // "A2", "B2", ... or "custom"

  int rank() const { return static_cast<int>(cartan.rows()); }
  int positive_count() const { return static_cast<int>(pos_roots.cols()); }

  // mu(h_gamma) for mu in fundamental-weight coordinates, gamma a positive-root index.
  Int pairing(const IntVector& weight, int gamma) const {
    return weight.dot(pos_coroots.col(gamma));
  }

  // s_i(mu) = mu - m_i alpha_i in fundamental-weight coordinates.
  IntVector simple_reflect_weight(int i, const IntVector& weight) const;

  // s_gamma(mu) for a positive-root index gamma.
  IntVector reflect_weight(int gamma, const IntVector& weight) const;

  IntVector rho() const { return IntVector::Ones(rank()); }
};

// Validates and closes the root system; throws std::invalid_argument on a matrix
// that is not a finite-type Cartan matrix of rank <= 4.
RootSystem build_root_system(const IntMatrix& cartan);

// Named series: A1..A4, B2..B4, C3, C4, D4, G2.
RootSystem build_root_system(const std::string& name);

IntMatrix cartan_matrix(const std::string& name);

}  // namespace cgq
