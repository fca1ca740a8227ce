#pragma once

#include <complex>
#include <cstdint>
#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace cgq {

using Complex = std::complex<double>;

template <class Scalar>
using DynMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using DynVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXc = DynMatrix<Complex>;
using VectorXc = DynVector<Complex>;
using MatrixXd = DynMatrix<double>;
using VectorXd = DynVector<double>;

// Integer lattice/combinatorics scalar. 64-bit: rank <= 4 keeps every entry tiny,
// but intermediate Hermite reductions can grow past 32 bits.
using Int = std::int64_t;
using IntMatrix = DynMatrix<Int>;
using IntVector = DynVector<Int>;

using SparseXc = Eigen::SparseMatrix<Complex>;
using SparseXd = Eigen::SparseMatrix<double>;

// Inner product, linear in the first slot, conjugate-linear in the second.
inline Complex inner(const VectorXc& x, const VectorXc& y) { return y.dot(x); }
inline double inner(const VectorXd& x, const VectorXd& y) { return y.dot(x); }

}  // namespace cgq
