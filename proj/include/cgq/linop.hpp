#pragma once

#include <functional>
#include <vector>

#include "cgq/types.hpp"

namespace cgq {

// Matrix-free real linear map. Norm routines only probe it through
// apply/apply_adjoint, so implementations can contract lazily.
class LinearMap {
 public:
  virtual ~LinearMap() = default;
  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const = 0;
  virtual void apply(const VectorXd& x, VectorXd& y) const = 0;
  virtual void apply_adjoint(const VectorXd& x, VectorXd& y) const = 0;
};

class DenseMap final : public LinearMap {
 public:
  explicit DenseMap(MatrixXd m) : m_(std::move(m)) {}
  Eigen::Index rows() const override { return m_.rows(); }
  Eigen::Index cols() const override { return m_.cols(); }
  void apply(const VectorXd& x, VectorXd& y) const override { y = m_ * x; }
  void apply_adjoint(const VectorXd& x, VectorXd& y) const override {
    y = m_.transpose() * x;
  }

 private:
  MatrixXd m_;
};

// Top-k singular values via block Krylov on A^T A with full
// reorthogonalization (CGS twice). Deterministic: the start block comes from
// the seed. basis_budget caps the number of Krylov vectors kept.
std::vector<double> topk_singular_values(const LinearMap& a, int k, int block = 4,
                                         int basis_budget = 96,
                                         std::uint64_t seed = 0x9e3779b97f4a7c15ull);

// Largest singular value (k = 1 specialization with a modest basis).
double operator_norm(const LinearMap& a, int basis_budget = 96,
                     std::uint64_t seed = 0x9e3779b97f4a7c15ull);

// Complex analogues used for materialized sparse operators.
std::vector<double> topk_singular_values(const SparseXc& a, int k, int block = 4,
                                         int basis_budget = 96,
                                         std::uint64_t seed = 0x9e3779b97f4a7c15ull);
double operator_norm(const SparseXc& a, int basis_budget = 96,
                     std::uint64_t seed = 0x9e3779b97f4a7c15ull);

// Function-backed complex variant for lazy operators: `gram` must compute
// x -> A^H (A x) on C^n.
std::vector<double> topk_singular_values_gram(
    const std::function<VectorXc(const VectorXc&)>& gram, Eigen::Index n, int k,
    int block = 4, int basis_budget = 96,
    std::uint64_t seed = 0x9e3779b97f4a7c15ull);

// Exact top-k singular values for matrices whose columns split into small
// clusters under the shared-nonzero-row relation (graded operators do).
// Each cluster's column Gram is diagonalized densely; the union over clusters
// is the complete singular value multiset. Throws if a cluster exceeds
// max_cluster columns.
std::vector<double> clustered_singular_values(const SparseXc& a, int k,
                                              int max_cluster = 4096);

}  // namespace cgq
