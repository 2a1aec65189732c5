#pragma once

#include "liecrb/lie_group.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace liecrb {

/// Rank-4 tensor stored densely; h(i, j, k, m) holds H^m_ijk.
class Tensor4 {
 public:
  explicit Tensor4(int dim)
      : dim_(dim), data_(static_cast<std::size_t>(dim) * dim * dim * dim, 0.0) {}

  int dim() const { return dim_; }
  double operator()(int i, int j, int k, int m) const { return data_[index(i, j, k, m)]; }
  double& operator()(int i, int j, int k, int m) { return data_[index(i, j, k, m)]; }

 private:
  std::size_t index(int i, int j, int k, int m) const {
    return ((static_cast<std::size_t>(i) * dim_ + j) * dim_ + k) * dim_ + m;
  }

  int dim_;
  std::vector<double> data_;
};

/// H^m_ijk = sum_l c_il^m c_jk^l, i.e. the coefficients of [e_i, [e_j, e_k]].
Tensor4 h_tensor(const StructureConstants& c);

/// Structure constants and the double-bracket tensor of one group.
class StructureTensor {
 public:
  explicit StructureTensor(const GroupDescriptor& group);

  /// Shared instance per group, built on first use.
  static const StructureTensor& of(const GroupDescriptor& group);

  const GroupDescriptor& group() const { return group_; }
  int dim() const { return group_.dim(); }
  const StructureConstants& c() const { return c_; }
  const Tensor4& h() const { return h_; }

 private:
  GroupDescriptor group_;
  StructureConstants c_;
  Tensor4 h_;
};

/// Throws InvalidArgument unless p is square of size n and symmetric to 1e-12 (relative).
void require_symmetric(const Eigen::MatrixXd& p, int n, const char* what);

/**
 * @brief The curvature operator G0(P) as a matrix acting on algebra coordinates.
 *
 * Row index is the output component m, column index the input component k:
 * G0[m][k] = sum_ij P[i][j] H^m_ijk, so that G0 * xi = E[x, [x, xi]] whenever
 * P = E[x x^T].
 */
Eigen::MatrixXd g0_operator(const Eigen::MatrixXd& p, const StructureTensor& tensor);

/// (1/N) sum_s ad(s) ad(s): the empirical double-bracket operator.
Eigen::MatrixXd g0_monte_carlo(std::span<const AlgebraVector> samples);

/// (1/N) sum_s s s^T.
Eigen::MatrixXd second_moment(std::span<const AlgebraVector> samples);

/// Second-order truncation of the right-trivialised differential of log:
/// (I - 1/2 ad(q) + 1/12 ad(q)^2) xi.
AlgebraVector dlog_truncated(const AlgebraVector& q_log, const AlgebraVector& xi);

/// d/dt log(exp(t xi) exp(q_log)) at t = 0 by a fourth-order central
/// difference with the given step. Reference for dlog_truncated.
AlgebraVector dlog_numerical(const AlgebraVector& q_log, const AlgebraVector& xi, double step = 1e-3);

/// Riemann tensor of the bi-invariant metric, -1/4 [[x, y], z].
/// Throws DomainError on groups without a bi-invariant metric.
AlgebraVector riemann_biinvariant(const AlgebraVector& x, const AlgebraVector& y, const AlgebraVector& z);

/// Symmetric matrix of the quadratic form w -> E<R(x, w) w, x> under second
/// moment P, assembled by polarization over basis pairs.
Eigen::MatrixXd r_m_operator(const Eigen::MatrixXd& p, const GroupDescriptor& group);

/// Warning text when the empirical third moment E|x|^3 exceeds threshold,
/// i.e. when the dropped cubic terms are no longer negligible.
std::optional<std::string> third_moment_warning(std::span<const AlgebraVector> samples,
                                                double threshold = 0.1);

}  // namespace liecrb
