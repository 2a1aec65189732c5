#pragma once

#include "liecrb/curvature.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace liecrb {

struct BoundOptions {
  /// Relative Frobenius tolerance on successive fixed-point iterates.
  double tol = 1e-10;
  int max_iters = 100;
  /// J is singular when its smallest eigenvalue is below floor * max(1, largest eigenvalue).
  double singular_floor = 1e-10;
  /// Warn when tr(P) exceeds this fraction of n (small-error regime ends).
  double validity_trace_fraction = 0.1;
};

struct BoundResult {
  /// J^-1, the bound without curvature terms.
  Eigen::MatrixXd first_order;
  /// Fixed point of P = (I + G0(P)/12) J^-1 (I + G0(P)/12)^T.
  Eigen::MatrixXd second_order;
  int iterations = 0;
  double residual = 0.0;
  /// J^-1 - 1/3 (R_m(P) J^-1 + J^-1 R_m(P)) at the fixed point; bi-invariant groups only.
  std::optional<Eigen::MatrixXd> smith_form;
  std::vector<std::string> warnings;
};

/// J^-1 by a symmetric-definite solve. Throws SingularInformation (carrying
/// the null-space basis) when J has unobservable directions.
Eigen::MatrixXd bound_first_order(const Eigen::MatrixXd& j, double singular_floor = 1e-10);

/// One application of the right-hand side: (I + G0(P)/12) J^-1 (I + G0(P)/12)^T.
Eigen::MatrixXd bound_second_order_map(const Eigen::MatrixXd& p, const Eigen::MatrixXd& j,
                                       const StructureTensor& tensor);

/// Iterates P_{k+1} = bound_second_order_map(P_k) from P_0 = J^-1.
/// Throws ConvergenceFailure after max_iters.
BoundResult bound_fixed_point(const Eigen::MatrixXd& j, const StructureTensor& tensor,
                              const BoundOptions& options = {});

/**
 * @brief Bound restricted to an observable subspace.
 *
 * `basis` (n x r, orthonormal columns) spans the directions in which J is
 * invertible. Error covariances live in that subspace: P = B P_r B^T and
 * the fixed point is taken for P_r = M J_r^-1 M^T with J_r = B^T J B and
 * M = B^T (I + G0(B P_r B^T)/12) B. Returned matrices are embedded back
 * into n x n coordinates (zero along the excluded directions).
 */
BoundResult bound_fixed_point_subspace(const Eigen::MatrixXd& j, const Eigen::MatrixXd& basis,
                                       const StructureTensor& tensor, const BoundOptions& options = {});

/// J^-1 - 1/3 (R_m(P) J^-1 + J^-1 R_m(P)). Throws DomainError off bi-invariant groups.
Eigen::MatrixXd smith_bound_biinvariant(const Eigen::MatrixXd& j, const Eigen::MatrixXd& p,
                                        const StructureTensor& tensor);

struct Dominance {
  bool dominates;
  double min_eigenvalue;
};

/// A - B >= -tol in the PSD order; always reports the smallest eigenvalue of A - B.
Dominance psd_dominates(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol);

/// Orthonormal basis of the complement of `null_space` (n x r, r = n - null columns).
Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& null_space, int n);

}  // namespace liecrb
