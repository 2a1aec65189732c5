#include "liecrb/bound.hpp"

#include "liecrb/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <sstream>

namespace liecrb {

namespace {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Fixed point of P_r = M J_r^-1 M^T with M = B^T (I + G0(B P_r B^T)/12) B.
BoundResult fixed_point_in_basis(const Eigen::MatrixXd& j, const Eigen::MatrixXd& basis,
                                 const StructureTensor& tensor, const BoundOptions& options) {
  const int n = tensor.dim();
  require_symmetric(j, n, "bound_fixed_point");
  if (!(options.tol > 0.0)) {
    throw InvalidArgument("bound_fixed_point: tol must be positive");
  }
  const Eigen::Index r = basis.cols();
  const Eigen::MatrixXd j_r = symmetrized(basis.transpose() * j * basis);
  const Eigen::MatrixXd j_r_inv = bound_first_order(j_r, options.singular_floor);
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);

  const auto step = [&](const Eigen::MatrixXd& p_r) {
    const Eigen::MatrixXd p = basis * p_r * basis.transpose();
    const Eigen::MatrixXd m = basis.transpose() * (identity + g0_operator(symmetrized(p), tensor) / 12.0) * basis;
    return symmetrized(m * j_r_inv * m.transpose());
  };

  BoundResult result;
  Eigen::MatrixXd p_r = j_r_inv;
  double residual = 0.0;
  bool converged = false;
  for (int it = 1; it <= options.max_iters; ++it) {
    Eigen::MatrixXd next = step(p_r);
    residual = (next - p_r).norm() / p_r.norm();
    p_r = std::move(next);
    result.iterations = it;
    if (residual < options.tol) {
      converged = true;
      break;
    }
  }
  result.residual = residual;
  if (!converged) {
    std::ostringstream os;
    os << "bound_fixed_point: no convergence after " << options.max_iters << " iterations (residual " << residual
       << ")";
    throw ConvergenceFailure(os.str(), basis * p_r * basis.transpose(), residual);
  }

  result.first_order = basis * j_r_inv * basis.transpose();
  result.second_order = basis * p_r * basis.transpose();

  if (tensor.group().bi_invariant()) {
    const Eigen::MatrixXd rm_r = basis.transpose() * r_m_operator(result.second_order, tensor.group()) * basis;
    const Eigen::MatrixXd smith_r = j_r_inv - (rm_r * j_r_inv + j_r_inv * rm_r) / 3.0;
    result.smith_form = basis * symmetrized(smith_r) * basis.transpose();
  }

  const double trace = result.second_order.trace();
  if (trace > options.validity_trace_fraction * static_cast<double>(r)) {
    std::ostringstream os;
    os << "tr(P) = " << trace << " exceeds " << options.validity_trace_fraction << " * " << r
       << "; neglected cubic error terms may not be small";
    result.warnings.push_back(os.str());
  }
  const double lambda = min_eigenvalue(result.second_order);
  if (lambda < -1e-9) {
    std::ostringstream os;
    os << "second-order bound is not PSD (min eigenvalue " << lambda << ")";
    result.warnings.push_back(os.str());
  }
  return result;
}

}  // namespace

Eigen::MatrixXd bound_first_order(const Eigen::MatrixXd& j, double singular_floor) {
  require_symmetric(j, static_cast<int>(j.rows()), "bound_first_order");
  const Eigen::Index n = j.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  const Eigen::VectorXd& lambda = es.eigenvalues();
  const double floor = singular_floor * std::max(1.0, lambda.cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> null_columns;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lambda[i] <= floor) {
      null_columns.push_back(i);
    }
  }
  if (!null_columns.empty()) {
    Eigen::MatrixXd null_space(n, static_cast<Eigen::Index>(null_columns.size()));
    for (std::size_t c = 0; c < null_columns.size(); ++c) {
      null_space.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(null_columns[c]);
    }
    std::ostringstream os;
    os << "information matrix is singular: " << null_columns.size()
       << " unobservable direction(s), smallest eigenvalue " << lambda.minCoeff();
    throw SingularInformation(os.str(), std::move(null_space));
  }
  const Eigen::MatrixXd inv = j.llt().solve(Eigen::MatrixXd::Identity(n, n));
  return symmetrized(inv);
}

Eigen::MatrixXd bound_second_order_map(const Eigen::MatrixXd& p, const Eigen::MatrixXd& j,
                                       const StructureTensor& tensor) {
  const int n = tensor.dim();
  require_symmetric(p, n, "bound_second_order_map");
  const Eigen::MatrixXd j_inv = bound_first_order(j);
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) + g0_operator(p, tensor) / 12.0;
  return symmetrized(m * j_inv * m.transpose());
}

BoundResult bound_fixed_point(const Eigen::MatrixXd& j, const StructureTensor& tensor, const BoundOptions& options) {
  const int n = tensor.dim();
  return fixed_point_in_basis(j, Eigen::MatrixXd::Identity(n, n), tensor, options);
}

BoundResult bound_fixed_point_subspace(const Eigen::MatrixXd& j, const Eigen::MatrixXd& basis,
                                       const StructureTensor& tensor, const BoundOptions& options) {
  const int n = tensor.dim();
  if (basis.rows() != n || basis.cols() < 1 || basis.cols() > n) {
    throw InvalidArgument("bound_fixed_point_subspace: basis must be n x r with 1 <= r <= n");
  }
  const Eigen::MatrixXd gram = basis.transpose() * basis;
  if ((gram - Eigen::MatrixXd::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff() > 1e-10) {
    throw InvalidArgument("bound_fixed_point_subspace: basis columns must be orthonormal");
  }
  return fixed_point_in_basis(j, basis, tensor, options);
}

Eigen::MatrixXd smith_bound_biinvariant(const Eigen::MatrixXd& j, const Eigen::MatrixXd& p,
                                        const StructureTensor& tensor) {
  if (!tensor.group().bi_invariant()) {
    throw DomainError("smith_bound_biinvariant: " + tensor.group().name() + " has no bi-invariant metric");
  }
  const Eigen::MatrixXd j_inv = bound_first_order(j);
  const Eigen::MatrixXd rm = r_m_operator(p, tensor.group());
  return symmetrized(j_inv - (rm * j_inv + j_inv * rm) / 3.0);
}

Dominance psd_dominates(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw InvalidArgument("psd_dominates: matrices must be square and of equal size");
  }
  const double lambda = min_eigenvalue(a - b);
  return {lambda >= -tol, lambda};
}

Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& null_space, int n) {
  if (null_space.rows() != n || null_space.cols() >= n) {
    throw InvalidArgument("orthogonal_complement: null space must be n x k with k < n");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(null_space * null_space.transpose());
  // Ascending eigenvalues: the first n - k eigenvectors span the complement.
  return es.eigenvectors().leftCols(n - null_space.cols());
}

}  // namespace liecrb
