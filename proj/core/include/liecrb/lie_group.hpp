#pragma once

#include <Eigen/Core>

#include <string>
#include <string_view>
#include <vector>

namespace liecrb {

enum class GroupId { SO3, SE3, SE2, AbelianRn };

/**
 * @brief Identifies one of the supported matrix Lie groups.
 *
 * Canonical algebra bases (all downstream tensors are expressed in these):
 *
 *   so(3):  hat(w) = [  0  -w3  w2 ]      (hat(e1))(3,2) = 1, cross-product convention
 *                    [  w3  0  -w1 ]
 *                    [ -w2  w1  0  ]
 *   se(3):  coords (w1, w2, w3, v1, v2, v3), hat = [ hat(w) v ; 0 0 ]
 *   se(2):  coords (theta, v1, v2),          hat = [ 0 -theta v1 ; theta 0 v2 ; 0 0 0 ]
 *   R^n:    coords (v1..vn),                 hat = [ 0 v ; 0 0 ]  (n+1 square, nilpotent)
 */
class GroupDescriptor {
 public:
  static GroupDescriptor so3() { return {GroupId::SO3, 3}; }
  static GroupDescriptor se3() { return {GroupId::SE3, 6}; }
  static GroupDescriptor se2() { return {GroupId::SE2, 3}; }
  static GroupDescriptor abelian(int n);

  /// Parses "so3", "se3", "se2" or "abelianN" (N >= 1). Throws InvalidArgument.
  static GroupDescriptor parse(std::string_view name);

  GroupId id() const { return id_; }
  /// Algebra dimension n.
  int dim() const { return dim_; }
  /// Side of the ambient square matrices.
  int matrix_size() const;
  std::string name() const;
  /// True for groups carrying a bi-invariant metric (SO3 and R^n).
  bool bi_invariant() const { return id_ == GroupId::SO3 || id_ == GroupId::AbelianRn; }

  friend bool operator==(const GroupDescriptor&, const GroupDescriptor&) = default;

 private:
  GroupDescriptor(GroupId id, int dim) : id_(id), dim_(dim) {}

  GroupId id_;
  int dim_;
};

/// Coordinates of a Lie algebra element in the canonical basis.
class AlgebraVector {
 public:
  AlgebraVector(GroupDescriptor group, Eigen::VectorXd coords);

  static AlgebraVector zero(const GroupDescriptor& group);
  static AlgebraVector basis(const GroupDescriptor& group, int i);

  const GroupDescriptor& group() const { return group_; }
  const Eigen::VectorXd& coords() const { return coords_; }
  double operator[](int i) const { return coords_[i]; }
  int dim() const { return static_cast<int>(coords_.size()); }

  AlgebraVector operator+(const AlgebraVector& other) const;
  AlgebraVector operator-(const AlgebraVector& other) const;
  AlgebraVector operator-() const { return {group_, -coords_}; }
  AlgebraVector operator*(double s) const { return {group_, s * coords_}; }
  friend AlgebraVector operator*(double s, const AlgebraVector& v) { return v * s; }

 private:
  GroupDescriptor group_;
  Eigen::VectorXd coords_;
};

/// An element of a matrix Lie group. Constructing from a raw matrix validates
/// the group constraints to within kConstraintTolerance.
class GroupElement {
 public:
  static constexpr double kConstraintTolerance = 1e-9;

  GroupElement(GroupDescriptor group, Eigen::MatrixXd mat);

  static GroupElement identity(const GroupDescriptor& group);

  const GroupDescriptor& group() const { return group_; }
  const Eigen::MatrixXd& matrix() const { return mat_; }

 private:
  struct Unchecked {};
  GroupElement(GroupDescriptor group, Eigen::MatrixXd mat, Unchecked)
      : group_(group), mat_(std::move(mat)) {}

  friend GroupElement exp_map(const AlgebraVector&);
  friend GroupElement compose(const GroupElement&, const GroupElement&);
  friend GroupElement inverse(const GroupElement&);
  friend GroupElement project_to_group(const GroupDescriptor&, const Eigen::MatrixXd&);

  GroupDescriptor group_;
  Eigen::MatrixXd mat_;
};

/// Largest violation of the group constraints (orthogonality, det = +1,
/// fixed bottom rows) measured in max-abs entries.
double constraint_residual(const GroupDescriptor& group, const Eigen::MatrixXd& mat);

Eigen::MatrixXd hat(const AlgebraVector& v);

/// Inverse of hat. Off-algebra components (e.g. a symmetric part) up to
/// kConstraintTolerance are projected away; beyond that InvalidArgument.
AlgebraVector vee(const GroupDescriptor& group, const Eigen::MatrixXd& m);

GroupElement exp_map(const AlgebraVector& v);

/// Principal logarithm. Rotation angles at or beyond pi - kLogCutMargin throw DomainError.
inline constexpr double kLogCutMargin = 1e-6;
AlgebraVector log_map(const GroupElement& g);

GroupElement compose(const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupElement& a);

AlgebraVector bracket(const AlgebraVector& x, const AlgebraVector& y);

/// Matrix A with A * y.coords() == bracket(x, y).coords() for every y.
Eigen::MatrixXd ad_matrix(const AlgebraVector& x);

/// c(i, j, k) = k-th coordinate of bracket(e_i, e_j).
class StructureConstants {
 public:
  explicit StructureConstants(int dim) : dim_(dim), c_(static_cast<std::size_t>(dim) * dim * dim, 0.0) {}

  int dim() const { return dim_; }
  double operator()(int i, int j, int k) const { return c_[index(i, j, k)]; }
  double& operator()(int i, int j, int k) { return c_[index(i, j, k)]; }

 private:
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * dim_ + j) * dim_ + k;
  }

  int dim_;
  std::vector<double> c_;
};

/// Structure constants of the canonical basis; computed once per group and cached.
const StructureConstants& structure_constants(const GroupDescriptor& group);

/// Nearest group element to m. For rotation blocks this is the polar
/// factor with positive determinant. Meant for re-projection after long
/// composition chains; the primitives above never call it.
GroupElement project_to_group(const GroupDescriptor& group, const Eigen::MatrixXd& m);

/// Matrix exponential by scaling and squaring with a 13-term Taylor core.
/// Generic fallback for algebras without closed forms.
Eigen::MatrixXd matrix_exp_series(const Eigen::MatrixXd& m);

}  // namespace liecrb
