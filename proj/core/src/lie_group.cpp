#include "liecrb/lie_group.hpp"

#include "liecrb/errors.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace liecrb {

namespace {

Eigen::Matrix3d skew(const Eigen::Vector3d& w) {
  Eigen::Matrix3d m;
  m << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return m;
}

Eigen::Vector3d unskew(const Eigen::Matrix3d& m) {
  // Skew part only; the symmetric part is measured separately by vee().
  return {0.5 * (m(2, 1) - m(1, 2)), 0.5 * (m(0, 2) - m(2, 0)), 0.5 * (m(1, 0) - m(0, 1))};
}

// sin(t)/t, (1-cos t)/t^2, (t - sin t)/t^3 with series near zero.
struct RodriguesCoefficients {
  double a;
  double b;
  double c;
};

RodriguesCoefficients rodrigues(double theta) {
  const double t2 = theta * theta;
  if (theta < 1e-4) {
    return {1.0 - t2 / 6.0 + t2 * t2 / 120.0,
            0.5 - t2 / 24.0 + t2 * t2 / 720.0,
            1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0};
  }
  const double s = std::sin(theta);
  const double cs = std::cos(theta);
  return {s / theta, (1.0 - cs) / t2, (theta - s) / (t2 * theta)};
}

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& w) {
  const auto [a, b, c] = rodrigues(w.norm());
  const Eigen::Matrix3d W = skew(w);
  return Eigen::Matrix3d::Identity() + a * W + b * W * W;
}

// Quaternion extraction stays well conditioned up to the branch cut, where
// the naive theta/(2 sin theta) * vee(R - R^T) formula loses all precision.
Eigen::Vector3d so3_log(const Eigen::Matrix3d& r) {
  Eigen::Quaterniond q(r);
  q.normalize();
  if (q.w() < 0.0) {
    q.coeffs() = -q.coeffs();
  }
  const Eigen::Vector3d qv = q.vec();
  const double n = qv.norm();
  const double w = q.w();
  const double angle = 2.0 * std::atan2(n, w);
  if (angle >= std::numbers::pi - kLogCutMargin) {
    throw DomainError("log_map: rotation angle " + std::to_string(angle) +
                          " is at or beyond the principal branch cut",
                      angle);
  }
  double k;
  if (n < 1e-7) {
    k = 2.0 / w * (1.0 - n * n / (3.0 * w * w));
  } else {
    k = angle / n;
  }
  return k * qv;
}

void require_same_group(const GroupDescriptor& a, const GroupDescriptor& b, const char* op) {
  if (!(a == b)) {
    throw InvalidArgument(std::string(op) + ": group mismatch (" + a.name() + " vs " + b.name() + ")");
  }
}

int rotation_block(GroupId id) {
  switch (id) {
    case GroupId::SO3:
    case GroupId::SE3:
      return 3;
    case GroupId::SE2:
      return 2;
    case GroupId::AbelianRn:
      return 0;
  }
  return 0;
}

}  // namespace

GroupDescriptor GroupDescriptor::abelian(int n) {
  if (n < 1) {
    throw InvalidArgument("abelian group dimension must be >= 1");
  }
  return {GroupId::AbelianRn, n};
}

GroupDescriptor GroupDescriptor::parse(std::string_view name) {
  if (name == "so3") return so3();
  if (name == "se3") return se3();
  if (name == "se2") return se2();
  constexpr std::string_view prefix = "abelian";
  if (name.starts_with(prefix) && name.size() > prefix.size()) {
    const std::string digits(name.substr(prefix.size()));
    if (digits.find_first_not_of("0123456789") == std::string::npos && digits.size() <= 4) {
      return abelian(std::stoi(digits));
    }
  }
  throw InvalidArgument("unknown group '" + std::string(name) + "' (expected so3, se3, se2 or abelianN)");
}

int GroupDescriptor::matrix_size() const {
  switch (id_) {
    case GroupId::SO3:
      return 3;
    case GroupId::SE3:
      return 4;
    case GroupId::SE2:
      return 3;
    case GroupId::AbelianRn:
      return dim_ + 1;
  }
  return 0;
}

std::string GroupDescriptor::name() const {
  switch (id_) {
    case GroupId::SO3:
      return "so3";
    case GroupId::SE3:
      return "se3";
    case GroupId::SE2:
      return "se2";
    case GroupId::AbelianRn:
      return "abelian" + std::to_string(dim_);
  }
  return {};
}

AlgebraVector::AlgebraVector(GroupDescriptor group, Eigen::VectorXd coords)
    : group_(group), coords_(std::move(coords)) {
  if (coords_.size() != group_.dim()) {
    throw InvalidArgument("algebra vector of length " + std::to_string(coords_.size()) + " for " +
                          group_.name() + " (dim " + std::to_string(group_.dim()) + ")");
  }
}

AlgebraVector AlgebraVector::zero(const GroupDescriptor& group) {
  return {group, Eigen::VectorXd::Zero(group.dim())};
}

AlgebraVector AlgebraVector::basis(const GroupDescriptor& group, int i) {
  if (i < 0 || i >= group.dim()) {
    throw InvalidArgument("basis index out of range");
  }
  return {group, Eigen::VectorXd::Unit(group.dim(), i)};
}

AlgebraVector AlgebraVector::operator+(const AlgebraVector& other) const {
  require_same_group(group_, other.group_, "AlgebraVector::operator+");
  return {group_, coords_ + other.coords_};
}

AlgebraVector AlgebraVector::operator-(const AlgebraVector& other) const {
  require_same_group(group_, other.group_, "AlgebraVector::operator-");
  return {group_, coords_ - other.coords_};
}

double constraint_residual(const GroupDescriptor& group, const Eigen::MatrixXd& mat) {
  const int m = group.matrix_size();
  if (mat.rows() != m || mat.cols() != m) {
    return std::numeric_limits<double>::infinity();
  }
  double residual = 0.0;
  const int k = rotation_block(group.id());
  if (k > 0) {
    const Eigen::MatrixXd r = mat.topLeftCorner(k, k);
    residual = (r.transpose() * r - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
    residual = std::max(residual, std::abs(r.determinant() - 1.0));
  } else {
    const int n = group.dim();
    residual = (mat.topLeftCorner(n, n) - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  }
  if (group.id() != GroupId::SO3) {
    Eigen::RowVectorXd bottom = Eigen::RowVectorXd::Zero(m);
    bottom[m - 1] = 1.0;
    residual = std::max(residual, (mat.row(m - 1) - bottom).cwiseAbs().maxCoeff());
  }
  return residual;
}

GroupElement::GroupElement(GroupDescriptor group, Eigen::MatrixXd mat) : group_(group), mat_(std::move(mat)) {
  const int m = group_.matrix_size();
  if (mat_.rows() != m || mat_.cols() != m) {
    throw InvalidArgument("group element for " + group_.name() + " must be " + std::to_string(m) + "x" +
                          std::to_string(m));
  }
  const double r = constraint_residual(group_, mat_);
  if (!(r <= kConstraintTolerance)) {
    throw InvalidArgument("matrix violates " + group_.name() + " constraints (residual " + std::to_string(r) + ")");
  }
}

GroupElement GroupElement::identity(const GroupDescriptor& group) {
  const int m = group.matrix_size();
  return {group, Eigen::MatrixXd::Identity(m, m), Unchecked{}};
}

Eigen::MatrixXd hat(const AlgebraVector& v) {
  const GroupDescriptor& g = v.group();
  const Eigen::VectorXd& c = v.coords();
  const int m = g.matrix_size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  switch (g.id()) {
    case GroupId::SO3:
      out = skew(c.head<3>());
      break;
    case GroupId::SE3:
      out.topLeftCorner<3, 3>() = skew(c.head<3>());
      out.block<3, 1>(0, 3) = c.tail<3>();
      break;
    case GroupId::SE2:
      out(0, 1) = -c[0];
      out(1, 0) = c[0];
      out(0, 2) = c[1];
      out(1, 2) = c[2];
      break;
    case GroupId::AbelianRn:
      out.col(m - 1).head(g.dim()) = c;
      break;
  }
  return out;
}

AlgebraVector vee(const GroupDescriptor& group, const Eigen::MatrixXd& m) {
  const int size = group.matrix_size();
  if (m.rows() != size || m.cols() != size) {
    throw InvalidArgument("vee: expected a " + std::to_string(size) + "x" + std::to_string(size) + " matrix for " +
                          group.name());
  }
  Eigen::VectorXd c(group.dim());
  switch (group.id()) {
    case GroupId::SO3:
      c = unskew(m);
      break;
    case GroupId::SE3:
      c.head<3>() = unskew(m.topLeftCorner<3, 3>());
      c.tail<3>() = m.block<3, 1>(0, 3);
      break;
    case GroupId::SE2:
      c[0] = 0.5 * (m(1, 0) - m(0, 1));
      c[1] = m(0, 2);
      c[2] = m(1, 2);
      break;
    case GroupId::AbelianRn:
      c = m.col(size - 1).head(group.dim());
      break;
  }
  AlgebraVector v(group, std::move(c));
  const double off_algebra = (m - hat(v)).cwiseAbs().maxCoeff();
  if (!(off_algebra <= GroupElement::kConstraintTolerance)) {
    throw InvalidArgument("vee: matrix lies outside the " + group.name() + " algebra (residual " +
                          std::to_string(off_algebra) + ")");
  }
  return v;
}

GroupElement exp_map(const AlgebraVector& v) {
  const GroupDescriptor& g = v.group();
  const Eigen::VectorXd& c = v.coords();
  const int m = g.matrix_size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(m, m);
  switch (g.id()) {
    case GroupId::SO3:
      out = so3_exp(c.head<3>());
      break;
    case GroupId::SE3: {
      const Eigen::Vector3d w = c.head<3>();
      const auto [a, b, cc] = rodrigues(w.norm());
      const Eigen::Matrix3d W = skew(w);
      const Eigen::Matrix3d W2 = W * W;
      const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
      out.topLeftCorner<3, 3>() = I + a * W + b * W2;
      out.block<3, 1>(0, 3) = (I + b * W + cc * W2) * c.tail<3>();
      break;
    }
    case GroupId::SE2: {
      const double th = c[0];
      double sa;
      double sb;
      if (std::abs(th) < 1e-4) {
        const double t2 = th * th;
        sa = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
        sb = th / 2.0 - th * t2 / 24.0 + th * t2 * t2 / 720.0;
      } else {
        sa = std::sin(th) / th;
        sb = (1.0 - std::cos(th)) / th;
      }
      out(0, 0) = std::cos(th);
      out(0, 1) = -std::sin(th);
      out(1, 0) = std::sin(th);
      out(1, 1) = std::cos(th);
      out(0, 2) = sa * c[1] - sb * c[2];
      out(1, 2) = sb * c[1] + sa * c[2];
      break;
    }
    case GroupId::AbelianRn:
      out.col(m - 1).head(g.dim()) = c;
      break;
  }
  return {g, std::move(out), GroupElement::Unchecked{}};
}

AlgebraVector log_map(const GroupElement& g) {
  const GroupDescriptor& d = g.group();
  const Eigen::MatrixXd& mat = g.matrix();
  Eigen::VectorXd c(d.dim());
  switch (d.id()) {
    case GroupId::SO3:
      c = so3_log(mat);
      break;
    case GroupId::SE3: {
      const Eigen::Vector3d w = so3_log(mat.topLeftCorner<3, 3>());
      const double th = w.norm();
      double dcoef;
      if (th < 1e-2) {
        const double t2 = th * th;
        dcoef = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0;
      } else {
        dcoef = (1.0 - th * std::sin(th) / (2.0 * (1.0 - std::cos(th)))) / (th * th);
      }
      const Eigen::Matrix3d W = skew(w);
      const Eigen::Matrix3d v_inv = Eigen::Matrix3d::Identity() - 0.5 * W + dcoef * W * W;
      c.head<3>() = w;
      c.tail<3>() = v_inv * mat.block<3, 1>(0, 3);
      break;
    }
    case GroupId::SE2: {
      const double th = std::atan2(mat(1, 0), mat(0, 0));
      if (std::abs(th) >= std::numbers::pi - kLogCutMargin) {
        throw DomainError("log_map: rotation angle " + std::to_string(std::abs(th)) +
                              " is at or beyond the principal branch cut",
                          std::abs(th));
      }
      double sa;
      double sb;
      if (std::abs(th) < 1e-4) {
        const double t2 = th * th;
        sa = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
        sb = th / 2.0 - th * t2 / 24.0 + th * t2 * t2 / 720.0;
      } else {
        sa = std::sin(th) / th;
        sb = (1.0 - std::cos(th)) / th;
      }
      const double det = sa * sa + sb * sb;
      const double x = mat(0, 2);
      const double y = mat(1, 2);
      c[0] = th;
      c[1] = (sa * x + sb * y) / det;
      c[2] = (-sb * x + sa * y) / det;
      break;
    }
    case GroupId::AbelianRn:
      c = mat.col(d.matrix_size() - 1).head(d.dim());
      break;
  }
  return {d, std::move(c)};
}

GroupElement compose(const GroupElement& a, const GroupElement& b) {
  require_same_group(a.group(), b.group(), "compose");
  return {a.group(), a.matrix() * b.matrix(), GroupElement::Unchecked{}};
}

GroupElement inverse(const GroupElement& a) {
  const GroupDescriptor& d = a.group();
  const Eigen::MatrixXd& mat = a.matrix();
  const int m = d.matrix_size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(m, m);
  switch (d.id()) {
    case GroupId::SO3:
      out = mat.transpose();
      break;
    case GroupId::SE3:
    case GroupId::SE2: {
      const int k = m - 1;
      const Eigen::MatrixXd rt = mat.topLeftCorner(k, k).transpose();
      out.topLeftCorner(k, k) = rt;
      out.col(k).head(k) = -rt * mat.col(k).head(k);
      break;
    }
    case GroupId::AbelianRn:
      out.col(m - 1).head(d.dim()) = -mat.col(m - 1).head(d.dim());
      break;
  }
  return {d, std::move(out), GroupElement::Unchecked{}};
}

AlgebraVector bracket(const AlgebraVector& x, const AlgebraVector& y) {
  require_same_group(x.group(), y.group(), "bracket");
  const Eigen::MatrixXd hx = hat(x);
  const Eigen::MatrixXd hy = hat(y);
  return vee(x.group(), hx * hy - hy * hx);
}

Eigen::MatrixXd ad_matrix(const AlgebraVector& x) {
  const int n = x.dim();
  Eigen::MatrixXd a(n, n);
  for (int k = 0; k < n; ++k) {
    a.col(k) = bracket(x, AlgebraVector::basis(x.group(), k)).coords();
  }
  return a;
}

const StructureConstants& structure_constants(const GroupDescriptor& group) {
  static std::mutex mutex;
  static std::map<std::pair<GroupId, int>, std::unique_ptr<const StructureConstants>> cache;

  const std::lock_guard lock(mutex);
  auto& slot = cache[{group.id(), group.dim()}];
  if (!slot) {
    const int n = group.dim();
    auto c = std::make_unique<StructureConstants>(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const AlgebraVector b = bracket(AlgebraVector::basis(group, i), AlgebraVector::basis(group, j));
        for (int k = 0; k < n; ++k) {
          (*c)(i, j, k) = b[k];
        }
      }
    }
    slot = std::move(c);
  }
  return *slot;
}

GroupElement project_to_group(const GroupDescriptor& group, const Eigen::MatrixXd& m) {
  const int size = group.matrix_size();
  if (m.rows() != size || m.cols() != size) {
    throw InvalidArgument("project_to_group: wrong matrix size for " + group.name());
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(size, size);
  const int k = rotation_block(group.id());
  if (k > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.topLeftCorner(k, k), Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::VectorXd s = Eigen::VectorXd::Ones(k);
    s[k - 1] = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    out.topLeftCorner(k, k) = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
  }
  if (group.id() != GroupId::SO3) {
    out.col(size - 1).head(size - 1) = m.col(size - 1).head(size - 1);
  }
  return {group, std::move(out), GroupElement::Unchecked{}};
}

Eigen::MatrixXd matrix_exp_series(const Eigen::MatrixXd& m) {
  const double norm = m.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  }
  const Eigen::MatrixXd a = m / std::ldexp(1.0, squarings);
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k < 13; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) {
    sum = sum * sum;
  }
  return sum;
}

}  // namespace liecrb
