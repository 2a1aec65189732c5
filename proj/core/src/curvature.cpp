#include "liecrb/curvature.hpp"

#include "liecrb/errors.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace liecrb {

Tensor4 h_tensor(const StructureConstants& c) {
  const int n = c.dim();
  Tensor4 h(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int m = 0; m < n; ++m) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) {
            s += c(i, l, m) * c(j, k, l);
          }
          h(i, j, k, m) = s;
        }
      }
    }
  }
  return h;
}

StructureTensor::StructureTensor(const GroupDescriptor& group)
    : group_(group), c_(structure_constants(group)), h_(h_tensor(c_)) {}

const StructureTensor& StructureTensor::of(const GroupDescriptor& group) {
  static std::mutex mutex;
  static std::map<std::pair<GroupId, int>, std::unique_ptr<const StructureTensor>> cache;

  const std::lock_guard lock(mutex);
  auto& slot = cache[{group.id(), group.dim()}];
  if (!slot) {
    slot = std::make_unique<const StructureTensor>(group);
  }
  return *slot;
}

void require_symmetric(const Eigen::MatrixXd& p, int n, const char* what) {
  if (p.rows() != n || p.cols() != n) {
    throw InvalidArgument(std::string(what) + ": expected a " + std::to_string(n) + "x" + std::to_string(n) +
                          " matrix");
  }
  const double scale = std::max(1.0, p.cwiseAbs().maxCoeff());
  const double asym = (p - p.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-12 * scale)) {
    throw InvalidArgument(std::string(what) + ": matrix is not symmetric (max asymmetry " + std::to_string(asym) +
                          ")");
  }
}

Eigen::MatrixXd g0_operator(const Eigen::MatrixXd& p, const StructureTensor& tensor) {
  const int n = tensor.dim();
  require_symmetric(p, n, "g0_operator");
  const Tensor4& h = tensor.h();
  Eigen::MatrixXd g0 = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double pij = p(i, j);
      if (pij == 0.0) {
        continue;
      }
      for (int k = 0; k < n; ++k) {
        for (int m = 0; m < n; ++m) {
          g0(m, k) += pij * h(i, j, k, m);
        }
      }
    }
  }
  return g0;
}

Eigen::MatrixXd g0_monte_carlo(std::span<const AlgebraVector> samples) {
  if (samples.empty()) {
    throw InvalidArgument("g0_monte_carlo: empty sample list");
  }
  const int n = samples.front().dim();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  for (const AlgebraVector& s : samples) {
    const Eigen::MatrixXd a = ad_matrix(s);
    acc += a * a;
  }
  return acc / static_cast<double>(samples.size());
}

Eigen::MatrixXd second_moment(std::span<const AlgebraVector> samples) {
  if (samples.empty()) {
    throw InvalidArgument("second_moment: empty sample list");
  }
  const int n = samples.front().dim();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  for (const AlgebraVector& s : samples) {
    acc += s.coords() * s.coords().transpose();
  }
  return acc / static_cast<double>(samples.size());
}

AlgebraVector dlog_truncated(const AlgebraVector& q_log, const AlgebraVector& xi) {
  const Eigen::MatrixXd a = ad_matrix(q_log);
  const Eigen::VectorXd& x = xi.coords();
  const Eigen::VectorXd ax = a * x;
  return {xi.group(), x - 0.5 * ax + (1.0 / 12.0) * (a * ax)};
}

AlgebraVector dlog_numerical(const AlgebraVector& q_log, const AlgebraVector& xi, double step) {
  const GroupElement q = exp_map(q_log);
  auto at = [&](double t) { return log_map(compose(exp_map(t * xi), q)).coords(); };
  const Eigen::VectorXd d = (8.0 * (at(step) - at(-step)) - (at(2.0 * step) - at(-2.0 * step))) / (12.0 * step);
  return {xi.group(), d};
}

AlgebraVector riemann_biinvariant(const AlgebraVector& x, const AlgebraVector& y, const AlgebraVector& z) {
  if (!x.group().bi_invariant()) {
    throw DomainError("riemann_biinvariant: " + x.group().name() + " has no bi-invariant metric");
  }
  return -0.25 * bracket(bracket(x, y), z);
}

Eigen::MatrixXd r_m_operator(const Eigen::MatrixXd& p, const GroupDescriptor& group) {
  if (!group.bi_invariant()) {
    throw DomainError("r_m_operator: " + group.name() + " has no bi-invariant metric");
  }
  const int n = group.dim();
  require_symmetric(p, n, "r_m_operator");

  // Q(w) = sum_ij P_ij <R(e_i, w) w, e_j>
  const auto quadratic = [&](const AlgebraVector& w) {
    double q = 0.0;
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd r = riemann_biinvariant(AlgebraVector::basis(group, i), w, w).coords();
      for (int j = 0; j < n; ++j) {
        q += p(i, j) * r[j];
      }
    }
    return q;
  };

  Eigen::VectorXd diag(n);
  for (int a = 0; a < n; ++a) {
    diag[a] = quadratic(AlgebraVector::basis(group, a));
  }
  Eigen::MatrixXd rm(n, n);
  for (int a = 0; a < n; ++a) {
    rm(a, a) = diag[a];
    for (int b = a + 1; b < n; ++b) {
      const double qab = quadratic(AlgebraVector::basis(group, a) + AlgebraVector::basis(group, b));
      rm(a, b) = 0.5 * (qab - diag[a] - diag[b]);
      rm(b, a) = rm(a, b);
    }
  }
  return rm;
}

std::optional<std::string> third_moment_warning(std::span<const AlgebraVector> samples, double threshold) {
  if (samples.empty()) {
    return std::nullopt;
  }
  double m3 = 0.0;
  for (const AlgebraVector& s : samples) {
    const double r = s.coords().norm();
    m3 += r * r * r;
  }
  m3 /= static_cast<double>(samples.size());
  if (m3 > threshold) {
    std::ostringstream os;
    os << "third moment E|x|^3 = " << m3 << " exceeds " << threshold
       << "; second-order truncation of the bound may be inaccurate";
    return os.str();
  }
  return std::nullopt;
}

}  // namespace liecrb
