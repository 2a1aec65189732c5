#pragma once

// Independent reference computations for the unit and acceptance tests.
// Nothing here calls the curvature or bound code under test; the group
// exp/log maps are the only library pieces used.

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <liecrb/lie_group.hpp>

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

namespace oracle {

/// Truncated power series of the matrix exponential.
inline Eigen::MatrixXd series_exp(const Eigen::MatrixXd& m, int terms = 20) {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(m.rows(), m.cols());
  Eigen::MatrixXd term = sum;
  for (int k = 1; k < terms; ++k) {
    term = term * m / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

inline double levi_civita(int i, int j, int k) {
  return static_cast<double>((i - j) * (j - k) * (k - i)) / 2.0;
}

inline Eigen::Matrix3d skew(const Eigen::Vector3d& w) {
  Eigen::Matrix3d s;
  s << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  return s;
}

inline double bisection(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-15) {
  double flo = f(lo);
  if (flo * f(hi) > 0.0) {
    throw std::invalid_argument("bisection: root not bracketed");
  }
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Scalar SO(3) fixed point for J = j I: p = (1 - p/6)^2 / j.
inline double so3_scalar_fixed_point(double j) {
  return bisection([j](double p) { return p - (1.0 - p / 6.0) * (1.0 - p / 6.0) / j; }, 0.0, 2.0 / j);
}

/// Solves P = (I + G/12) J^-1 (I + G/12)^T on so(3), G = P - tr(P) I, by Newton's
/// method over the six independent entries of P with a finite-difference Jacobian.
inline Eigen::Matrix3d so3_fixed_point_newton(const Eigen::Matrix3d& j) {
  const Eigen::Matrix3d j_inv = j.inverse();
  auto unpack = [](const Eigen::Matrix<double, 6, 1>& u) {
    Eigen::Matrix3d p;
    p << u[0], u[3], u[4], u[3], u[1], u[5], u[4], u[5], u[2];
    return p;
  };
  auto residual = [&](const Eigen::Matrix<double, 6, 1>& u) {
    const Eigen::Matrix3d p = unpack(u);
    const Eigen::Matrix3d m = Eigen::Matrix3d::Identity() + (p - p.trace() * Eigen::Matrix3d::Identity()) / 12.0;
    const Eigen::Matrix3d f = p - m * j_inv * m.transpose();
    Eigen::Matrix<double, 6, 1> r;
    r << f(0, 0), f(1, 1), f(2, 2), f(0, 1), f(0, 2), f(1, 2);
    return r;
  };
  Eigen::Matrix<double, 6, 1> u;
  u << j_inv(0, 0), j_inv(1, 1), j_inv(2, 2), j_inv(0, 1), j_inv(0, 2), j_inv(1, 2);
  for (int it = 0; it < 50; ++it) {
    const Eigen::Matrix<double, 6, 1> r = residual(u);
    if (r.norm() < 1e-16) {
      break;
    }
    Eigen::Matrix<double, 6, 6> jac;
    for (int c = 0; c < 6; ++c) {
      Eigen::Matrix<double, 6, 1> du = Eigen::Matrix<double, 6, 1>::Zero();
      du[c] = 1e-7;
      jac.col(c) = (residual(u + du) - residual(u - du)) / 2e-7;
    }
    u -= jac.fullPivLu().solve(r);
  }
  return unpack(u);
}

/// Monte Carlo mean of x × (x × ξ) for x ~ N(0, P), one column per basis vector ξ.
inline Eigen::Matrix3d so3_double_cross_mc(const Eigen::Matrix3d& p, int n_samples, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const Eigen::Matrix3d l = p.llt().matrixL();
  Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
  for (int s = 0; s < n_samples; ++s) {
    const Eigen::Vector3d x = l * Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
    for (int k = 0; k < 3; ++k) {
      acc.col(k) += x.cross(x.cross(Eigen::Vector3d::Unit(k)));
    }
  }
  return acc / static_cast<double>(n_samples);
}

/// d/dt log(exp(t xi) exp(q)) at t = 0 by a five-point central stencil on the exp/log maps.
inline Eigen::VectorXd fd_dlog(const liecrb::AlgebraVector& q, const liecrb::AlgebraVector& xi, double t = 1e-3) {
  using liecrb::compose;
  using liecrb::exp_map;
  using liecrb::log_map;
  const liecrb::GroupElement qg = exp_map(q);
  auto f = [&](double s) { return log_map(compose(exp_map(s * xi), qg)).coords(); };
  return (8.0 * (f(t) - f(-t)) - (f(2 * t) - f(-2 * t))) / (12.0 * t);
}

}  // namespace oracle
