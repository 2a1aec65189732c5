#pragma once

#include <Eigen/Core>

#include <optional>
#include <stdexcept>
#include <string>

namespace liecrb {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: wrong dimensions, mismatched groups, asymmetric matrices.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input outside the domain of a map (log past the branch cut, unsupported group).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what, std::optional<double> angle = std::nullopt,
                       std::optional<std::size_t> trial_index = std::nullopt)
      : Error(what), angle_(angle), trial_index_(trial_index) {}

  /// Rotation angle that triggered the error, when the error comes from a log map.
  std::optional<double> angle() const { return angle_; }
  /// Monte Carlo trial that produced the offending value, when known.
  std::optional<std::size_t> trial_index() const { return trial_index_; }

 private:
  std::optional<double> angle_;
  std::optional<std::size_t> trial_index_;
};

/// The information matrix has (numerically) unobservable directions.
/// The columns of null_space() span them.
class SingularInformation : public Error {
 public:
  SingularInformation(const std::string& what, Eigen::MatrixXd null_space)
      : Error(what), null_space_(std::move(null_space)) {}

  const Eigen::MatrixXd& null_space() const { return null_space_; }

 private:
  Eigen::MatrixXd null_space_;
};

/// Fixed-point iteration did not reach the requested tolerance.
class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, Eigen::MatrixXd last_iterate, double residual)
      : Error(what), last_iterate_(std::move(last_iterate)), residual_(residual) {}

  const Eigen::MatrixXd& last_iterate() const { return last_iterate_; }
  double residual() const { return residual_; }

 private:
  Eigen::MatrixXd last_iterate_;
  double residual_;
};

/// Estimation problem without a unique solution (e.g. collinear Wahba directions).
class DegenerateProblem : public Error {
 public:
  using Error::Error;
};

}  // namespace liecrb
