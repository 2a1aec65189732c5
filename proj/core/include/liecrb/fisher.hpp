#pragma once

#include "liecrb/lie_group.hpp"
#include "liecrb/parallel.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace liecrb {

/// A single draw X from p(X|g). Layout is model specific: WahbaVectors uses
/// a 3xK matrix of observed vectors, ConcentratedGaussian a horizontal
/// concatenation of n_obs group matrices.
using Observation = Eigen::MatrixXd;

/// A family of densities p(X|g) parameterised by a group element.
///
/// Models must have a square-integrable score; this is assumed, not checked.
class ObservationModel {
 public:
  virtual ~ObservationModel() = default;

  virtual const GroupDescriptor& group() const = 0;
  virtual std::string_view name() const = 0;

  virtual double log_density(const Observation& x, const GroupElement& g) const = 0;
  virtual Observation sample(const GroupElement& g, Rng& rng) const = 0;

  /// d/dt log p(x | exp(t xi) g) at t = 0, when a closed form exists.
  virtual std::optional<double> analytic_score(const GroupElement& /*g*/, const AlgebraVector& /*xi*/,
                                               const Observation& /*x*/) const {
    return std::nullopt;
  }
};

/// Noisy vector observations X_i = g d_i + eps_i, eps_i ~ N(0, sigma^2 I), on SO(3).
class WahbaVectors final : public ObservationModel {
 public:
  WahbaVectors(std::vector<Eigen::Vector3d> directions, double sigma);

  const GroupDescriptor& group() const override { return group_; }
  std::string_view name() const override { return "wahba"; }

  double log_density(const Observation& x, const GroupElement& g) const override;
  Observation sample(const GroupElement& g, Rng& rng) const override;
  std::optional<double> analytic_score(const GroupElement& g, const AlgebraVector& xi,
                                       const Observation& x) const override;

  const std::vector<Eigen::Vector3d>& directions() const { return directions_; }
  double sigma() const { return sigma_; }

 private:
  GroupDescriptor group_ = GroupDescriptor::so3();
  std::vector<Eigen::Vector3d> directions_;
  double sigma_;
};

/**
 * @brief Group-valued observations X_j = exp(w_j) g with w_j ~ N(0, Sigma).
 *
 * The density is the Gaussian density of log(X_j g^-1) in algebra
 * coordinates. The Jacobian of exp is not included; that correction is
 * O(|Sigma|) and exact zero on abelian groups.
 */
class ConcentratedGaussian final : public ObservationModel {
 public:
  ConcentratedGaussian(GroupDescriptor group, Eigen::MatrixXd covariance, int n_obs = 1);

  const GroupDescriptor& group() const override { return group_; }
  std::string_view name() const override { return "gaussian"; }

  double log_density(const Observation& x, const GroupElement& g) const override;
  Observation sample(const GroupElement& g, Rng& rng) const override;

  const Eigen::MatrixXd& covariance() const { return covariance_; }
  int n_obs() const { return n_obs_; }

  /// j-th group element of an observation.
  GroupElement element(const Observation& x, int j) const;

 private:
  GroupDescriptor group_;
  Eigen::MatrixXd covariance_;
  int n_obs_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_normalizer_ = 0.0;
};

struct FisherOptions {
  /// Central-difference step for the score when no analytic score is used.
  double score_step = 1e-6;
  /// Central-difference step for the second derivative.
  double second_step = 1e-4;
  /// Use the model's analytic score when it provides one.
  bool use_analytic_score = true;
};

/// Information matrix in the right-invariant basis at base point g.
struct InformationMatrix {
  Eigen::MatrixXd j;
  GroupDescriptor group;
  Eigen::MatrixXd base_point;
};

double score(const ObservationModel& model, const GroupElement& g, const AlgebraVector& xi, const Observation& x,
             const FisherOptions& options = {});

struct ScoreStatistics {
  double mean;
  double std_dev;
  std::size_t n;
};

/// Sample mean and standard deviation of the score along xi.
ScoreStatistics score_statistics(const ObservationModel& model, const GroupElement& g, const AlgebraVector& xi,
                                 std::size_t n_samples, std::uint64_t seed, const FisherOptions& options = {});

/// Monte Carlo estimate of xi^T J(g) xi as the mean squared score.
double fisher_quadratic(const ObservationModel& model, const GroupElement& g, const AlgebraVector& xi,
                        std::size_t n_samples, std::uint64_t seed, const FisherOptions& options = {});

/// J(g) assembled from quadratic forms on basis vectors and pairwise sums by
/// polarization. One shared sample set serves every quadratic form.
InformationMatrix fisher_matrix(const ObservationModel& model, const GroupElement& g, std::size_t n_samples,
                                std::uint64_t seed, const FisherOptions& options = {});

/// Same as fisher_matrix but with the algebra basis replaced by the columns
/// of the orthonormal matrix `basis`; the result is mapped back to the
/// canonical basis.
InformationMatrix fisher_matrix_in_basis(const ObservationModel& model, const GroupElement& g,
                                         const Eigen::MatrixXd& basis, std::size_t n_samples, std::uint64_t seed,
                                         const FisherOptions& options = {});

/// Monte Carlo estimate of -E[d^2/dt^2 log p(X | exp(t xi) g)] by central differences.
double fisher_second_derivative(const ObservationModel& model, const GroupElement& g, const AlgebraVector& xi,
                                std::size_t n_samples, std::uint64_t seed, const FisherOptions& options = {});

/// Closed form (1/sigma^2) sum_i (|d_i|^2 I - (g d_i)(g d_i)^T) for WahbaVectors.
InformationMatrix wahba_fisher_analytic(std::span<const Eigen::Vector3d> directions, double sigma,
                                        const GroupElement& g);

}  // namespace liecrb
