#pragma once

#include "liecrb/bound.hpp"
#include "liecrb/fisher.hpp"
#include "liecrb/lie_group.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace liecrb {

/// Rotation maximising -sum |x_i - R d_i|^2: SVD of sum x_i d_i^T with the
/// determinant fixed to +1. Throws DegenerateProblem for fewer than two
/// non-collinear directions.
GroupElement wahba_ml_estimator(std::span<const Eigen::Vector3d> observations,
                                std::span<const Eigen::Vector3d> directions);

/// sum_i |x_i - R d_i|^2
double wahba_cost(const GroupElement& rotation, std::span<const Eigen::Vector3d> observations,
                  std::span<const Eigen::Vector3d> directions);

/// Right-invariant mean: the g with sum_j log(x_j g^-1) = 0, by fixed-point
/// iteration from the first element. Exact (one step) on abelian groups.
GroupElement intrinsic_mean(std::span<const GroupElement> elements, int max_iters = 100);

/// Uniformly distributed rotation part; translations (if any) ~ N(0, I).
GroupElement random_group_element(const GroupDescriptor& group, Rng& rng);

/// log(g est^-1) per estimate. A DomainError names the offending trial.
std::vector<AlgebraVector> error_vectors(const GroupElement& true_g, std::span<const GroupElement> estimates);

/// (1/N) sum log(g est^-1) log(g est^-1)^T
Eigen::MatrixXd empirical_error_covariance(const GroupElement& true_g, std::span<const GroupElement> estimates);

/// (1/N) sum log(g est^-1)
AlgebraVector bias_vector(const GroupElement& true_g, std::span<const GroupElement> estimates);

/// Jackknife standard error of the smallest eigenvalue of
/// basis^T (E[e e^T] - bound) basis, with E taken over `errors`.
double jackknife_min_eigenvalue_se(std::span<const AlgebraVector> errors, const Eigen::MatrixXd& bound,
                                   const Eigen::MatrixXd& basis);

struct WahbaModelSpec {
  std::vector<Eigen::Vector3d> directions;
  double sigma = 0.1;

  friend bool operator==(const WahbaModelSpec&, const WahbaModelSpec&) = default;
};

struct GaussianModelSpec {
  Eigen::MatrixXd covariance;

  friend bool operator==(const GaussianModelSpec& a, const GaussianModelSpec& b) {
    return a.covariance.rows() == b.covariance.rows() && a.covariance.cols() == b.covariance.cols() &&
           a.covariance == b.covariance;
  }
};

using ModelSpec = std::variant<WahbaModelSpec, GaussianModelSpec>;

enum class FisherMode { Analytic, MonteCarlo };

struct ExperimentConfig {
  GroupDescriptor group = GroupDescriptor::so3();
  ModelSpec model = WahbaModelSpec{};
  /// Identity when empty and random_true_g is false.
  std::optional<Eigen::MatrixXd> true_g;
  bool random_true_g = false;
  std::size_t n_trials = 10000;
  /// Observations per trial; 0 means one per Wahba direction (or 1 for the Gaussian model).
  int n_obs = 0;
  std::uint64_t seed = 42;
  /// Absolute slack added to the statistical tolerance of dominance checks.
  double tol = 1e-9;
  FisherMode fisher_mode = FisherMode::Analytic;
  std::size_t fisher_samples = 100000;
  BoundOptions bound;
  /// Multiples of the standard error used by the bias gate and the dominance checks.
  double bias_sigmas = 3.0;
  double dominance_sigmas = 3.0;
  double third_moment_threshold = 0.1;
  /// Test hook: estimates are replaced by exp(offset) * estimate.
  std::optional<Eigen::VectorXd> estimator_offset;
  bool evaluate_bounds = true;
  bool keep_trial_errors = false;
};

enum class DominanceStatus { Pass, Fail, NotApplicable };

struct DominanceCheck {
  std::string against;
  double min_eigenvalue = 0.0;
  double tolerance = 0.0;
  DominanceStatus status = DominanceStatus::NotApplicable;

  friend bool operator==(const DominanceCheck&, const DominanceCheck&) = default;
};

struct ExperimentReport {
  std::string group;
  std::string model;
  std::size_t n_trials = 0;
  int n_obs = 0;
  std::uint64_t seed = 0;
  Eigen::MatrixXd true_g;

  Eigen::MatrixXd p_hat;
  Eigen::VectorXd bias;
  double bias_norm = 0.0;
  double bias_threshold = 0.0;
  bool bias_gate_passed = false;
  /// Set when the information matrix is singular and statistics are taken
  /// in the observable subspace spanned by these columns.
  std::optional<Eigen::MatrixXd> observable_basis;

  bool bounds_evaluated = false;
  Eigen::MatrixXd information;
  Eigen::MatrixXd first_order;
  Eigen::MatrixXd second_order;
  /// Right-hand side evaluated at the empirical covariance.
  Eigen::MatrixXd literal_second_order;
  std::optional<Eigen::MatrixXd> smith_form;
  int iterations = 0;
  double residual = 0.0;
  std::vector<DominanceCheck> dominance;
  double efficiency_ratio = 0.0;
  double efficiency_ratio_second_order = 0.0;

  std::vector<std::string> warnings;
  std::vector<Eigen::VectorXd> trial_errors;

  /// True when any evaluated dominance check failed.
  bool dominance_violated() const;
};

bool operator==(const ExperimentReport& a, const ExperimentReport& b);

/// The true parameter of an experiment: explicit, drawn from the seed, or the identity.
GroupElement experiment_truth(const ExperimentConfig& config);

/// Directions of the n_obs observations per trial; the model's list is cycled
/// (n_obs = 0 uses each direction once).
std::vector<Eigen::Vector3d> wahba_observation_directions(const WahbaModelSpec& spec, int n_obs);

/// Information matrix at true_g: closed form for Wahba and abelian Gaussian
/// models in analytic mode, Monte Carlo otherwise (a note is appended to warnings).
Eigen::MatrixXd experiment_information(const ExperimentConfig& config, const GroupElement& true_g,
                                       std::vector<std::string>& warnings);

/// Samples n_trials datasets, estimates, and compares the empirical error
/// covariance with the bounds. Deterministic for a fixed seed.
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace liecrb
