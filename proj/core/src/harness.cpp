#include "liecrb/harness.hpp"

#include "liecrb/curvature.hpp"
#include "liecrb/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>
#include <Eigen/SVD>

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

namespace liecrb {

namespace {

double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Shortest-arc rotation taking unit vector a to unit vector b.
Eigen::Matrix3d shortest_arc(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return Eigen::Quaterniond::FromTwoVectors(a, b).toRotationMatrix();
}

bool collinear(std::span<const Eigen::Vector3d> directions) {
  Eigen::MatrixXd d(3, static_cast<Eigen::Index>(directions.size()));
  for (std::size_t i = 0; i < directions.size(); ++i) {
    d.col(static_cast<Eigen::Index>(i)) = directions[i];
  }
  const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(d).singularValues();
  return s.size() < 2 || s[1] <= 1e-9 * s[0];
}

std::vector<Eigen::Vector3d> columns(const Observation& x) {
  std::vector<Eigen::Vector3d> out;
  out.reserve(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    out.emplace_back(x.col(i));
  }
  return out;
}

std::string dominance_failure_note(const DominanceCheck& c) {
  std::ostringstream os;
  os << "dominance against " << c.against << " violated: min eigenvalue " << c.min_eigenvalue << " < -"
     << c.tolerance;
  return os.str();
}

bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

bool same_optional_matrix(const std::optional<Eigen::MatrixXd>& a, const std::optional<Eigen::MatrixXd>& b) {
  if (a.has_value() != b.has_value()) {
    return false;
  }
  return !a || same_matrix(*a, *b);
}

Eigen::MatrixXd information_for(const ObservationModel& model, const ExperimentConfig& config,
                                const GroupElement& true_g, std::vector<std::string>& warnings) {
  const int n = config.group.dim();
  if (config.fisher_mode == FisherMode::Analytic) {
    if (const auto* w = dynamic_cast<const WahbaVectors*>(&model)) {
      return wahba_fisher_analytic(w->directions(), w->sigma(), true_g).j;
    }
    if (const auto* g = dynamic_cast<const ConcentratedGaussian*>(&model);
        g != nullptr && config.group.id() == GroupId::AbelianRn) {
      const Eigen::MatrixXd inv = g->covariance().llt().solve(Eigen::MatrixXd::Identity(n, n));
      return static_cast<double>(g->n_obs()) * 0.5 * (inv + inv.transpose());
    }
    warnings.push_back("no closed-form information matrix for this model; used Monte Carlo");
  }
  const std::uint64_t fisher_seed = config.seed ^ 0x9e3779b97f4a7c15ULL;
  return fisher_matrix(model, true_g, config.fisher_samples, fisher_seed).j;
}

}  // namespace

GroupElement experiment_truth(const ExperimentConfig& config) {
  if (config.random_true_g) {
    Rng rng = make_stream(config.seed, std::numeric_limits<std::uint64_t>::max());
    return random_group_element(config.group, rng);
  }
  if (config.true_g) {
    return GroupElement(config.group, *config.true_g);
  }
  return GroupElement::identity(config.group);
}

std::vector<Eigen::Vector3d> wahba_observation_directions(const WahbaModelSpec& spec, int n_obs) {
  if (spec.directions.empty()) {
    throw InvalidArgument("wahba model needs at least one direction");
  }
  const std::size_t count = n_obs > 0 ? static_cast<std::size_t>(n_obs) : spec.directions.size();
  std::vector<Eigen::Vector3d> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(spec.directions[i % spec.directions.size()]);
  }
  return out;
}

Eigen::MatrixXd experiment_information(const ExperimentConfig& config, const GroupElement& true_g,
                                       std::vector<std::string>& warnings) {
  if (const auto* w = std::get_if<WahbaModelSpec>(&config.model)) {
    if (config.group.id() != GroupId::SO3) {
      throw InvalidArgument("the wahba model lives on so3, not " + config.group.name());
    }
    const WahbaVectors model(wahba_observation_directions(*w, config.n_obs), w->sigma);
    return information_for(model, config, true_g, warnings);
  }
  const ConcentratedGaussian model(config.group, std::get<GaussianModelSpec>(config.model).covariance,
                                   config.n_obs > 0 ? config.n_obs : 1);
  return information_for(model, config, true_g, warnings);
}

GroupElement wahba_ml_estimator(std::span<const Eigen::Vector3d> observations,
                                std::span<const Eigen::Vector3d> directions) {
  if (observations.size() != directions.size()) {
    throw InvalidArgument("wahba_ml_estimator: observation and direction counts differ");
  }
  if (directions.size() < 2 || collinear(directions)) {
    throw DegenerateProblem("wahba_ml_estimator: needs at least two non-collinear directions");
  }
  Eigen::Matrix3d b = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < directions.size(); ++i) {
    b += observations[i] * directions[i].transpose();
  }
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d& u = svd.matrixU();
  const Eigen::Matrix3d& v = svd.matrixV();
  const Eigen::Vector3d s(1.0, 1.0, u.determinant() * v.determinant() < 0.0 ? -1.0 : 1.0);
  return project_to_group(GroupDescriptor::so3(), u * s.asDiagonal() * v.transpose());
}

double wahba_cost(const GroupElement& rotation, std::span<const Eigen::Vector3d> observations,
                  std::span<const Eigen::Vector3d> directions) {
  const Eigen::Matrix3d r = rotation.matrix();
  double cost = 0.0;
  for (std::size_t i = 0; i < directions.size(); ++i) {
    cost += (observations[i] - r * directions[i]).squaredNorm();
  }
  return cost;
}

GroupElement intrinsic_mean(std::span<const GroupElement> elements, int max_iters) {
  if (elements.empty()) {
    throw InvalidArgument("intrinsic_mean: no elements");
  }
  const GroupDescriptor& group = elements.front().group();
  GroupElement mean = elements.front();
  for (int it = 0; it < max_iters; ++it) {
    const GroupElement mean_inv = inverse(mean);
    Eigen::VectorXd step = Eigen::VectorXd::Zero(group.dim());
    for (const GroupElement& x : elements) {
      step += log_map(compose(x, mean_inv)).coords();
    }
    step /= static_cast<double>(elements.size());
    mean = compose(exp_map({group, step}), mean);
    if (step.norm() < 1e-14) {
      break;
    }
  }
  return mean;
}

GroupElement random_group_element(const GroupDescriptor& group, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int m = group.matrix_size();
  Eigen::MatrixXd mat = Eigen::MatrixXd::Identity(m, m);
  switch (group.id()) {
    case GroupId::SO3:
    case GroupId::SE3: {
      // Shoemake's uniform quaternion.
      const double u1 = uniform(rng);
      const double u2 = 2.0 * std::numbers::pi * uniform(rng);
      const double u3 = 2.0 * std::numbers::pi * uniform(rng);
      const double a = std::sqrt(1.0 - u1);
      const double b = std::sqrt(u1);
      const Eigen::Quaterniond q(b * std::cos(u3), a * std::sin(u2), a * std::cos(u2), b * std::sin(u3));
      mat.topLeftCorner<3, 3>() = q.normalized().toRotationMatrix();
      if (group.id() == GroupId::SE3) {
        for (int i = 0; i < 3; ++i) {
          mat(i, 3) = normal(rng);
        }
      }
      break;
    }
    case GroupId::SE2: {
      const double th = std::numbers::pi * (2.0 * uniform(rng) - 1.0);
      mat(0, 0) = std::cos(th);
      mat(0, 1) = -std::sin(th);
      mat(1, 0) = std::sin(th);
      mat(1, 1) = std::cos(th);
      mat(0, 2) = normal(rng);
      mat(1, 2) = normal(rng);
      break;
    }
    case GroupId::AbelianRn:
      for (int i = 0; i < group.dim(); ++i) {
        mat(i, m - 1) = normal(rng);
      }
      break;
  }
  return project_to_group(group, mat);
}

std::vector<AlgebraVector> error_vectors(const GroupElement& true_g, std::span<const GroupElement> estimates) {
  if (estimates.empty()) {
    throw InvalidArgument("error statistics need at least one estimate");
  }
  std::vector<AlgebraVector> errors;
  errors.reserve(estimates.size());
  for (std::size_t k = 0; k < estimates.size(); ++k) {
    try {
      errors.push_back(log_map(compose(true_g, inverse(estimates[k]))));
    } catch (const DomainError& e) {
      throw DomainError("trial " + std::to_string(k) + ": " + e.what(), e.angle(), k);
    }
  }
  return errors;
}

Eigen::MatrixXd empirical_error_covariance(const GroupElement& true_g, std::span<const GroupElement> estimates) {
  return second_moment(error_vectors(true_g, estimates));
}

AlgebraVector bias_vector(const GroupElement& true_g, std::span<const GroupElement> estimates) {
  const std::vector<AlgebraVector> errors = error_vectors(true_g, estimates);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(true_g.group().dim());
  for (const AlgebraVector& e : errors) {
    mean += e.coords();
  }
  return {true_g.group(), mean / static_cast<double>(errors.size())};
}

double jackknife_min_eigenvalue_se(std::span<const AlgebraVector> errors, const Eigen::MatrixXd& bound,
                                   const Eigen::MatrixXd& basis) {
  const std::size_t n = errors.size();
  if (n < 2) {
    return 0.0;
  }
  const Eigen::MatrixXd total = second_moment(errors) * static_cast<double>(n);
  std::vector<double> lambdas(n);
  parallel_for(n, [&](std::size_t k) {
    const Eigen::VectorXd& e = errors[k].coords();
    const Eigen::MatrixXd loo = (total - e * e.transpose()) / static_cast<double>(n - 1);
    lambdas[k] = min_eigenvalue(basis.transpose() * (loo - bound) * basis);
  });
  double mean = 0.0;
  for (double l : lambdas) {
    mean += l;
  }
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double l : lambdas) {
    ss += (l - mean) * (l - mean);
  }
  return std::sqrt(static_cast<double>(n - 1) / static_cast<double>(n) * ss);
}

bool ExperimentReport::dominance_violated() const {
  for (const DominanceCheck& c : dominance) {
    if (c.status == DominanceStatus::Fail) {
      return true;
    }
  }
  return false;
}

bool operator==(const ExperimentReport& a, const ExperimentReport& b) {
  if (a.trial_errors.size() != b.trial_errors.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.trial_errors.size(); ++i) {
    if (!same_matrix(a.trial_errors[i], b.trial_errors[i])) {
      return false;
    }
  }
  return a.group == b.group && a.model == b.model && a.n_trials == b.n_trials && a.n_obs == b.n_obs &&
         a.seed == b.seed && same_matrix(a.true_g, b.true_g) && same_matrix(a.p_hat, b.p_hat) &&
         same_matrix(a.bias, b.bias) && a.bias_norm == b.bias_norm && a.bias_threshold == b.bias_threshold &&
         a.bias_gate_passed == b.bias_gate_passed && same_optional_matrix(a.observable_basis, b.observable_basis) &&
         a.bounds_evaluated == b.bounds_evaluated && same_matrix(a.information, b.information) &&
         same_matrix(a.first_order, b.first_order) && same_matrix(a.second_order, b.second_order) &&
         same_matrix(a.literal_second_order, b.literal_second_order) &&
         same_optional_matrix(a.smith_form, b.smith_form) && a.iterations == b.iterations &&
         a.residual == b.residual && a.dominance == b.dominance && a.efficiency_ratio == b.efficiency_ratio &&
         a.efficiency_ratio_second_order == b.efficiency_ratio_second_order && a.warnings == b.warnings;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  const GroupDescriptor& group = config.group;
  const int n = group.dim();
  if (config.n_trials < 1) {
    throw InvalidArgument("run_experiment: n_trials must be >= 1");
  }
  if (config.n_obs < 0) {
    throw InvalidArgument("run_experiment: n_obs must be >= 0");
  }

  ExperimentReport report;
  report.group = group.name();
  report.n_trials = config.n_trials;
  report.seed = config.seed;

  const GroupElement true_g = experiment_truth(config);
  report.true_g = true_g.matrix();

  // Model and estimator.
  std::unique_ptr<ObservationModel> model;
  std::vector<Eigen::Vector3d> directions;
  bool degenerate = false;
  std::function<GroupElement(const Observation&)> estimate;

  if (const auto* w = std::get_if<WahbaModelSpec>(&config.model)) {
    if (group.id() != GroupId::SO3) {
      throw InvalidArgument("run_experiment: the wahba model lives on so3, not " + group.name());
    }
    directions = wahba_observation_directions(*w, config.n_obs);
    report.n_obs = static_cast<int>(directions.size());
    report.model = "wahba";
    model = std::make_unique<WahbaVectors>(directions, w->sigma);
    degenerate = collinear(directions);
    if (!degenerate) {
      estimate = [&directions](const Observation& x) {
        const std::vector<Eigen::Vector3d> obs = columns(x);
        return wahba_ml_estimator(obs, directions);
      };
    } else {
      // Only the image of the common axis is observable. The rotation about
      // it is held at the truth, so errors lie in the observable subspace.
      estimate = [&directions, &true_g](const Observation& x) {
        const Eigen::Vector3d axis = directions.front();
        Eigen::Vector3d sum = Eigen::Vector3d::Zero();
        for (std::size_t i = 0; i < directions.size(); ++i) {
          sum += directions[i].dot(axis) * x.col(static_cast<Eigen::Index>(i));
        }
        const Eigen::Matrix3d r = true_g.matrix();
        const Eigen::Matrix3d arc = shortest_arc(r * axis, sum.normalized());
        return project_to_group(GroupDescriptor::so3(), arc * r);
      };
    }
  } else {
    const auto& gs = std::get<GaussianModelSpec>(config.model);
    const int n_obs = config.n_obs > 0 ? config.n_obs : 1;
    report.n_obs = n_obs;
    report.model = "gaussian";
    auto gaussian = std::make_unique<ConcentratedGaussian>(group, gs.covariance, n_obs);
    const ConcentratedGaussian* gp = gaussian.get();
    estimate = [gp, n_obs](const Observation& x) {
      std::vector<GroupElement> elements;
      elements.reserve(static_cast<std::size_t>(n_obs));
      for (int j = 0; j < n_obs; ++j) {
        elements.push_back(gp->element(x, j));
      }
      return intrinsic_mean(elements);
    };
    model = std::move(gaussian);
  }

  std::optional<GroupElement> offset;
  if (config.estimator_offset) {
    offset = exp_map({group, *config.estimator_offset});
  }

  // Trials.
  std::vector<std::optional<AlgebraVector>> slots(config.n_trials);
  std::vector<std::string> failures(config.n_trials);
  parallel_for(config.n_trials, [&](std::size_t t) {
    try {
      Rng rng = make_stream(config.seed, t);
      const Observation x = model->sample(true_g, rng);
      GroupElement est = estimate(x);
      if (offset) {
        est = compose(*offset, est);
      }
      slots[t] = log_map(compose(true_g, inverse(est)));
    } catch (const Error& e) {
      failures[t] = e.what();
    }
  });
  std::vector<AlgebraVector> errors;
  errors.reserve(config.n_trials);
  for (std::size_t t = 0; t < config.n_trials; ++t) {
    if (!slots[t]) {
      throw DomainError("trial " + std::to_string(t) + ": " + failures[t], std::nullopt, t);
    }
    errors.push_back(std::move(*slots[t]));
  }

  // Error statistics.
  report.p_hat = second_moment(errors);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  for (const AlgebraVector& e : errors) {
    mean += e.coords();
  }
  report.bias = mean / static_cast<double>(errors.size());
  report.bias_norm = report.bias.norm();
  report.bias_threshold =
      config.bias_sigmas * std::sqrt(std::max(0.0, report.p_hat.trace()) / static_cast<double>(config.n_trials));
  report.bias_gate_passed = report.bias_norm <= report.bias_threshold;
  if (!report.bias_gate_passed) {
    std::ostringstream os;
    os << "intrinsic bias |b| = " << report.bias_norm << " exceeds " << report.bias_threshold
       << "; the estimator is not unbiased, dominance checks are not applicable";
    report.warnings.push_back(os.str());
  }
  if (auto w = third_moment_warning(errors, config.third_moment_threshold)) {
    report.warnings.push_back(*w);
  }
  if (config.keep_trial_errors) {
    report.trial_errors.reserve(errors.size());
    for (const AlgebraVector& e : errors) {
      report.trial_errors.push_back(e.coords());
    }
  }

  if (!config.evaluate_bounds) {
    return report;
  }

  report.information = information_for(*model, config, true_g, report.warnings);

  // Bounds.
  const StructureTensor& tensor = StructureTensor::of(group);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(n, n);
  BoundResult bound;
  try {
    bound = bound_fixed_point(report.information, tensor, config.bound);
  } catch (const SingularInformation& e) {
    if (!degenerate) {
      throw;
    }
    basis = orthogonal_complement(e.null_space(), n);
    report.observable_basis = basis;
    bound = bound_fixed_point_subspace(report.information, basis, tensor, config.bound);
    report.warnings.push_back("information matrix is singular; statistics restricted to the observable subspace");
  }
  report.bounds_evaluated = true;
  report.first_order = bound.first_order;
  report.second_order = bound.second_order;
  report.smith_form = bound.smith_form;
  report.iterations = bound.iterations;
  report.residual = bound.residual;
  for (const std::string& w : bound.warnings) {
    report.warnings.push_back(w);
  }

  {
    const Eigen::MatrixXd j_r = basis.transpose() * report.information * basis;
    const Eigen::MatrixXd j_r_inv = bound_first_order(0.5 * (j_r + j_r.transpose()), config.bound.singular_floor);
    const Eigen::MatrixXd m =
        basis.transpose() * (Eigen::MatrixXd::Identity(n, n) + g0_operator(report.p_hat, tensor) / 12.0) * basis;
    const Eigen::MatrixXd lit = m * j_r_inv * m.transpose();
    report.literal_second_order = basis * (0.5 * (lit + lit.transpose())) * basis.transpose();
  }

  const std::pair<const char*, const Eigen::MatrixXd*> targets[] = {
      {"first_order", &report.first_order},
      {"second_order", &report.second_order},
      {"literal_second_order", &report.literal_second_order},
  };
  for (const auto& [name, target] : targets) {
    DominanceCheck check;
    check.against = name;
    check.min_eigenvalue = min_eigenvalue(basis.transpose() * (report.p_hat - *target) * basis);
    check.tolerance = config.dominance_sigmas * jackknife_min_eigenvalue_se(errors, *target, basis) + config.tol;
    if (!report.bias_gate_passed) {
      check.status = DominanceStatus::NotApplicable;
    } else {
      check.status = check.min_eigenvalue >= -check.tolerance ? DominanceStatus::Pass : DominanceStatus::Fail;
    }
    if (check.status == DominanceStatus::Fail) {
      report.warnings.push_back(dominance_failure_note(check));
    }
    report.dominance.push_back(check);
  }

  report.efficiency_ratio = report.p_hat.trace() / report.first_order.trace();
  report.efficiency_ratio_second_order = report.p_hat.trace() / report.second_order.trace();
  return report;
}

}  // namespace liecrb
