#include "liecrb/fisher.hpp"

#include "liecrb/errors.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>

namespace liecrb {

namespace {

Eigen::Vector3d standard_normal3(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Vector3d z;
  for (int i = 0; i < 3; ++i) {
    z[i] = normal(rng);
  }
  return z;
}

double log_density_along(const ObservationModel& model, const Observation& x, const GroupElement& g,
                         const AlgebraVector& xi, double t) {
  return model.log_density(x, compose(exp_map(t * xi), g));
}

void require_samples(std::size_t n) {
  if (n < 1) {
    throw InvalidArgument("Monte Carlo estimates need n_samples >= 1");
  }
}

template <typename PerSample>
std::vector<double> per_sample_values(const ObservationModel& model, const GroupElement& g, std::size_t n,
                                      std::uint64_t seed, PerSample&& f) {
  std::vector<double> values(n);
  parallel_for(n, [&](std::size_t i) {
    Rng rng = make_stream(seed, i);
    values[i] = f(model.sample(g, rng));
  });
  return values;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) {
    s += x;
  }
  return s / static_cast<double>(v.size());
}

}  // namespace

WahbaVectors::WahbaVectors(std::vector<Eigen::Vector3d> directions, double sigma)
    : directions_(std::move(directions)), sigma_(sigma) {
  if (directions_.empty()) {
    throw InvalidArgument("WahbaVectors: at least one reference direction is required");
  }
  if (!(sigma_ > 0.0)) {
    throw InvalidArgument("WahbaVectors: sigma must be positive");
  }
  for (const Eigen::Vector3d& d : directions_) {
    if (std::abs(d.norm() - 1.0) > 1e-12) {
      throw InvalidArgument("WahbaVectors: reference directions must have unit norm");
    }
  }
}

double WahbaVectors::log_density(const Observation& x, const GroupElement& g) const {
  const auto k = static_cast<Eigen::Index>(directions_.size());
  if (x.rows() != 3 || x.cols() != k) {
    throw InvalidArgument("WahbaVectors: observation must be 3 x K");
  }
  const Eigen::Matrix3d r = g.matrix();
  double ss = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    ss += (x.col(i) - r * directions_[static_cast<std::size_t>(i)]).squaredNorm();
  }
  const double s2 = sigma_ * sigma_;
  return -0.5 * ss / s2 - 1.5 * static_cast<double>(k) * std::log(2.0 * std::numbers::pi * s2);
}

Observation WahbaVectors::sample(const GroupElement& g, Rng& rng) const {
  const Eigen::Matrix3d r = g.matrix();
  Observation x(3, static_cast<Eigen::Index>(directions_.size()));
  for (std::size_t i = 0; i < directions_.size(); ++i) {
    x.col(static_cast<Eigen::Index>(i)) = r * directions_[i] + sigma_ * standard_normal3(rng);
  }
  return x;
}

std::optional<double> WahbaVectors::analytic_score(const GroupElement& g, const AlgebraVector& xi,
                                                   const Observation& x) const {
  const Eigen::Matrix3d r = g.matrix();
  const Eigen::Vector3d w = xi.coords();
  double s = 0.0;
  for (std::size_t i = 0; i < directions_.size(); ++i) {
    const Eigen::Vector3d gd = r * directions_[i];
    s += (x.col(static_cast<Eigen::Index>(i)) - gd).dot(w.cross(gd));
  }
  return s / (sigma_ * sigma_);
}

ConcentratedGaussian::ConcentratedGaussian(GroupDescriptor group, Eigen::MatrixXd covariance, int n_obs)
    : group_(group), covariance_(std::move(covariance)), n_obs_(n_obs) {
  const int n = group_.dim();
  if (covariance_.rows() != n || covariance_.cols() != n) {
    throw InvalidArgument("ConcentratedGaussian: covariance must be " + std::to_string(n) + "x" +
                          std::to_string(n));
  }
  if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * covariance_.cwiseAbs().maxCoeff()) {
    throw InvalidArgument("ConcentratedGaussian: covariance must be symmetric");
  }
  if (n_obs_ < 1) {
    throw InvalidArgument("ConcentratedGaussian: n_obs must be >= 1");
  }
  llt_.compute(covariance_);
  if (llt_.info() != Eigen::Success) {
    throw InvalidArgument("ConcentratedGaussian: covariance must be positive definite");
  }
  const Eigen::MatrixXd l = llt_.matrixL();
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  log_normalizer_ = -0.5 * (n * std::log(2.0 * std::numbers::pi) + log_det);
}

GroupElement ConcentratedGaussian::element(const Observation& x, int j) const {
  const int m = group_.matrix_size();
  return {group_, x.middleCols(static_cast<Eigen::Index>(j) * m, m)};
}

double ConcentratedGaussian::log_density(const Observation& x, const GroupElement& g) const {
  const int m = group_.matrix_size();
  if (x.rows() != m || x.cols() != static_cast<Eigen::Index>(m) * n_obs_) {
    throw InvalidArgument("ConcentratedGaussian: observation has the wrong shape");
  }
  const GroupElement g_inv = inverse(g);
  double total = 0.0;
  for (int j = 0; j < n_obs_; ++j) {
    const Eigen::VectorXd w = log_map(compose(element(x, j), g_inv)).coords();
    total += -0.5 * w.dot(llt_.solve(w)) + log_normalizer_;
  }
  return total;
}

Observation ConcentratedGaussian::sample(const GroupElement& g, Rng& rng) const {
  const int n = group_.dim();
  const int m = group_.matrix_size();
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::MatrixXd l = llt_.matrixL();
  Observation x(m, static_cast<Eigen::Index>(m) * n_obs_);
  for (int j = 0; j < n_obs_; ++j) {
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) {
      z[i] = normal(rng);
    }
    x.middleCols(static_cast<Eigen::Index>(j) * m, m) = compose(exp_map({group_, l * z}), g).matrix();
  }
  return x;
}

double score(const ObservationModel& model, const GroupElement& g, const AlgebraVector& xi, const Observation& x,
             const FisherOptions& options) {
  if (options.use_analytic_score) {
    if (const auto s = model.analytic_score(g, xi, x)) {
      return *s;
    }
  }
  const double h = options.score_step;
  return (log_density_along(model, x, g, xi, h) - log_density_along(model, x, g, xi, -h)) / (2.0 * h);
}

ScoreStatistics score_statistics(const ObservationModel& model, const GroupElement& g, const AlgebraVector& xi,
                                 std::size_t n_samples, std::uint64_t seed, const FisherOptions& options) {
  require_samples(n_samples);
  const std::vector<double> s =
      per_sample_values(model, g, n_samples, seed, [&](const Observation& x) { return score(model, g, xi, x, options); });
  const double mean = mean_of(s);
  double var = 0.0;
  for (double v : s) {
    var += (v - mean) * (v - mean);
  }
  var /= static_cast<double>(n_samples > 1 ? n_samples - 1 : 1);
  return {mean, std::sqrt(var), n_samples};
}

double fisher_quadratic(const ObservationModel& model, const GroupElement& g, const AlgebraVector& xi,
                        std::size_t n_samples, std::uint64_t seed, const FisherOptions& options) {
  require_samples(n_samples);
  return mean_of(per_sample_values(model, g, n_samples, seed, [&](const Observation& x) {
    const double s = score(model, g, xi, x, options);
    return s * s;
  }));
}

InformationMatrix fisher_matrix_in_basis(const ObservationModel& model, const GroupElement& g,
                                         const Eigen::MatrixXd& basis, std::size_t n_samples, std::uint64_t seed,
                                         const FisherOptions& options) {
  require_samples(n_samples);
  const GroupDescriptor& group = model.group();
  const int n = group.dim();
  if (basis.rows() != n || basis.cols() != n) {
    throw InvalidArgument("fisher_matrix_in_basis: basis must be n x n");
  }

  std::vector<AlgebraVector> directions;
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < n; ++a) {
    directions.emplace_back(group, basis.col(a));
    pairs.emplace_back(a, a);
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      directions.emplace_back(group, basis.col(a) + basis.col(b));
      pairs.emplace_back(a, b);
    }
  }
  const std::size_t forms = directions.size();

  std::vector<double> squares(n_samples * forms);
  parallel_for(n_samples, [&](std::size_t i) {
    Rng rng = make_stream(seed, i);
    const Observation x = model.sample(g, rng);
    for (std::size_t f = 0; f < forms; ++f) {
      const double s = score(model, g, directions[f], x, options);
      squares[i * forms + f] = s * s;
    }
  });

  std::vector<double> q(forms, 0.0);
  for (std::size_t i = 0; i < n_samples; ++i) {
    for (std::size_t f = 0; f < forms; ++f) {
      q[f] += squares[i * forms + f];
    }
  }
  for (double& v : q) {
    v /= static_cast<double>(n_samples);
  }

  Eigen::MatrixXd jb(n, n);
  for (std::size_t f = 0; f < forms; ++f) {
    const auto [a, b] = pairs[f];
    if (a == b) {
      jb(a, a) = q[f];
    } else {
      jb(a, b) = 0.5 * (q[f] - q[static_cast<std::size_t>(a)] - q[static_cast<std::size_t>(b)]);
      jb(b, a) = jb(a, b);
    }
  }
  Eigen::MatrixXd j = basis * jb * basis.transpose();
  j = 0.5 * (j + j.transpose()).eval();
  return {std::move(j), group, g.matrix()};
}

InformationMatrix fisher_matrix(const ObservationModel& model, const GroupElement& g, std::size_t n_samples,
                                std::uint64_t seed, const FisherOptions& options) {
  const int n = model.group().dim();
  return fisher_matrix_in_basis(model, g, Eigen::MatrixXd::Identity(n, n), n_samples, seed, options);
}

double fisher_second_derivative(const ObservationModel& model, const GroupElement& g, const AlgebraVector& xi,
                                std::size_t n_samples, std::uint64_t seed, const FisherOptions& options) {
  require_samples(n_samples);
  const double h = options.second_step;
  return -mean_of(per_sample_values(model, g, n_samples, seed, [&](const Observation& x) {
    const double fp = log_density_along(model, x, g, xi, h);
    const double f0 = model.log_density(x, g);
    const double fm = log_density_along(model, x, g, xi, -h);
    return (fp - 2.0 * f0 + fm) / (h * h);
  }));
}

InformationMatrix wahba_fisher_analytic(std::span<const Eigen::Vector3d> directions, double sigma,
                                        const GroupElement& g) {
  if (g.group().id() != GroupId::SO3) {
    throw DomainError("wahba_fisher_analytic: only defined on so3, got " + g.group().name());
  }
  if (!(sigma > 0.0)) {
    throw InvalidArgument("wahba_fisher_analytic: sigma must be positive");
  }
  const Eigen::Matrix3d r = g.matrix();
  Eigen::Matrix3d j = Eigen::Matrix3d::Zero();
  for (const Eigen::Vector3d& d : directions) {
    const Eigen::Vector3d gd = r * d;
    j += d.squaredNorm() * Eigen::Matrix3d::Identity() - gd * gd.transpose();
  }
  j /= sigma * sigma;
  return {j, g.group(), g.matrix()};
}

}  // namespace liecrb
