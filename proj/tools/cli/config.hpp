#pragma once

#include <liecrb/harness.hpp>

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace liecrb::cli {

enum class OutputFormat { Json, Csv };

/// How the true parameter is chosen: identity, drawn from the seed, or an explicit matrix.
struct TruthSpec {
  enum class Kind { Identity, Random, Explicit } kind = Kind::Identity;
  Eigen::MatrixXd matrix;

  friend bool operator==(const TruthSpec& a, const TruthSpec& b) {
    if (a.kind != b.kind) return false;
    if (a.kind != Kind::Explicit) return true;
    return a.matrix.rows() == b.matrix.rows() && a.matrix.cols() == b.matrix.cols() && a.matrix == b.matrix;
  }
};

/// Declarative run configuration. Every key is optional; defaults below.
/// The file format is JSON with nested sections; unknown keys are rejected.
struct CliConfig {
  /// verify | bound | simulate | compare. When set it must match the subcommand.
  std::optional<std::string> command;
  std::string group = "so3";
  /// Empty: default model for the group (Wahba e1/e2/e3, sigma 0.1 on so3;
  /// Gaussian with covariance 0.01 I elsewhere).
  std::optional<ModelSpec> model;
  TruthSpec true_g;
  std::size_t trials = 10000;
  int n_obs = 0;
  std::uint64_t seed = 42;
  double tol = 1e-9;
  FisherMode fisher_mode = FisherMode::Analytic;
  std::size_t fisher_samples = 100000;
  double bound_tol = 1e-10;
  int bound_max_iters = 100;
  double bias_sigmas = 3.0;
  double dominance_sigmas = 3.0;
  std::optional<std::vector<double>> estimator_offset;
  std::optional<std::string> out;
  OutputFormat format = OutputFormat::Json;

  friend bool operator==(const CliConfig&, const CliConfig&) = default;
};

/// Parses a JSON config document. Throws InvalidArgument on unknown keys or bad values.
CliConfig parse_config(std::string_view text);
CliConfig load_config(const std::string& path);

/// Canonical JSON form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const CliConfig& config);

ModelSpec resolved_model(const CliConfig& config);

/// Harness configuration for the simulate (bounds off) or compare (bounds on) commands.
ExperimentConfig to_experiment_config(const CliConfig& config, bool evaluate_bounds);

OutputFormat parse_format(std::string_view s);

}  // namespace liecrb::cli
