#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/verify.hpp"

#include <liecrb/errors.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using liecrb::cli::CliConfig;

struct Flags {
  std::string config_path;
  std::optional<std::string> group;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<int> n_obs;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<double> tol;
  std::optional<std::string> fault;
  std::vector<double> estimator_offset;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "JSON configuration file");
  sub->add_option("--group", f.group, "so3 | se3 | se2 | abelianN");
  sub->add_option("--seed", f.seed, "Random seed");
  sub->add_option("--out", f.out, "Report path (default: stdout)");
  sub->add_option("--format", f.format, "json | csv");
  sub->add_option("--tol", f.tol, "Absolute tolerance added to dominance checks");
}

void add_experiment(CLI::App* sub, Flags& f) {
  sub->add_option("--trials", f.trials, "Monte Carlo trials");
  sub->add_option("--n-obs", f.n_obs, "Observations per trial (0: model default)");
}

CliConfig resolve(const Flags& f, const std::string& command) {
  CliConfig c = f.config_path.empty() ? CliConfig{} : liecrb::cli::load_config(f.config_path);
  if (c.command && *c.command != command) {
    throw liecrb::InvalidArgument("config is for the '" + *c.command + "' command, not '" + command + "'");
  }
  if (f.group) c.group = *f.group;
  if (f.seed) c.seed = *f.seed;
  if (f.trials) c.trials = *f.trials;
  if (f.n_obs) c.n_obs = *f.n_obs;
  if (f.out) c.out = *f.out;
  if (f.format) c.format = liecrb::cli::parse_format(*f.format);
  if (f.tol) c.tol = *f.tol;
  if (!f.estimator_offset.empty()) c.estimator_offset = f.estimator_offset;
  liecrb::GroupDescriptor::parse(c.group);
  if (c.trials < 1) {
    throw liecrb::InvalidArgument("--trials must be >= 1");
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curvature-corrected Cramer-Rao bounds for estimation on matrix Lie groups"};
  app.require_subcommand(1);
  Flags flags;

  CLI::App* verify = app.add_subcommand("verify", "Run the algebraic identity checks for a group");
  add_common(verify, flags);
  verify->add_option("--inject-fault", flags.fault, "Test hook: bracket-sign");

  CLI::App* bound = app.add_subcommand("bound", "Information matrix and bounds for a model");
  add_common(bound, flags);

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo estimation errors");
  add_common(simulate, flags);
  add_experiment(simulate, flags);
  simulate->add_option("--estimator-offset", flags.estimator_offset, "Test hook: bias added to every estimate")
      ->delimiter(',');

  CLI::App* compare = app.add_subcommand("compare", "Empirical covariance against the bounds");
  add_common(compare, flags);
  add_experiment(compare, flags);
  compare->add_option("--estimator-offset", flags.estimator_offset, "Test hook: bias added to every estimate")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return liecrb::cli::kExitUsage;
  }

  try {
    if (verify->parsed()) {
      const CliConfig c = resolve(flags, "verify");
      return liecrb::cli::cmd_verify(c, liecrb::cli::parse_fault(flags.fault.value_or("")), std::cout, std::cerr);
    }
    if (bound->parsed()) {
      return liecrb::cli::cmd_bound(resolve(flags, "bound"), std::cout, std::cerr);
    }
    if (simulate->parsed()) {
      return liecrb::cli::cmd_simulate(resolve(flags, "simulate"), std::cout, std::cerr);
    }
    return liecrb::cli::cmd_compare(resolve(flags, "compare"), std::cout, std::cerr);
  } catch (const liecrb::InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return liecrb::cli::kExitUsage;
  } catch (const liecrb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return liecrb::cli::kExitSimulation;
  }
}
