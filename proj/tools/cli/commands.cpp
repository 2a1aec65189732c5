#include "commands.hpp"

#include <liecrb/bound.hpp>
#include <liecrb/errors.hpp>
#include <liecrb/harness.hpp>
#include <liecrb/report_io.hpp>

#include <nlohmann/json.hpp>

#include <fstream>

namespace liecrb::cli {

namespace {

using nlohmann::json;

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(m(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void emit(const CliConfig& config, const std::string& text, std::ostream& out) {
  if (!config.out) {
    out << text;
    return;
  }
  std::ofstream file(*config.out, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw InvalidArgument("cannot write '" + *config.out + "'");
  }
  file << text;
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const std::string& w : warnings) {
    err << "warning: " << w << "\n";
  }
}

std::string model_name(const ModelSpec& m) { return std::holds_alternative<WahbaModelSpec>(m) ? "wahba" : "gaussian"; }

int singular_exit(const CliConfig& config, const SingularInformation& e, std::ostream& out, std::ostream& err,
                  const char* schema) {
  const Eigen::MatrixXd null = sign_normalized(e.null_space());
  err << "error: singular information matrix; unobservable directions:\n";
  for (Eigen::Index c = 0; c < null.cols(); ++c) {
    err << " ";
    for (Eigen::Index i = 0; i < null.rows(); ++i) {
      err << " " << format_double(null(i, c));
    }
    err << "\n";
  }
  json j;
  j["schema"] = schema;
  j["group"] = config.group;
  j["error"] = "singular_information";
  j["message"] = e.what();
  json dirs = json::array();
  for (Eigen::Index c = 0; c < null.cols(); ++c) {
    json d = json::array();
    for (Eigen::Index i = 0; i < null.rows(); ++i) {
      d.push_back(null(i, c));
    }
    dirs.push_back(std::move(d));
  }
  j["null_directions"] = std::move(dirs);
  if (config.format == OutputFormat::Json) {
    emit(config, j.dump(2) + "\n", out);
  } else {
    FlatTable t;
    t.add("group", config.group);
    t.add("error", "singular_information");
    for (Eigen::Index c = 0; c < null.cols(); ++c) {
      t.add_vector("null_direction_" + std::to_string(c), null.col(c));
    }
    emit(config, t.to_csv(), out);
  }
  return kExitSingularInformation;
}

}  // namespace

Eigen::MatrixXd sign_normalized(Eigen::MatrixXd columns) {
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    Eigen::Index i = 0;
    columns.col(c).cwiseAbs().maxCoeff(&i);
    if (columns(i, c) < 0.0) {
      columns.col(c) = -columns.col(c);
    }
  }
  return columns;
}

int cmd_verify(const CliConfig& config, Fault fault, std::ostream& out, std::ostream& err) {
  const GroupDescriptor group = GroupDescriptor::parse(config.group);
  const VerifyReport report = run_verify(group, config.seed, fault);
  emit(config, config.format == OutputFormat::Json ? verify_report_to_json(report) : verify_report_to_csv(report),
       out);
  for (const CheckResult& c : report.checks) {
    if (!c.passed) {
      err << "FAIL " << c.name << ": value " << format_double(c.value) << ", threshold "
          << format_double(c.threshold) << "\n";
    }
  }
  return report.passed() ? kExitOk : kExitVerifyFailed;
}

int cmd_bound(const CliConfig& config, std::ostream& out, std::ostream& err) {
  constexpr const char* kSchema = "liecrb.bound_report/1";
  const ExperimentConfig e = to_experiment_config(config, true);
  const GroupElement true_g = experiment_truth(e);
  std::vector<std::string> warnings;
  const Eigen::MatrixXd j = experiment_information(e, true_g, warnings);

  BoundResult bound;
  try {
    bound = bound_fixed_point(j, StructureTensor::of(e.group), e.bound);
  } catch (const SingularInformation& s) {
    return singular_exit(config, s, out, err, kSchema);
  } catch (const ConvergenceFailure& c) {
    err << "error: " << c.what() << " (residual " << format_double(c.residual()) << ")\n";
    return kExitSimulation;
  }
  warnings.insert(warnings.end(), bound.warnings.begin(), bound.warnings.end());
  const double correction = (bound.second_order - bound.first_order).norm() / bound.first_order.norm();

  if (config.format == OutputFormat::Json) {
    json r;
    r["schema"] = kSchema;
    r["group"] = e.group.name();
    r["model"] = model_name(e.model);
    r["seed"] = e.seed;
    r["true_g"] = matrix_json(true_g.matrix());
    r["information"] = matrix_json(j);
    r["first_order"] = matrix_json(bound.first_order);
    r["second_order"] = matrix_json(bound.second_order);
    if (bound.smith_form) {
      r["smith_form"] = matrix_json(*bound.smith_form);
    }
    r["iterations"] = bound.iterations;
    r["residual"] = bound.residual;
    r["relative_curvature_correction"] = correction;
    r["warnings"] = warnings;
    emit(config, r.dump(2) + "\n", out);
  } else {
    FlatTable t;
    t.add("group", e.group.name());
    t.add("model", model_name(e.model));
    t.add("seed", std::to_string(e.seed));
    t.add_matrix("true_g", true_g.matrix());
    t.add_matrix("J", j);
    t.add_matrix("first_order", bound.first_order);
    t.add_matrix("second_order", bound.second_order);
    if (bound.smith_form) {
      t.add_matrix("smith_form", *bound.smith_form);
    }
    t.add_integer("iterations", bound.iterations);
    t.add("residual", bound.residual);
    t.add("relative_curvature_correction", correction);
    for (std::size_t i = 0; i < warnings.size(); ++i) {
      t.add("warning_" + std::to_string(i), warnings[i]);
    }
    emit(config, t.to_csv(), out);
  }
  print_warnings(warnings, err);
  return kExitOk;
}

int cmd_simulate(const CliConfig& config, std::ostream& out, std::ostream& err) {
  const ExperimentConfig e = to_experiment_config(config, false);
  ExperimentReport report;
  try {
    report = run_experiment(e);
  } catch (const InvalidArgument&) {
    throw;
  } catch (const Error& x) {
    err << "error: simulation failed: " << x.what() << "\n";
    return kExitSimulation;
  }
  emit(config,
       config.format == OutputFormat::Json ? experiment_report_to_json(report) : experiment_report_to_csv(report), out);
  print_warnings(report.warnings, err);
  return kExitOk;
}

int cmd_compare(const CliConfig& config, std::ostream& out, std::ostream& err) {
  const ExperimentConfig e = to_experiment_config(config, true);
  ExperimentReport report;
  try {
    report = run_experiment(e);
  } catch (const SingularInformation& s) {
    return singular_exit(config, s, out, err, "liecrb.experiment_report/1");
  } catch (const InvalidArgument&) {
    throw;
  } catch (const Error& x) {
    err << "error: simulation failed: " << x.what() << "\n";
    return kExitSimulation;
  }
  emit(config,
       config.format == OutputFormat::Json ? experiment_report_to_json(report) : experiment_report_to_csv(report), out);
  print_warnings(report.warnings, err);
  if (report.dominance_violated()) {
    err << "error: empirical covariance violates a bound beyond the statistical tolerance\n";
    return kExitDominanceViolated;
  }
  return kExitOk;
}

}  // namespace liecrb::cli
