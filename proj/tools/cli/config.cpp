#include "config.hpp"

#include <liecrb/errors.hpp>

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace liecrb::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) {
    throw InvalidArgument("config: " + where + " must be an object");
  }
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      throw InvalidArgument("config: unknown key '" + key + "' in " + where);
    }
  }
}

Eigen::MatrixXd matrix_from(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) {
    throw InvalidArgument("config: " + what + " must be a non-empty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw InvalidArgument("config: " + what + " has ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

json matrix_to(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(m(r, c));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ModelSpec model_from(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "wahba") {
    reject_unknown(j, {"type", "directions", "sigma"}, "model");
    WahbaModelSpec w;
    w.sigma = j.value("sigma", 0.1);
    const json& dirs = j.at("directions");
    if (!dirs.is_array() || dirs.empty()) {
      throw InvalidArgument("config: model.directions must be a non-empty array");
    }
    for (const json& d : dirs) {
      if (!d.is_array() || d.size() != 3) {
        throw InvalidArgument("config: every wahba direction must have 3 components");
      }
      w.directions.emplace_back(d[0].get<double>(), d[1].get<double>(), d[2].get<double>());
    }
    return w;
  }
  if (type == "gaussian") {
    reject_unknown(j, {"type", "covariance"}, "model");
    return GaussianModelSpec{matrix_from(j.at("covariance"), "model.covariance")};
  }
  throw InvalidArgument("config: unknown model type '" + type + "' (expected wahba or gaussian)");
}

json model_to(const ModelSpec& m) {
  if (const auto* w = std::get_if<WahbaModelSpec>(&m)) {
    json dirs = json::array();
    for (const Eigen::Vector3d& d : w->directions) {
      dirs.push_back({d.x(), d.y(), d.z()});
    }
    return {{"type", "wahba"}, {"directions", std::move(dirs)}, {"sigma", w->sigma}};
  }
  return {{"type", "gaussian"}, {"covariance", matrix_to(std::get<GaussianModelSpec>(m).covariance)}};
}

}  // namespace

OutputFormat parse_format(std::string_view s) {
  if (s == "json") return OutputFormat::Json;
  if (s == "csv") return OutputFormat::Csv;
  throw InvalidArgument("unknown output format '" + std::string(s) + "' (expected json or csv)");
}

CliConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  reject_unknown(j,
                 {"command", "group", "model", "true_g", "trials", "n_obs", "seed", "tol", "fisher", "bound", "bias_sigmas",
                  "dominance_sigmas", "estimator_offset", "output"},
                 "config");
  CliConfig c;
  try {
    if (j.contains("command")) {
      c.command = j["command"].get<std::string>();
      if (*c.command != "verify" && *c.command != "bound" && *c.command != "simulate" && *c.command != "compare") {
        throw InvalidArgument("config: command must be verify, bound, simulate or compare");
      }
    }
    c.group = j.value("group", c.group);
    GroupDescriptor::parse(c.group);
    if (j.contains("model")) {
      c.model = model_from(j["model"]);
    }
    if (j.contains("true_g")) {
      const json& t = j["true_g"];
      if (t.is_string()) {
        const std::string s = t.get<std::string>();
        if (s == "identity") {
          c.true_g.kind = TruthSpec::Kind::Identity;
        } else if (s == "random") {
          c.true_g.kind = TruthSpec::Kind::Random;
        } else {
          throw InvalidArgument("config: true_g must be \"identity\", \"random\" or a matrix");
        }
      } else {
        c.true_g.kind = TruthSpec::Kind::Explicit;
        c.true_g.matrix = matrix_from(t, "true_g");
      }
    }
    c.trials = j.value("trials", c.trials);
    c.n_obs = j.value("n_obs", c.n_obs);
    c.seed = j.value("seed", c.seed);
    c.tol = j.value("tol", c.tol);
    if (j.contains("fisher")) {
      const json& f = j["fisher"];
      reject_unknown(f, {"mode", "samples"}, "fisher");
      const std::string mode = f.value("mode", "analytic");
      if (mode == "analytic") {
        c.fisher_mode = FisherMode::Analytic;
      } else if (mode == "monte_carlo") {
        c.fisher_mode = FisherMode::MonteCarlo;
      } else {
        throw InvalidArgument("config: fisher.mode must be analytic or monte_carlo");
      }
      c.fisher_samples = f.value("samples", c.fisher_samples);
    }
    if (j.contains("bound")) {
      const json& b = j["bound"];
      reject_unknown(b, {"tol", "max_iters"}, "bound");
      c.bound_tol = b.value("tol", c.bound_tol);
      c.bound_max_iters = b.value("max_iters", c.bound_max_iters);
    }
    c.bias_sigmas = j.value("bias_sigmas", c.bias_sigmas);
    c.dominance_sigmas = j.value("dominance_sigmas", c.dominance_sigmas);
    if (j.contains("estimator_offset")) {
      c.estimator_offset = j["estimator_offset"].get<std::vector<double>>();
    }
    if (j.contains("output")) {
      const json& o = j["output"];
      reject_unknown(o, {"path", "format"}, "output");
      if (o.contains("path")) {
        c.out = o["path"].get<std::string>();
      }
      c.format = parse_format(o.value("format", "json"));
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  if (c.trials < 1) {
    throw InvalidArgument("config: trials must be >= 1");
  }
  return c;
}

CliConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidArgument("config: cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const CliConfig& c) {
  json j;
  if (c.command) {
    j["command"] = *c.command;
  }
  j["group"] = c.group;
  if (c.model) {
    j["model"] = model_to(*c.model);
  }
  switch (c.true_g.kind) {
    case TruthSpec::Kind::Identity:
      j["true_g"] = "identity";
      break;
    case TruthSpec::Kind::Random:
      j["true_g"] = "random";
      break;
    case TruthSpec::Kind::Explicit:
      j["true_g"] = matrix_to(c.true_g.matrix);
      break;
  }
  j["trials"] = c.trials;
  j["n_obs"] = c.n_obs;
  j["seed"] = c.seed;
  j["tol"] = c.tol;
  j["fisher"] = {{"mode", c.fisher_mode == FisherMode::Analytic ? "analytic" : "monte_carlo"},
                 {"samples", c.fisher_samples}};
  j["bound"] = {{"tol", c.bound_tol}, {"max_iters", c.bound_max_iters}};
  j["bias_sigmas"] = c.bias_sigmas;
  j["dominance_sigmas"] = c.dominance_sigmas;
  if (c.estimator_offset) {
    j["estimator_offset"] = *c.estimator_offset;
  }
  json output = {{"format", c.format == OutputFormat::Json ? "json" : "csv"}};
  if (c.out) {
    output["path"] = *c.out;
  }
  j["output"] = std::move(output);
  return j.dump(2) + "\n";
}

ModelSpec resolved_model(const CliConfig& config) {
  if (config.model) {
    return *config.model;
  }
  const GroupDescriptor group = GroupDescriptor::parse(config.group);
  if (group.id() == GroupId::SO3) {
    return WahbaModelSpec{{Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(), Eigen::Vector3d::UnitZ()}, 0.1};
  }
  return GaussianModelSpec{0.01 * Eigen::MatrixXd::Identity(group.dim(), group.dim())};
}

ExperimentConfig to_experiment_config(const CliConfig& c, bool evaluate_bounds) {
  ExperimentConfig e;
  e.group = GroupDescriptor::parse(c.group);
  e.model = resolved_model(c);
  e.random_true_g = c.true_g.kind == TruthSpec::Kind::Random;
  if (c.true_g.kind == TruthSpec::Kind::Explicit) {
    e.true_g = c.true_g.matrix;
  }
  e.n_trials = c.trials;
  e.n_obs = c.n_obs;
  e.seed = c.seed;
  e.tol = c.tol;
  e.fisher_mode = c.fisher_mode;
  e.fisher_samples = c.fisher_samples;
  e.bound.tol = c.bound_tol;
  e.bound.max_iters = c.bound_max_iters;
  e.bias_sigmas = c.bias_sigmas;
  e.dominance_sigmas = c.dominance_sigmas;
  if (c.estimator_offset) {
    e.estimator_offset = Eigen::Map<const Eigen::VectorXd>(c.estimator_offset->data(),
                                                           static_cast<Eigen::Index>(c.estimator_offset->size()));
  }
  e.evaluate_bounds = evaluate_bounds;
  e.keep_trial_errors = !evaluate_bounds;
  return e;
}

}  // namespace liecrb::cli
