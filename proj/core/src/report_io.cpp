#include "liecrb/report_io.hpp"

#include "liecrb/errors.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>

namespace liecrb {

namespace {

using nlohmann::json;

constexpr const char* kReportSchema = "liecrb.experiment_report/1";

json matrix_to_json(const Eigen::MatrixXd& m) {
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

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(v[i]);
  }
  return out;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array()) {
    throw InvalidArgument("report: matrix must be an array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j.at(static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw InvalidArgument("report: ragged matrix");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
  }
  return m;
}

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) {
    throw InvalidArgument("report: vector must be an array");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void FlatTable::add(std::string name, double value) { rows_.emplace_back(std::move(name), format_double(value)); }

void FlatTable::add(std::string name, std::string_view value) { rows_.emplace_back(std::move(name), value); }

void FlatTable::add_integer(std::string name, long long value) {
  rows_.emplace_back(std::move(name), std::to_string(value));
}

void FlatTable::add_matrix(const std::string& name, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      add(name + "_" + std::to_string(i) + "_" + std::to_string(j), m(i, j));
    }
  }
}

void FlatTable::add_vector(const std::string& name, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    add(name + "_" + std::to_string(i), v[i]);
  }
}

std::string FlatTable::to_csv() const {
  std::string out = "name,value\n";
  for (const auto& [name, value] : rows_) {
    out += csv_escape(name);
    out += ',';
    out += csv_escape(value);
    out += '\n';
  }
  return out;
}

std::string status_name(DominanceStatus s) {
  switch (s) {
    case DominanceStatus::Pass:
      return "pass";
    case DominanceStatus::Fail:
      return "fail";
    case DominanceStatus::NotApplicable:
      return "not_applicable";
  }
  return "not_applicable";
}

DominanceStatus parse_status(std::string_view s) {
  if (s == "pass") return DominanceStatus::Pass;
  if (s == "fail") return DominanceStatus::Fail;
  if (s == "not_applicable") return DominanceStatus::NotApplicable;
  throw InvalidArgument("report: unknown dominance status '" + std::string(s) + "'");
}

std::string experiment_report_to_json(const ExperimentReport& r) {
  json j;
  j["schema"] = kReportSchema;
  j["group"] = r.group;
  j["model"] = r.model;
  j["n_trials"] = r.n_trials;
  j["n_obs"] = r.n_obs;
  j["seed"] = r.seed;
  j["true_g"] = matrix_to_json(r.true_g);
  j["p_hat"] = matrix_to_json(r.p_hat);
  j["bias"] = vector_to_json(r.bias);
  j["bias_norm"] = r.bias_norm;
  j["bias_threshold"] = r.bias_threshold;
  j["bias_gate_passed"] = r.bias_gate_passed;
  if (r.observable_basis) {
    j["observable_basis"] = matrix_to_json(*r.observable_basis);
  }
  if (r.bounds_evaluated) {
    json b;
    b["information"] = matrix_to_json(r.information);
    b["first_order"] = matrix_to_json(r.first_order);
    b["second_order"] = matrix_to_json(r.second_order);
    b["literal_second_order"] = matrix_to_json(r.literal_second_order);
    if (r.smith_form) {
      b["smith_form"] = matrix_to_json(*r.smith_form);
    }
    b["iterations"] = r.iterations;
    b["residual"] = r.residual;
    b["efficiency_ratio"] = r.efficiency_ratio;
    b["efficiency_ratio_second_order"] = r.efficiency_ratio_second_order;
    json checks = json::array();
    for (const DominanceCheck& c : r.dominance) {
      checks.push_back({{"against", c.against},
                        {"min_eigenvalue", c.min_eigenvalue},
                        {"tolerance", c.tolerance},
                        {"status", status_name(c.status)}});
    }
    b["dominance"] = std::move(checks);
    j["bounds"] = std::move(b);
  }
  j["warnings"] = r.warnings;
  if (!r.trial_errors.empty()) {
    json errors = json::array();
    for (const Eigen::VectorXd& e : r.trial_errors) {
      errors.push_back(vector_to_json(e));
    }
    j["trial_errors"] = std::move(errors);
  }
  return j.dump(2) + "\n";
}

ExperimentReport experiment_report_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("report: ") + e.what());
  }
  if (j.value("schema", "") != kReportSchema) {
    throw InvalidArgument("report: missing or unsupported schema tag");
  }
  try {
    ExperimentReport r;
    r.group = j.at("group").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.n_trials = j.at("n_trials").get<std::size_t>();
    r.n_obs = j.at("n_obs").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.true_g = matrix_from_json(j.at("true_g"));
    r.p_hat = matrix_from_json(j.at("p_hat"));
    r.bias = vector_from_json(j.at("bias"));
    r.bias_norm = j.at("bias_norm").get<double>();
    r.bias_threshold = j.at("bias_threshold").get<double>();
    r.bias_gate_passed = j.at("bias_gate_passed").get<bool>();
    if (j.contains("observable_basis")) {
      r.observable_basis = matrix_from_json(j["observable_basis"]);
    }
    if (j.contains("bounds")) {
      const json& b = j["bounds"];
      r.bounds_evaluated = true;
      r.information = matrix_from_json(b.at("information"));
      r.first_order = matrix_from_json(b.at("first_order"));
      r.second_order = matrix_from_json(b.at("second_order"));
      r.literal_second_order = matrix_from_json(b.at("literal_second_order"));
      if (b.contains("smith_form")) {
        r.smith_form = matrix_from_json(b["smith_form"]);
      }
      r.iterations = b.at("iterations").get<int>();
      r.residual = b.at("residual").get<double>();
      r.efficiency_ratio = b.at("efficiency_ratio").get<double>();
      r.efficiency_ratio_second_order = b.at("efficiency_ratio_second_order").get<double>();
      for (const json& c : b.at("dominance")) {
        r.dominance.push_back({c.at("against").get<std::string>(), c.at("min_eigenvalue").get<double>(),
                               c.at("tolerance").get<double>(), parse_status(c.at("status").get<std::string>())});
      }
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    if (j.contains("trial_errors")) {
      for (const json& e : j["trial_errors"]) {
        r.trial_errors.push_back(vector_from_json(e));
      }
    }
    return r;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("report: ") + e.what());
  }
}

std::string experiment_report_to_csv(const ExperimentReport& r) {
  FlatTable t;
  t.add("group", r.group);
  t.add("model", r.model);
  t.add_integer("n_trials", static_cast<long long>(r.n_trials));
  t.add_integer("n_obs", r.n_obs);
  t.add("seed", std::to_string(r.seed));
  t.add_matrix("true_g", r.true_g);
  t.add_matrix("P_hat", r.p_hat);
  t.add_vector("bias", r.bias);
  t.add("bias_norm", r.bias_norm);
  t.add("bias_threshold", r.bias_threshold);
  t.add_integer("bias_gate_passed", r.bias_gate_passed ? 1 : 0);
  if (r.observable_basis) {
    t.add_matrix("observable_basis", *r.observable_basis);
  }
  if (r.bounds_evaluated) {
    t.add_matrix("J", r.information);
    t.add_matrix("first_order", r.first_order);
    t.add_matrix("second_order", r.second_order);
    t.add_matrix("literal_second_order", r.literal_second_order);
    if (r.smith_form) {
      t.add_matrix("smith_form", *r.smith_form);
    }
    t.add_integer("iterations", r.iterations);
    t.add("residual", r.residual);
    t.add("efficiency_ratio", r.efficiency_ratio);
    t.add("efficiency_ratio_second_order", r.efficiency_ratio_second_order);
    for (const DominanceCheck& c : r.dominance) {
      t.add("dominance_" + c.against + "_min_eigenvalue", c.min_eigenvalue);
      t.add("dominance_" + c.against + "_tolerance", c.tolerance);
      t.add("dominance_" + c.against + "_status", status_name(c.status));
    }
  }
  for (std::size_t i = 0; i < r.warnings.size(); ++i) {
    t.add("warning_" + std::to_string(i), r.warnings[i]);
  }
  for (std::size_t k = 0; k < r.trial_errors.size(); ++k) {
    t.add_vector("error_" + std::to_string(k), r.trial_errors[k]);
  }
  return t.to_csv();
}

}  // namespace liecrb
