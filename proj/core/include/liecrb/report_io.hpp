#pragma once

#include "liecrb/harness.hpp"

#include <Eigen/Core>

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace liecrb {

/**
 * @brief Flat two-column table (name,value), one row per scalar.
 *
 * Matrices are flattened row-major with indexed names (`P_hat_0_1`),
 * vectors as `bias_2`. Numbers are printed with 17 significant digits so
 * every double round-trips exactly.
 */
class FlatTable {
 public:
  void add(std::string name, double value);
  void add(std::string name, std::string_view value);
  void add_integer(std::string name, long long value);
  void add_matrix(const std::string& name, const Eigen::MatrixXd& m);
  void add_vector(const std::string& name, const Eigen::VectorXd& v);

  const std::vector<std::pair<std::string, std::string>>& rows() const { return rows_; }
  std::string to_csv() const;

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

/// "%.17g" formatting.
std::string format_double(double v);

std::string status_name(DominanceStatus s);
DominanceStatus parse_status(std::string_view s);

std::string experiment_report_to_json(const ExperimentReport& report);
ExperimentReport experiment_report_from_json(std::string_view text);
std::string experiment_report_to_csv(const ExperimentReport& report);

}  // namespace liecrb
