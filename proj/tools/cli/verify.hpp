#pragma once

#include <liecrb/lie_group.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace liecrb::cli {

/// Test hook for the verify command. BracketSign flips the sign of the
/// (e0, e1) term of the bracket used by the antisymmetry and Jacobi checks.
enum class Fault { None, BracketSign };

Fault parse_fault(std::string_view s);
std::string fault_name(Fault f);

struct CheckResult {
  std::string name;
  bool passed = false;
  /// Measured quantity: largest error, or the observed order for the dlog check.
  double value = 0.0;
  /// Pass threshold on `value` (upper bound, or lower bound for orders).
  double threshold = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::string group;
  std::uint64_t seed = 0;
  Fault fault = Fault::None;
  std::vector<CheckResult> checks;

  bool passed() const;
};

/// Runs every algebraic property check that applies to `group`.
VerifyReport run_verify(const GroupDescriptor& group, std::uint64_t seed, Fault fault = Fault::None);

std::string verify_report_to_json(const VerifyReport& report);
std::string verify_report_to_csv(const VerifyReport& report);

}  // namespace liecrb::cli
