#include "verify.hpp"

#include <liecrb/curvature.hpp>
#include <liecrb/errors.hpp>
#include <liecrb/parallel.hpp>
#include <liecrb/report_io.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace liecrb::cli {

namespace {

constexpr double kIdentityTol = 1e-12;
constexpr double kAntisymmetryTol = 1e-14;
constexpr double kRoundTripTol = 1e-10;
constexpr double kClosureTol = 1e-9;
constexpr double kOrderFloor = 2.7;
constexpr double kOracleTol = 1e-10;

Eigen::VectorXd gaussian_vector(int n, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = normal(rng);
  }
  return v;
}

AlgebraVector random_algebra(const GroupDescriptor& g, Rng& rng) { return {g, gaussian_vector(g.dim(), rng)}; }

AlgebraVector random_unit(const GroupDescriptor& g, Rng& rng) {
  const Eigen::VectorXd v = gaussian_vector(g.dim(), rng);
  return {g, v / v.norm()};
}

/// Uniform in the open unit ball.
AlgebraVector random_in_ball(const GroupDescriptor& g, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double r = 0.999 * std::pow(uniform(rng), 1.0 / g.dim());
  return r * random_unit(g, rng);
}

Eigen::MatrixXd random_psd(int n, double scale, Rng& rng) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    a.col(i) = gaussian_vector(n, rng);
  }
  const Eigen::MatrixXd p = scale * a * a.transpose();
  return 0.5 * (p + p.transpose());
}

AlgebraVector faulty_bracket(const AlgebraVector& x, const AlgebraVector& y, Fault fault) {
  AlgebraVector b = bracket(x, y);
  if (fault == Fault::BracketSign && x.dim() >= 2) {
    const GroupDescriptor& g = x.group();
    b = b - (2.0 * x[0] * y[1]) * bracket(AlgebraVector::basis(g, 0), AlgebraVector::basis(g, 1));
  }
  return b;
}

CheckResult upper(std::string name, double value, double threshold, std::string detail = {}) {
  return {std::move(name), value <= threshold, value, threshold, std::move(detail)};
}

CheckResult antisymmetry(const GroupDescriptor& g, Rng& rng, Fault fault) {
  double worst = 0.0;
  for (int s = 0; s < 200; ++s) {
    const AlgebraVector x = random_algebra(g, rng);
    const AlgebraVector y = random_algebra(g, rng);
    worst = std::max(worst, (faulty_bracket(x, y, fault) + faulty_bracket(y, x, fault)).coords().norm());
  }
  return upper("bracket_antisymmetry", worst, kAntisymmetryTol, "max |[x,y] + [y,x]| over 200 random pairs");
}

CheckResult jacobi(const GroupDescriptor& g, Rng& rng, Fault fault) {
  auto br = [fault](const AlgebraVector& a, const AlgebraVector& b) { return faulty_bracket(a, b, fault); };
  double worst = 0.0;
  for (int s = 0; s < 200; ++s) {
    const AlgebraVector x = random_algebra(g, rng);
    const AlgebraVector y = random_algebra(g, rng);
    const AlgebraVector z = random_algebra(g, rng);
    const AlgebraVector sum = br(x, br(y, z)) + br(y, br(z, x)) + br(z, br(x, y));
    worst = std::max(worst, sum.coords().norm());
  }
  return upper("jacobi_identity", worst, kIdentityTol, "max |cyclic sum of [x,[y,z]]| over 200 random triples");
}

CheckResult exp_log_round_trip(const GroupDescriptor& g, Rng& rng) {
  double worst = 0.0;
  for (int s = 0; s < 1000; ++s) {
    const AlgebraVector v = random_in_ball(g, rng);
    worst = std::max(worst, (log_map(exp_map(v)) - v).coords().norm());
    const GroupElement e = exp_map(v);
    worst = std::max(worst, (exp_map(log_map(e)).matrix() - e.matrix()).cwiseAbs().maxCoeff());
  }
  return upper("exp_log_round_trip", worst, kRoundTripTol, "1000 random algebra vectors with |v| < 1");
}

CheckResult structure_constant_antisymmetry(const GroupDescriptor& g) {
  const StructureConstants& c = structure_constants(g);
  double worst = 0.0;
  for (int i = 0; i < g.dim(); ++i) {
    for (int j = 0; j < g.dim(); ++j) {
      for (int k = 0; k < g.dim(); ++k) {
        worst = std::max(worst, std::abs(c(i, j, k) + c(j, i, k)));
      }
    }
  }
  return upper("structure_constant_antisymmetry", worst, 0.0, "c_ij^k = -c_ji^k, exact");
}

CheckResult h_tensor_definition(const GroupDescriptor& g) {
  const Tensor4& h = StructureTensor::of(g).h();
  double worst = 0.0;
  for (int i = 0; i < g.dim(); ++i) {
    for (int j = 0; j < g.dim(); ++j) {
      for (int k = 0; k < g.dim(); ++k) {
        const AlgebraVector db =
            bracket(AlgebraVector::basis(g, i), bracket(AlgebraVector::basis(g, j), AlgebraVector::basis(g, k)));
        for (int m = 0; m < g.dim(); ++m) {
          worst = std::max(worst, std::abs(h(i, j, k, m) - db[m]));
        }
      }
    }
  }
  return upper("h_tensor_double_bracket", worst, 0.0, "H^m_ijk against [e_i, [e_j, e_k]], exact");
}

CheckResult ad_consistency(const GroupDescriptor& g, Rng& rng) {
  double worst = 0.0;
  for (int s = 0; s < 200; ++s) {
    const AlgebraVector x = random_algebra(g, rng);
    const AlgebraVector y = random_algebra(g, rng);
    worst = std::max(worst, (ad_matrix(x) * y.coords() - bracket(x, y).coords()).norm());
  }
  return upper("ad_matrix_consistency", worst, kIdentityTol, "ad(x) y against [x, y]");
}

CheckResult dlog_order(const GroupDescriptor& g, Rng& rng) {
  constexpr std::array<double, 4> steps{0.4, 0.2, 0.1, 0.05};
  // Errors below this are dominated by the finite-difference reference and carry no slope information.
  constexpr double kNoiseFloor = 1e-10;
  double min_order = std::numeric_limits<double>::infinity();
  double max_error = 0.0;
  int fitted = 0;
  for (int s = 0; s < 8; ++s) {
    const AlgebraVector u = random_unit(g, rng);
    const AlgebraVector xi = random_unit(g, rng);
    std::vector<std::pair<double, double>> pts;
    for (double h : steps) {
      const AlgebraVector q = h * u;
      const double err = (dlog_truncated(q, xi) - dlog_numerical(q, xi)).coords().norm();
      max_error = std::max(max_error, err);
      if (err > kNoiseFloor) {
        pts.emplace_back(std::log(h), std::log(err));
      }
    }
    if (pts.size() < 2) {
      continue;
    }
    // Least-squares slope of log(error) against log(|log Q|).
    double mx = 0.0;
    double my = 0.0;
    for (const auto& [x, y] : pts) {
      mx += x;
      my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (const auto& [x, y] : pts) {
      sxy += (x - mx) * (y - my);
      sxx += (x - mx) * (x - mx);
    }
    min_order = std::min(min_order, sxy / sxx);
    ++fitted;
  }
  if (fitted == 0) {
    if (max_error < kNoiseFloor) {
      // Commuting algebra: the truncated series is exact.
      return {"dlog_truncation_order", true, max_error, kNoiseFloor, "remainder vanishes (commutative bracket)"};
    }
    return {"dlog_truncation_order", false, max_error, kNoiseFloor, "no sample gave two resolvable errors"};
  }
  return {"dlog_truncation_order", min_order >= kOrderFloor, min_order, kOrderFloor,
          "smallest observed order of the dlog remainder over |log Q| in {0.4, 0.2, 0.1, 0.05}, " +
              std::to_string(fitted) + " of 8 samples above the reference noise floor"};
}

CheckResult g0_oracle(const GroupDescriptor& g, Rng& rng) {
  const StructureTensor& t = StructureTensor::of(g);
  const int n = g.dim();
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    const Eigen::MatrixXd p = random_psd(n, 0.1, rng);
    Eigen::MatrixXd direct = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        direct += p(i, j) * ad_matrix(AlgebraVector::basis(g, i)) * ad_matrix(AlgebraVector::basis(g, j));
      }
    }
    worst = std::max(worst, (g0_operator(p, t) - direct).cwiseAbs().maxCoeff());
  }
  return upper("g0_operator_oracle", worst, kOracleTol, "G0(P) against sum_ij P_ij ad(e_i) ad(e_j)");
}

CheckResult mixed_product(const GroupDescriptor& g, Rng& rng) {
  double worst = 0.0;
  for (int s = 0; s < 200; ++s) {
    const AlgebraVector x = random_algebra(g, rng);
    const AlgebraVector y = random_algebra(g, rng);
    const AlgebraVector z = random_algebra(g, rng);
    worst = std::max(worst, std::abs(bracket(x, y).coords().dot(z.coords()) - bracket(z, x).coords().dot(y.coords())));
  }
  return upper("mixed_product", worst, kIdentityTol, "<[x,y],z> = <[z,x],y>");
}

CheckResult g0_vs_riemann(const GroupDescriptor& g, Rng& rng) {
  const StructureTensor& t = StructureTensor::of(g);
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    const Eigen::MatrixXd p = random_psd(g.dim(), 0.1, rng);
    worst = std::max(worst, (g0_operator(p, t) + 4.0 * r_m_operator(p, g)).cwiseAbs().maxCoeff());
  }
  return upper("g0_equals_minus_4_rm", worst, kIdentityTol, "entrywise over 100 random PSD P");
}

CheckResult curvature_symmetries(const GroupDescriptor& g, Rng& rng) {
  auto r = [](const AlgebraVector& x, const AlgebraVector& y, const AlgebraVector& z, const AlgebraVector& w) {
    return riemann_biinvariant(x, y, z).coords().dot(w.coords());
  };
  double worst = 0.0;
  for (int s = 0; s < 200; ++s) {
    const AlgebraVector x = random_algebra(g, rng);
    const AlgebraVector y = random_algebra(g, rng);
    const AlgebraVector z = random_algebra(g, rng);
    const AlgebraVector w = random_algebra(g, rng);
    const double rxyzw = r(x, y, z, w);
    worst = std::max(worst, std::abs(rxyzw + r(y, x, z, w)));
    worst = std::max(worst, std::abs(rxyzw + r(x, y, w, z)));
    worst = std::max(worst, std::abs(rxyzw - r(z, w, x, y)));
    // Sectional form: <R(x,w)w,x> = 1/4 |[x,w]|^2 through the mixed product.
    worst = std::max(worst, std::abs(r(x, w, w, x) - 0.25 * bracket(x, w).coords().squaredNorm()));
  }
  return upper("curvature_symmetries", worst, kIdentityTol,
               "pair symmetries of <R(x,y)z,w> and <R(x,w)w,x> against the double-bracket form");
}

CheckResult h_tensor_zero(const GroupDescriptor& g) {
  const Tensor4& h = StructureTensor::of(g).h();
  double worst = 0.0;
  const int n = g.dim();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int m = 0; m < n; ++m) {
          worst = std::max(worst, std::abs(h(i, j, k, m)));
        }
      }
    }
  }
  return upper("h_tensor_zero", worst, 0.0, "commutative algebra has no double brackets");
}

CheckResult closure(const GroupDescriptor& g, Rng& rng) {
  GroupElement acc = GroupElement::identity(g);
  for (int s = 0; s < 10000; ++s) {
    acc = compose(acc, exp_map(random_in_ball(g, rng)));
  }
  return upper("closure_after_compositions", constraint_residual(g, acc.matrix()), kClosureTol,
               "constraint residual after 10^4 unprojected compositions");
}

}  // namespace

Fault parse_fault(std::string_view s) {
  if (s.empty() || s == "none") return Fault::None;
  if (s == "bracket-sign") return Fault::BracketSign;
  throw InvalidArgument("unknown fault '" + std::string(s) + "' (expected bracket-sign)");
}

std::string fault_name(Fault f) { return f == Fault::BracketSign ? "bracket-sign" : "none"; }

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

VerifyReport run_verify(const GroupDescriptor& group, std::uint64_t seed, Fault fault) {
  VerifyReport report;
  report.group = group.name();
  report.seed = seed;
  report.fault = fault;

  // Each randomized check draws from its own stream so adding checks never shifts the others.
  std::uint64_t stream = 0;
  auto rng = [&] { return make_stream(seed, stream++); };

  Rng r0 = rng();
  report.checks.push_back(antisymmetry(group, r0, fault));
  Rng r1 = rng();
  report.checks.push_back(jacobi(group, r1, fault));
  Rng r2 = rng();
  report.checks.push_back(exp_log_round_trip(group, r2));
  report.checks.push_back(structure_constant_antisymmetry(group));
  report.checks.push_back(h_tensor_definition(group));
  Rng r3 = rng();
  report.checks.push_back(ad_consistency(group, r3));
  Rng r4 = rng();
  report.checks.push_back(dlog_order(group, r4));
  Rng r5 = rng();
  report.checks.push_back(g0_oracle(group, r5));
  Rng r6 = rng();
  report.checks.push_back(closure(group, r6));
  if (group.bi_invariant()) {
    Rng r7 = rng();
    report.checks.push_back(mixed_product(group, r7));
    Rng r8 = rng();
    report.checks.push_back(g0_vs_riemann(group, r8));
    Rng r9 = rng();
    report.checks.push_back(curvature_symmetries(group, r9));
  }
  if (group.id() == GroupId::AbelianRn) {
    report.checks.push_back(h_tensor_zero(group));
  }
  return report;
}

std::string verify_report_to_json(const VerifyReport& report) {
  nlohmann::json j;
  j["schema"] = "liecrb.verify_report/1";
  j["group"] = report.group;
  j["seed"] = report.seed;
  j["fault"] = fault_name(report.fault);
  j["passed"] = report.passed();
  nlohmann::json checks = nlohmann::json::array();
  for (const CheckResult& c : report.checks) {
    checks.push_back(
        {{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold}, {"detail", c.detail}});
  }
  j["checks"] = std::move(checks);
  return j.dump(2) + "\n";
}

std::string verify_report_to_csv(const VerifyReport& report) {
  FlatTable t;
  t.add("group", report.group);
  t.add("seed", std::to_string(report.seed));
  t.add("fault", fault_name(report.fault));
  t.add_integer("passed", report.passed() ? 1 : 0);
  for (const CheckResult& c : report.checks) {
    t.add_integer(c.name + "_passed", c.passed ? 1 : 0);
    t.add(c.name + "_value", c.value);
    t.add(c.name + "_threshold", c.threshold);
  }
  return t.to_csv();
}

}  // namespace liecrb::cli
