// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "../oracles.hpp"
#include "cli/verify.hpp"

#include <liecrb/bound.hpp>
#include <liecrb/curvature.hpp>
#include <liecrb/fisher.hpp>
#include <liecrb/harness.hpp>
#include <liecrb/lie_group.hpp>

#include <Eigen/Eigenvalues>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace liecrb;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Eigen::MatrixXd random_psd(int n, Rng& rng, double scale) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = normal(rng);
  return scale * a * a.transpose() / n;
}

AlgebraVector random_vector(const GroupDescriptor& g, Rng& rng, double scale) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(g.dim());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = scale * normal(rng);
  return {g, v};
}

// 1. Algebraic identities on every group, within the time budget.
Outcome algebra_suite() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  for (const GroupDescriptor& g : {GroupDescriptor::so3(), GroupDescriptor::se3(), GroupDescriptor::se2(),
                                   GroupDescriptor::abelian(3)}) {
    const cli::VerifyReport r = cli::run_verify(g, 42);
    for (const cli::CheckResult& c : r.checks) {
      if (c.name == "dlog_truncation_order") continue;  // criterion 2
      o.require(c.passed, g.name() + ":" + c.name);
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(secs < 5.0, "runtime " + fmt("%.2f s", secs));
  if (o.passed) o.detail = "all groups clean in " + fmt("%.2f s", secs);
  return o;
}

// 2. Truncation order of the second-order dlog, against an exp/log finite difference.
Outcome dlog_order() {
  Outcome o;
  const std::vector<double> hs{0.4, 0.2, 0.1, 0.05};
  double worst = std::numeric_limits<double>::infinity();
  for (const GroupDescriptor& g : {GroupDescriptor::so3(), GroupDescriptor::se3()}) {
    Rng rng = make_stream(7, 0);
    std::vector<AlgebraVector> qs;
    std::vector<AlgebraVector> xis;
    for (int s = 0; s < 20; ++s) {
      AlgebraVector q = random_vector(g, rng, 1.0);
      qs.push_back(q * (1.0 / q.coords().norm()));
      AlgebraVector xi = random_vector(g, rng, 1.0);
      xis.push_back(xi * (1.0 / xi.coords().norm()));
    }
    std::vector<double> max_err;
    for (double h : hs) {
      double m = 0.0;
      for (std::size_t s = 0; s < qs.size(); ++s) {
        const AlgebraVector q = qs[s] * h;
        const Eigen::VectorXd exact = oracle::fd_dlog(q, xis[s]);
        m = std::max(m, (dlog_truncated(q, xis[s]).coords() - exact).norm());
      }
      max_err.push_back(m);
    }
    for (std::size_t k = 0; k + 1 < hs.size(); ++k) {
      const double order = std::log(max_err[k] / max_err[k + 1]) / std::log(hs[k] / hs[k + 1]);
      worst = std::min(worst, order);
      o.require(order >= 2.7, g.name() + " order " + fmt("%.3f", order));
    }
  }
  if (o.passed) o.detail = "min observed order " + fmt("%.3f", worst);
  return o;
}

// 3. Curvature identities and the scalar gap to the closed form.
Outcome curvature_and_smith() {
  Outcome o;
  const GroupDescriptor so3 = GroupDescriptor::so3();
  const StructureTensor& t = StructureTensor::of(so3);
  Rng rng = make_stream(11, 0);
  double g0_err = 0.0;
  for (int s = 0; s < 100; ++s) {
    const Eigen::MatrixXd p = random_psd(3, rng, 0.1);
    g0_err = std::max(g0_err, (g0_operator(p, t) + 4.0 * r_m_operator(p, so3)).cwiseAbs().maxCoeff());
  }
  o.require(g0_err <= 1e-12, "G0 vs -4 R_m " + fmt("%.3g", g0_err));

  double worst_ratio = 0.0;
  for (double sigma : {0.3, 0.1, 0.03, 0.01}) {
    const Eigen::MatrixXd j = 2.0 / (sigma * sigma) * Eigen::Matrix3d::Identity();
    const BoundResult r = bound_fixed_point(j, t);
    const double tr = r.second_order.trace();
    const double gap = (r.second_order - *r.smith_form).norm();
    worst_ratio = std::max(worst_ratio, gap / (tr * tr));
    o.require(gap <= tr * tr, "Smith gap at sigma " + fmt("%g", sigma));
  }

  double scalar_err = 0.0;
  for (double s2 : {1e-4, 1e-3, 1e-2}) {
    const Eigen::MatrixXd j = 100.0 * Eigen::Matrix3d::Identity();
    const Eigen::MatrixXd p = s2 * Eigen::Matrix3d::Identity();
    const Eigen::MatrixXd diff = bound_second_order_map(p, j, t) - smith_bound_biinvariant(j, p, t);
    scalar_err = std::max(scalar_err, (diff - s2 * s2 / 36.0 * bound_first_order(j)).cwiseAbs().maxCoeff());
  }
  o.require(scalar_err <= 1e-12, "scalar gap " + fmt("%.3g", scalar_err));
  if (o.passed) {
    o.detail = "G0 err " + fmt("%.2g", g0_err) + ", max gap/tr(P)^2 " + fmt("%.3g", worst_ratio) +
               ", scalar err " + fmt("%.2g", scalar_err);
  }
  return o;
}

// 4. Monte Carlo information against the closed form, two estimators, score mean.
Outcome fisher_checks() {
  Outcome o;
  const GroupDescriptor so3 = GroupDescriptor::so3();
  const std::vector<Eigen::Vector3d> dirs{Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(),
                                          Eigen::Vector3d::UnitZ()};
  const WahbaVectors model(dirs, 0.1);
  Rng rng = make_stream(13, 0);
  const GroupElement g = random_group_element(so3, rng);
  const Eigen::MatrixXd exact = wahba_fisher_analytic(dirs, 0.1, g).j;
  const Eigen::MatrixXd mc = fisher_matrix(model, g, 100000, 21).j;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index k = 0; k < 3; ++k) {
      if (std::abs(exact(i, k)) > 1.0) {
        worst = std::max(worst, std::abs(mc(i, k) / exact(i, k) - 1.0));
      }
    }
  }
  o.require(worst <= 0.02, "MC vs analytic " + fmt("%.4f", worst));

  double quad_gap = 0.0;
  double worst_z = 0.0;
  for (int s = 0; s < 5; ++s) {
    const AlgebraVector xi = random_vector(so3, rng, 1.0);
    const double a = fisher_quadratic(model, g, xi, 100000, 100 + s);
    const double b = fisher_second_derivative(model, g, xi, 100000, 200 + s);
    quad_gap = std::max(quad_gap, std::abs(a - b) / std::abs(b));
    const ScoreStatistics st = score_statistics(model, g, xi, 100000, 300 + s);
    worst_z = std::max(worst_z, std::abs(st.mean) / (st.std_dev / std::sqrt(static_cast<double>(st.n))));
  }
  o.require(quad_gap <= 0.03, "quadratic vs second derivative " + fmt("%.4f", quad_gap));
  o.require(worst_z <= 3.0, "score mean z " + fmt("%.2f", worst_z));
  if (o.passed) {
    o.detail = "MC rel err " + fmt("%.4f", worst) + ", estimator gap " + fmt("%.4f", quad_gap) +
               ", max |z| " + fmt("%.2f", worst_z);
  }
  return o;
}

// 5. Wahba experiments: dominance, bias gate and efficiency.
Outcome wahba_experiments() {
  Outcome o;
  std::string summary;
  for (double sigma : {0.05, 0.1}) {
    ExperimentConfig c;
    c.model = WahbaModelSpec{{Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(), Eigen::Vector3d::UnitZ()}, sigma};
    c.n_trials = 10000;
    const ExperimentReport r = run_experiment(c);
    const std::string tag = "sigma " + fmt("%g", sigma);
    o.require(r.bias_gate_passed, tag + " bias gate");
    for (const DominanceCheck& d : r.dominance) {
      o.require(d.status == DominanceStatus::Pass, tag + " dominance vs " + d.against);
    }
    o.require(r.efficiency_ratio >= 0.98 && r.efficiency_ratio <= 1.10,
              tag + " efficiency " + fmt("%.4f", r.efficiency_ratio));
    summary += (summary.empty() ? "" : ", ") + tag + " efficiency " + fmt("%.4f", r.efficiency_ratio);
  }
  if (o.passed) o.detail = summary;
  return o;
}

// 6. Every bound collapses to J^-1 on an abelian group.
Outcome abelian_collapse() {
  Outcome o;
  const GroupDescriptor r3 = GroupDescriptor::abelian(3);
  const StructureTensor& t = StructureTensor::of(r3);
  Rng rng = make_stream(17, 0);
  for (int s = 0; s < 20; ++s) {
    const Eigen::MatrixXd j = random_psd(3, rng, 50.0) + Eigen::Matrix3d::Identity();
    const Eigen::MatrixXd j_inv = bound_first_order(j);
    const BoundResult r = bound_fixed_point(j, t);
    const Eigen::MatrixXd p = random_psd(3, rng, 0.1);
    o.require(r.second_order == j_inv, "fixed point");
    o.require(r.smith_form && *r.smith_form == j_inv, "closed form");
    o.require(bound_second_order_map(p, j, t) == j_inv, "second-order map");
  }
  ExperimentConfig c;
  c.group = r3;
  c.model = GaussianModelSpec{0.01 * Eigen::Matrix3d::Identity()};
  c.n_trials = 2000;
  const ExperimentReport r = run_experiment(c);
  o.require(r.second_order == r.first_order && r.literal_second_order == r.first_order, "experiment");
  if (o.passed) o.detail = "bitwise equal on 20 information matrices and one experiment";
  return o;
}

// 7. Bound spectra do not depend on the base rotation.
Outcome equivariance() {
  Outcome o;
  const GroupDescriptor so3 = GroupDescriptor::so3();
  const std::vector<Eigen::Vector3d> dirs{Eigen::Vector3d::UnitX(), Eigen::Vector3d(0, 0.6, 0.8),
                                          Eigen::Vector3d(1, 1, 1).normalized()};
  auto spectrum = [](const Eigen::MatrixXd& m) { return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues(); };
  const Eigen::MatrixXd j0 = wahba_fisher_analytic(dirs, 0.1, GroupElement::identity(so3)).j;
  const BoundResult b0 = bound_fixed_point(j0, StructureTensor::of(so3));
  Rng rng = make_stream(19, 0);
  double worst = 0.0;
  for (int s = 0; s < 10; ++s) {
    const GroupElement g = random_group_element(so3, rng);
    const BoundResult b = bound_fixed_point(wahba_fisher_analytic(dirs, 0.1, g).j, StructureTensor::of(so3));
    worst = std::max(worst, (spectrum(b.first_order) - spectrum(b0.first_order)).cwiseAbs().maxCoeff());
    worst = std::max(worst, (spectrum(b.second_order) - spectrum(b0.second_order)).cwiseAbs().maxCoeff());
  }
  o.require(worst <= 1e-9, "spectrum drift " + fmt("%.3g", worst));
  if (o.passed) o.detail = "max spectrum drift " + fmt("%.2g", worst);
  return o;
}

// 8. Reruns of the CLI with identical inputs produce identical bytes.
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_reproducibility() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("liecrb_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  int runs = 0;
  for (const std::string cmd : {"verify", "bound", "simulate --trials 2000", "compare --trials 2000"}) {
    for (const std::string fmt_name : {"json", "csv"}) {
      std::string outputs[2];
      for (int k = 0; k < 2; ++k) {
        const fs::path out = dir / ("run" + std::to_string(k));
        const std::string line = std::string(LIECRB_CLI_PATH) + " " + cmd + " --format " + fmt_name + " --out " +
                                 out.string() + " >/dev/null 2>&1";
        const int status = std::system(line.c_str());
        o.require(WIFEXITED(status) && WEXITSTATUS(status) == 0, cmd + " exit status");
        outputs[k] = slurp(out);
        ++runs;
      }
      o.require(!outputs[0].empty() && outputs[0] == outputs[1], cmd + " " + fmt_name + " differs");
    }
  }
  fs::remove_all(dir);
  if (o.passed) o.detail = std::to_string(runs / 2) + " command/format pairs byte-identical";
  return o;
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
  double time_limit;  // seconds, 0 for none
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"algebraic identities", algebra_suite, 5.0},
      {"dlog truncation order", dlog_order, 5.0},
      {"curvature operator and closed-form gap", curvature_and_smith, 5.0},
      {"Fisher information estimators", fisher_checks, 60.0},
      {"Wahba dominance and efficiency", wahba_experiments, 120.0},
      {"abelian collapse to J^-1", abelian_collapse, 0.0},
      {"equivariance of bound spectra", equivariance, 5.0},
      {"CLI reproducibility", cli_reproducibility, 0.0},
  };
  int failures = 0;
  int index = 1;
  for (const Criterion& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0.0 && secs >= c.time_limit) {
      o.passed = false;
      o.detail += "; over time limit of " + fmt("%g s", c.time_limit);
    }
    std::printf("%s criterion %d: %s: %s (%.2f s)\n", o.passed ? "PASS" : "FAIL", index++, c.name, o.detail.c_str(),
                secs);
    std::fflush(stdout);
    failures += o.passed ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
