#include <liecrb/errors.hpp>
#include <liecrb/report_io.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

using namespace liecrb;

namespace {

ExperimentReport sample_report(bool keep_errors) {
  ExperimentConfig c;
  c.model = WahbaModelSpec{{Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY()}, 0.1};
  c.n_trials = 50;
  c.random_true_g = true;
  c.keep_trial_errors = keep_errors;
  c.evaluate_bounds = !keep_errors;
  return run_experiment(c);
}

}  // namespace

TEST(FlatTable, FormatsAndEscapes) {
  FlatTable t;
  t.add("x", 0.1);
  t.add("note", std::string_view("a, \"quoted\" value"));
  t.add_integer("n", -3);
  Eigen::Matrix2d m;
  m << 1, 2, 3, 4;
  t.add_matrix("P_hat", m);
  t.add_vector("bias", Eigen::Vector2d(5, 6));
  EXPECT_EQ(t.to_csv(),
            "name,value\n"
            "x,0.10000000000000001\n"
            "note,\"a, \"\"quoted\"\" value\"\n"
            "n,-3\n"
            "P_hat_0_0,1\nP_hat_0_1,2\nP_hat_1_0,3\nP_hat_1_1,4\n"
            "bias_0,5\nbias_1,6\n");
}

TEST(FormatDouble, RoundTripsExactly) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0049916839873695934}) {
    EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
  }
}

TEST(ExperimentReportJson, RoundTripWithBounds) {
  const ExperimentReport r = sample_report(false);
  const std::string text = experiment_report_to_json(r);
  const ExperimentReport back = experiment_report_from_json(text);
  EXPECT_TRUE(back == r);
  EXPECT_EQ(experiment_report_to_json(back), text);
}

TEST(ExperimentReportJson, RoundTripWithTrialErrors) {
  const ExperimentReport r = sample_report(true);
  EXPECT_FALSE(r.bounds_evaluated);
  ASSERT_EQ(r.trial_errors.size(), 50u);
  const ExperimentReport back = experiment_report_from_json(experiment_report_to_json(r));
  EXPECT_TRUE(back == r);
}

TEST(ExperimentReportJson, RejectsForeignDocuments) {
  EXPECT_THROW(experiment_report_from_json("{\"schema\": \"other/1\"}"), InvalidArgument);
  EXPECT_THROW(experiment_report_from_json("not json"), InvalidArgument);
  EXPECT_THROW(experiment_report_from_json("{\"schema\": \"liecrb.experiment_report/1\"}"), InvalidArgument);
}

TEST(ExperimentReportCsv, HeaderConvention) {
  const std::string csv = experiment_report_to_csv(sample_report(false));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "name,value");
  EXPECT_NE(csv.find("\nP_hat_0_1,"), std::string::npos);
  EXPECT_NE(csv.find("\nJ_2_2,"), std::string::npos);
  EXPECT_NE(csv.find("\ndominance_second_order_status,"), std::string::npos);
  EXPECT_NE(csv.find("\nefficiency_ratio,"), std::string::npos);
}

TEST(DominanceStatus, NamesRoundTrip) {
  for (DominanceStatus s : {DominanceStatus::Pass, DominanceStatus::Fail, DominanceStatus::NotApplicable}) {
    EXPECT_EQ(parse_status(status_name(s)), s);
  }
  EXPECT_THROW(parse_status("maybe"), InvalidArgument);
}
