#include <liecrb/errors.hpp>
#include <liecrb/fisher.hpp>
#include <liecrb/harness.hpp>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <cmath>

using namespace liecrb;

namespace {

const GroupDescriptor kSo3 = GroupDescriptor::so3();

AlgebraVector so3(double a, double b, double c) { return {kSo3, Eigen::Vector3d(a, b, c)}; }

void expect_relative(const Eigen::MatrixXd& mc, const Eigen::MatrixXd& exact, double rel, double floor = 1.0) {
  for (Eigen::Index i = 0; i < exact.rows(); ++i) {
    for (Eigen::Index j = 0; j < exact.cols(); ++j) {
      if (std::abs(exact(i, j)) > floor) {
        EXPECT_NEAR(mc(i, j) / exact(i, j), 1.0, rel) << "entry " << i << "," << j;
      } else {
        EXPECT_LT(std::abs(mc(i, j)), rel * exact.cwiseAbs().maxCoeff()) << "entry " << i << "," << j;
      }
    }
  }
}

}  // namespace

TEST(WahbaVectors, RejectsNonUnitDirections) {
  EXPECT_THROW(WahbaVectors({Eigen::Vector3d(1.0, 1e-5, 0.0)}, 0.1), InvalidArgument);
  EXPECT_THROW(WahbaVectors({Eigen::Vector3d::UnitX()}, 0.0), InvalidArgument);
}

TEST(Score, ZeroDirectionAndZeroResidual) {
  const WahbaVectors model({Eigen::Vector3d::UnitZ()}, 0.1);
  const GroupElement g = exp_map(so3(0.2, -0.1, 0.4));
  const Observation x = g.matrix() * Eigen::Vector3d::UnitZ();
  EXPECT_EQ(score(model, g, AlgebraVector::zero(kSo3), x), 0.0);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(score(model, g, AlgebraVector::basis(kSo3, i), x), 0.0);
  }
  FisherOptions fd;
  fd.use_analytic_score = false;
  Rng rng = make_stream(1, 0);
  const Observation noisy = model.sample(g, rng);
  const AlgebraVector xi = so3(0.3, -0.5, 0.2);
  EXPECT_NEAR(score(model, g, xi, noisy), score(model, g, xi, noisy, fd), 1e-6);
}

TEST(Score, MeanWithinThreeStandardErrors) {
  const WahbaVectors wahba({Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY()}, 0.1);
  const ConcentratedGaussian gauss(GroupDescriptor::se2(), 0.01 * Eigen::Matrix3d::Identity(), 2);
  const GroupElement g = exp_map(so3(0.3, 0.1, -0.2));
  for (int i = 0; i < 3; ++i) {
    const ScoreStatistics s = score_statistics(wahba, g, AlgebraVector::basis(kSo3, i), 100000, 5);
    EXPECT_LE(std::abs(s.mean), 3.0 * s.std_dev / std::sqrt(static_cast<double>(s.n)));
    const GroupDescriptor se2 = GroupDescriptor::se2();
    const ScoreStatistics t = score_statistics(gauss, GroupElement::identity(se2), AlgebraVector::basis(se2, i), 20000, 6);
    EXPECT_LE(std::abs(t.mean), 3.0 * t.std_dev / std::sqrt(static_cast<double>(t.n)));
  }
}

TEST(FisherQuadratic, Examples) {
  const WahbaVectors model({Eigen::Vector3d::UnitZ()}, 0.1);
  const GroupElement id = GroupElement::identity(kSo3);
  EXPECT_EQ(fisher_quadratic(model, id, AlgebraVector::zero(kSo3), 1000, 1), 0.0);
  EXPECT_NEAR(fisher_quadratic(model, id, AlgebraVector::basis(kSo3, 2), 1000, 1), 0.0, 1e-20);
  EXPECT_NEAR(fisher_quadratic(model, id, AlgebraVector::basis(kSo3, 0), 100000, 1) / 100.0, 1.0, 0.02);
}

TEST(FisherMatrix, WahbaTwoDirections) {
  const std::vector<Eigen::Vector3d> dirs{Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitZ()};
  const WahbaVectors model(dirs, 0.1);
  const GroupElement id = GroupElement::identity(kSo3);
  const InformationMatrix j = fisher_matrix(model, id, 100000, 42);
  expect_relative(j.j, Eigen::Vector3d(100, 200, 100).asDiagonal().toDenseMatrix(), 0.02);
  EXPECT_EQ(j.j, j.j.transpose());
  EXPECT_LT((wahba_fisher_analytic(dirs, 0.1, id).j - Eigen::MatrixXd(Eigen::Vector3d(100, 200, 100).asDiagonal())).norm(),
            1e-12);
}

TEST(FisherMatrix, AbelianGaussianIsInverseCovariance) {
  const GroupDescriptor r2 = GroupDescriptor::abelian(2);
  Eigen::Matrix2d sigma;
  sigma << 0.04, 0.01, 0.01, 0.02;
  const ConcentratedGaussian model(r2, sigma);
  const GroupElement g = exp_map({r2, Eigen::Vector2d(1.0, -2.0)});
  const InformationMatrix j = fisher_matrix(model, g, 100000, 3);
  expect_relative(j.j, sigma.inverse(), 0.03);
}

TEST(FisherMatrix, AnalyticAgreesOnRandomBasePoint) {
  const std::vector<Eigen::Vector3d> dirs{Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(),
                                          Eigen::Vector3d::UnitZ()};
  const WahbaVectors model(dirs, 0.1);
  Rng rng = make_stream(8, 0);
  const GroupElement g = random_group_element(kSo3, rng);
  const InformationMatrix mc = fisher_matrix(model, g, 100000, 42);
  expect_relative(mc.j, wahba_fisher_analytic(dirs, 0.1, g).j, 0.02);
}

TEST(FisherMatrix, PolarizationBasisIndependence) {
  const std::vector<Eigen::Vector3d> dirs{Eigen::Vector3d::UnitX(), Eigen::Vector3d(0, 0.6, 0.8)};
  const WahbaVectors model(dirs, 0.2);
  const GroupElement id = GroupElement::identity(kSo3);
  const Eigen::Matrix3d rot = exp_map(so3(0.4, -0.7, 1.1)).matrix();
  const InformationMatrix a = fisher_matrix(model, id, 100000, 4);
  const InformationMatrix b = fisher_matrix_in_basis(model, id, rot, 100000, 4);
  expect_relative(b.j, a.j, 0.03, 1.0);
}

TEST(FisherSecondDerivative, AgreesWithQuadraticForm) {
  const WahbaVectors model({Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitZ()}, 0.1);
  const GroupElement id = GroupElement::identity(kSo3);
  EXPECT_EQ(fisher_second_derivative(model, id, AlgebraVector::zero(kSo3), 100, 1), 0.0);
  for (const AlgebraVector& xi : {AlgebraVector::basis(kSo3, 0), so3(0.3, 0.5, -0.2)}) {
    const double q = fisher_quadratic(model, id, xi, 100000, 12);
    const double d = fisher_second_derivative(model, id, xi, 100000, 12);
    EXPECT_NEAR(d / q, 1.0, 0.03);
  }

  const GroupDescriptor r3 = GroupDescriptor::abelian(3);
  const Eigen::Matrix3d sigma = Eigen::Vector3d(0.01, 0.02, 0.04).asDiagonal();
  const ConcentratedGaussian gauss(r3, sigma);
  const AlgebraVector xi{r3, Eigen::Vector3d(1.0, -1.0, 0.5)};
  const double exact = xi.coords().dot(sigma.inverse() * xi.coords());
  EXPECT_NEAR(fisher_second_derivative(gauss, GroupElement::identity(r3), xi, 100000, 13) / exact, 1.0, 0.03);
}

TEST(WahbaFisherAnalytic, Examples) {
  const GroupElement id = GroupElement::identity(kSo3);
  const std::vector<Eigen::Vector3d> one{Eigen::Vector3d::UnitZ()};
  EXPECT_EQ(wahba_fisher_analytic(one, 1.0, id).j, Eigen::MatrixXd(Eigen::Vector3d(1, 1, 0).asDiagonal()));
  const std::vector<Eigen::Vector3d> three{Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(),
                                           Eigen::Vector3d::UnitZ()};
  EXPECT_LT((wahba_fisher_analytic(three, 1.0, id).j - 2.0 * Eigen::Matrix3d::Identity()).norm(), 1e-15);
  const GroupElement se = GroupElement::identity(GroupDescriptor::se3());
  EXPECT_THROW(wahba_fisher_analytic(three, 1.0, se), DomainError);
}

TEST(WahbaFisherAnalytic, SpectrumInvariantUnderRotation) {
  const std::vector<Eigen::Vector3d> dirs{Eigen::Vector3d::UnitX(), Eigen::Vector3d(0, 0.6, 0.8)};
  const Eigen::Vector3d base =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(wahba_fisher_analytic(dirs, 0.1, GroupElement::identity(kSo3)).j)
          .eigenvalues();
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng rng = make_stream(99, s);
    const GroupElement g = random_group_element(kSo3, rng);
    const Eigen::Vector3d ev =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(wahba_fisher_analytic(dirs, 0.1, g).j).eigenvalues();
    EXPECT_LT((ev - base).cwiseAbs().maxCoeff(), 1e-9);
  }
}
