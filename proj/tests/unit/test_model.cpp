#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "msnm/error.hpp"
#include "msnm/model.hpp"
#include "test_support.hpp"

using msnm::FittedModel;

namespace {

// Model with U = identity columns.
FittedModel axis_model(std::vector<double> eigs, Eigen::Index p) {
  const auto m = static_cast<Eigen::Index>(eigs.size());
  Eigen::VectorXd e = Eigen::Map<Eigen::VectorXd>(eigs.data(), m);
  return FittedModel::from_parts(Eigen::MatrixXd::Identity(m, p), e, msnm::ml_noise_variance(e, p));
}

}  // namespace

TEST(Eig, IdentityCovariance) {
  auto r = msnm::eig_symmetric(Eigen::MatrixXd::Identity(2, 2));
  EXPECT_DOUBLE_EQ(r.eigenvalues(0), 1.0);
  EXPECT_DOUBLE_EQ(r.eigenvalues(1), 1.0);
}

TEST(Eig, ClosedFormTwoByTwo) {
  Eigen::MatrixXd s(2, 2);
  s << 2, 1, 1, 2;
  auto r = msnm::eig_symmetric(s);
  EXPECT_NEAR(r.eigenvalues(0), 3.0, 1e-14);
  EXPECT_NEAR(r.eigenvalues(1), 1.0, 1e-14);
  const double h = 1.0 / std::sqrt(2.0);
  // largest-magnitude entry positive, ties to the lowest index
  EXPECT_NEAR(r.eigenvectors(0, 0), h, 1e-14);
  EXPECT_NEAR(r.eigenvectors(1, 0), h, 1e-14);
  EXPECT_NEAR(r.eigenvectors(0, 1), h, 1e-14);
  EXPECT_NEAR(r.eigenvectors(1, 1), -h, 1e-14);
}

TEST(Eig, SignRuleLargestEntryPositive) {
  std::mt19937_64 gen(5);
  auto r = msnm::eig_symmetric(msnm::testing::random_psd(gen, 8));
  for (Eigen::Index j = 0; j < r.eigenvectors.cols(); ++j) {
    Eigen::Index k;
    r.eigenvectors.col(j).cwiseAbs().maxCoeff(&k);
    EXPECT_GT(r.eigenvectors(k, j), 0.0);
  }
}

TEST(Eig, DataOnTheDiagonalLine) {
  msnm::Dataset d;
  d.feature_names = {"x", "y"};
  d.values.resize(4, 2);
  d.values << -1.5, -1.5, -0.5, -0.5, 0.5, 0.5, 1.5, 1.5;
  auto r = msnm::eig_covariance(d);
  EXPECT_NEAR(r.eigenvectors(0, 0), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(r.eigenvectors(1, 0), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(r.eigenvalues(1), 0.0, 1e-12);
  // 1/N normalization: (2.25 + 0.25) * 2 * 2 / 4
  EXPECT_NEAR(r.eigenvalues(0), 2.5, 1e-12);
}

TEST(Eig, ResidualOnRandomPsdMatrices) {
  std::mt19937_64 gen(17);
  for (Eigen::Index m : {1, 2, 3, 5, 10, 20, 35, 50}) {
    Eigen::MatrixXd s = msnm::testing::random_psd(gen, m);
    auto r = msnm::eig_symmetric(s);
    for (Eigen::Index i = 0; i < m; ++i) {
      Eigen::VectorXd u = r.eigenvectors.col(i);
      EXPECT_LE((s * u - r.eigenvalues(i) * u).norm(), 1e-8) << "m=" << m << " i=" << i;
      if (i > 0) EXPECT_LE(r.eigenvalues(i), r.eigenvalues(i - 1));
    }
    Eigen::MatrixXd gram = r.eigenvectors.transpose() * r.eigenvectors;
    EXPECT_LE((gram - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Eig, ClampsTinyNegativeAndRejectsLarge) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2, 2);
  s(0, 0) = 1.0;
  s(1, 1) = -5e-11;
  auto r = msnm::eig_symmetric(s);
  EXPECT_EQ(r.eigenvalues(1), 0.0);
  s(1, 1) = -1e-6;
  EXPECT_THROW(msnm::eig_symmetric(s), msnm::ValidationError);
}

TEST(Eig, RejectsNonFinite) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2, 2);
  s(0, 1) = s(1, 0) = std::nan("");
  EXPECT_THROW(msnm::eig_symmetric(s), msnm::ValidationError);
}

TEST(NoiseVariance, TrailingMean) {
  Eigen::VectorXd e(4);
  e << 4, 1, 0.5, 0.5;
  EXPECT_DOUBLE_EQ(msnm::ml_noise_variance(e, 2), 0.5);
  EXPECT_DOUBLE_EQ(msnm::ml_noise_variance(e, 3), 0.5);
  EXPECT_DOUBLE_EQ(msnm::ml_noise_variance(e, 1), 2.0 / 3.0);
}

TEST(NoiseVariance, ZeroResidualSpectrum) {
  Eigen::VectorXd e(3);
  e << 2, 1, 0;
  EXPECT_EQ(msnm::ml_noise_variance(e, 2), 0.0);
}

TEST(NoiseVariance, RejectsBadP) {
  Eigen::VectorXd e(2);
  e << 2, 1;
  try {
    msnm::ml_noise_variance(e, 2);
    FAIL();
  } catch (const msnm::ValidationError& err) {
    EXPECT_NE(std::string(err.what()).find("P must be < M"), std::string::npos);
  }
  EXPECT_THROW(msnm::ml_noise_variance(e, 0), msnm::ValidationError);
}

TEST(FitModel, TwoDimensionalLineData) {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> n(0.0, 1.0);
  msnm::Dataset d;
  d.feature_names = {"a", "b"};
  d.values.resize(500, 2);
  for (Eigen::Index i = 0; i < 500; ++i) {
    double z = n(gen);
    d.values(i, 0) = z + 0.1 * n(gen);
    d.values(i, 1) = z + 0.1 * n(gen);
  }
  auto m = msnm::fit_model(d, 1);
  EXPECT_EQ(m.m(), 2);
  EXPECT_EQ(m.p(), 1);
  EXPECT_DOUBLE_EQ(m.sigma2_ml(), m.eigenvalues()(1));
  EXPECT_NEAR(std::abs(m.U()(0, 0)), 1.0 / std::sqrt(2.0), 0.02);
}

TEST(FromParts, RejectsBrokenInvariants) {
  Eigen::VectorXd e(2);
  e << 2, 1;
  Eigen::MatrixXd u(2, 1);
  u << 1, 1;
  EXPECT_THROW(FittedModel::from_parts(u, e, 1.0), msnm::ValidationError);
  u << 1, 0;
  EXPECT_THROW(FittedModel::from_parts(u, e, 0.7), msnm::ValidationError);
  Eigen::VectorXd unsorted(2);
  unsorted << 1, 2;
  EXPECT_THROW(FittedModel::from_parts(u, unsorted, 2.0), msnm::ValidationError);
}

TEST(Projection, DeltaZeroIsScaledBasis) {
  std::mt19937_64 gen(8);
  auto model = msnm::testing::random_model(gen, 5, 2);
  auto ops = msnm::projection_operators(model, 0.0);
  Eigen::MatrixXd expected = model.U() * model.leading().cwiseSqrt().asDiagonal();
  EXPECT_LE((ops.W - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Projection, HandComputedTwoByTwo) {
  auto model = axis_model({3.0, 1.0, 0.25}, 2);
  auto ops = msnm::projection_operators(model, 0.5);
  EXPECT_NEAR(ops.W(0, 0), std::sqrt(2.5), 1e-15);
  EXPECT_NEAR(ops.W(1, 1), std::sqrt(0.5), 1e-15);
  EXPECT_EQ(ops.W(0, 1), 0.0);
  EXPECT_EQ(ops.W(2, 0), 0.0);
  EXPECT_NEAR(ops.z_map(0, 0), std::sqrt(2.5) / 3.0, 1e-15);
  EXPECT_NEAR(ops.z_map(1, 1), std::sqrt(0.5), 1e-15);
}

TEST(Projection, LastColumnNormNearLambdaP) {
  auto model = axis_model({3.0, 1.0, 0.25}, 2);
  const double eps = 1e-6;
  auto ops = msnm::projection_operators(model, 1.0 - eps);
  EXPECT_NEAR(ops.W.col(1).norm(), std::sqrt(eps), 1e-9);
}

TEST(Projection, GramEqualsLeadingEigenvalues) {
  std::mt19937_64 gen(21);
  auto model = msnm::testing::random_model(gen, 6, 3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd l = model.leading().asDiagonal();
  for (int i = 0; i < 20; ++i) {
    double delta = u(gen) * model.lambda_p();
    auto ops = msnm::projection_operators(model, delta);
    Eigen::MatrixXd g = ops.W.transpose() * ops.W + delta * Eigen::MatrixXd::Identity(3, 3);
    EXPECT_LE((g - l).cwiseAbs().maxCoeff(), 1e-10 * l.maxCoeff());
    EXPECT_LE((ops.gram - l).cwiseAbs().maxCoeff(), 1e-10 * l.maxCoeff());
  }
}

TEST(Projection, DeltaRange) {
  auto model = axis_model({3.0, 1.0, 0.25}, 2);
  EXPECT_THROW(msnm::projection_operators(model, 1.0), msnm::ValidationError);
  EXPECT_THROW(msnm::projection_operators(model, -1e-9), msnm::ValidationError);
  try {
    msnm::projection_operators(model, 2.0);
  } catch (const msnm::ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("delta outside"), std::string::npos);
  }
}

TEST(LatentMode, ZeroMapsToZero) {
  std::mt19937_64 gen(4);
  auto model = msnm::testing::random_model(gen, 4, 2);
  auto ops = msnm::projection_operators(model, 0.3 * model.lambda_p());
  EXPECT_EQ(msnm::latent_mode(ops, Eigen::VectorXd::Zero(4)).norm(), 0.0);
}

TEST(LatentMode, EigenvectorAtDeltaZero) {
  std::mt19937_64 gen(6);
  auto model = msnm::testing::random_model(gen, 5, 3);
  auto ops = msnm::projection_operators(model, 0.0);
  for (Eigen::Index i = 0; i < 3; ++i) {
    Eigen::VectorXd z = msnm::latent_mode(ops, model.U().col(i));
    Eigen::VectorXd expected = Eigen::VectorXd::Unit(3, i) / std::sqrt(model.eigenvalues()(i));
    EXPECT_LE((z - expected).norm(), 1e-12);
  }
}

TEST(LatentMode, HandComputedSingleComponent) {
  auto model = axis_model({3.0, 0.4}, 1);
  auto ops = msnm::projection_operators(model, 0.5);
  Eigen::VectorXd x(2);
  x << 6, 0;
  Eigen::VectorXd z = msnm::latent_mode(ops, x);
  ASSERT_EQ(z.size(), 1);
  EXPECT_NEAR(z(0), 3.1622776601683795, 1e-12);
}

TEST(LatentMode, DimensionMismatch) {
  auto model = axis_model({3.0, 0.4}, 1);
  auto ops = msnm::projection_operators(model, 0.0);
  EXPECT_THROW(msnm::latent_mode(ops, Eigen::VectorXd::Zero(3)), msnm::ValidationError);
}
