#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "msnm/error.hpp"
#include "msnm/model.hpp"
#include "msnm/random.hpp"
#include "msnm/scaler.hpp"
#include "msnm/synthetic.hpp"

using msnm::SyntheticConfig;

namespace {

std::string to_csv(const msnm::Dataset& d) {
  std::ostringstream out;
  msnm::write_dataset_csv(out, d);
  return out.str();
}

std::size_t count(const msnm::Dataset& d, const std::string& label) {
  return static_cast<std::size_t>(std::count(d.labels->begin(), d.labels->end(), label));
}

}  // namespace

TEST(StableRng, FixedSequence) {
  msnm::StableRng a(123);
  msnm::StableRng b(123);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(a.normal(), b.normal());
    EXPECT_EQ(a.uniform(), b.uniform());
  }
  msnm::StableRng c(7);
  double u = c.uniform();
  EXPECT_GE(u, 0.0);
  EXPECT_LT(u, 1.0);
}

TEST(StableRng, NormalMoments) {
  msnm::StableRng rng(5);
  const int n = 200000;
  double s = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double v = rng.normal();
    s += v;
    s2 += v * v;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.015);
}

TEST(Synthetic, SameSeedSameBytes) {
  SyntheticConfig cfg;
  cfg.seed = 7;
  auto a = msnm::generate_synthetic(cfg);
  auto b = msnm::generate_synthetic(cfg);
  EXPECT_EQ(to_csv(a.calib), to_csv(b.calib));
  EXPECT_EQ(to_csv(a.test), to_csv(b.test));
  cfg.seed = 8;
  EXPECT_NE(to_csv(msnm::generate_synthetic(cfg).calib), to_csv(a.calib));
}

TEST(Synthetic, DefaultShapesAndLabels) {
  SyntheticConfig cfg;
  auto d = msnm::generate_synthetic(cfg);
  EXPECT_EQ(d.calib.rows(), 1000);
  EXPECT_EQ(d.test.rows(), 1200);
  EXPECT_EQ(d.calib.feature_names, (std::vector<std::string>{"x1", "x2"}));
  EXPECT_EQ(count(d.calib, "normal"), 1000u);
  EXPECT_EQ(count(d.test, "normal"), 1000u);
  EXPECT_EQ(count(d.test, "anom1"), 100u);
  EXPECT_EQ(count(d.test, "anom2"), 100u);
  EXPECT_EQ((*d.test.labels)[999], "normal");
  EXPECT_EQ((*d.test.labels)[1000], "anom1");
  EXPECT_EQ((*d.test.labels)[1100], "anom2");
}

TEST(Synthetic, AnomalyCountsDoNotMoveCleanRows) {
  SyntheticConfig cfg;
  cfg.seed = 3;
  auto a = msnm::generate_synthetic(cfg);
  cfg.n_anom1 = 0;
  cfg.n_anom2 = 0;
  auto b = msnm::generate_synthetic(cfg);
  EXPECT_EQ(b.test.rows(), 1000);
  EXPECT_EQ(a.test.values.topRows(1000), b.test.values);
}

TEST(Synthetic, NoiselessPointsLieOnTheLine) {
  SyntheticConfig cfg;
  cfg.noise_var = 1e-300;
  cfg.n_anom1 = 0;
  cfg.n_anom2 = 0;
  auto d = msnm::generate_synthetic(cfg);
  const Eigen::Vector2d w = cfg.w.normalized();
  for (Eigen::Index r = 0; r < d.test.rows(); ++r) {
    Eigen::Vector2d x = d.test.values.row(r).transpose();
    EXPECT_LT((x - w * w.dot(x)).norm(), 1e-12);
  }
}

TEST(Synthetic, LeadingEigenvectorFollowsW) {
  const Eigen::Vector2d w = SyntheticConfig{}.w.normalized();
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SyntheticConfig cfg;
    cfg.seed = seed;
    auto d = msnm::generate_synthetic(cfg);
    auto scaled = msnm::apply_scaler(msnm::fit_scaler(d.calib), d.calib);
    auto model = msnm::fit_model(scaled, 1);
    total += std::acos(std::min(1.0, std::abs(model.U().col(0).dot(w))));
  }
  EXPECT_LT(total / 10 * 180.0 / std::numbers::pi, 2.0);
}

TEST(Synthetic, CleanCovarianceMatchesModel) {
  SyntheticConfig cfg;
  cfg.n_calib = 100000;
  cfg.n_test_clean = 0;
  cfg.n_anom1 = 0;
  cfg.n_anom2 = 0;
  cfg.seed = 11;
  auto d = msnm::generate_synthetic(cfg);
  const Eigen::MatrixXd& x = d.calib.values;
  Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  Eigen::Matrix2d cov = centered.transpose() * centered / static_cast<double>(x.rows() - 1);
  Eigen::Matrix2d expected = cfg.w * cfg.w.transpose() + cfg.noise_var * Eigen::Matrix2d::Identity();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(cov(i, j), expected(i, j), 0.05 * expected(i, j));
}

TEST(Synthetic, FoldedLatentMean) {
  SyntheticConfig cfg;
  cfg.n_test_clean = 0;
  cfg.n_anom1 = 0;
  cfg.n_anom2 = 1000;
  cfg.noise_var = 1e-300;
  cfg.seed = 4;
  auto d = msnm::generate_synthetic(cfg);
  const Eigen::Vector2d w = cfg.w;
  double sum = 0.0;
  int negative = 0;
  for (Eigen::Index r = 0; r < d.test.rows(); ++r) {
    double z = d.test.values.row(r).dot(w) / w.squaredNorm();
    sum += std::abs(z);
    negative += z < 0;
  }
  EXPECT_LE(std::abs(sum / 1000 - cfg.anom2_mean), 0.2);
  EXPECT_GT(negative, 400);
  EXPECT_LT(negative, 600);
}

TEST(Synthetic, Anom1Spread) {
  SyntheticConfig cfg;
  cfg.n_test_clean = 0;
  cfg.n_anom2 = 0;
  cfg.n_anom1 = 20000;
  auto d = msnm::generate_synthetic(cfg);
  Eigen::RowVector2d var = d.test.values.array().square().colwise().mean();
  EXPECT_NEAR(var(0), 5.0, 0.25);
  EXPECT_NEAR(var(1), 5.0, 0.25);
}

TEST(Synthetic, RejectsInvalidConfig) {
  SyntheticConfig cfg;
  cfg.n_anom1 = -1;
  EXPECT_THROW(msnm::generate_synthetic(cfg), msnm::ValidationError);
  cfg = SyntheticConfig{};
  cfg.noise_var = 0.0;
  EXPECT_THROW(msnm::generate_synthetic(cfg), msnm::ValidationError);
}
