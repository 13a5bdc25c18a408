#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "msnm/error.hpp"
#include "msnm/ingestion.hpp"
#include "test_support.hpp"

using msnm::FeatureMode;
using msnm::FeatureSpec;
using msnm::WindowingConfig;

namespace {

const std::filesystem::path kFixtures = MSNM_FIXTURE_DIR;

msnm::IngestResult parse(const std::string& text, const std::vector<FeatureSpec>& specs,
                         const WindowingConfig& w = {}) {
  std::istringstream in(text);
  return msnm::parse_logs(in, specs, w);
}

msnm::IngestConfig fixture_config() {
  return msnm::load_ingest_config(kFixtures / "three_features.ini");
}

}  // namespace

TEST(FeatureSpec, CountsNonOverlappingMatches) {
  FeatureSpec spec("aa", "aa");
  EXPECT_EQ(spec.evaluate("aaaaa"), 2.0);
  EXPECT_EQ(spec.evaluate("b"), 0.0);
}

TEST(FeatureSpec, SumsNumericCaptures) {
  FeatureSpec spec("bytes", "b=([0-9a-z]+)", FeatureMode::sum_capture);
  EXPECT_EQ(spec.evaluate("b=10 b=32 b=x"), 42.0);
}

TEST(FeatureSpec, BadRegexNamesFeature) {
  try {
    FeatureSpec("broken_one", "([a-z");
    FAIL();
  } catch (const msnm::ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("broken_one"), std::string::npos);
  }
  EXPECT_THROW(FeatureSpec("nocap", "abc", FeatureMode::sum_capture), msnm::ValidationError);
}

TEST(Timestamps, ParseAndFormat) {
  EXPECT_EQ(msnm::parse_timestamp("2016-07-27 13:43:00", "%Y-%m-%d %H:%M:%S"), 1469626980);
  EXPECT_EQ(msnm::parse_timestamp("1469626980", "epoch"), 1469626980);
  EXPECT_EQ(msnm::parse_timestamp("1469626980.7", "epoch"), 1469626980);
  EXPECT_FALSE(msnm::parse_timestamp("yesterday", "%Y-%m-%d %H:%M:%S").has_value());
  EXPECT_EQ(msnm::format_timestamp(1469626980, "%Y-%m-%d %H:%M:%S"), "2016-07-27 13:43:00");
}

TEST(ParseLogs, EmptyStream) {
  auto r = parse("", {FeatureSpec("a", "x")});
  EXPECT_EQ(r.data.rows(), 0);
  EXPECT_EQ(r.data.cols(), 1);
  EXPECT_EQ(r.lines_read, 0u);
}

TEST(ParseLogs, ThreeLinesOneMinute) {
  auto r = parse(
      "2020-01-01 00:00:01 hit\n2020-01-01 00:00:20 hit\n2020-01-01 00:00:59 hit\n",
      {FeatureSpec("hits", "hit")});
  ASSERT_EQ(r.data.rows(), 1);
  EXPECT_EQ(r.data.values(0, 0), 3.0);
}

TEST(ParseLogs, FixtureMatchesHandCount) {
  auto cfg = fixture_config();
  std::ifstream in(kFixtures / "flows_two_minutes.log");
  auto r = msnm::parse_logs(in, cfg.features, cfg.windowing);
  ASSERT_EQ(r.data.rows(), 2);
  EXPECT_EQ(r.data.feature_names, (std::vector<std::string>{"udp", "tcp", "bytes"}));
  Eigen::MatrixXd expected(2, 3);
  expected << 2, 2, 2064, 2, 3, 2940;
  EXPECT_EQ(r.data.values, expected);
  EXPECT_EQ((*r.data.timestamps)[0], 1469626980);
  EXPECT_EQ((*r.data.timestamps)[1], 1469627040);
}

TEST(ParseLogs, ColumnSumsEqualTotalCounts) {
  auto cfg = fixture_config();
  std::ifstream in(kFixtures / "flows_two_minutes.log");
  auto r = msnm::parse_logs(in, cfg.features, cfg.windowing);
  std::ifstream again(kFixtures / "flows_two_minutes.log");
  std::string line;
  Eigen::RowVectorXd totals = Eigen::RowVectorXd::Zero(3);
  while (std::getline(again, line)) {
    for (std::size_t f = 0; f < cfg.features.size(); ++f)
      totals(static_cast<Eigen::Index>(f)) += cfg.features[f].evaluate(line);
  }
  EXPECT_EQ(r.data.values.colwise().sum(), totals);
}

TEST(ParseLogs, GapsBecomeZeroRows) {
  auto r = parse("2020-01-01 00:00:01 x\n2020-01-01 00:03:00 x\n", {FeatureSpec("x", "x")});
  ASSERT_EQ(r.data.rows(), 4);
  EXPECT_EQ(r.data.values(1, 0), 0.0);
  EXPECT_EQ(r.data.values(3, 0), 1.0);
}

TEST(ParseLogs, SkipsUnreadableLinesAndFailsOnMismatch) {
  auto r = parse("2020-01-01 00:00:01 x\n garbage x\n2020-01-01 00:00:02 x\n",
                 {FeatureSpec("x", "x")});
  EXPECT_EQ(r.lines_skipped, 1u);
  EXPECT_EQ(r.data.values(0, 0), 2.0);
  try {
    parse("nope x\nnope x\n2020-01-01 00:00:02 x\n", {FeatureSpec("x", "x")});
    FAIL();
  } catch (const msnm::ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("timestamp pattern mismatch"), std::string::npos);
  }
}

TEST(ParseLogs, SplitFilesMergeToWhole) {
  auto cfg = fixture_config();
  std::ifstream in(kFixtures / "flows_two_minutes.log");
  std::string first;
  std::string second;
  std::string line;
  for (int i = 0; std::getline(in, line); ++i) (i % 2 == 0 ? first : second) += line + "\n";
  auto a = parse(first, cfg.features, cfg.windowing).data;
  auto b = parse(second, cfg.features, cfg.windowing).data;
  auto merged = msnm::merge_windows({a, b}, 60);
  std::ifstream whole_in(kFixtures / "flows_two_minutes.log");
  auto whole = msnm::parse_logs(whole_in, cfg.features, cfg.windowing).data;
  EXPECT_EQ(merged.values, whole.values);
  EXPECT_EQ(*merged.timestamps, *whole.timestamps);
}

TEST(IngestConfig, RejectsUnknownKeysAndModes) {
  std::istringstream bad_key("[feature:a]\npattern = x\ncolour = red\n");
  EXPECT_THROW(msnm::parse_ingest_config(bad_key), msnm::ValidationError);
  std::istringstream bad_mode("[feature:a]\npattern = x\nmode = average\n");
  EXPECT_THROW(msnm::parse_ingest_config(bad_mode), msnm::ValidationError);
  std::istringstream none("[window]\nseconds = 30\n");
  EXPECT_THROW(msnm::parse_ingest_config(none), msnm::ValidationError);
}

TEST(IngestConfig, BundledExampleLoads) {
  auto cfg = msnm::load_ingest_config(std::filesystem::path(MSNM_CONFIG_DIR) / "netflow_12.ini");
  EXPECT_EQ(cfg.features.size(), 12u);
  std::string row = "2016-07-27 13:43:21,0.000,42.219.153.7,143.72.8.137,40012,53,UDP,.A....,0,0,3,180,background";
  for (const auto& f : cfg.features) {
    double v = f.evaluate(row);
    if (f.name() == "proto_udp" || f.name() == "dport_dns") EXPECT_EQ(v, 1.0) << f.name();
    else if (f.name() == "packets") EXPECT_EQ(v, 3.0);
    else if (f.name() == "bytes") EXPECT_EQ(v, 180.0);
    else EXPECT_EQ(v, 0.0) << f.name();
  }
}

class LabelTest : public ::testing::Test {
 protected:
  void SetUp() override {
    data.feature_names = {"a"};
    data.values = Eigen::MatrixXd::Zero(3, 1);
    data.timestamps = std::vector<std::int64_t>{0, 60, 120};
  }
  msnm::Dataset data;
};

TEST_F(LabelTest, EmptyTableIsBackground) {
  auto r = msnm::label_windows(data, {}, 60);
  EXPECT_EQ(*r.data.labels, (std::vector<std::string>(3, "background")));
}

TEST_F(LabelTest, OneLabeledMinute) {
  auto r = msnm::label_windows(data, {{75, "dos"}}, 60);
  EXPECT_EQ(*r.data.labels, (std::vector<std::string>{"background", "dos", "background"}));
  EXPECT_TRUE(r.warnings.empty());
}

TEST_F(LabelTest, ConflictNamesWindow) {
  try {
    msnm::label_windows(data, {{61, "dos"}, {119, "scan"}}, 60);
    FAIL();
  } catch (const msnm::ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("conflicting labels"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("60"), std::string::npos);
  }
  EXPECT_NO_THROW(msnm::label_windows(data, {{61, "dos"}, {119, "dos"}}, 60));
}

TEST_F(LabelTest, OutOfRangeIsWarning) {
  auto r = msnm::label_windows(data, {{600, "dos"}}, 60);
  EXPECT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(*r.data.labels, (std::vector<std::string>(3, "background")));
}

TEST(LabelFile, ReadsEpochAndFormatted) {
  std::istringstream in("timestamp,label\n60,dos\n2016-07-27 13:43:00,scan\n");
  auto e = msnm::read_label_file(in, "%Y-%m-%d %H:%M:%S");
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0].timestamp, 60);
  EXPECT_EQ(e[1].timestamp, 1469626980);
  EXPECT_EQ(e[1].label, "scan");
  std::istringstream bad("60,dos,extra\n");
  EXPECT_THROW(msnm::read_label_file(bad, "epoch"), msnm::ValidationError);
}
