#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include "msnm/dataset.hpp"
#include "test_support.hpp"

using msnm::testing::read_file;
using msnm::testing::TempDir;

namespace {

const std::filesystem::path kFixtures = MSNM_FIXTURE_DIR;

struct RunResult {
  int code = -1;
  std::string output;
};

RunResult run(const TempDir& dir, const std::string& args) {
  const auto log = dir / "cli_output.txt";
  const std::string cmd = std::string("\"") + MSNM_CLI_PATH + "\" " + args + " > \"" +
                          log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = read_file(log);
  return r;
}

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST(Cli, VersionAndHelp) {
  TempDir dir("cli_version");
  auto v = run(dir, "--version");
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.output.find("0.1.0"), std::string::npos);
  EXPECT_EQ(run(dir, "--help").code, 0);
}

TEST(Cli, UnknownFlagExitsTwo) {
  TempDir dir("cli_badflag");
  EXPECT_EQ(run(dir, "synth --no-such-flag").code, 2);
  EXPECT_EQ(run(dir, "synth --n-calib -5").code, 2);
  EXPECT_EQ(run(dir, "fit --data " + q(dir / "missing.csv")).code, 2);
}

TEST(Cli, SynthIsDeterministic) {
  TempDir dir("cli_synth");
  ASSERT_EQ(run(dir, "synth --seed 7 --out-dir " + q(dir / "a")).code, 0);
  ASSERT_EQ(run(dir, "synth --seed 7 --out-dir " + q(dir / "b")).code, 0);
  EXPECT_EQ(read_file(dir / "a/calib.csv"), read_file(dir / "b/calib.csv"));
  EXPECT_EQ(read_file(dir / "a/test.csv"), read_file(dir / "b/test.csv"));
  auto test = msnm::read_dataset_csv(dir / "a/test.csv");
  EXPECT_EQ(test.rows(), 1200);
  EXPECT_EQ(msnm::read_dataset_csv(dir / "a/calib.csv").rows(), 1000);
}

TEST(Cli, SynthWithoutAnomalies) {
  TempDir dir("cli_clean");
  ASSERT_EQ(run(dir, "synth --n-anom1 0 --n-anom2 0 --out-dir " + q(dir.path())).code, 0);
  auto test = msnm::read_dataset_csv(dir / "test.csv");
  for (const auto& l : *test.labels) EXPECT_EQ(l, "normal");
}

TEST(Cli, FullPipeline) {
  TempDir dir("cli_pipeline");
  ASSERT_EQ(run(dir, "synth --seed 3 --out-dir " + q(dir.path())).code, 0);
  auto fit = run(dir, "fit --data " + q(dir / "calib.csv") + " --p 1 --chi2-confidence 0.99 --out " +
                          q(dir / "model.json"));
  ASSERT_EQ(fit.code, 0) << fit.output;
  auto score = run(dir, "score --model " + q(dir / "model.json") + " --data " + q(dir / "test.csv") +
                            " --out " + q(dir / "scores.csv"));
  ASSERT_EQ(score.code, 0) << score.output;
  auto eval = run(dir, "eval --scores " + q(dir / "scores.csv") + " --per-attack --out " +
                           q(dir / "report.json") + " --roc-csv " + q(dir / "roc.csv"));
  ASSERT_EQ(eval.code, 0) << eval.output;
  auto report = read_file(dir / "report.json");
  EXPECT_NE(report.find("\"anom1\""), std::string::npos);
  EXPECT_NE(report.find("\"anom2\""), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir / "scores.csv.manifest.json"));

  auto chi = run(dir, "score --rule chi2 --model " + q(dir / "model.json") + " --data " +
                          q(dir / "test.csv") + " --out " + q(dir / "scores_chi2.csv"));
  EXPECT_EQ(chi.code, 0) << chi.output;
}

TEST(Cli, ScoreEmptyDataIsHeaderOnly) {
  TempDir dir("cli_empty");
  ASSERT_EQ(run(dir, "synth --out-dir " + q(dir.path())).code, 0);
  ASSERT_EQ(run(dir, "fit --data " + q(dir / "calib.csv") + " --out " + q(dir / "model.json")).code, 0);
  msnm::testing::write_file(dir / "empty.csv", "label,x1,x2\n");
  ASSERT_EQ(run(dir, "score --model " + q(dir / "model.json") + " --data " + q(dir / "empty.csv") +
                         " --out " + q(dir / "scores.csv")).code,
            0);
  EXPECT_EQ(read_file(dir / "scores.csv"), "row_index,label,q,d,combined,scorer,delta,alpha,flagged\n");
}

TEST(Cli, FeatureMismatchExitsTwo) {
  TempDir dir("cli_mismatch");
  ASSERT_EQ(run(dir, "synth --out-dir " + q(dir.path())).code, 0);
  ASSERT_EQ(run(dir, "fit --data " + q(dir / "calib.csv") + " --out " + q(dir / "model.json")).code, 0);
  msnm::testing::write_file(dir / "other.csv", "x1,x3\n1,2\n");
  auto r = run(dir, "score --model " + q(dir / "model.json") + " --data " + q(dir / "other.csv") +
                        " --out " + q(dir / "scores.csv"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("x2"), std::string::npos);
}

TEST(Cli, DeltaOutsideRangeExitsTwo) {
  TempDir dir("cli_delta");
  ASSERT_EQ(run(dir, "synth --out-dir " + q(dir.path())).code, 0);
  auto r = run(dir, "fit --data " + q(dir / "calib.csv") + " --delta 1000 --out " +
                        q(dir / "model.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("valid range"), std::string::npos);
}

TEST(Cli, EvalWithoutLabelsExitsTwo) {
  TempDir dir("cli_nolabel");
  msnm::testing::write_file(dir / "scores.csv", "row_index,q,d,combined\n0,1,1,1\n");
  EXPECT_EQ(run(dir, "eval --scores " + q(dir / "scores.csv") + " --out " + q(dir / "r.json")).code, 2);
}

TEST(Cli, SweepGrids) {
  TempDir dir("cli_sweep");
  ASSERT_EQ(run(dir, "synth --out-dir " + q(dir.path())).code, 0);
  ASSERT_EQ(run(dir, "fit --data " + q(dir / "calib.csv") + " --out " + q(dir / "model.json")).code, 0);
  const std::string base = "sweep --model " + q(dir / "model.json") + " --data " + q(dir / "test.csv");
  auto ok = run(dir, base + " --delta-grid 0,alpha/2,alpha --curve-row 5 --curve-out " +
                         q(dir / "curve.csv") + " --out " + q(dir / "sweep.csv"));
  EXPECT_EQ(ok.code, 0) << ok.output;
  auto curve = read_file(dir / "curve.csv");
  EXPECT_EQ(curve.rfind("delta,f_alpha,d_part,q_part\n", 0), 0u);

  auto p = run(dir, base + " --calib " + q(dir / "calib.csv") + " --p-grid 1,2,3,4,5 --out " +
                        q(dir / "p.csv"));
  EXPECT_EQ(p.code, 2);
  EXPECT_NE(p.output.find("P must be < M"), std::string::npos);
  EXPECT_EQ(run(dir, base + " --out " + q(dir / "none.csv")).code, 2);
}

TEST(Cli, IngestFixture) {
  TempDir dir("cli_ingest");
  auto r = run(dir, "ingest " + q(kFixtures / "flows_two_minutes.log") + " --features " +
                        q(kFixtures / "three_features.ini") + " --out " + q(dir / "data.csv"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(read_file(dir / "data.csv"), read_file(kFixtures / "flows_two_minutes.expected.csv"));
}

TEST(Cli, IngestBadRegexNamesFeature) {
  TempDir dir("cli_regex");
  msnm::testing::write_file(dir / "bad.ini", "[feature:broken_feature]\npattern = ([a-z\n");
  auto r = run(dir, "ingest " + q(kFixtures / "flows_two_minutes.log") + " --features " +
                        q(dir / "bad.ini") + " --out " + q(dir / "data.csv"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("broken_feature"), std::string::npos);
}
