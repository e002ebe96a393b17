#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "gpgrade/atomic_file.hpp"
#include "gpgrade/pipeline.hpp"

namespace fs = std::filesystem;

namespace gpgrade {
namespace {

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gpgrade_pipeline_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run_quiet(const RunConfig& c) {
    std::ostringstream out;
    err_.str("");
    return run(c, out, err_);
  }

  void synth_split(std::uint64_t seed) {
    RunConfig c;
    c.command = Command::Synth;
    c.synth.seed = seed;
    c.out = path("train.csv");
    c.holdout_out = path("test.csv");
    ASSERT_EQ(run_quiet(c), kExitOk) << err_.str();
  }

  void train(std::uint64_t seed, const fs::path& model) {
    RunConfig c;
    c.command = Command::Train;
    c.train_csv = path("train.csv");
    c.model = model;
    c.seed = seed;
    ASSERT_EQ(run_quiet(c), kExitOk) << err_.str();
  }

  RunConfig scoring(Command cmd, const std::string& out) {
    RunConfig c;
    c.command = cmd;
    c.test_csv = path("test.csv");
    c.model = path("model.bin");
    c.out = path(out);
    return c;
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  fs::path dir_;
  std::ostringstream err_;
};

TEST_F(PipelineTest, TrainThenEvaluateWritesCompleteReport) {
  synth_split(1);
  train(1, path("model.bin"));
  ASSERT_EQ(run_quiet(scoring(Command::Evaluate, "report.json")), kExitOk) << err_.str();

  const auto j = nlohmann::json::parse(read_file(path("report.json")));
  for (const char* key : {"tp", "fp", "tn", "fn", "sensitivity", "specificity", "auc", "flips",
                          "group_stats", "before_flip"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_TRUE(fs::exists(path("report.report.txt")));
  EXPECT_TRUE(fs::exists(path("report.boxstats.tsv")));
  EXPECT_EQ(j["grade_threshold"], 1.5);
  EXPECT_EQ(j["std_threshold"], 0.84);
}

TEST_F(PipelineTest, HugeStdThresholdDisablesFlips) {
  synth_split(2);
  train(2, path("model.bin"));
  RunConfig c = scoring(Command::Evaluate, "report.json");
  c.std_threshold = 1e300;
  ASSERT_EQ(run_quiet(c), kExitOk);
  const auto j = nlohmann::json::parse(read_file(path("report.json")));
  EXPECT_EQ(j["flips"], 0);
  for (const char* key : {"tp", "fp", "tn", "fn", "sensitivity", "specificity"}) {
    EXPECT_EQ(j[key], j["before_flip"][key]) << key;
  }
}

struct PredRow {
  std::string id;
  double mean, std;
  bool referable, flipped;
};

std::vector<PredRow> parse_predictions(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "id,mean,std,referable,flipped");
  std::vector<PredRow> rows;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string id, mean, std, ref, flip;
    std::getline(ls, id, ',');
    std::getline(ls, mean, ',');
    std::getline(ls, std, ',');
    std::getline(ls, ref, ',');
    std::getline(ls, flip, ',');
    rows.push_back({id, std::stod(mean), std::stod(std), ref == "1", flip == "1"});
  }
  return rows;
}

std::vector<bool> labels_of(const fs::path& csv) {
  std::vector<bool> labels;
  for (const FeatureRecord& r : load_feature_csv(csv).records) labels.push_back(r.grade >= 2);
  return labels;
}

TEST_F(PipelineTest, EvaluateReconcilesWithPredictCsv) {
  synth_split(3);
  train(3, path("model.bin"));
  RunConfig p = scoring(Command::Predict, "pred.csv");
  p.std_threshold = 0.2;  // make the flip rule fire on this easy data
  RunConfig e = scoring(Command::Evaluate, "report.json");
  e.std_threshold = 0.2;
  ASSERT_EQ(run_quiet(p), kExitOk);
  ASSERT_EQ(run_quiet(e), kExitOk);

  const auto rows = parse_predictions(read_file(path("pred.csv")));
  const auto labels = labels_of(path("test.csv"));
  ASSERT_EQ(rows.size(), labels.size());
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0, flips = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    (labels[i] ? (rows[i].referable ? tp : fn) : (rows[i].referable ? fp : tn))++;
    flips += rows[i].flipped;
    if (rows[i].flipped) {
      EXPECT_TRUE(rows[i].referable);
      EXPECT_GT(rows[i].std, 0.2);
    }
  }
  const auto j = nlohmann::json::parse(read_file(path("report.json")));
  EXPECT_EQ(j["tp"], tp);
  EXPECT_EQ(j["fp"], fp);
  EXPECT_EQ(j["tn"], tn);
  EXPECT_EQ(j["fn"], fn);
  EXPECT_EQ(j["flips"], flips);
}

TEST_F(PipelineTest, SweepRowsMatchBruteForceRecount) {
  synth_split(4);
  train(4, path("model.bin"));
  RunConfig s = scoring(Command::Sweep, "sweep.csv");
  s.std_grid = {0.8, 0.1};
  RunConfig p = scoring(Command::Predict, "pred.csv");
  p.std_threshold = 1e300;
  ASSERT_EQ(run_quiet(s), kExitOk);
  ASSERT_EQ(run_quiet(p), kExitOk);

  std::istringstream in(read_file(path("sweep.csv")));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "std_threshold,tp,fp,tn,fn,sensitivity,specificity,flips");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    rows.push_back(f);
  }
  ASSERT_EQ(rows.size(), 2u);

  const auto preds = parse_predictions(read_file(path("pred.csv")));
  const auto labels = labels_of(path("test.csv"));
  double previous_sens = -1.0;
  for (std::size_t r = 0; r < 2; ++r) {
    const double t = std::stod(rows[r][0]);
    std::size_t tp = 0, fn = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const bool positive = preds[i].mean >= 1.5 || preds[i].std > t;
      if (labels[i]) (positive ? tp : fn)++;
    }
    EXPECT_EQ(std::stoul(rows[r][1]), tp);
    EXPECT_EQ(std::stoul(rows[r][4]), fn);
    const double sens = std::stod(rows[r][5]);
    EXPECT_GE(sens, previous_sens);  // thresholds given in decreasing order
    previous_sens = sens;
  }
}

TEST_F(PipelineTest, SameSeedGivesByteIdenticalArtifacts) {
  synth_split(5);
  const std::string csv1 = read_file(path("train.csv"));
  synth_split(5);
  EXPECT_EQ(read_file(path("train.csv")), csv1);

  train(5, path("model.bin"));
  train(5, path("model2.bin"));
  EXPECT_EQ(read_file(path("model.bin")), read_file(path("model2.bin")));

  ASSERT_EQ(run_quiet(scoring(Command::Evaluate, "a.json")), kExitOk);
  ASSERT_EQ(run_quiet(scoring(Command::Evaluate, "b.json")), kExitOk);
  EXPECT_EQ(read_file(path("a.json")), read_file(path("b.json")));
  EXPECT_EQ(read_file(path("a.boxstats.tsv")), read_file(path("b.boxstats.tsv")));
}

TEST_F(PipelineTest, ErrorsMapToExitStatusWithoutPartialOutput) {
  RunConfig c = scoring(Command::Predict, "pred.csv");
  c.model = path("missing.bin");
  EXPECT_EQ(run_quiet(c), kExitInputError);
  EXPECT_FALSE(fs::exists(path("pred.csv")));
  const std::string msg = err_.str();
  EXPECT_NE(msg.find("error:"), std::string::npos);
  EXPECT_EQ(std::count(msg.begin(), msg.end(), '\n'), 1);

  write_file_atomic(path("bad.csv"), "id,grade,f0\na,7,1.0\nb,1,2.0\n");
  RunConfig t;
  t.command = Command::Train;
  t.train_csv = path("bad.csv");
  t.model = path("model.bin");
  EXPECT_EQ(run_quiet(t), kExitInputError);
  EXPECT_FALSE(fs::exists(path("model.bin")));
  EXPECT_NE(err_.str().find("line 2"), std::string::npos);

  synth_split(6);
  train(6, path("model.bin"));
  std::string bytes = read_file(path("model.bin"));
  bytes[100] ^= 0x10;
  write_file_atomic(path("model.bin"), bytes);
  EXPECT_EQ(run_quiet(scoring(Command::Evaluate, "r.json")), kExitInputError);
  EXPECT_FALSE(fs::exists(path("r.json")));

  RunConfig bad = scoring(Command::Evaluate, "r.json");
  bad.grade_threshold = std::numeric_limits<double>::infinity();
  EXPECT_EQ(run_quiet(bad), kExitInputError);
  RunConfig no_out = scoring(Command::Predict, "");
  no_out.out.clear();
  EXPECT_EQ(run_quiet(no_out), kExitInputError);
}

#ifdef GPGRADE_CLI_PATH
int shell(const std::string& cmd) {
  const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WEXITSTATUS(rc);
}

TEST_F(PipelineTest, CommandLineExitCodes) {
  const std::string cli = GPGRADE_CLI_PATH;
  const std::string train_csv = path("train.csv").string();
  const std::string test_csv = path("test.csv").string();
  const std::string model = path("model.bin").string();
  EXPECT_EQ(shell(cli + " synth --out " + train_csv + " --holdout-out " + test_csv + " --seed 7"), 0);
  EXPECT_EQ(shell(cli + " train --train-csv " + train_csv + " --model " + model + " --restarts 1"), 0);
  EXPECT_EQ(shell(cli + " evaluate --test-csv " + test_csv + " --model " + model + " --out " +
                  path("r.json").string() + " --grade-threshold 1.5 --std-threshold 0.84"),
            0);
  EXPECT_EQ(shell(cli + " sweep --test-csv " + test_csv + " --model " + model + " --out " +
                  path("s.csv").string() + " --std-grid 0.5,0.9"),
            0);
  EXPECT_EQ(shell(cli + " predict --test-csv /nonexistent.csv --model " + model + " --out " +
                  path("p.csv").string()),
            1);
  EXPECT_EQ(shell(cli + " train --bogus-flag"), 1);
  EXPECT_EQ(shell(cli + " train --train-csv " + train_csv + " --model " + model + " --max-train 1"), 1);
}
#endif

}  // namespace
}  // namespace gpgrade
