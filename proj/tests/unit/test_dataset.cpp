#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "gpgrade/atomic_file.hpp"
#include "gpgrade/dataset.hpp"
#include "gpgrade/error.hpp"

namespace gpgrade {
namespace {

std::string csv_with_grades(const std::vector<int>& grades, int dim) {
  std::string s = "id,grade";
  for (int k = 0; k < dim; ++k) s += ",f" + std::to_string(k);
  s += "\n";
  for (std::size_t i = 0; i < grades.size(); ++i) {
    s += "r" + std::to_string(i) + "," + std::to_string(grades[i]);
    for (int k = 0; k < dim; ++k) s += "," + std::to_string(0.5 * static_cast<double>(i) - k);
    s += "\n";
  }
  return s;
}

int parse_error_line(const std::string& text) {
  try {
    parse_feature_csv(text);
  } catch (const ParseError& e) {
    return static_cast<int>(e.line());
  }
  return -1;
}

TEST(FeatureCsv, HistogramAndOrder) {
  const Dataset ds = parse_feature_csv(csv_with_grades({0, 0, 0, 4, 4}, 4));
  EXPECT_EQ(ds.manifest.n_records, 5u);
  EXPECT_EQ(ds.manifest.dimension, 4u);
  EXPECT_EQ(ds.manifest.grade_histogram, (std::array<std::size_t, 5>{3, 0, 0, 0, 2}));
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(ds.records[i].id, "r" + std::to_string(i));
    EXPECT_EQ(ds.records[i].features[0], 0.5 * static_cast<double>(i));
  }
}

TEST(FeatureCsv, TestPartitionShapedHistogram) {
  std::vector<int> grades;
  grades.insert(grades.end(), 7407, 0);
  grades.insert(grades.end(), 689, 1);
  grades.insert(grades.end(), 694, 4);
  const Dataset ds = parse_feature_csv(csv_with_grades(grades, 2));
  EXPECT_EQ(ds.manifest.grade_histogram, (std::array<std::size_t, 5>{7407, 689, 0, 0, 694}));
}

TEST(FeatureCsv, Errors) {
  EXPECT_THROW(parse_feature_csv("id,grade,f0\n"), ParseError);
  try {
    parse_feature_csv("id,grade,f0\n");
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("no records"), std::string::npos);
  }
  EXPECT_EQ(parse_error_line("id,label,f0\na,1,2\n"), 1);
  EXPECT_EQ(parse_error_line("id,grade,f1\na,1,2\n"), 1);
  EXPECT_EQ(parse_error_line("id,grade,f0,f1\na,1,2,3\nb,1,2\n"), 3);
  EXPECT_EQ(parse_error_line("id,grade,f0\na,1.5,2\n"), 2);
  EXPECT_EQ(parse_error_line("id,grade,f0\na,1,2\nb,5,2\n"), 3);
  EXPECT_EQ(parse_error_line("id,grade,f0\na,1,nan\n"), 2);
  EXPECT_EQ(parse_error_line("id,grade,f0\na,1,inf\n"), 2);
  EXPECT_EQ(parse_error_line("id,grade,f0\na,1,abc\n"), 2);
  EXPECT_THROW(load_feature_csv("/nonexistent/features.csv"), ParseError);
}

TEST(FeatureCsv, CrlfAndRoundTrip) {
  const Dataset ds = parse_feature_csv("id,grade,f0,f1\r\na,2,0.1,-3e-7\r\n");
  EXPECT_EQ(ds.records[0].features[1], -3e-7);
  const Dataset again = parse_feature_csv(format_feature_csv(ds.records));
  EXPECT_EQ(again.records[0].features, ds.records[0].features);
}

TEST(Normalizer, ZScoresTrainingColumns) {
  SynthParams p;
  p.dimension = 6;
  p.seed = 4;
  const auto recs = synthesize_dataset(p);
  const NormStats s = fit_normalizer(recs);
  const Matrix z = apply_normalizer(s, recs);
  const double n = static_cast<double>(z.rows());
  for (Eigen::Index k = 0; k < z.cols(); ++k) {
    EXPECT_NEAR(z.col(k).mean(), 0.0, 1e-10);
    EXPECT_NEAR(std::sqrt(z.col(k).array().square().sum() / n), 1.0, 1e-10);
  }
  EXPECT_TRUE(invert_normalizer(s, z).isApprox(feature_matrix(recs), 1e-12));
  EXPECT_LE((invert_normalizer(s, z) - feature_matrix(recs)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Normalizer, ConstantColumnBecomesZeros) {
  Matrix x(4, 2);
  x << 1, 7, 2, 7, 3, 7, 4, 7;
  const NormStats s = fit_normalizer(x);
  EXPECT_EQ(s.std[1], NormStats::kStdFloor);
  EXPECT_TRUE((apply_normalizer(s, x).col(1).array() == 0.0).all());
}

TEST(Normalizer, TestSplitUsesTrainStatistics) {
  SynthParams p;
  p.dimension = 3;
  p.seed = 21;
  std::vector<FeatureRecord> train = synthesize_dataset(p);
  p.noise = 2.0;
  p.seed = 22;
  const std::vector<FeatureRecord> test = synthesize_dataset(p);
  const NormStats train_stats = fit_normalizer(train);
  const NormStats test_stats = fit_normalizer(test);
  EXPECT_FALSE(train_stats == test_stats);
  const Matrix with_train = apply_normalizer(train_stats, test);
  const Matrix with_test = apply_normalizer(test_stats, test);
  EXPECT_GT((with_train - with_test).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_THROW(apply_normalizer(train_stats, Matrix::Zero(2, 5)), InputError);
}

TEST(Synthesize, CountsAndDeterminism) {
  SynthParams p;
  p.n_per_grade = {10, 10, 10, 10, 10};
  p.seed = 8;
  const auto a = synthesize_dataset(p);
  EXPECT_EQ(a.size(), 50u);
  EXPECT_EQ(grade_histogram(a), (std::array<std::size_t, 5>{10, 10, 10, 10, 10}));
  EXPECT_EQ(format_feature_csv(a), format_feature_csv(synthesize_dataset(p)));
  p.seed = 9;
  EXPECT_NE(format_feature_csv(a), format_feature_csv(synthesize_dataset(p)));
}

TEST(Synthesize, WellSeparatedGradesAreNearestNeighbourClassifiable) {
  SynthParams p;
  p.dimension = 16;
  p.separation = 3.0;
  p.noise = 0.5;
  p.seed = 12;
  const auto recs = synthesize_dataset(p);
  // Leave-one-out 1-NN by brute force.
  std::size_t correct = 0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int label = -1;
    for (std::size_t j = 0; j < recs.size(); ++j) {
      if (i == j) continue;
      double d = 0.0;
      for (std::size_t k = 0; k < recs[i].features.size(); ++k)
        d += std::pow(recs[i].features[k] - recs[j].features[k], 2);
      if (d < best) {
        best = d;
        label = recs[j].grade;
      }
    }
    correct += label == recs[i].grade;
  }
  EXPECT_GE(static_cast<double>(correct) / static_cast<double>(recs.size()), 0.95);
}

TEST(Synthesize, GradeCentroidsAreCollinear) {
  SynthParams p;
  p.n_per_grade = {200, 200, 200, 200, 200};
  p.dimension = 8;
  p.seed = 30;
  const auto recs = synthesize_dataset(p);
  const Matrix x = feature_matrix(recs);
  Matrix centroids = Matrix::Zero(5, 8);
  for (std::size_t i = 0; i < recs.size(); ++i) centroids.row(recs[i].grade) += x.row(static_cast<Eigen::Index>(i)) / 200.0;
  // Least-squares line c_g = a + g b through the five centroids.
  Eigen::MatrixXd design(5, 2);
  for (int g = 0; g < 5; ++g) design.row(g) << 1.0, g;
  const Eigen::MatrixXd coef = design.colPivHouseholderQr().solve(Eigen::MatrixXd(centroids));
  const Eigen::MatrixXd resid = Eigen::MatrixXd(centroids) - design * coef;
  for (int g = 0; g < 5; ++g) EXPECT_LT(resid.row(g).norm(), p.noise);
  const Vector dir = coef.row(1).transpose().normalized();
  EXPECT_NEAR(std::abs(dir.dot(synth_direction(p.seed, p.dimension))), 1.0, 1e-2);
}

TEST(Synthesize, RejectsBadParameters) {
  SynthParams p;
  p.dimension = 1;
  EXPECT_THROW(synthesize_dataset(p), InputError);
  p = {};
  p.noise = 0.0;
  EXPECT_THROW(synthesize_dataset(p), InputError);
  p = {};
  p.separation = -1.0;
  EXPECT_THROW(synthesize_dataset(p), InputError);
}

TEST(CorruptGrades, ChangesExactlyTheRequestedShare) {
  SynthParams p;
  p.seed = 3;
  auto recs = synthesize_dataset(p);
  const auto original = recs;
  const auto changed = corrupt_grades(recs, 0.1, 3);
  EXPECT_EQ(changed.size(), 25u);
  std::size_t diffs = 0;
  for (std::size_t i = 0; i < recs.size(); ++i) diffs += recs[i].grade != original[i].grade;
  EXPECT_EQ(diffs, 25u);
}

TEST(SplitDataset, StratifiedAndDisjoint) {
  SynthParams p;
  p.seed = 5;
  const auto recs = synthesize_dataset(p);
  std::vector<FeatureRecord> train, test;
  split_dataset(recs, 0.3, 5, train, test);
  EXPECT_EQ(train.size() + test.size(), recs.size());
  EXPECT_EQ(grade_histogram(test), (std::array<std::size_t, 5>{15, 15, 15, 15, 15}));
  for (const auto& t : test)
    for (const auto& r : train) EXPECT_NE(t.id, r.id);
}

TEST(AtomicFile, WritesWholeFileAndLeavesNoTemporary) {
  const auto dir = std::filesystem::temp_directory_path() / "gpgrade_atomic_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.txt";
  write_file_atomic(path, "hello\n");
  EXPECT_EQ(read_file(path), "hello\n");
  EXPECT_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
  EXPECT_THROW(write_file_atomic(dir / "missing" / "x.txt", "x"), InputError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace gpgrade
