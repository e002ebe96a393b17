#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gpgrade/kernel.hpp"

namespace gpgrade {

inline constexpr int kNumGrades = 5;

/// One sample: identifier, feature vector, DR grade 0..4.
struct FeatureRecord {
  std::string id;
  std::vector<double> features;
  int grade = 0;
};

struct DatasetManifest {
  std::string path;
  std::size_t n_records = 0;
  std::size_t dimension = 0;
  std::array<std::size_t, kNumGrades> grade_histogram{};
};

struct Dataset {
  std::vector<FeatureRecord> records;
  DatasetManifest manifest;
};

/// Throws InputError unless 0 <= grade <= 4.
void validate_grade(int grade);

std::array<std::size_t, kNumGrades> grade_histogram(std::span<const FeatureRecord> records);

/// Reads `id,grade,f0,...,f{D-1}`. Errors carry the 1-based line number.
Dataset load_feature_csv(const std::filesystem::path& path);

/// Same format, from an in-memory string. `source` labels the manifest.
Dataset parse_feature_csv(const std::string& text, const std::string& source = "<memory>");

/// Serializes records in the feature CSV format (round-trip exact reals).
std::string format_feature_csv(std::span<const FeatureRecord> records);

/// Writes atomically (temporary file + rename).
void save_feature_csv(const std::filesystem::path& path, std::span<const FeatureRecord> records);

/// Stacks feature vectors into an n x D matrix. Throws on ragged input.
Matrix feature_matrix(std::span<const FeatureRecord> records);

/// Grades as reals in record order.
Vector grade_vector(std::span<const FeatureRecord> records);

/// Per-feature z-score statistics, frozen on the training split.
struct NormStats {
  Vector mean;
  Vector std;  // floored at kStdFloor

  static constexpr double kStdFloor = 1e-8;

  Eigen::Index dimension() const { return mean.size(); }
  friend bool operator==(const NormStats& a, const NormStats& b) {
    return a.mean.size() == b.mean.size() && a.mean == b.mean && a.std == b.std;
  }
};

/// Population (1/n) mean and standard deviation of every column.
NormStats fit_normalizer(std::span<const FeatureRecord> train);
NormStats fit_normalizer(const Matrix& features);

Matrix apply_normalizer(const NormStats& stats, std::span<const FeatureRecord> records);
Matrix apply_normalizer(const NormStats& stats, const Matrix& features);
Matrix invert_normalizer(const NormStats& stats, const Matrix& normalized);

struct SynthParams {
  std::array<int, kNumGrades> n_per_grade{50, 50, 50, 50, 50};
  int dimension = 16;
  double separation = 3.0;
  double noise = 0.5;
  std::uint64_t seed = 0;
};

/// Seeded stand-in for CNN features. Grade g is drawn from
/// N(g * separation * u, noise^2 I) where u is a unit direction derived from
/// the seed. Records are emitted grade by grade with ids "s<grade>_<k>".
std::vector<FeatureRecord> synthesize_dataset(const SynthParams& params);

/// Unit direction used by synthesize_dataset for a given seed and dimension.
Vector synth_direction(std::uint64_t seed, int dimension);

/// Replaces the grade of round(fraction * n) randomly chosen records with a
/// different grade drawn uniformly from the other four. Returns the indices
/// that were changed.
std::vector<std::size_t> corrupt_grades(std::vector<FeatureRecord>& records, double fraction,
                                        std::uint64_t seed);

/// Grade-stratified random split. Each grade contributes
/// round(test_fraction * count) records to the test side; order within each
/// side follows the input order.
void split_dataset(std::span<const FeatureRecord> records, double test_fraction,
                   std::uint64_t seed, std::vector<FeatureRecord>& train,
                   std::vector<FeatureRecord>& test);

}  // namespace gpgrade
