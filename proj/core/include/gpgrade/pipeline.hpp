#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gpgrade/dataset.hpp"
#include "gpgrade/diagnosis.hpp"

namespace gpgrade {

enum class Command { Train, Predict, Evaluate, Synth, Sweep };

/// Exit codes of the command-line front end.
enum ExitStatus : int { kExitOk = 0, kExitInputError = 1, kExitNumericalError = 2 };

struct RunConfig {
  Command command = Command::Train;
  std::filesystem::path train_csv;
  std::filesystem::path test_csv;
  std::filesystem::path model;
  std::filesystem::path out;
  double grade_threshold = kDefaultGradeThreshold;
  double std_threshold = kDefaultStdThreshold;
  std::size_t max_train = 2000;
  int restarts = 3;
  std::uint64_t seed = 0;

  // synth
  SynthParams synth{};
  double label_noise = 0.0;
  std::optional<std::filesystem::path> holdout_out;
  double holdout_fraction = 0.3;

  // sweep
  std::vector<double> std_grid;

  /// Throws InputError when a field is out of range for the command.
  void validate() const;
};

/// Default std_threshold grid for `sweep`: 0.0, 0.1, ..., 2.0.
std::vector<double> default_std_grid();

/// Derived artifact paths for `evaluate --out report.json`.
std::filesystem::path text_report_path(const std::filesystem::path& json_path);
std::filesystem::path box_table_path(const std::filesystem::path& json_path);

/// Runs one command. Module errors are caught and mapped to an exit status
/// with a one-line diagnostic on `err`; summaries go to `out`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Per-sample prediction CSV: id,mean,std,referable,flipped.
std::string format_predictions_csv(const std::vector<FeatureRecord>& records,
                                   const std::vector<Decision>& decisions);

}  // namespace gpgrade
