#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gpgrade/diagnosis.hpp"

namespace gpgrade {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// "Referable" is the positive class.
ConfusionCounts confusion(std::span<const Decision> decisions, const std::vector<bool>& labels);

/// Empty optionals mark an undefined ratio (no positives / no negatives).
struct SensSpec {
  std::optional<double> sensitivity;
  std::optional<double> specificity;
};

SensSpec sens_spec(const ConfusionCounts& c);

/// Mann-Whitney AUC with midranks for ties. Throws InputError unless both
/// classes are present.
double roc_auc(std::span<const double> scores, const std::vector<bool>& labels);

/// AUC by integrating the empirical ROC curve with the trapezoid rule over
/// every distinct threshold. Computed in integer arithmetic, so it agrees
/// with roc_auc bit for bit.
double roc_auc_trapezoid(std::span<const double> scores, const std::vector<bool>& labels);

enum class Group { TP = 0, FP = 1, TN = 2, FN = 3 };
inline constexpr std::array<Group, 4> kAllGroups = {Group::TP, Group::FP, Group::TN, Group::FN};
std::string_view group_name(Group g);

/// Five-number summary of posterior std within one confusion group.
/// Quantiles use linear interpolation between order statistics at
/// position p * (count - 1) (the "type 7" rule).
struct BoxStats {
  std::size_t count = 0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

inline constexpr std::string_view kQuartileMethod = "linear interpolation, h = p*(n-1) (type 7)";

/// Type-7 quantile of a sorted, nonempty sample.
double quantile_sorted(std::span<const double> sorted, double p);

BoxStats box_stats(std::vector<double> values);

using GroupStats = std::array<BoxStats, 4>;

GroupStats group_uncertainty_stats(std::span<const Decision> decisions,
                                   const std::vector<bool>& labels);

struct EvalReport {
  ConfusionCounts counts;
  SensSpec rates;
  std::optional<double> auc;  // empty when the test set has a single class
  GroupStats group_stats{};
  /// Same metrics with the uncertainty flip disabled.
  ConfusionCounts counts_before_flip;
  SensSpec rates_before_flip;
  std::size_t flips = 0;
  double grade_threshold = kDefaultGradeThreshold;
  double std_threshold = kDefaultStdThreshold;
};

/// Confusion, rates, AUC on posterior means, and grouped std statistics.
EvalReport evaluate(std::span<const Decision> decisions, const std::vector<bool>& labels,
                    double grade_threshold, double std_threshold);

}  // namespace gpgrade
