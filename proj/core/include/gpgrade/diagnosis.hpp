#pragma once

#include <span>
#include <vector>

#include "gpgrade/gp.hpp"

namespace gpgrade {

inline constexpr double kDefaultGradeThreshold = 1.5;
inline constexpr double kDefaultStdThreshold = 0.84;

struct Decision {
  bool referable = false;
  /// Set only when the uncertainty rule turned a negative into a positive.
  bool flipped = false;
  double mean = 0.0;
  double std = 0.0;

  friend bool operator==(const Decision&, const Decision&) = default;
};

/// Grades 0 and 1 are non-referable, 2..4 referable.
bool grade_to_referable(int grade);

/// referable = mean >= grade_threshold.
Decision binarize(const Prediction& pred, double grade_threshold = kDefaultGradeThreshold);

/// Negatives whose std is strictly above std_threshold become positives.
Decision apply_uncertainty_flip(const Decision& d, double std_threshold = kDefaultStdThreshold);

/// binarize followed by apply_uncertainty_flip over a batch.
std::vector<Decision> decide(std::span<const Prediction> preds,
                             double grade_threshold = kDefaultGradeThreshold,
                             double std_threshold = kDefaultStdThreshold);

std::vector<bool> referable_labels(std::span<const int> grades);

}  // namespace gpgrade
