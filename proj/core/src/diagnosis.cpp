#include "gpgrade/diagnosis.hpp"

#include "gpgrade/dataset.hpp"
#include "gpgrade/error.hpp"

namespace gpgrade {

bool grade_to_referable(int grade) {
  validate_grade(grade);
  return grade >= 2;
}

Decision binarize(const Prediction& pred, double grade_threshold) {
  return {pred.mean >= grade_threshold, false, pred.mean, pred.std};
}

Decision apply_uncertainty_flip(const Decision& d, double std_threshold) {
  if (d.referable || !(d.std > std_threshold)) return d;
  Decision flipped = d;
  flipped.referable = true;
  flipped.flipped = true;
  return flipped;
}

std::vector<Decision> decide(std::span<const Prediction> preds, double grade_threshold,
                             double std_threshold) {
  std::vector<Decision> out;
  out.reserve(preds.size());
  for (const Prediction& p : preds) {
    out.push_back(apply_uncertainty_flip(binarize(p, grade_threshold), std_threshold));
  }
  return out;
}

std::vector<bool> referable_labels(std::span<const int> grades) {
  std::vector<bool> labels;
  labels.reserve(grades.size());
  for (int g : grades) labels.push_back(grade_to_referable(g));
  return labels;
}

}  // namespace gpgrade
