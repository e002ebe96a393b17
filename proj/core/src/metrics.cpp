#include "gpgrade/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "gpgrade/error.hpp"

namespace gpgrade {

namespace {

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InputError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                     std::to_string(b) + ")");
  }
}

struct ClassCounts {
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;
};

ClassCounts check_auc_inputs(std::span<const double> scores, const std::vector<bool>& labels) {
  check_lengths(scores.size(), labels.size(), "roc_auc");
  ClassCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i])) throw InputError("roc_auc: NaN score");
    labels[i] ? ++c.pos : ++c.neg;
  }
  if (c.pos == 0 || c.neg == 0) throw InputError("roc_auc: both classes must be present");
  return c;
}

std::vector<std::size_t> order_by_score(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  return order;
}

}  // namespace

ConfusionCounts confusion(std::span<const Decision> decisions, const std::vector<bool>& labels) {
  check_lengths(decisions.size(), labels.size(), "confusion");
  if (decisions.empty()) throw InputError("confusion: no samples");
  ConfusionCounts c;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    const bool predicted = decisions[i].referable;
    if (labels[i]) {
      predicted ? ++c.tp : ++c.fn;
    } else {
      predicted ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

SensSpec sens_spec(const ConfusionCounts& c) {
  SensSpec r;
  if (c.tp + c.fn > 0) r.sensitivity = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (c.tn + c.fp > 0) r.specificity = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
  return r;
}

double roc_auc(std::span<const double> scores, const std::vector<bool>& labels) {
  const ClassCounts c = check_auc_inputs(scores, labels);
  const std::vector<std::size_t> order = order_by_score(scores);

  // Twice the positive rank sum; a tie block at 0-based [i, j) has midrank
  // (i + 1 + j) / 2, so doubling keeps everything integral.
  std::uint64_t rank_sum2 = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    std::uint64_t pos_in_block = 0;
    for (std::size_t k = i; k < j; ++k) pos_in_block += labels[order[k]] ? 1 : 0;
    rank_sum2 += pos_in_block * static_cast<std::uint64_t>(i + 1 + j);
    i = j;
  }
  const std::uint64_t u2 = rank_sum2 - c.pos * (c.pos + 1);
  return static_cast<double>(u2) / static_cast<double>(2 * c.pos * c.neg);
}

double roc_auc_trapezoid(std::span<const double> scores, const std::vector<bool>& labels) {
  const ClassCounts c = check_auc_inputs(scores, labels);
  std::vector<std::size_t> order = order_by_score(scores);
  std::reverse(order.begin(), order.end());

  // Sweep thresholds from high to low; each distinct score adds one ROC
  // vertex. area2 accumulates dFP * (TP_prev + TP_cur), i.e. twice the
  // trapezoid area in count units.
  std::uint64_t tp = 0, fp = 0, area2 = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::uint64_t dtp = 0, dfp = 0;
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      labels[order[j]] ? ++dtp : ++dfp;
      ++j;
    }
    area2 += dfp * (2 * tp + dtp);
    tp += dtp;
    fp += dfp;
    i = j;
  }
  return static_cast<double>(area2) / static_cast<double>(2 * c.pos * c.neg);
}

std::string_view group_name(Group g) {
  switch (g) {
    case Group::TP: return "TP";
    case Group::FP: return "FP";
    case Group::TN: return "TN";
    case Group::FN: return "FN";
  }
  return "?";
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InputError("quantile of an empty sample");
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BoxStats box_stats(std::vector<double> values) {
  BoxStats b;
  b.count = values.size();
  if (values.empty()) return b;
  std::sort(values.begin(), values.end());
  b.min = values.front();
  b.q1 = quantile_sorted(values, 0.25);
  b.median = quantile_sorted(values, 0.5);
  b.q3 = quantile_sorted(values, 0.75);
  b.max = values.back();
  return b;
}

GroupStats group_uncertainty_stats(std::span<const Decision> decisions,
                                   const std::vector<bool>& labels) {
  check_lengths(decisions.size(), labels.size(), "group_uncertainty_stats");
  if (decisions.empty()) throw InputError("group_uncertainty_stats: no samples");
  std::array<std::vector<double>, 4> stds;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    const bool pred = decisions[i].referable;
    const Group g = labels[i] ? (pred ? Group::TP : Group::FN) : (pred ? Group::FP : Group::TN);
    stds[static_cast<std::size_t>(g)].push_back(decisions[i].std);
  }
  GroupStats out;
  for (std::size_t g = 0; g < 4; ++g) out[g] = box_stats(std::move(stds[g]));
  return out;
}

EvalReport evaluate(std::span<const Decision> decisions, const std::vector<bool>& labels,
                    double grade_threshold, double std_threshold) {
  EvalReport r;
  r.grade_threshold = grade_threshold;
  r.std_threshold = std_threshold;
  r.counts = confusion(decisions, labels);
  r.rates = sens_spec(r.counts);
  r.group_stats = group_uncertainty_stats(decisions, labels);

  std::vector<Decision> unflipped(decisions.begin(), decisions.end());
  for (Decision& d : unflipped) {
    if (d.flipped) {
      d.referable = false;
      d.flipped = false;
      ++r.flips;
    }
  }
  r.counts_before_flip = confusion(unflipped, labels);
  r.rates_before_flip = sens_spec(r.counts_before_flip);

  const bool has_pos = std::find(labels.begin(), labels.end(), true) != labels.end();
  const bool has_neg = std::find(labels.begin(), labels.end(), false) != labels.end();
  if (has_pos && has_neg) {
    std::vector<double> means;
    means.reserve(decisions.size());
    for (const Decision& d : decisions) means.push_back(d.mean);
    r.auc = roc_auc(means, labels);
  }
  return r;
}

}  // namespace gpgrade
