#include "gpgrade/report.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace gpgrade {

namespace {

using nlohmann::ordered_json;

ordered_json optional_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string optional_text(const std::optional<double>& v) { return v ? num(*v) : "undefined"; }

ordered_json counts_json(const ConfusionCounts& c, const SensSpec& s) {
  ordered_json j;
  j["tp"] = c.tp;
  j["fp"] = c.fp;
  j["tn"] = c.tn;
  j["fn"] = c.fn;
  j["sensitivity"] = optional_json(s.sensitivity);
  j["specificity"] = optional_json(s.specificity);
  return j;
}

}  // namespace

std::string report_to_json(const EvalReport& r) {
  ordered_json j;
  j["n_samples"] = r.counts.total();
  j["grade_threshold"] = r.grade_threshold;
  j["std_threshold"] = r.std_threshold;
  j["tp"] = r.counts.tp;
  j["fp"] = r.counts.fp;
  j["tn"] = r.counts.tn;
  j["fn"] = r.counts.fn;
  j["sensitivity"] = optional_json(r.rates.sensitivity);
  j["specificity"] = optional_json(r.rates.specificity);
  j["auc"] = optional_json(r.auc);
  j["auc_score"] = "posterior_mean";
  j["flips"] = r.flips;
  j["before_flip"] = counts_json(r.counts_before_flip, r.rates_before_flip);
  j["quartile_method"] = std::string(kQuartileMethod);

  ordered_json groups = ordered_json::object();
  for (Group g : kAllGroups) {
    const BoxStats& b = r.group_stats[static_cast<std::size_t>(g)];
    ordered_json s;
    s["count"] = b.count;
    if (b.count > 0) {
      s["min"] = b.min;
      s["q1"] = b.q1;
      s["median"] = b.median;
      s["q3"] = b.q3;
      s["max"] = b.max;
    }
    groups[std::string(group_name(g))] = s;
  }
  j["group_stats"] = groups;
  return j.dump(2) + "\n";
}

std::string report_to_text(const EvalReport& r) {
  std::ostringstream os;
  os << "n_samples = " << r.counts.total() << '\n'
     << "grade_threshold = " << num(r.grade_threshold) << '\n'
     << "std_threshold = " << num(r.std_threshold) << '\n'
     << "tp = " << r.counts.tp << '\n'
     << "fp = " << r.counts.fp << '\n'
     << "tn = " << r.counts.tn << '\n'
     << "fn = " << r.counts.fn << '\n'
     << "sensitivity = " << optional_text(r.rates.sensitivity) << '\n'
     << "specificity = " << optional_text(r.rates.specificity) << '\n'
     << "auc = " << optional_text(r.auc) << '\n'
     << "auc_score = posterior_mean\n"
     << "flips = " << r.flips << '\n'
     << "sensitivity_before_flip = " << optional_text(r.rates_before_flip.sensitivity) << '\n'
     << "specificity_before_flip = " << optional_text(r.rates_before_flip.specificity) << '\n'
     << "quartile_method = " << kQuartileMethod << '\n';
  for (Group g : kAllGroups) {
    const BoxStats& b = r.group_stats[static_cast<std::size_t>(g)];
    const std::string key = "std." + std::string(group_name(g));
    os << key << ".count = " << b.count << '\n';
    if (b.count == 0) continue;
    os << key << ".median = " << num(b.median) << '\n';
  }
  return os.str();
}

std::string box_stats_table(const GroupStats& stats) {
  std::ostringstream os;
  os << "# posterior std per confusion group; quartiles: " << kQuartileMethod << '\n';
  os << "group\tcount\tmin\tq1\tmedian\tq3\tmax\n";
  for (Group g : kAllGroups) {
    const BoxStats& b = stats[static_cast<std::size_t>(g)];
    os << group_name(g) << '\t' << b.count;
    if (b.count == 0) {
      os << "\tNA\tNA\tNA\tNA\tNA\n";
    } else {
      os << '\t' << num(b.min) << '\t' << num(b.q1) << '\t' << num(b.median) << '\t'
         << num(b.q3) << '\t' << num(b.max) << '\n';
    }
  }
  return os.str();
}

}  // namespace gpgrade
