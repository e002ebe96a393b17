#pragma once

#include <string>

#include "gpgrade/metrics.hpp"

namespace gpgrade {

/// Pretty-printed JSON document. Undefined ratios are emitted as null.
std::string report_to_json(const EvalReport& report);

/// `key = value`, one metric per line. Undefined ratios print "undefined".
std::string report_to_text(const EvalReport& report);

/// Whitespace-separated box-plot table, one row per confusion group:
/// `group count min q1 median q3 max` (NA for empty groups).
std::string box_stats_table(const GroupStats& stats);

}  // namespace gpgrade
