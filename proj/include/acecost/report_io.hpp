#pragma once

#include <string>
#include <vector>

#include "acecost/analyzer.hpp"

namespace acecost {

inline constexpr int kReportVersion = 1;

/// `value` with `digits` significant digits, printf %g style.
std::string format_significant(double value, int digits = 4);
/// Fixed-point decimal with `places` digits after the point.
std::string format_fixed(double value, int places);

std::string report_to_json(const CostReport& r);
/// One row per category with nonzero cost, then a total row that also
/// carries energy and intensity.
std::string report_to_csv(const CostReport& r);
std::string report_to_table(const CostReport& r);
std::string report_to_markdown(const CostReport& r);

/// layer_id,category,op_class,count,bits_a,bits_b in tally order.
std::string census_to_csv(const OpTally& t);

std::string comparison_to_csv(const std::vector<ComparisonRow>& rows);
std::string comparison_to_json(const std::vector<ComparisonRow>& rows);
std::string comparison_to_table(const std::vector<ComparisonRow>& rows);
std::string comparison_to_markdown(const std::vector<ComparisonRow>& rows);

}  // namespace acecost
