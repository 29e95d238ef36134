#include "acecost/report_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace acecost {

using ojson = nlohmann::ordered_json;

std::string format_significant(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

std::string format_fixed(double value, int places) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", places, value);
  return buf;
}

namespace {

ojson format_json(const NumericFormat& f) {
  ojson j;
  j["kind"] = f.is_float() ? "float" : (f.kind == FormatKind::Binary ? "binary" : "fixed");
  j["bits"] = f.total_bits;
  if (f.is_float()) {
    j["exp"] = f.exponent_bits;
    j["man"] = f.mantissa_bits;
  }
  return j;
}

ojson report_json(const CostReport& r) {
  ojson j;
  j["report_version"] = kReportVersion;
  j["name"] = r.name;
  j["total_ace"] = r.total_ace.bitadders();
  j["total_ace_exact"] = r.total_ace.to_decimal();
  ojson cats = ojson::object();
  for (auto c : kAllCategories) {
    auto it = r.ace_by_category.find(c);
    if (it == r.ace_by_category.end()) continue;
    cats[to_string(c)] = {{"ace", it->second.bitadders()},
                          {"ace_exact", it->second.to_decimal()},
                          {"share", category_share(r, c)}};
  }
  j["ace_by_category"] = cats;
  j["shares_defined"] = r.shares_defined;
  j["mac_share"] = r.mac_share;
  j["elementwise_share"] = r.elementwise_share;
  j["energy_mj"] = r.energy_mj;
  ojson extra = ojson::array();
  for (const auto& x : r.extrapolated) {
    extra.push_back({{"layer_id", x.layer_id},
                     {"op_class", to_string(x.op)},
                     {"format_a", format_json(x.format_a)},
                     {"format_b", format_json(x.format_b)},
                     {"picojoules_each", x.picojoules_each}});
  }
  j["energy_extrapolated"] = extra;
  j["arithmetic_ops"] = r.ops;
  j["arithmetic_intensity"] = r.arithmetic_intensity;
  j["footprint"] = {{"weight_elems", r.footprint.weight_elems},
                    {"activation_elems", r.footprint.activation_elems},
                    {"concurrent_branch_factor", r.footprint.concurrent_branch_factor}};
  return j;
}

std::string pct(double share) { return format_fixed(100.0 * share, 2); }

std::string giga(const AceCost& a) { return format_fixed(a.bitadders() / 1e9, 3); }

// Left-aligned text grid.
std::string grid(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t k = 0; k < row.size(); ++k) width[k] = std::max(width[k], row[k].size());
  }
  std::ostringstream out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t k = 0; k < row.size(); ++k) {
      line += row[k];
      if (k + 1 < row.size()) line += std::string(width[k] - row[k].size() + 2, ' ');
    }
    out << line << '\n';
  }
  return out.str();
}

std::string markdown(const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << '|';
    for (const auto& cell : rows[r]) out << ' ' << cell << " |";
    out << '\n';
    if (r == 0) {
      out << '|';
      for (std::size_t k = 0; k < rows[r].size(); ++k) out << " --- |";
      out << '\n';
    }
  }
  return out.str();
}

std::vector<std::vector<std::string>> summary_rows(const CostReport& r) {
  std::vector<std::vector<std::string>> rows{
      {"metric", "value"},
      {"model", r.name},
      {"Total ACE (x1e9)", giga(r.total_ace)},
      {"MAC %", pct(r.mac_share)},
      {"Elementwise %", pct(r.elementwise_share)},
      {"Energy (mJ)", format_significant(r.energy_mj)},
      {"Arithmetic intensity (ops/element)", format_fixed(r.arithmetic_intensity, 2)},
  };
  for (auto c : kAllCategories) {
    auto it = r.ace_by_category.find(c);
    if (it == r.ace_by_category.end()) continue;
    rows.push_back({to_string(c) + " ACE (x1e9)", giga(it->second) + " (" + pct(category_share(r, c)) + "%)"});
  }
  if (!r.extrapolated.empty())
    rows.push_back({"extrapolated energy entries", std::to_string(r.extrapolated.size())});
  return rows;
}

std::vector<std::string> comparison_header() {
  return {"model", "total_ace", "total_ace_e9", "mac_pct", "elementwise_pct", "energy_mj",
          "arithmetic_intensity", "pareto"};
}

std::vector<std::string> comparison_cells(const ComparisonRow& row) {
  const auto& r = row.report;
  return {row.name,
          r.total_ace.to_decimal(),
          giga(r.total_ace),
          pct(r.mac_share),
          pct(r.elementwise_share),
          format_significant(r.energy_mj),
          format_fixed(r.arithmetic_intensity, 2),
          row.pareto ? "yes" : "no"};
}

}  // namespace

std::string report_to_json(const CostReport& r) { return report_json(r).dump(2) + "\n"; }

std::string report_to_csv(const CostReport& r) {
  std::ostringstream out;
  out << "row,ace,share,energy_mj,arithmetic_intensity\n";
  for (auto c : kAllCategories) {
    auto it = r.ace_by_category.find(c);
    if (it == r.ace_by_category.end()) continue;
    out << to_string(c) << ',' << it->second.to_decimal() << ','
        << format_fixed(category_share(r, c), 6) << ",,\n";
  }
  out << "total," << r.total_ace.to_decimal() << ','
      << (r.shares_defined ? "1.000000" : "0.000000") << ',' << format_significant(r.energy_mj)
      << ',' << format_significant(r.arithmetic_intensity) << '\n';
  return out.str();
}

std::string report_to_table(const CostReport& r) { return grid(summary_rows(r)); }

std::string report_to_markdown(const CostReport& r) { return markdown(summary_rows(r)); }

std::string census_to_csv(const OpTally& t) {
  std::ostringstream out;
  out << "layer_id,category,op_class,count,bits_a,bits_b\n";
  for (const auto& e : t.entries) {
    out << e.layer_id << ',' << to_string(e.category) << ',' << to_string(e.op) << ','
        << e.count << ',' << e.format_a.total_bits << ',' << e.format_b.total_bits << '\n';
  }
  return out.str();
}

std::string comparison_to_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) out << (k ? "," : "") << cells[k];
    out << '\n';
  };
  line(comparison_header());
  for (const auto& row : rows) line(comparison_cells(row));
  return out.str();
}

std::string comparison_to_json(const std::vector<ComparisonRow>& rows) {
  ojson arr = ojson::array();
  for (const auto& row : rows) {
    ojson j;
    j["name"] = row.name;
    j["pareto"] = row.pareto;
    if (row.accuracy) j["accuracy"] = *row.accuracy;
    j["report"] = report_json(row.report);
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string comparison_to_table(const std::vector<ComparisonRow>& rows) {
  std::vector<std::vector<std::string>> cells{comparison_header()};
  for (const auto& row : rows) cells.push_back(comparison_cells(row));
  return grid(cells);
}

std::string comparison_to_markdown(const std::vector<ComparisonRow>& rows) {
  std::vector<std::vector<std::string>> cells{comparison_header()};
  for (const auto& row : rows) cells.push_back(comparison_cells(row));
  return markdown(cells);
}

}  // namespace acecost
