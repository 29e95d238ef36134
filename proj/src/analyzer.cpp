#include "acecost/analyzer.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace acecost {

AceCost entry_ace(const OpEntry& e) {
  try {
    AceCost each;
    switch (e.op) {
      case OpClass::MAC: each = ace_mac(e.format_a, e.format_b); break;
      case OpClass::Multiply: each = ace_multiply(e.format_a, e.format_b); break;
      case OpClass::Add: each = ace_add(e.format_a, e.format_b); break;
      case OpClass::Shift:
        if (e.format_b.is_float()) throw InvalidFormat("shift amount must be an integer");
        each = ace_shift(e.format_a, std::int64_t{1} << std::min(e.format_b.total_bits, 62));
        break;
    }
    return each * e.count;
  } catch (const NodeError&) {
    throw;
  } catch (const Error& err) {
    throw AnalysisError(e.layer_id, e.layer_id + ": " + err.what());
  }
}

AceSummary ace_report(const OpTally& tally) {
  AceSummary s;
  AceCost mac;
  for (const auto& e : tally.entries) {
    const auto cost = entry_ace(e);
    s.total += cost;
    s.by_category[e.category] += cost;
    if (is_mac_category(e.category)) mac += cost;
  }
  if (s.total.fifths() > 0) {
    s.shares_defined = true;
    s.mac_share = static_cast<double>(mac.fifths()) / static_cast<double>(s.total.fifths());
    s.elementwise_share = 1.0 - s.mac_share;
  }
  return s;
}

EnergySummary energy_report(const OpTally& tally) {
  EnergySummary s;
  double pj = 0;
  std::set<std::tuple<std::string, int, std::string, std::string>> flagged;
  for (const auto& e : tally.entries) {
    EnergyCost each;
    try {
      each = energy_of_op(e.op, e.format_a, e.format_b);
    } catch (const Error& err) {
      throw AnalysisError(e.layer_id, e.layer_id + ": " + err.what());
    }
    pj += each.picojoules * static_cast<double>(e.count);
    if (each.extrapolated &&
        flagged.emplace(e.layer_id, static_cast<int>(e.op), e.format_a.to_string(),
                        e.format_b.to_string()).second) {
      s.extrapolated.push_back({e.layer_id, e.op, e.format_a, e.format_b, each.picojoules});
    }
  }
  s.energy_mj = pj * 1e-9;
  return s;
}

std::int64_t arithmetic_ops(const OpTally& tally) {
  std::int64_t ops = 0;
  for (const auto& e : tally.entries) ops += e.op == OpClass::MAC ? 2 * e.count : e.count;
  return ops;
}

Footprint footprint(const Graph& g, const ShapeMap& shapes) {
  Footprint f;
  for (const auto& n : g.nodes) {
    f.weight_elems += weight_count(n);
    if (n.kind == NodeKind::Activation || n.kind == NodeKind::Output) continue;
    f.activation_elems += shapes.at(n.id).elements();
  }
  f.concurrent_branch_factor = widest_cut(g);
  return f;
}

namespace {

double intensity(std::int64_t ops, const Footprint& f) {
  const double data = static_cast<double>(f.concurrent_branch_factor) *
                      static_cast<double>(f.weight_elems + f.activation_elems);
  return data > 0 ? static_cast<double>(ops) / data : 0.0;
}

}  // namespace

double arithmetic_intensity(const Graph& g, const OpTally& tally) {
  return intensity(arithmetic_ops(tally), footprint(g, infer_shapes(g)));
}

double category_share(const CostReport& report, OpCategory c) {
  if (report.total_ace.fifths() == 0) return 0.0;
  auto it = report.ace_by_category.find(c);
  if (it == report.ace_by_category.end()) return 0.0;
  return static_cast<double>(it->second.fifths()) / static_cast<double>(report.total_ace.fifths());
}

double bn_share(const CostReport& report) { return category_share(report, OpCategory::BatchNorm); }

CostReport analyze(const Graph& g) {
  const auto shapes = infer_shapes(g);
  const auto tally = census_graph(g);
  const auto ace = ace_report(tally);
  auto energy = energy_report(tally);

  CostReport r;
  r.name = g.name;
  r.total_ace = ace.total;
  r.ace_by_category = ace.by_category;
  r.shares_defined = ace.shares_defined;
  r.mac_share = ace.mac_share;
  r.elementwise_share = ace.elementwise_share;
  r.energy_mj = energy.energy_mj;
  r.extrapolated = std::move(energy.extrapolated);
  r.ops = arithmetic_ops(tally);
  r.footprint = footprint(g, shapes);
  r.arithmetic_intensity = intensity(r.ops, r.footprint);
  return r;
}

std::vector<ComparisonRow> compare(std::vector<std::pair<std::string, CostReport>> reports,
                                   const std::map<std::string, double>& accuracy) {
  std::vector<ComparisonRow> rows;
  for (auto& [name, report] : reports) {
    ComparisonRow row{name, std::move(report), std::nullopt, false};
    if (auto it = accuracy.find(name); it != accuracy.end()) row.accuracy = it->second;
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.report.total_ace != b.report.total_ace) return a.report.total_ace < b.report.total_ace;
    return a.name < b.name;
  });

  auto dominates = [](const ComparisonRow& s, const ComparisonRow& r) {
    const auto sa = s.report.total_ace, ra = r.report.total_ace;
    if (s.accuracy && r.accuracy) {
      return sa <= ra && *s.accuracy >= *r.accuracy && (sa < ra || *s.accuracy > *r.accuracy);
    }
    return sa < ra;
  };
  for (auto& r : rows) {
    r.pareto = std::none_of(rows.begin(), rows.end(),
                            [&](const ComparisonRow& s) { return &s != &r && dominates(s, r); });
  }
  return rows;
}

}  // namespace acecost
