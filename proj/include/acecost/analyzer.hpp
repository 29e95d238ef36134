#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "acecost/graph_ir.hpp"
#include "acecost/op_census.hpp"

namespace acecost {

struct Footprint {
  std::int64_t weight_elems = 0;
  std::int64_t activation_elems = 0;
  int concurrent_branch_factor = 1;
};

struct ExtrapolatedOp {
  std::string layer_id;
  OpClass op = OpClass::MAC;
  NumericFormat format_a;
  NumericFormat format_b;
  double picojoules_each = 0;
};

struct CostReport {
  std::string name;
  AceCost total_ace;
  std::map<OpCategory, AceCost> ace_by_category;
  /// False for an empty tally; the shares are then reported as 0.
  bool shares_defined = false;
  double mac_share = 0;
  double elementwise_share = 0;
  double energy_mj = 0;
  std::vector<ExtrapolatedOp> extrapolated;
  /// Arithmetic operations with each MAC counted as two.
  std::int64_t ops = 0;
  double arithmetic_intensity = 0;
  Footprint footprint;
};

struct AceSummary {
  AceCost total;
  std::map<OpCategory, AceCost> by_category;
  bool shares_defined = false;
  double mac_share = 0;
  double elementwise_share = 0;
};

/// ACE of one tally entry. Cost-model errors are rethrown as AnalysisError
/// naming the layer.
AceCost entry_ace(const OpEntry& e);

AceSummary ace_report(const OpTally& tally);

struct EnergySummary {
  double energy_mj = 0;
  std::vector<ExtrapolatedOp> extrapolated;
};

EnergySummary energy_report(const OpTally& tally);

/// Arithmetic operations counted for intensity: MACs twice, the rest once.
std::int64_t arithmetic_ops(const OpTally& tally);

/// Weight elements, touched activation elements (every node output except
/// in-place activations and the output marker) and the widest cut.
Footprint footprint(const Graph& g, const ShapeMap& shapes);

/// ops / (branch_factor * (W + A)).
double arithmetic_intensity(const Graph& g, const OpTally& tally);

double bn_share(const CostReport& report);
/// Share of a category in the total, 0 when the total is 0.
double category_share(const CostReport& report, OpCategory c);

/// Full pipeline: shapes, census, ACE, energy, intensity.
CostReport analyze(const Graph& g);

struct ComparisonRow {
  std::string name;
  CostReport report;
  std::optional<double> accuracy;
  bool pareto = false;
};

/// Rows sorted by ACE ascending (ties by name). A row is Pareto-optimal when
/// no other row is at least as cheap and at least as accurate, and strictly
/// better in one of the two. Rows without an accuracy compete on ACE alone.
std::vector<ComparisonRow> compare(
    std::vector<std::pair<std::string, CostReport>> reports,
    const std::map<std::string, double>& accuracy = {});

}  // namespace acecost
