#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acecost/cost_core.hpp"
#include "acecost/graph_ir.hpp"

namespace acecost {

enum class OpCategory { Conv, Dense, BatchNorm, Activation, QuantScale, Residual };

inline constexpr OpCategory kAllCategories[] = {OpCategory::Conv,       OpCategory::Dense,
                                                OpCategory::BatchNorm,  OpCategory::Activation,
                                                OpCategory::QuantScale, OpCategory::Residual};

std::string to_string(OpCategory c);
/// Conv and Dense work counts as MAC work; everything else is elementwise.
bool is_mac_category(OpCategory c);

/// One group of identical operations. For Shift entries `format_b` is the
/// shift-amount operand: Fixed(k) selects among 2^k positions.
struct OpEntry {
  std::string layer_id;
  OpClass op = OpClass::MAC;
  std::int64_t count = 0;
  NumericFormat format_a;
  NumericFormat format_b;
  OpCategory category = OpCategory::Conv;
};

struct OpTally {
  std::vector<OpEntry> entries;

  std::int64_t count(OpCategory c, OpClass op) const;
  std::int64_t count(OpCategory c) const;
};

/// Operations of one node. `in_act` is the activation format of its
/// (first) producer; MACs read that format, not the node's own output.
std::vector<OpEntry> census_layer(const LayerNode& node, const TensorShape& in_shape,
                                  const TensorShape& out_shape, const NumericFormat& in_act);

/// Per-layer tallies concatenated in canonical topological order.
OpTally census_graph(const Graph& g, const TensorShape& input_shape);
inline OpTally census_graph(const Graph& g) { return census_graph(g, g.input_shape); }

/// Number of multiply-accumulates a conv/dense node performs.
std::int64_t mac_count(const LayerNode& node, const TensorShape& out_shape);

/// Weight elements held by a conv/dense node (0 for other kinds).
std::int64_t weight_count(const LayerNode& node);

}  // namespace acecost
