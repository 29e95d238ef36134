#include "acecost/op_census.hpp"

#include <algorithm>

namespace acecost {

std::string to_string(OpCategory c) {
  switch (c) {
    case OpCategory::Conv: return "Conv";
    case OpCategory::Dense: return "Dense";
    case OpCategory::BatchNorm: return "BatchNorm";
    case OpCategory::Activation: return "Activation";
    case OpCategory::QuantScale: return "QuantScale";
    case OpCategory::Residual: return "Residual";
  }
  return "?";
}

bool is_mac_category(OpCategory c) { return c == OpCategory::Conv || c == OpCategory::Dense; }

std::int64_t OpTally::count(OpCategory c, OpClass op) const {
  std::int64_t total = 0;
  for (const auto& e : entries)
    if (e.category == c && e.op == op) total += e.count;
  return total;
}

std::int64_t OpTally::count(OpCategory c) const {
  std::int64_t total = 0;
  for (const auto& e : entries)
    if (e.category == c) total += e.count;
  return total;
}

std::int64_t mac_count(const LayerNode& node, const TensorShape& out_shape) {
  if (is_conv(node.kind)) {
    const auto& p = node.conv;
    return out_shape.elements() * p.kernel_h * p.kernel_w * (p.in_channels / p.groups);
  }
  if (node.kind == NodeKind::Dense) return out_shape.n * node.dense.in_features * node.dense.out_features;
  return 0;
}

std::int64_t weight_count(const LayerNode& node) {
  if (is_conv(node.kind)) {
    const auto& p = node.conv;
    return std::int64_t{p.kernel_h} * p.kernel_w * (p.in_channels / p.groups) * p.out_channels;
  }
  if (node.kind == NodeKind::Dense) return node.dense.in_features * node.dense.out_features;
  return 0;
}

namespace {

// Bits needed to address every position of a `bits`-wide shift.
int shift_amount_bits(int bits) {
  int k = 1;
  while ((1 << k) < bits) ++k;
  return k;
}

void compute_ops(std::vector<OpEntry>& out, const LayerNode& node, const TensorShape& out_shape,
                 const NumericFormat& in_act) {
  const auto category = node.kind == NodeKind::Dense ? OpCategory::Dense : OpCategory::Conv;
  const std::int64_t macs = mac_count(node, out_shape);
  const NumericFormat w = node.weights();

  if (node.quant && (!node.weight_format || !node.act_format)) {
    throw MissingFormat(node.id, "quantized layer needs explicit weight_format and act_format");
  }

  if (node.quant && node.quant->weight_quantizer == WeightQuantizer::PoT) {
    // A PoT weight is a sign plus an exponent: each product becomes a shift
    // of the activation followed by an accumulate.
    if (w.total_bits < 2 || w.is_float()) {
      throw AnalysisError(node.id, "PoT weights need an integer format of at least 2 bits");
    }
    out.push_back({node.id, OpClass::Shift, macs, in_act, NumericFormat::fixed(w.total_bits - 1),
                   category});
    out.push_back({node.id, OpClass::Add, macs, in_act, in_act, category});
  } else {
    out.push_back({node.id, OpClass::MAC, macs, w, in_act, category});
  }

  if (!node.quant) return;
  const auto& q = *node.quant;
  const std::int64_t per_element =
      q.granularity == Granularity::SubChannelwise ? q.vectors_per_channel : 1;
  const std::int64_t n = out_shape.elements() * per_element;
  const NumericFormat act = node.acts();
  switch (q.scale.kind) {
    case ScaleKind::ArbitraryFloat:
      out.push_back({node.id, OpClass::Multiply, n, q.scale.format, q.scale.format,
                     OpCategory::QuantScale});
      break;
    case ScaleKind::FixedPoint:
      out.push_back({node.id, OpClass::Multiply, n, q.scale.format, act, OpCategory::QuantScale});
      break;
    case ScaleKind::PoT:
      out.push_back({node.id, OpClass::Shift, n, act,
                     NumericFormat::fixed(shift_amount_bits(act.total_bits)),
                     OpCategory::QuantScale});
      break;
    case ScaleKind::None:
      break;
  }
}

}  // namespace

std::vector<OpEntry> census_layer(const LayerNode& node, const TensorShape& /*in_shape*/,
                                  const TensorShape& out_shape, const NumericFormat& in_act) {
  std::vector<OpEntry> out;
  const std::int64_t elems = out_shape.elements();
  switch (node.kind) {
    case NodeKind::Conv2D:
    case NodeKind::DepthwiseConv2D:
    case NodeKind::PointwiseConv2D:
    case NodeKind::Dense:
      compute_ops(out, node, out_shape, in_act);
      break;
    case NodeKind::BatchNorm: {
      const auto p = node.weights();
      out.push_back({node.id, OpClass::Multiply, elems, p, p, OpCategory::BatchNorm});
      out.push_back({node.id, OpClass::Add, elems, p, p, OpCategory::BatchNorm});
      break;
    }
    case NodeKind::Activation: {
      const auto p = node.weights();
      if (node.activation == ActivationKind::ReLU) break;
      out.push_back({node.id, OpClass::Multiply, elems, p, p, OpCategory::Activation});
      if (node.activation == ActivationKind::DPReLU)
        out.push_back({node.id, OpClass::Add, elems, p, p, OpCategory::Activation});
      break;
    }
    case NodeKind::Add: {
      const auto a = node.acts();
      out.push_back({node.id, OpClass::Add, elems, a, a, OpCategory::Residual});
      break;
    }
    case NodeKind::Concat:
    case NodeKind::Pool:
    case NodeKind::Input:
    case NodeKind::Output:
      break;
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const OpEntry& e) { return e.count == 0; }),
            out.end());
  return out;
}

OpTally census_graph(const Graph& g, const TensorShape& input_shape) {
  const auto shapes = infer_shapes(g, input_shape);
  OpTally tally;
  for (int k : g.topological_order()) {
    const auto& node = g.nodes[static_cast<std::size_t>(k)];
    auto shape_of = [&](const std::string& id) {
      auto it = shapes.find(id);
      if (it == shapes.end()) throw MissingShape(node.id, "no shape for '" + id + "'");
      return it->second;
    };
    const TensorShape out = shape_of(node.id);
    TensorShape in = out;
    NumericFormat in_act = node.acts();
    if (!node.inputs.empty()) {
      in = shape_of(node.inputs.front());
      in_act = g.at(node.inputs.front()).acts();
    }
    auto entries = census_layer(node, in, out, in_act);
    tally.entries.insert(tally.entries.end(), std::make_move_iterator(entries.begin()),
                         std::make_move_iterator(entries.end()));
  }
  return tally;
}

}  // namespace acecost
