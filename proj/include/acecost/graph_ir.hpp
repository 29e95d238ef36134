#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "acecost/cost_core.hpp"

namespace acecost {

inline constexpr int kIrVersion = 1;

enum class NodeKind {
  Conv2D,
  DepthwiseConv2D,
  PointwiseConv2D,
  Dense,
  BatchNorm,
  Activation,
  Add,
  Concat,
  Pool,
  Input,
  Output,
};

enum class Padding { Same, Valid };
enum class ActivationKind { ReLU, PReLU, DPReLU };
enum class PoolMode { Max, Average };
enum class BatchNormVariant { Standard, QuantNorm };

enum class Granularity { Layerwise, Channelwise, SubChannelwise };
enum class ScaleKind { ArbitraryFloat, PoT, FixedPoint, None };
enum class WeightQuantizer { Linear, PoT };

std::string to_string(NodeKind k);
bool is_conv(NodeKind k);
/// Conv family or Dense: layers that own weights and MACs.
bool is_compute(NodeKind k);

struct TensorShape {
  std::int64_t n = 1, h = 1, w = 1, c = 1;

  std::int64_t elements() const { return n * h * w * c; }
  std::string to_string() const;
  friend bool operator==(const TensorShape&, const TensorShape&) = default;
};

struct ConvParams {
  int kernel_h = 1;
  int kernel_w = 1;
  int stride = 1;
  Padding padding = Padding::Same;
  std::int64_t in_channels = 1;
  std::int64_t out_channels = 1;
  std::int64_t groups = 1;
  friend bool operator==(const ConvParams&, const ConvParams&) = default;
};

struct DenseParams {
  std::int64_t in_features = 1;
  std::int64_t out_features = 1;
  friend bool operator==(const DenseParams&, const DenseParams&) = default;
};

struct PoolParams {
  PoolMode mode = PoolMode::Average;
  bool global = false;
  int kernel = 1;
  int stride = 1;
  Padding padding = Padding::Valid;
  friend bool operator==(const PoolParams&, const PoolParams&) = default;
};

struct ScaleFormat {
  ScaleKind kind = ScaleKind::ArbitraryFloat;
  /// Meaningful for ArbitraryFloat and FixedPoint only.
  NumericFormat format = NumericFormat::fp32();

  static ScaleFormat arbitrary(NumericFormat f = NumericFormat::fp32()) {
    return {ScaleKind::ArbitraryFloat, f};
  }
  static ScaleFormat pot() { return {ScaleKind::PoT, NumericFormat::fp32()}; }
  static ScaleFormat fixed_point(int bits) { return {ScaleKind::FixedPoint, NumericFormat::fixed(bits)}; }
  static ScaleFormat none() { return {ScaleKind::None, NumericFormat::fp32()}; }

  friend bool operator==(const ScaleFormat& a, const ScaleFormat& b) {
    if (a.kind != b.kind) return false;
    const bool carries_format = a.kind == ScaleKind::ArbitraryFloat || a.kind == ScaleKind::FixedPoint;
    return !carries_format || a.format == b.format;
  }
};

struct QuantAnnotation {
  Granularity granularity = Granularity::Channelwise;
  int vectors_per_channel = 1;  // >= 2 only for SubChannelwise
  ScaleFormat scale;
  WeightQuantizer weight_quantizer = WeightQuantizer::Linear;
  friend bool operator==(const QuantAnnotation&, const QuantAnnotation&) = default;
};

struct LayerNode {
  std::string id;
  NodeKind kind = NodeKind::Input;
  std::vector<std::string> inputs;

  ConvParams conv;            // conv family
  DenseParams dense;          // Dense
  PoolParams pool;            // Pool
  ActivationKind activation = ActivationKind::ReLU;
  BatchNormVariant bn_variant = BatchNormVariant::Standard;

  std::optional<NumericFormat> weight_format;
  std::optional<NumericFormat> act_format;
  std::optional<QuantAnnotation> quant;

  /// Formats after defaults (FP32) are applied.
  NumericFormat weights() const { return weight_format.value_or(NumericFormat::fp32()); }
  NumericFormat acts() const { return act_format.value_or(NumericFormat::fp32()); }

  /// Structural equality restricted to the fields meaningful for `kind`.
  friend bool operator==(const LayerNode& a, const LayerNode& b);
};

struct Diagnostic {
  std::string node_id;
  std::string rule;
  std::string message;
};

class Graph {
 public:
  std::string name;
  TensorShape input_shape;
  std::vector<LayerNode> nodes;

  /// Index of a node by id, or -1.
  int find(const std::string& id) const;
  const LayerNode& at(const std::string& id) const;

  /// Stable Kahn order: among ready nodes the one declared first wins.
  /// Throws AnalysisError if the graph has a cycle or dangling input.
  std::vector<int> topological_order() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.name == b.name && a.input_shape == b.input_shape && a.nodes == b.nodes;
  }
};

Graph parse_graph(const std::string& text);
std::string serialize_graph(const Graph& g);

std::vector<Diagnostic> validate(const Graph& g);

using ShapeMap = std::unordered_map<std::string, TensorShape>;

/// Output shape of every node. Throws ShapeMismatch on incompatible inputs.
ShapeMap infer_shapes(const Graph& g, const TensorShape& input_shape);
inline ShapeMap infer_shapes(const Graph& g) { return infer_shapes(g, g.input_shape); }

/// Largest number of edges (counted with multiplicity) crossing any cut of
/// the canonical topological order. A plain chain has width 1.
int widest_cut(const Graph& g);

}  // namespace acecost
