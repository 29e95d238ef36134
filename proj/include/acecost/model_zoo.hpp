#pragma once

#include <string>
#include <vector>

#include "acecost/graph_ir.hpp"

namespace acecost::zoo {

enum class PikeScale { X1, X2, X3, X6 };

std::string to_string(PikeScale s);
PikeScale parse_pike_scale(const std::string& s);

struct PikeScaleConfig {
  double channel_multiplier = 1.0;
  // Activation precision feeding the pointwise convolutions, given as
  // (integer bits, fractional bits, sign bits). The word is their sum.
  int int_bits = 6;
  int frac_bits = 1;
  int sign_bits = 1;
  bool remove_mid_bn = true;

  NumericFormat act_format() const { return NumericFormat::fixed(int_bits + frac_bits + sign_bits); }
};

PikeScaleConfig pike_scale_config(PikeScale s);

/// Per-layer-type quantizer choice of a Pike block.
struct PikeQuantizers {
  WeightQuantizer pw_weights = WeightQuantizer::PoT;
  int pw_bits = 4;
  ScaleFormat pw_scale = ScaleFormat::none();
  WeightQuantizer dw_weights = WeightQuantizer::Linear;
  int dw_bits = 8;
  ScaleFormat dw_scale = ScaleFormat::pot();
  // Scale of the stem convolution and the classifier.
  ScaleFormat edge_scale = ScaleFormat::pot();
};

Graph build_pikelpn(PikeScale scale);
Graph build_pikelpn(const PikeScaleConfig& cfg, const PikeQuantizers& q, const std::string& name);

Graph build_mobilenet_v1(double width, const NumericFormat& weight_fmt, const NumericFormat& act_fmt,
                         const NumericFormat& first_last_fmt, const std::string& name = "mobilenet_v1");

Graph build_mobilenet_v2(int weight_bits, int act_bits, ActivationKind activation,
                         Granularity granularity, int vectors_per_channel = 2,
                         const std::string& name = "mobilenet_v2");

/// Bottleneck ResNet-50 (stride on the first 1x1 of each stage). Every
/// residual merge receives `branch_count` inputs: the residual path plus
/// branch_count - 1 shortcut edges.
Graph build_resnet50_branches(int branch_count, const NumericFormat& weight_fmt,
                              const NumericFormat& act_fmt, const NumericFormat& first_fmt,
                              const NumericFormat& last_fmt, const std::string& name = "resnet50");

/// Named configurations used throughout the tests and the CLI.
std::vector<std::string> model_names();
Graph build_named(const std::string& name);

}  // namespace acecost::zoo
