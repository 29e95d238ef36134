#include "acecost/model_zoo.hpp"

#include <cmath>
#include <optional>

namespace acecost::zoo {

namespace {

const NumericFormat kImage = NumericFormat::fixed(8);

QuantAnnotation quant(ScaleFormat scale, WeightQuantizer wq = WeightQuantizer::Linear,
                      Granularity g = Granularity::Channelwise, int vectors = 2) {
  QuantAnnotation q;
  q.granularity = g;
  q.vectors_per_channel = g == Granularity::SubChannelwise ? vectors : 1;
  q.scale = scale;
  q.weight_quantizer = wq;
  return q;
}

// Appends nodes in declaration order and tracks the running tensor.
class Builder {
 public:
  Builder(std::string name, TensorShape input, NumericFormat image_fmt) {
    g_.name = std::move(name);
    g_.input_shape = input;
    LayerNode n;
    n.id = "input";
    n.kind = NodeKind::Input;
    n.act_format = image_fmt;
    channels_ = input.c;
    push(std::move(n));
  }

  const std::string& current() const { return cur_; }
  std::int64_t channels() const { return channels_; }
  void rewind(const std::string& id, std::int64_t channels) {
    cur_ = id;
    channels_ = channels;
  }

  void conv(NodeKind kind, const std::string& id, int k, int stride, std::int64_t out_c,
            NumericFormat w, NumericFormat a, std::optional<QuantAnnotation> q) {
    LayerNode n;
    n.id = id;
    n.kind = kind;
    n.inputs = {cur_};
    n.conv.kernel_h = n.conv.kernel_w = k;
    n.conv.stride = stride;
    n.conv.padding = Padding::Same;
    n.conv.in_channels = channels_;
    n.conv.out_channels = out_c;
    n.conv.groups = kind == NodeKind::DepthwiseConv2D ? channels_ : 1;
    n.weight_format = w;
    n.act_format = a;
    n.quant = q;
    channels_ = out_c;
    push(std::move(n));
  }

  void batch_norm(const std::string& id, NumericFormat params, NumericFormat a,
                  BatchNormVariant v = BatchNormVariant::Standard) {
    LayerNode n;
    n.id = id;
    n.kind = NodeKind::BatchNorm;
    n.inputs = {cur_};
    n.bn_variant = v;
    n.weight_format = params;
    n.act_format = a;
    push(std::move(n));
  }

  void activation(const std::string& id, ActivationKind kind, NumericFormat a) {
    LayerNode n;
    n.id = id;
    n.kind = NodeKind::Activation;
    n.inputs = {cur_};
    n.activation = kind;
    if (kind != ActivationKind::ReLU) n.weight_format = NumericFormat::fp32();
    n.act_format = a;
    push(std::move(n));
  }

  void add(const std::string& id, std::vector<std::string> inputs, NumericFormat a) {
    LayerNode n;
    n.id = id;
    n.kind = NodeKind::Add;
    n.inputs = std::move(inputs);
    n.act_format = a;
    push(std::move(n));
  }

  void pool(const std::string& id, PoolParams p, NumericFormat a) {
    LayerNode n;
    n.id = id;
    n.kind = NodeKind::Pool;
    n.inputs = {cur_};
    n.pool = p;
    n.act_format = a;
    push(std::move(n));
  }

  void dense(const std::string& id, std::int64_t out, NumericFormat w, NumericFormat a,
             std::optional<QuantAnnotation> q) {
    LayerNode n;
    n.id = id;
    n.kind = NodeKind::Dense;
    n.inputs = {cur_};
    n.dense = {channels_, out};
    n.weight_format = w;
    n.act_format = a;
    n.quant = q;
    channels_ = out;
    push(std::move(n));
  }

  Graph finish() {
    LayerNode n;
    n.id = "output";
    n.kind = NodeKind::Output;
    n.inputs = {cur_};
    push(std::move(n));
    return std::move(g_);
  }

 private:
  void push(LayerNode n) {
    cur_ = n.id;
    g_.nodes.push_back(std::move(n));
  }

  Graph g_;
  std::string cur_;
  std::int64_t channels_ = 0;
};

PoolParams global_avg() {
  PoolParams p;
  p.mode = PoolMode::Average;
  p.global = true;
  return p;
}

struct SeparableStep {
  std::int64_t out_channels;
  int stride;
};

// Thirteen depthwise-separable steps shared by MobileNetV1 and PikeLPN.
const std::vector<SeparableStep>& mobilenet_v1_steps() {
  static const std::vector<SeparableStep> steps = {
      {64, 1},  {128, 2}, {128, 1}, {256, 2}, {256, 1}, {512, 2},  {512, 1},
      {512, 1}, {512, 1}, {512, 1}, {512, 1}, {1024, 2}, {1024, 1}};
  return steps;
}

std::int64_t scaled(std::int64_t channels, double multiplier) {
  return static_cast<std::int64_t>(std::floor(static_cast<double>(channels) * multiplier + 1e-9));
}

}  // namespace

std::string to_string(PikeScale s) {
  switch (s) {
    case PikeScale::X1: return "1x";
    case PikeScale::X2: return "2x";
    case PikeScale::X3: return "3x";
    case PikeScale::X6: return "6x";
  }
  return "?";
}

PikeScale parse_pike_scale(const std::string& s) {
  if (s == "1x") return PikeScale::X1;
  if (s == "2x") return PikeScale::X2;
  if (s == "3x") return PikeScale::X3;
  if (s == "6x") return PikeScale::X6;
  throw OutOfRange("unknown PikeLPN scale '" + s + "' (expected 1x, 2x, 3x or 6x)");
}

PikeScaleConfig pike_scale_config(PikeScale s) {
  switch (s) {
    case PikeScale::X1: return {1.0, 6, 1, 1, true};
    case PikeScale::X2: return {1.0, 8, 7, 1, false};
    case PikeScale::X3: return {1.5, 8, 7, 1, false};
    case PikeScale::X6: return {2.0, 8, 7, 1, false};
  }
  return {};
}

Graph build_pikelpn(PikeScale scale) {
  return build_pikelpn(pike_scale_config(scale), PikeQuantizers{}, "pikelpn_" + to_string(scale));
}

Graph build_pikelpn(const PikeScaleConfig& cfg, const PikeQuantizers& q, const std::string& name) {
  const auto i8 = NumericFormat::fixed(8);
  const auto pw_in = cfg.act_format();
  const auto qn = BatchNormVariant::QuantNorm;
  Builder b(name, {1, 224, 224, 3}, kImage);

  b.conv(NodeKind::Conv2D, "conv1", 3, 2, scaled(32, cfg.channel_multiplier), i8, i8,
         quant(q.edge_scale));
  b.batch_norm("conv1_qn", i8, i8, qn);
  b.activation("conv1_relu", ActivationKind::ReLU, i8);

  int idx = 1;
  for (const auto& step : mobilenet_v1_steps()) {
    const std::string p = "block" + std::to_string(idx++);
    b.conv(NodeKind::DepthwiseConv2D, p + "_dw", 3, step.stride, b.channels(),
           NumericFormat::fixed(q.dw_bits), pw_in, quant(q.dw_scale, q.dw_weights));
    if (!cfg.remove_mid_bn) b.batch_norm(p + "_dw_qn", i8, pw_in, qn);
    b.conv(NodeKind::PointwiseConv2D, p + "_pw", 1, 1, scaled(step.out_channels, cfg.channel_multiplier),
           NumericFormat::fixed(q.pw_bits), i8, quant(q.pw_scale, q.pw_weights));
    b.batch_norm(p + "_pw_qn", i8, i8, qn);
    b.activation(p + "_relu", ActivationKind::ReLU, i8);
  }

  b.pool("pool", global_avg(), i8);
  b.dense("fc", 1000, i8, i8, quant(q.edge_scale));
  return b.finish();
}

Graph build_mobilenet_v1(double width, const NumericFormat& weight_fmt, const NumericFormat& act_fmt,
                         const NumericFormat& first_last_fmt, const std::string& name) {
  if (!(width > 0)) throw OutOfRange("width multiplier must be positive");
  const auto fp32 = NumericFormat::fp32();
  const auto scale = quant(ScaleFormat::arbitrary());
  Builder b(name, {1, 224, 224, 3}, kImage);

  b.conv(NodeKind::Conv2D, "conv1", 3, 2, scaled(32, width), first_last_fmt, act_fmt, scale);
  b.batch_norm("conv1_bn", fp32, act_fmt);
  b.activation("conv1_relu", ActivationKind::ReLU, act_fmt);

  int idx = 1;
  for (const auto& step : mobilenet_v1_steps()) {
    const std::string p = "block" + std::to_string(idx++);
    b.conv(NodeKind::DepthwiseConv2D, p + "_dw", 3, step.stride, b.channels(), weight_fmt, act_fmt, scale);
    b.batch_norm(p + "_dw_bn", fp32, act_fmt);
    b.activation(p + "_dw_relu", ActivationKind::ReLU, act_fmt);
    b.conv(NodeKind::PointwiseConv2D, p + "_pw", 1, 1, scaled(step.out_channels, width), weight_fmt,
           act_fmt, scale);
    b.batch_norm(p + "_pw_bn", fp32, act_fmt);
    b.activation(p + "_pw_relu", ActivationKind::ReLU, act_fmt);
  }

  b.pool("pool", global_avg(), act_fmt);
  b.dense("fc", 1000, first_last_fmt, act_fmt, scale);
  return b.finish();
}

Graph build_mobilenet_v2(int weight_bits, int act_bits, ActivationKind activation,
                         Granularity granularity, int vectors_per_channel, const std::string& name) {
  const auto w = NumericFormat::fixed(weight_bits);
  const auto a = NumericFormat::fixed(act_bits);
  const auto fp32 = NumericFormat::fp32();
  const auto scale = quant(ScaleFormat::arbitrary(), WeightQuantizer::Linear, granularity,
                           vectors_per_channel);
  Builder b(name, {1, 224, 224, 3}, kImage);

  b.conv(NodeKind::Conv2D, "conv1", 3, 2, 32, w, a, scale);
  b.batch_norm("conv1_bn", fp32, a);
  b.activation("conv1_act", activation, a);

  struct Stage {
    int expand, out, repeat, stride;
  };
  const Stage stages[] = {{1, 16, 1, 1},  {6, 24, 2, 2},  {6, 32, 3, 2},  {6, 64, 4, 2},
                          {6, 96, 3, 1},  {6, 160, 3, 2}, {6, 320, 1, 1}};
  int idx = 1;
  for (const auto& s : stages) {
    for (int r = 0; r < s.repeat; ++r) {
      const std::string p = "block" + std::to_string(idx++);
      const int stride = r == 0 ? s.stride : 1;
      const std::string block_in = b.current();
      const std::int64_t in_c = b.channels();
      if (s.expand != 1) {
        b.conv(NodeKind::PointwiseConv2D, p + "_expand", 1, 1, in_c * s.expand, w, a, scale);
        b.batch_norm(p + "_expand_bn", fp32, a);
        b.activation(p + "_expand_act", activation, a);
      }
      b.conv(NodeKind::DepthwiseConv2D, p + "_dw", 3, stride, b.channels(), w, a, scale);
      b.batch_norm(p + "_dw_bn", fp32, a);
      b.activation(p + "_dw_act", activation, a);
      b.conv(NodeKind::PointwiseConv2D, p + "_project", 1, 1, s.out, w, a, scale);
      b.batch_norm(p + "_project_bn", fp32, a);
      if (stride == 1 && in_c == s.out) {
        b.add(p + "_add", {block_in, b.current()}, a);
      }
    }
  }

  b.conv(NodeKind::PointwiseConv2D, "conv_last", 1, 1, 1280, w, a, scale);
  b.batch_norm("conv_last_bn", fp32, a);
  b.activation("conv_last_act", activation, a);
  b.pool("pool", global_avg(), a);
  b.dense("fc", 1000, w, a, scale);
  return b.finish();
}

Graph build_resnet50_branches(int branch_count, const NumericFormat& weight_fmt,
                              const NumericFormat& act_fmt, const NumericFormat& first_fmt,
                              const NumericFormat& last_fmt, const std::string& name) {
  if (branch_count < 2 || branch_count > 4)
    throw OutOfRange("branch_count must be 2, 3 or 4");
  const auto fp32 = NumericFormat::fp32();
  const auto scale = quant(ScaleFormat::arbitrary());
  const auto relu = ActivationKind::ReLU;
  Builder b(name, {1, 224, 224, 3}, kImage);

  b.conv(NodeKind::Conv2D, "conv1", 7, 2, 64, first_fmt, act_fmt, scale);
  b.batch_norm("conv1_bn", fp32, act_fmt);
  b.activation("conv1_relu", relu, act_fmt);
  PoolParams maxpool;
  maxpool.mode = PoolMode::Max;
  maxpool.kernel = 3;
  maxpool.stride = 2;
  maxpool.padding = Padding::Same;
  b.pool("maxpool", maxpool, act_fmt);

  struct Stage {
    int mid, repeat, stride;
  };
  const Stage stages[] = {{64, 3, 1}, {128, 4, 2}, {256, 6, 2}, {512, 3, 2}};
  int stage_idx = 2;
  for (const auto& s : stages) {
    for (int r = 0; r < s.repeat; ++r) {
      const std::string p = "res" + std::to_string(stage_idx) + static_cast<char>('a' + r);
      const int stride = r == 0 ? s.stride : 1;
      const std::string block_in = b.current();
      const std::int64_t in_c = b.channels();

      b.conv(NodeKind::PointwiseConv2D, p + "_c1", 1, stride, s.mid, weight_fmt, act_fmt, scale);
      b.batch_norm(p + "_c1_bn", fp32, act_fmt);
      b.activation(p + "_c1_relu", relu, act_fmt);
      b.conv(NodeKind::Conv2D, p + "_c2", 3, 1, s.mid, weight_fmt, act_fmt, scale);
      b.batch_norm(p + "_c2_bn", fp32, act_fmt);
      b.activation(p + "_c2_relu", relu, act_fmt);
      b.conv(NodeKind::PointwiseConv2D, p + "_c3", 1, 1, s.mid * 4, weight_fmt, act_fmt, scale);
      b.batch_norm(p + "_c3_bn", fp32, act_fmt);
      const std::string residual = b.current();

      std::string shortcut = block_in;
      if (r == 0) {
        b.rewind(block_in, in_c);
        b.conv(NodeKind::PointwiseConv2D, p + "_ds", 1, stride, s.mid * 4, weight_fmt, act_fmt, scale);
        b.batch_norm(p + "_ds_bn", fp32, act_fmt);
        shortcut = b.current();
      }
      std::vector<std::string> inputs{residual};
      for (int k = 1; k < branch_count; ++k) inputs.push_back(shortcut);
      b.add(p + "_add", inputs, act_fmt);
      b.rewind(p + "_add", s.mid * 4);
      b.activation(p + "_relu", relu, act_fmt);
    }
    ++stage_idx;
  }

  b.pool("pool", global_avg(), act_fmt);
  b.dense("fc", 1000, last_fmt, act_fmt, scale);
  return b.finish();
}

std::vector<std::string> model_names() {
  return {"pikelpn_1x",
          "pikelpn_2x",
          "pikelpn_3x",
          "pikelpn_6x",
          "pikelpn_1x_linear4_float",
          "pikelpn_1x_linear4_pot",
          "mobilenet_v1_8bit",
          "mobilenet_v1_8w4a",
          "mobilenet_v2_4bit",
          "mobilenet_v2_4bit_prelu",
          "mobilenet_v2_4bit_dprelu",
          "mobilenet_v2_4bit_subchannel",
          "resnet50_b2",
          "resnet50_b3",
          "resnet50_b4",
          "resnet50_binary"};
}

Graph build_named(const std::string& name) {
  const auto i8 = NumericFormat::fixed(8);
  const auto i4 = NumericFormat::fixed(4);
  if (name == "pikelpn_1x") return build_pikelpn(PikeScale::X1);
  if (name == "pikelpn_2x") return build_pikelpn(PikeScale::X2);
  if (name == "pikelpn_3x") return build_pikelpn(PikeScale::X3);
  if (name == "pikelpn_6x") return build_pikelpn(PikeScale::X6);
  if (name == "pikelpn_1x_linear4_float" || name == "pikelpn_1x_linear4_pot") {
    PikeQuantizers q;
    q.pw_weights = WeightQuantizer::Linear;
    const bool pot = name == "pikelpn_1x_linear4_pot";
    q.pw_scale = pot ? ScaleFormat::pot() : ScaleFormat::arbitrary();
    q.dw_scale = pot ? ScaleFormat::pot() : ScaleFormat::arbitrary();
    q.edge_scale = q.dw_scale;
    return build_pikelpn(pike_scale_config(PikeScale::X1), q, name);
  }
  if (name == "mobilenet_v1_8bit") return build_mobilenet_v1(1.0, i8, i8, i8, name);
  if (name == "mobilenet_v1_8w4a") return build_mobilenet_v1(1.0, i8, i4, i8, name);
  if (name == "mobilenet_v2_4bit")
    return build_mobilenet_v2(4, 4, ActivationKind::ReLU, Granularity::Channelwise, 2, name);
  if (name == "mobilenet_v2_4bit_prelu")
    return build_mobilenet_v2(4, 4, ActivationKind::PReLU, Granularity::Channelwise, 2, name);
  if (name == "mobilenet_v2_4bit_dprelu")
    return build_mobilenet_v2(4, 4, ActivationKind::DPReLU, Granularity::Channelwise, 2, name);
  if (name == "mobilenet_v2_4bit_subchannel")
    return build_mobilenet_v2(4, 4, ActivationKind::ReLU, Granularity::SubChannelwise, 2, name);
  if (name == "resnet50_b2") return build_resnet50_branches(2, i8, i8, i8, i8, name);
  if (name == "resnet50_b3") return build_resnet50_branches(3, i8, i8, i8, i8, name);
  if (name == "resnet50_b4") return build_resnet50_branches(4, i8, i8, i8, i8, name);
  if (name == "resnet50_binary")
    return build_resnet50_branches(2, NumericFormat::binary(), NumericFormat::binary(), i4, i4, name);
  throw OutOfRange("unknown model '" + name + "'");
}

}  // namespace acecost::zoo
