#include <doctest.h>

#include "acecost/model_zoo.hpp"
#include "acecost/op_census.hpp"
#include "test_support.hpp"

using namespace acecost;

namespace {

LayerNode conv(int k, int stride, std::int64_t cin, std::int64_t cout, std::int64_t groups = 1) {
  LayerNode n;
  n.id = "conv";
  n.kind = NodeKind::Conv2D;
  n.conv = {k, k, stride, Padding::Same, cin, cout, groups};
  return n;
}

const OpEntry* find(const std::vector<OpEntry>& es, OpClass op, OpCategory c) {
  for (const auto& e : es)
    if (e.op == op && e.category == c) return &e;
  return nullptr;
}

double millions(std::int64_t n) { return static_cast<double>(n) / 1e6; }

}  // namespace

TEST_CASE("dense convolution MACs by hand") {
  auto n = conv(3, 1, 16, 32);
  const TensorShape out{1, 14, 14, 32};
  CHECK(mac_count(n, out) == 14 * 14 * 32 * 3 * 3 * 16);
  CHECK(weight_count(n) == 3 * 3 * 16 * 32);

  n.kind = NodeKind::DepthwiseConv2D;
  n.conv.out_channels = 16;
  n.conv.groups = 16;
  CHECK(mac_count(n, {1, 14, 14, 16}) == 14 * 14 * 16 * 9);
  CHECK(weight_count(n) == 9 * 16);

  LayerNode fc;
  fc.kind = NodeKind::Dense;
  fc.dense = {1280, 1000};
  CHECK(mac_count(fc, {4, 1, 1, 1000}) == 4 * 1280 * 1000);
  CHECK(weight_count(fc) == 1280 * 1000);
}

TEST_CASE("unquantized conv emits only MACs with the producer's activation format") {
  auto n = conv(3, 1, 8, 8);
  n.weight_format = NumericFormat::fixed(4);
  n.act_format = NumericFormat::fixed(2);
  const auto es = census_layer(n, {1, 4, 4, 8}, {1, 4, 4, 8}, NumericFormat::fixed(6));
  REQUIRE(es.size() == 1);
  CHECK(es[0].op == OpClass::MAC);
  CHECK(es[0].count == 4 * 4 * 8 * 72);
  CHECK(es[0].format_a == NumericFormat::fixed(4));
  CHECK(es[0].format_b == NumericFormat::fixed(6));
}

TEST_CASE("scale operations follow the scale format") {
  auto n = conv(1, 1, 8, 8);
  n.weight_format = NumericFormat::fixed(4);
  n.act_format = NumericFormat::fixed(4);
  const TensorShape s{1, 5, 5, 8};
  const std::int64_t elems = 5 * 5 * 8;

  n.quant = QuantAnnotation{Granularity::Channelwise, 1, ScaleFormat::arbitrary(), WeightQuantizer::Linear};
  auto es = census_layer(n, s, s, NumericFormat::fixed(4));
  auto* q = find(es, OpClass::Multiply, OpCategory::QuantScale);
  REQUIRE(q);
  CHECK(q->count == elems);
  CHECK(q->format_a == NumericFormat::fp32());

  // Layerwise and channelwise dequantise each output once.
  n.quant->granularity = Granularity::Layerwise;
  CHECK(find(census_layer(n, s, s, NumericFormat::fixed(4)), OpClass::Multiply, OpCategory::QuantScale)
            ->count == elems);

  n.quant->granularity = Granularity::SubChannelwise;
  n.quant->vectors_per_channel = 3;
  CHECK(find(census_layer(n, s, s, NumericFormat::fixed(4)), OpClass::Multiply, OpCategory::QuantScale)
            ->count == 3 * elems);

  n.quant->granularity = Granularity::Channelwise;
  n.quant->vectors_per_channel = 1;
  n.quant->scale = ScaleFormat::pot();
  es = census_layer(n, s, s, NumericFormat::fixed(4));
  CHECK_FALSE(find(es, OpClass::Multiply, OpCategory::QuantScale));
  auto* sh = find(es, OpClass::Shift, OpCategory::QuantScale);
  REQUIRE(sh);
  CHECK(sh->count == elems);
  CHECK(sh->format_a == NumericFormat::fixed(4));
  // Two amount bits cover the four positions of a 4-bit value.
  CHECK(sh->format_b == NumericFormat::fixed(2));

  n.quant->scale = ScaleFormat::fixed_point(8);
  q = find(census_layer(n, s, s, NumericFormat::fixed(4)), OpClass::Multiply, OpCategory::QuantScale);
  REQUIRE(q);
  CHECK(q->format_a == NumericFormat::fixed(8));
  CHECK(q->format_b == NumericFormat::fixed(4));

  n.quant->scale = ScaleFormat::none();
  CHECK(census_layer(n, s, s, NumericFormat::fixed(4)).size() == 1);
}

TEST_CASE("PoT weights turn products into shift plus add") {
  auto n = conv(1, 1, 8, 8);
  n.weight_format = NumericFormat::fixed(4);
  n.act_format = NumericFormat::fixed(8);
  n.quant = QuantAnnotation{Granularity::Channelwise, 1, ScaleFormat::none(), WeightQuantizer::PoT};
  const TensorShape s{1, 2, 2, 8};
  const auto es = census_layer(n, s, s, NumericFormat::fixed(8));
  REQUIRE(es.size() == 2);
  CHECK_FALSE(find(es, OpClass::MAC, OpCategory::Conv));
  const auto* sh = find(es, OpClass::Shift, OpCategory::Conv);
  const auto* add = find(es, OpClass::Add, OpCategory::Conv);
  REQUIRE(sh);
  REQUIRE(add);
  CHECK(sh->count == 2 * 2 * 8 * 8);
  CHECK(add->count == sh->count);
  CHECK(sh->format_b == NumericFormat::fixed(3));

  n.weight_format = NumericFormat::fp32();
  CHECK_THROWS_AS(census_layer(n, s, s, NumericFormat::fixed(8)), AnalysisError);
}

TEST_CASE("quantized layers need explicit formats") {
  auto n = conv(1, 1, 8, 8);
  n.quant = QuantAnnotation{};
  CHECK_THROWS_AS(census_layer(n, {1, 1, 1, 8}, {1, 1, 1, 8}, NumericFormat::fixed(8)), MissingFormat);
}

TEST_CASE("elementwise layers") {
  const TensorShape s{1, 3, 3, 10};
  LayerNode bn;
  bn.id = "bn";
  bn.kind = NodeKind::BatchNorm;
  auto es = census_layer(bn, s, s, NumericFormat::fixed(4));
  REQUIRE(es.size() == 2);
  CHECK(find(es, OpClass::Multiply, OpCategory::BatchNorm)->count == 90);
  CHECK(find(es, OpClass::Add, OpCategory::BatchNorm)->format_a == NumericFormat::fp32());

  LayerNode act;
  act.kind = NodeKind::Activation;
  CHECK(census_layer(act, s, s, NumericFormat::fixed(4)).empty());
  act.activation = ActivationKind::PReLU;
  es = census_layer(act, s, s, NumericFormat::fixed(4));
  REQUIRE(es.size() == 1);
  CHECK(es[0].op == OpClass::Multiply);
  act.activation = ActivationKind::DPReLU;
  CHECK(census_layer(act, s, s, NumericFormat::fixed(4)).size() == 2);

  LayerNode add;
  add.kind = NodeKind::Add;
  add.inputs = {"a", "b", "c"};
  es = census_layer(add, s, s, NumericFormat::fixed(4));
  REQUIRE(es.size() == 1);
  CHECK(es[0].count == 90);
  CHECK(es[0].category == OpCategory::Residual);

  for (auto k : {NodeKind::Concat, NodeKind::Pool, NodeKind::Input, NodeKind::Output}) {
    LayerNode free_node;
    free_node.kind = k;
    CHECK(census_layer(free_node, s, s, NumericFormat::fixed(4)).empty());
  }
}

TEST_CASE("4-bit MobileNetV2 elementwise counts") {
  const auto relu = census_graph(zoo::build_named("mobilenet_v2_4bit"));
  CHECK(testing::within_rel(millions(relu.count(OpCategory::BatchNorm, OpClass::Multiply)), 6.67, 0.05));
  CHECK(testing::within_rel(millions(relu.count(OpCategory::BatchNorm, OpClass::Add)), 6.67, 0.05));
  CHECK(testing::within_rel(millions(relu.count(OpCategory::QuantScale, OpClass::Multiply)), 6.67, 0.05));
  CHECK(relu.count(OpCategory::Activation) == 0);

  const auto prelu = census_graph(zoo::build_named("mobilenet_v2_4bit_prelu"));
  CHECK(testing::within_rel(millions(prelu.count(OpCategory::Activation, OpClass::Multiply)), 6.1, 0.05));
  CHECK(prelu.count(OpCategory::Activation, OpClass::Add) == 0);

  const auto dprelu = census_graph(zoo::build_named("mobilenet_v2_4bit_dprelu"));
  CHECK(dprelu.count(OpCategory::Activation, OpClass::Add) ==
        prelu.count(OpCategory::Activation, OpClass::Multiply));

  const auto sub = census_graph(zoo::build_named("mobilenet_v2_4bit_subchannel"));
  CHECK(testing::within_rel(millions(sub.count(OpCategory::QuantScale, OpClass::Multiply)), 13.35, 0.05));
  CHECK(sub.count(OpCategory::QuantScale) == 2 * relu.count(OpCategory::QuantScale));
  // Granularity moves scale work only.
  CHECK(sub.count(OpCategory::Conv) == relu.count(OpCategory::Conv));
}

TEST_CASE("binary ResNet-50 batch-norm count") {
  const auto t = census_graph(zoo::build_named("resnet50_binary"));
  CHECK(testing::within_rel(millions(t.count(OpCategory::BatchNorm, OpClass::Multiply)), 10.58, 0.05));
  CHECK(t.count(OpCategory::BatchNorm, OpClass::Add) == t.count(OpCategory::BatchNorm, OpClass::Multiply));
}

TEST_CASE("tally counts are additive over entries") {
  OpTally t;
  t.entries.push_back({"a", OpClass::Add, 5, NumericFormat::fixed(8), NumericFormat::fixed(8), OpCategory::BatchNorm});
  t.entries.push_back({"b", OpClass::Multiply, 7, NumericFormat::fixed(8), NumericFormat::fixed(8), OpCategory::BatchNorm});
  t.entries.push_back({"c", OpClass::Add, 11, NumericFormat::fixed(8), NumericFormat::fixed(8), OpCategory::Residual});
  CHECK(t.count(OpCategory::BatchNorm) == 12);
  CHECK(t.count(OpCategory::BatchNorm, OpClass::Add) == 5);
  CHECK(t.count(OpCategory::Residual, OpClass::Add) == 11);
  CHECK(t.count(OpCategory::Conv) == 0);
  CHECK(is_mac_category(OpCategory::Dense));
  CHECK_FALSE(is_mac_category(OpCategory::QuantScale));
}
