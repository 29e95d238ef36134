#include <json.hpp>

#include <set>

#include "acecost/graph_ir.hpp"

namespace acecost {

using ojson = nlohmann::ordered_json;

namespace {

// Reads one JSON object field by field, remembering which keys were used so
// that leftovers can be rejected.
class Reader {
 public:
  Reader(const ojson& obj, std::string node_id, std::string path)
      : obj_(obj), node_(std::move(node_id)), path_(std::move(path)) {
    if (!obj_.is_object()) fail("", "expected an object");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const std::string where = key.empty() ? path_ : path_ + "/" + key;
    throw ParseError(node_, where, (where.empty() ? std::string("/") : where) + ": " + what);
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const ojson& raw(const std::string& key) {
    if (!obj_.contains(key)) fail(key, "missing required field");
    used_.insert(key);
    return obj_.at(key);
  }

  std::string str(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  std::int64_t integer(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<std::int64_t>();
  }

  int small_int(const std::string& key) {
    const auto v = integer(key);
    if (v < -(1 << 30) || v > (1 << 30)) fail(key, "integer out of range");
    return static_cast<int>(v);
  }

  bool boolean(const std::string& key) {
    const auto& v = raw(key);
    if (!v.is_boolean()) fail(key, "expected a boolean");
    return v.get<bool>();
  }

  Reader child(const std::string& key) { return Reader(raw(key), node_, path_ + "/" + key); }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!used_.count(it.key())) fail(it.key(), "unknown field");
  }

  const std::string& node() const { return node_; }
  const std::string& path() const { return path_; }

 private:
  const ojson& obj_;
  std::string node_;
  std::string path_;
  std::set<std::string> used_;
};

template <typename E>
E pick(Reader& r, const std::string& key, std::initializer_list<std::pair<const char*, E>> options) {
  const auto s = r.str(key);
  for (const auto& [name, value] : options)
    if (s == name) return value;
  r.fail(key, "unrecognised value '" + s + "'");
}

NumericFormat read_format(Reader r) {
  const auto kind = r.str("kind");
  NumericFormat f;
  const int bits = r.small_int("bits");
  if (kind == "fixed") {
    f = NumericFormat::fixed(bits);
  } else if (kind == "binary") {
    f = NumericFormat::binary();
    f.total_bits = bits;
  } else if (kind == "float") {
    if (r.has("exp") || r.has("man")) {
      f = NumericFormat::floating(r.small_int("exp"), r.small_int("man"));
      f.total_bits = bits;
    } else if (bits == 32) {
      f = NumericFormat::fp32();
    } else if (bits == 16) {
      f = NumericFormat::fp16();
    } else {
      r.fail("bits", "float formats other than 16/32 bits need exp and man");
    }
  } else {
    r.fail("kind", "unrecognised format kind '" + kind + "'");
  }
  r.finish();
  try {
    f.validate();
  } catch (const InvalidFormat& e) {
    r.fail("", e.what());
  }
  return f;
}

ojson write_format(const NumericFormat& f) {
  ojson j;
  switch (f.kind) {
    case FormatKind::Fixed: j["kind"] = "fixed"; break;
    case FormatKind::Binary: j["kind"] = "binary"; break;
    case FormatKind::Float: j["kind"] = "float"; break;
  }
  j["bits"] = f.total_bits;
  if (f.is_float()) {
    j["exp"] = f.exponent_bits;
    j["man"] = f.mantissa_bits;
  }
  return j;
}

const std::initializer_list<std::pair<const char*, NodeKind>> kKinds = {
    {"conv2d", NodeKind::Conv2D},
    {"depthwise_conv2d", NodeKind::DepthwiseConv2D},
    {"pointwise_conv2d", NodeKind::PointwiseConv2D},
    {"dense", NodeKind::Dense},
    {"batch_norm", NodeKind::BatchNorm},
    {"activation", NodeKind::Activation},
    {"add", NodeKind::Add},
    {"concat", NodeKind::Concat},
    {"pool", NodeKind::Pool},
    {"input", NodeKind::Input},
    {"output", NodeKind::Output},
};

const char* padding_name(Padding p) { return p == Padding::Same ? "same" : "valid"; }

QuantAnnotation read_quant(Reader r) {
  QuantAnnotation q;
  q.granularity = pick<Granularity>(r, "granularity",
                                    {{"layerwise", Granularity::Layerwise},
                                     {"channelwise", Granularity::Channelwise},
                                     {"subchannelwise", Granularity::SubChannelwise}});
  if (q.granularity == Granularity::SubChannelwise) {
    q.vectors_per_channel = r.has("vectors_per_channel") ? r.small_int("vectors_per_channel") : 2;
    if (q.vectors_per_channel < 2) r.fail("vectors_per_channel", "must be >= 2");
  } else if (r.has("vectors_per_channel")) {
    r.fail("vectors_per_channel", "only allowed with subchannelwise granularity");
  }

  Reader s = r.child("scale_format");
  q.scale.kind = pick<ScaleKind>(s, "kind",
                                 {{"arbitrary_float", ScaleKind::ArbitraryFloat},
                                  {"pot", ScaleKind::PoT},
                                  {"fixed_point", ScaleKind::FixedPoint},
                                  {"none", ScaleKind::None}});
  if (q.scale.kind == ScaleKind::ArbitraryFloat || q.scale.kind == ScaleKind::FixedPoint) {
    q.scale.format = s.has("format") ? read_format(s.child("format")) : NumericFormat::fp32();
    if (q.scale.kind == ScaleKind::FixedPoint && q.scale.format.is_float())
      s.fail("format", "fixed-point scale needs an integer format");
  }
  s.finish();

  q.weight_quantizer = pick<WeightQuantizer>(
      r, "weight_quantizer", {{"linear", WeightQuantizer::Linear}, {"pot", WeightQuantizer::PoT}});
  r.finish();
  return q;
}

ojson write_quant(const QuantAnnotation& q) {
  ojson j;
  switch (q.granularity) {
    case Granularity::Layerwise: j["granularity"] = "layerwise"; break;
    case Granularity::Channelwise: j["granularity"] = "channelwise"; break;
    case Granularity::SubChannelwise:
      j["granularity"] = "subchannelwise";
      j["vectors_per_channel"] = q.vectors_per_channel;
      break;
  }
  ojson s;
  switch (q.scale.kind) {
    case ScaleKind::ArbitraryFloat:
      s["kind"] = "arbitrary_float";
      s["format"] = write_format(q.scale.format);
      break;
    case ScaleKind::PoT: s["kind"] = "pot"; break;
    case ScaleKind::FixedPoint:
      s["kind"] = "fixed_point";
      s["format"] = write_format(q.scale.format);
      break;
    case ScaleKind::None: s["kind"] = "none"; break;
  }
  j["scale_format"] = s;
  j["weight_quantizer"] = q.weight_quantizer == WeightQuantizer::PoT ? "pot" : "linear";
  return j;
}

void read_params(LayerNode& n, Reader* p) {
  auto opt_int = [&](const char* key, int fallback) {
    return p && p->has(key) ? p->small_int(key) : fallback;
  };
  auto need = [&](const char* key) -> Reader& {
    if (!p) throw ParseError(n.id, "params", "params/" + std::string(key) + ": missing");
    return *p;
  };

  switch (n.kind) {
    case NodeKind::Conv2D:
    case NodeKind::DepthwiseConv2D:
    case NodeKind::PointwiseConv2D: {
      auto& c = n.conv;
      const int k = n.kind == NodeKind::PointwiseConv2D ? 1 : 3;
      c.kernel_h = opt_int("kernel_h", k);
      c.kernel_w = opt_int("kernel_w", c.kernel_h);
      c.stride = opt_int("stride", 1);
      c.padding = p && p->has("padding")
                      ? pick<Padding>(*p, "padding", {{"same", Padding::Same}, {"valid", Padding::Valid}})
                      : Padding::Same;
      c.in_channels = need("in_channels").integer("in_channels");
      c.out_channels = need("out_channels").integer("out_channels");
      const std::int64_t default_groups =
          n.kind == NodeKind::DepthwiseConv2D ? c.in_channels : 1;
      c.groups = p && p->has("groups") ? p->integer("groups") : default_groups;
      break;
    }
    case NodeKind::Dense:
      n.dense.in_features = need("in_features").integer("in_features");
      n.dense.out_features = need("out_features").integer("out_features");
      break;
    case NodeKind::Activation:
      n.activation = pick<ActivationKind>(need("function"), "function",
                                          {{"relu", ActivationKind::ReLU},
                                           {"prelu", ActivationKind::PReLU},
                                           {"dprelu", ActivationKind::DPReLU}});
      break;
    case NodeKind::BatchNorm:
      if (p && p->has("variant")) {
        n.bn_variant = pick<BatchNormVariant>(
            *p, "variant",
            {{"standard", BatchNormVariant::Standard}, {"quantnorm", BatchNormVariant::QuantNorm}});
      }
      break;
    case NodeKind::Pool: {
      auto& q = n.pool;
      if (p && p->has("mode"))
        q.mode = pick<PoolMode>(*p, "mode", {{"max", PoolMode::Max}, {"avg", PoolMode::Average}});
      q.global = p && p->has("global") ? p->boolean("global") : false;
      q.kernel = opt_int("kernel", 1);
      q.stride = opt_int("stride", q.kernel);
      if (p && p->has("padding"))
        q.padding = pick<Padding>(*p, "padding", {{"same", Padding::Same}, {"valid", Padding::Valid}});
      break;
    }
    default:
      break;
  }
  if (p) p->finish();
}

ojson write_params(const LayerNode& n) {
  ojson j = ojson::object();
  switch (n.kind) {
    case NodeKind::Conv2D:
    case NodeKind::DepthwiseConv2D:
    case NodeKind::PointwiseConv2D:
      j["kernel_h"] = n.conv.kernel_h;
      j["kernel_w"] = n.conv.kernel_w;
      j["stride"] = n.conv.stride;
      j["padding"] = padding_name(n.conv.padding);
      j["in_channels"] = n.conv.in_channels;
      j["out_channels"] = n.conv.out_channels;
      j["groups"] = n.conv.groups;
      break;
    case NodeKind::Dense:
      j["in_features"] = n.dense.in_features;
      j["out_features"] = n.dense.out_features;
      break;
    case NodeKind::Activation:
      switch (n.activation) {
        case ActivationKind::ReLU: j["function"] = "relu"; break;
        case ActivationKind::PReLU: j["function"] = "prelu"; break;
        case ActivationKind::DPReLU: j["function"] = "dprelu"; break;
      }
      break;
    case NodeKind::BatchNorm:
      j["variant"] = n.bn_variant == BatchNormVariant::QuantNorm ? "quantnorm" : "standard";
      break;
    case NodeKind::Pool:
      j["mode"] = n.pool.mode == PoolMode::Max ? "max" : "avg";
      j["global"] = n.pool.global;
      j["kernel"] = n.pool.kernel;
      j["stride"] = n.pool.stride;
      j["padding"] = padding_name(n.pool.padding);
      break;
    default:
      break;
  }
  return j;
}

LayerNode read_node(const ojson& j, std::size_t index) {
  const std::string path = "/nodes/" + std::to_string(index);
  std::string id;
  if (j.is_object() && j.contains("id") && j.at("id").is_string()) id = j.at("id").get<std::string>();
  Reader r(j, id, path);

  LayerNode n;
  n.id = r.str("id");
  if (n.id.empty()) r.fail("id", "node id must be non-empty");
  {
    const auto kind = r.str("kind");
    bool found = false;
    for (const auto& [name, value] : kKinds) {
      if (kind == name) {
        n.kind = value;
        found = true;
      }
    }
    if (!found) throw UnknownKind(n.id, path + "/kind", "unknown node kind '" + kind + "'");
  }

  if (r.has("inputs")) {
    const auto& arr = r.raw("inputs");
    if (!arr.is_array()) r.fail("inputs", "expected an array of node ids");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      if (!arr[k].is_string()) r.fail("inputs/" + std::to_string(k), "expected a string");
      n.inputs.push_back(arr[k].get<std::string>());
    }
  }

  if (r.has("params")) {
    Reader p = r.child("params");
    read_params(n, &p);
  } else {
    read_params(n, nullptr);
  }
  if (r.has("weight_format")) n.weight_format = read_format(r.child("weight_format"));
  if (r.has("act_format")) n.act_format = read_format(r.child("act_format"));
  if (r.has("quant")) n.quant = read_quant(r.child("quant"));
  r.finish();
  return n;
}

}  // namespace

Graph parse_graph(const std::string& text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw ParseError("", "", std::string("malformed JSON: ") + e.what());
  }
  Reader top(doc, "", "");
  const auto version = top.integer("ir_version");
  if (version != kIrVersion)
    top.fail("ir_version", "unsupported version " + std::to_string(version));

  Graph g;
  g.name = top.has("name") ? top.str("name") : "";
  {
    Reader in = top.child("input");
    g.input_shape = {in.integer("n"), in.integer("h"), in.integer("w"), in.integer("c")};
    in.finish();
  }
  const auto& nodes = top.raw("nodes");
  if (!nodes.is_array()) top.fail("nodes", "expected an array");
  std::set<std::string> ids;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    g.nodes.push_back(read_node(nodes[k], k));
    if (!ids.insert(g.nodes.back().id).second) {
      throw ParseError(g.nodes.back().id, "/nodes/" + std::to_string(k) + "/id",
                       "duplicate node id '" + g.nodes.back().id + "'");
    }
  }
  top.finish();

  for (const auto& n : g.nodes)
    for (const auto& in : n.inputs)
      if (!ids.count(in)) throw DanglingInput(n.id, in);
  return g;
}

std::string serialize_graph(const Graph& g) {
  ojson doc;
  doc["ir_version"] = kIrVersion;
  doc["name"] = g.name;
  doc["input"] = {{"n", g.input_shape.n},
                  {"h", g.input_shape.h},
                  {"w", g.input_shape.w},
                  {"c", g.input_shape.c}};
  ojson nodes = ojson::array();
  for (const auto& n : g.nodes) {
    ojson j;
    j["id"] = n.id;
    j["kind"] = to_string(n.kind);
    j["inputs"] = n.inputs;
    j["params"] = write_params(n);
    if (n.weight_format) j["weight_format"] = write_format(*n.weight_format);
    if (n.act_format) j["act_format"] = write_format(*n.act_format);
    if (n.quant) j["quant"] = write_quant(*n.quant);
    nodes.push_back(std::move(j));
  }
  doc["nodes"] = std::move(nodes);
  return doc.dump(2) + "\n";
}

}  // namespace acecost
