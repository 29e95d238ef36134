#include "acecost/graph_ir.hpp"

#include <algorithm>
#include <queue>
#include <set>

namespace acecost {

std::string to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Conv2D: return "conv2d";
    case NodeKind::DepthwiseConv2D: return "depthwise_conv2d";
    case NodeKind::PointwiseConv2D: return "pointwise_conv2d";
    case NodeKind::Dense: return "dense";
    case NodeKind::BatchNorm: return "batch_norm";
    case NodeKind::Activation: return "activation";
    case NodeKind::Add: return "add";
    case NodeKind::Concat: return "concat";
    case NodeKind::Pool: return "pool";
    case NodeKind::Input: return "input";
    case NodeKind::Output: return "output";
  }
  return "?";
}

bool is_conv(NodeKind k) {
  return k == NodeKind::Conv2D || k == NodeKind::DepthwiseConv2D || k == NodeKind::PointwiseConv2D;
}

bool is_compute(NodeKind k) { return is_conv(k) || k == NodeKind::Dense; }

std::string TensorShape::to_string() const {
  return std::to_string(n) + "x" + std::to_string(h) + "x" + std::to_string(w) + "x" +
         std::to_string(c);
}

bool operator==(const LayerNode& a, const LayerNode& b) {
  if (a.id != b.id || a.kind != b.kind || a.inputs != b.inputs ||
      a.weight_format != b.weight_format || a.act_format != b.act_format || a.quant != b.quant) {
    return false;
  }
  switch (a.kind) {
    case NodeKind::Conv2D:
    case NodeKind::DepthwiseConv2D:
    case NodeKind::PointwiseConv2D: return a.conv == b.conv;
    case NodeKind::Dense: return a.dense == b.dense;
    case NodeKind::Pool: return a.pool == b.pool;
    case NodeKind::Activation: return a.activation == b.activation;
    case NodeKind::BatchNorm: return a.bn_variant == b.bn_variant;
    default: return true;
  }
}

int Graph::find(const std::string& id) const {
  for (std::size_t k = 0; k < nodes.size(); ++k)
    if (nodes[k].id == id) return static_cast<int>(k);
  return -1;
}

const LayerNode& Graph::at(const std::string& id) const {
  const int k = find(id);
  if (k < 0) throw AnalysisError(id, "no node named '" + id + "'");
  return nodes[static_cast<std::size_t>(k)];
}

std::vector<int> Graph::topological_order() const {
  const std::size_t n = nodes.size();
  std::unordered_map<std::string, int> index;
  for (std::size_t k = 0; k < n; ++k) index.emplace(nodes[k].id, static_cast<int>(k));

  std::vector<int> indegree(n, 0);
  std::vector<std::vector<int>> consumers(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (const auto& in : nodes[k].inputs) {
      auto it = index.find(in);
      if (it == index.end()) throw DanglingInput(nodes[k].id, in);
      consumers[static_cast<std::size_t>(it->second)].push_back(static_cast<int>(k));
      ++indegree[k];
    }
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (std::size_t k = 0; k < n; ++k)
    if (indegree[k] == 0) ready.push(static_cast<int>(k));

  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    const int k = ready.top();
    ready.pop();
    order.push_back(k);
    for (int c : consumers[static_cast<std::size_t>(k)])
      if (--indegree[static_cast<std::size_t>(c)] == 0) ready.push(c);
  }
  if (order.size() != n) {
    for (std::size_t k = 0; k < n; ++k)
      if (indegree[k] > 0) throw AnalysisError(nodes[k].id, "graph contains a cycle");
  }
  return order;
}

namespace {

void add(std::vector<Diagnostic>& out, const std::string& id, std::string rule, std::string msg) {
  out.push_back({id, std::move(rule), std::move(msg)});
}

bool has_cycle(const Graph& g) {
  try {
    g.topological_order();
    return false;
  } catch (const DanglingInput&) {
    return false;
  } catch (const AnalysisError&) {
    return true;
  }
}

void check_format(std::vector<Diagnostic>& out, const LayerNode& n,
                  const std::optional<NumericFormat>& f, const char* which) {
  if (!f) return;
  try {
    f->validate();
  } catch (const InvalidFormat& e) {
    add(out, n.id, "invalid-format", std::string(which) + ": " + e.what());
  }
}

}  // namespace

std::vector<Diagnostic> validate(const Graph& g) {
  std::vector<Diagnostic> out;
  std::set<std::string> seen;
  int input_nodes = 0;
  int output_nodes = 0;

  for (const auto& n : g.nodes) {
    if (n.id.empty()) add(out, n.id, "empty-id", "node id must be non-empty");
    if (!seen.insert(n.id).second) add(out, n.id, "duplicate-id", "node id declared twice");
    for (const auto& in : n.inputs)
      if (g.find(in) < 0) add(out, n.id, "dangling-input", "input '" + in + "' does not resolve");

    const std::size_t arity = n.inputs.size();
    switch (n.kind) {
      case NodeKind::Input:
        ++input_nodes;
        if (arity != 0) add(out, n.id, "input-arity", "input node takes no inputs");
        break;
      case NodeKind::Add:
      case NodeKind::Concat:
        if (arity < 2) add(out, n.id, "merge-arity", "merge node needs at least two inputs");
        break;
      case NodeKind::Output:
        ++output_nodes;
        [[fallthrough]];
      default:
        if (arity != 1) add(out, n.id, "single-input", "node takes exactly one input");
        break;
    }

    if (is_conv(n.kind)) {
      const auto& p = n.conv;
      if (p.kernel_h < 1 || p.kernel_w < 1 || p.stride < 1 || p.in_channels < 1 ||
          p.out_channels < 1 || p.groups < 1) {
        add(out, n.id, "param-range", "kernel, stride, channels and groups must be >= 1");
      } else if (p.in_channels % p.groups != 0 || p.out_channels % p.groups != 0) {
        add(out, n.id, "groups-divide", "groups must divide input and output channels");
      }
      if (n.kind == NodeKind::PointwiseConv2D && (p.kernel_h != 1 || p.kernel_w != 1))
        add(out, n.id, "pw-kernel-1x1", "pointwise convolution must use a 1x1 kernel");
      if (n.kind == NodeKind::DepthwiseConv2D && p.groups != p.in_channels)
        add(out, n.id, "dw-groups", "depthwise convolution needs groups == in_channels");
    }
    if (n.kind == NodeKind::Dense && (n.dense.in_features < 1 || n.dense.out_features < 1))
      add(out, n.id, "param-range", "dense features must be >= 1");
    if (n.kind == NodeKind::Pool && !n.pool.global && (n.pool.kernel < 1 || n.pool.stride < 1))
      add(out, n.id, "param-range", "pool kernel and stride must be >= 1");

    check_format(out, n, n.weight_format, "weight_format");
    check_format(out, n, n.act_format, "act_format");
    if (n.kind == NodeKind::BatchNorm && n.bn_variant == BatchNormVariant::QuantNorm &&
        n.weights().is_float()) {
      add(out, n.id, "quantnorm-format", "quantnorm parameters must use an integer format");
    }

    if (n.quant) {
      if (!is_compute(n.kind))
        add(out, n.id, "quant-placement", "quantization annotations belong on conv/dense layers");
      const auto& q = *n.quant;
      const bool sub = q.granularity == Granularity::SubChannelwise;
      if (sub != (q.vectors_per_channel >= 2) || q.vectors_per_channel < 1)
        add(out, n.id, "subchannel-vectors",
            "vectors_per_channel >= 2 is required exactly for sub-channelwise granularity");
      if (q.scale.kind == ScaleKind::FixedPoint && q.scale.format.is_float())
        add(out, n.id, "scale-format", "fixed-point scale needs an integer format");
      if (q.scale.kind == ScaleKind::ArbitraryFloat || q.scale.kind == ScaleKind::FixedPoint) {
        try {
          q.scale.format.validate();
        } catch (const InvalidFormat& e) {
          add(out, n.id, "invalid-format", std::string("scale format: ") + e.what());
        }
      }
    }
  }

  if (input_nodes != 1) add(out, "", "io-nodes", "graph needs exactly one input node");
  if (output_nodes < 1) add(out, "", "io-nodes", "graph needs at least one output node");
  if (has_cycle(g)) add(out, "", "dag-violation", "graph contains a cycle");
  if (g.input_shape.n < 1 || g.input_shape.h < 1 || g.input_shape.w < 1 || g.input_shape.c < 1)
    add(out, "", "param-range", "input dimensions must be >= 1");
  return out;
}

namespace {

std::int64_t spatial(std::int64_t in, int kernel, int stride, Padding pad, const std::string& id) {
  if (pad == Padding::Same) return (in + stride - 1) / stride;
  if (in < kernel) {
    throw ShapeMismatch(id, "valid padding with kernel " + std::to_string(kernel) +
                                " larger than input " + std::to_string(in));
  }
  return (in - kernel) / stride + 1;
}

}  // namespace

ShapeMap infer_shapes(const Graph& g, const TensorShape& input_shape) {
  ShapeMap shapes;
  for (int k : g.topological_order()) {
    const auto& n = g.nodes[static_cast<std::size_t>(k)];
    std::vector<TensorShape> ins;
    for (const auto& id : n.inputs) ins.push_back(shapes.at(id));
    auto need_one = [&] {
      if (ins.size() != 1) throw ShapeMismatch(n.id, "expected exactly one input");
      return ins.front();
    };

    TensorShape out;
    switch (n.kind) {
      case NodeKind::Input:
        out = input_shape;
        break;
      case NodeKind::Conv2D:
      case NodeKind::DepthwiseConv2D:
      case NodeKind::PointwiseConv2D: {
        const auto in = need_one();
        const auto& p = n.conv;
        if (in.c != p.in_channels) {
          throw ShapeMismatch(n.id, "expects " + std::to_string(p.in_channels) +
                                        " input channels, got " + std::to_string(in.c));
        }
        out = {in.n, spatial(in.h, p.kernel_h, p.stride, p.padding, n.id),
               spatial(in.w, p.kernel_w, p.stride, p.padding, n.id), p.out_channels};
        break;
      }
      case NodeKind::Dense: {
        const auto in = need_one();
        if (in.h * in.w * in.c != n.dense.in_features) {
          throw ShapeMismatch(n.id, "expects " + std::to_string(n.dense.in_features) +
                                        " features, got " + in.to_string());
        }
        out = {in.n, 1, 1, n.dense.out_features};
        break;
      }
      case NodeKind::Pool: {
        const auto in = need_one();
        const auto& p = n.pool;
        out = p.global ? TensorShape{in.n, 1, 1, in.c}
                       : TensorShape{in.n, spatial(in.h, p.kernel, p.stride, p.padding, n.id),
                                     spatial(in.w, p.kernel, p.stride, p.padding, n.id), in.c};
        break;
      }
      case NodeKind::Add:
        if (ins.empty()) throw ShapeMismatch(n.id, "add without inputs");
        for (const auto& s : ins) {
          if (!(s == ins.front())) {
            throw ShapeMismatch(n.id, "add operands differ: " + ins.front().to_string() +
                                          " vs " + s.to_string());
          }
        }
        out = ins.front();
        break;
      case NodeKind::Concat:
        if (ins.empty()) throw ShapeMismatch(n.id, "concat without inputs");
        out = ins.front();
        out.c = 0;
        for (const auto& s : ins) {
          if (s.n != out.n || s.h != out.h || s.w != out.w) {
            throw ShapeMismatch(n.id, "concat operands differ spatially: " +
                                          ins.front().to_string() + " vs " + s.to_string());
          }
          out.c += s.c;
        }
        break;
      case NodeKind::BatchNorm:
      case NodeKind::Activation:
      case NodeKind::Output:
        out = need_one();
        break;
    }
    shapes[n.id] = out;
  }
  return shapes;
}

int widest_cut(const Graph& g) {
  const auto order = g.topological_order();
  std::unordered_map<std::string, int> pos;
  for (std::size_t p = 0; p < order.size(); ++p)
    pos[g.nodes[static_cast<std::size_t>(order[p])].id] = static_cast<int>(p);

  // Each edge u->v is live across cuts pos(u) .. pos(v)-1; sweep with a
  // difference array.
  std::vector<int> delta(order.size() + 1, 0);
  for (const auto& n : g.nodes) {
    const int v = pos.at(n.id);
    for (const auto& in : n.inputs) {
      ++delta[static_cast<std::size_t>(pos.at(in))];
      --delta[static_cast<std::size_t>(v)];
    }
  }
  int live = 0;
  int widest = 1;
  for (int d : delta) {
    live += d;
    widest = std::max(widest, live);
  }
  return widest;
}

}  // namespace acecost
