#include "vega/cost.hpp"

namespace vega {
namespace {

struct WalkState {
  CostEstimate cost;
  std::int64_t resolution = 1;
};

/// Children are a sequence: the spatial size threads through siblings so
/// a strided operator shrinks everything after it.
WalkState walk(const DescNode& node, std::int64_t resolution) {
  if (node.attrs.contains("resolution"))
    resolution = node.attrs.at("resolution").get<std::int64_t>();

  WalkState state;
  state.resolution = resolution;
  if (node.kind == NodeKind::Operator) {
    const std::string type = node.attrs.value("type", "");
    if (type == "Conv2d") {
      const auto kernel = node.attrs.at("kernel").get<std::int64_t>();
      const auto cin = node.attrs.at("inchannels").get<std::int64_t>();
      const auto cout = node.attrs.at("outchannels").get<std::int64_t>();
      const auto groups = node.attrs.value("groups", std::int64_t{1});
      const auto stride = node.attrs.value("stride", std::int64_t{1});
      const std::int64_t out_res = (resolution + stride - 1) / stride;
      const std::int64_t params = kernel * kernel * cin * cout / groups;
      state.cost.params += params;
      state.cost.flops += 2 * params * out_res * out_res;
      state.resolution = out_res;
    } else if (type == "BatchNorm2d") {
      state.cost.params += 2 * node.attrs.at("channels").get<std::int64_t>();
    } else if (type == "ReLU" || type == "Add" || type == "Concat" || type == "none" ||
               type == "skip_connect" || type == "Identity") {
      // parameter-free
    } else {
      throw DescError("estimate_cost: unknown operator type '" + type + "'");
    }
  }
  for (const DescNode& child : node.children) {
    const WalkState sub = walk(child, state.resolution);
    state.cost += sub.cost;
    state.resolution = sub.resolution;
  }
  return state;
}

}  // namespace

CostEstimate estimate_cost(const ModelDescription& desc) {
  return walk(desc.root, 1).cost;
}

}  // namespace vega
