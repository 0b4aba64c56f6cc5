#pragma once

#include <string>
#include <vector>

#include "vega/sampler.hpp"
#include "vega/value.hpp"

namespace vega {

enum class NodeKind { Network, Cell, Block, Operator };

const char* to_string(NodeKind k);
std::optional<NodeKind> node_kind_from_string(const std::string& name);

struct DescError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One node of a framework-independent model description. Node names are
/// unique among siblings; the full dotted path is unique in the tree.
struct DescNode {
  std::string name;
  NodeKind kind = NodeKind::Operator;
  json attrs = json::object();
  std::vector<DescNode> children;

  bool operator==(const DescNode&) const = default;

  DescNode* child(const std::string& name);
  const DescNode* child(const std::string& name) const;
};

struct ModelDescription {
  DescNode root;

  bool operator==(const ModelDescription&) const = default;

  json to_json() const;
  static ModelDescription from_json(const json& j);
};

/// The attribute slots a dotted path addresses: one (node, attr) target per
/// matched node, in pre-order.
struct ResolvedRef {
  std::vector<DescNode*> nodes;
  std::string attr;
};

/// Navigate a dotted path. The first segment names the root; intermediate
/// segments select children by name, falling back to kind names
/// (network/cell/block/operator) which match all children of that kind; the
/// pseudo-segment `convs` selects every Conv2d operator beneath the current
/// nodes. The final segment is the attribute name and must be present on
/// every selected node. Throws DescError on unknown segments.
ResolvedRef resolve(ModelDescription& desc, const std::string& path);

/// Read-only view of the resolved attribute values.
std::vector<json> resolve_values(const ModelDescription& desc, const std::string& path);

/// Apply a decoded sample to a description: every key is resolved and the
/// addressed attributes replaced; array values distribute positionally over
/// multi-node targets (length must match); everything else is untouched.
/// The input description is not modified.
ModelDescription apply_sample(const ModelDescription& desc, const ConfigSample& sample);

/// Parameter-sharing supernet: per-node one-hot weight rows select one
/// genotype operator per edge.
struct SupernetDescription {
  std::string name = "supernet";
  std::vector<std::string> genotype;
  std::vector<std::int64_t> concat;
  std::int64_t node_count = 0;
  BinaryMatrices weights;  // node_count matrices, rows = edges per node
};

/// Emit the concrete description selected by the supernet weights: one cell
/// of `node_count` blocks, each holding its selected edge operators. The
/// cell is flagged with attr degenerate=true when every selected operator
/// is 'none'. Throws DescError on malformed weight matrices.
ModelDescription select_from_supernet(const SupernetDescription& sup);

}  // namespace vega
