#include "vega/netdesc.hpp"

#include <algorithm>

namespace vega {
namespace {

void collect_convs(DescNode& node, std::vector<DescNode*>& out) {
  for (DescNode& c : node.children) {
    if (c.kind == NodeKind::Operator && c.attrs.value("type", "") == "Conv2d")
      out.push_back(&c);
    collect_convs(c, out);
  }
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> segments;
  size_t start = 0;
  while (start <= path.size()) {
    const size_t dot = path.find('.', start);
    if (dot == std::string::npos) {
      segments.push_back(path.substr(start));
      break;
    }
    segments.push_back(path.substr(start, dot - start));
    start = dot + 1;
  }
  return segments;
}

json node_to_json(const DescNode& node) {
  json j = json::object();
  j["name"] = node.name;
  j["kind"] = to_string(node.kind);
  j["attrs"] = node.attrs;
  json children = json::array();
  for (const DescNode& c : node.children) children.push_back(node_to_json(c));
  j["children"] = std::move(children);
  return j;
}

DescNode node_from_json(const json& j) {
  DescNode node;
  if (!j.is_object() || !j.contains("name") || !j.contains("kind"))
    throw DescError("model description node needs 'name' and 'kind'");
  node.name = j["name"].get<std::string>();
  const auto kind = node_kind_from_string(j["kind"].get<std::string>());
  if (!kind) throw DescError("unknown node kind '" + j["kind"].get<std::string>() + "'");
  node.kind = *kind;
  node.attrs = j.value("attrs", json::object());
  if (j.contains("children"))
    for (const json& c : j["children"]) node.children.push_back(node_from_json(c));
  return node;
}

}  // namespace

const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Network: return "network";
    case NodeKind::Cell: return "cell";
    case NodeKind::Block: return "block";
    case NodeKind::Operator: return "operator";
  }
  return "?";
}

std::optional<NodeKind> node_kind_from_string(const std::string& name) {
  if (name == "network") return NodeKind::Network;
  if (name == "cell") return NodeKind::Cell;
  if (name == "block") return NodeKind::Block;
  if (name == "operator") return NodeKind::Operator;
  return std::nullopt;
}

DescNode* DescNode::child(const std::string& name) {
  for (DescNode& c : children)
    if (c.name == name) return &c;
  return nullptr;
}

const DescNode* DescNode::child(const std::string& name) const {
  for (const DescNode& c : children)
    if (c.name == name) return &c;
  return nullptr;
}

json ModelDescription::to_json() const { return node_to_json(root); }

ModelDescription ModelDescription::from_json(const json& j) {
  return ModelDescription{node_from_json(j)};
}

ResolvedRef resolve(ModelDescription& desc, const std::string& path) {
  if (path.empty()) throw DescError("empty path");
  const std::vector<std::string> segments = split_path(path);
  if (segments.size() < 2)
    throw DescError("path '" + path + "' has no attribute segment");
  if (segments[0] != desc.root.name)
    throw DescError("unknown segment '" + segments[0] + "' in '" + path +
                    "' (root is '" + desc.root.name + "')");

  std::vector<DescNode*> current{&desc.root};
  for (size_t i = 1; i + 1 < segments.size(); ++i) {
    const std::string& seg = segments[i];
    std::vector<DescNode*> next;
    if (seg == "convs") {
      for (DescNode* node : current) collect_convs(*node, next);
    } else {
      for (DescNode* node : current)
        if (DescNode* c = node->child(seg)) next.push_back(c);
      if (next.empty()) {
        const auto kind = node_kind_from_string(seg);
        if (kind)
          for (DescNode* node : current)
            for (DescNode& c : node->children)
              if (c.kind == *kind) next.push_back(&c);
      }
    }
    if (next.empty())
      throw DescError("unknown segment '" + seg + "' in '" + path + "'");
    current = std::move(next);
  }

  const std::string& attr = segments.back();
  for (const DescNode* node : current)
    if (!node->attrs.contains(attr))
      throw DescError("attribute '" + attr + "' absent at node '" + node->name +
                      "' (path '" + path + "')");
  return {std::move(current), attr};
}

std::vector<json> resolve_values(const ModelDescription& desc, const std::string& path) {
  ModelDescription& mutable_desc = const_cast<ModelDescription&>(desc);
  ResolvedRef ref = resolve(mutable_desc, path);
  std::vector<json> out;
  out.reserve(ref.nodes.size());
  for (const DescNode* node : ref.nodes) out.push_back(node->attrs.at(ref.attr));
  return out;
}

ModelDescription apply_sample(const ModelDescription& desc, const ConfigSample& sample) {
  ModelDescription out = desc;
  for (const auto& [key, value] : sample.values) {
    ResolvedRef ref = resolve(out, key);
    if (const auto* arr = std::get_if<std::vector<std::int64_t>>(&value)) {
      if (ref.nodes.size() > 1) {
        if (arr->size() != ref.nodes.size())
          throw DescError("key '" + key + "': array of length " +
                          std::to_string(arr->size()) + " addresses " +
                          std::to_string(ref.nodes.size()) + " nodes");
        for (size_t i = 0; i < ref.nodes.size(); ++i)
          ref.nodes[i]->attrs[ref.attr] = (*arr)[i];
      } else {
        ref.nodes[0]->attrs[ref.attr] = *arr;
      }
      continue;
    }
    if (ref.nodes.size() > 1)
      throw DescError("key '" + key + "': scalar value addresses " +
                      std::to_string(ref.nodes.size()) + " nodes");
    ref.nodes[0]->attrs[ref.attr] = value_to_json(value);
  }
  return out;
}

ModelDescription select_from_supernet(const SupernetDescription& sup) {
  if (std::int64_t(sup.weights.size()) != sup.node_count)
    throw DescError("supernet weights: expected " + std::to_string(sup.node_count) +
                    " matrices, got " + std::to_string(sup.weights.size()));
  DescNode cell{"cell", NodeKind::Cell, json::object(), {}};
  cell.attrs["concat"] = sup.concat;
  bool all_none = true;
  for (std::int64_t node_idx = 0; node_idx < sup.node_count; ++node_idx) {
    const BinaryMatrix& mat = sup.weights[size_t(node_idx)];
    DescNode block{"node" + std::to_string(node_idx), NodeKind::Block, json::object(), {}};
    for (size_t row = 0; row < mat.size(); ++row) {
      std::int64_t chosen = -1;
      int ones = 0;
      for (size_t col = 0; col < mat[row].size(); ++col) {
        const int bit = mat[row][col];
        if (bit != 0 && bit != 1)
          throw DescError("supernet weight matrix has a non-binary entry");
        if (bit == 1) {
          chosen = std::int64_t(col);
          ++ones;
        }
      }
      if (ones != 1)
        throw DescError("supernet weight row " + std::to_string(row) + " of node " +
                        std::to_string(node_idx) + " is not one-hot");
      if (chosen >= std::int64_t(sup.genotype.size()))
        throw DescError("supernet weight selects column " + std::to_string(chosen) +
                        " beyond genotype size " + std::to_string(sup.genotype.size()));
      const std::string& op = sup.genotype[size_t(chosen)];
      if (op != "none") all_none = false;
      DescNode edge{"edge" + std::to_string(row), NodeKind::Operator, json::object(), {}};
      edge.attrs["type"] = op;
      edge.attrs["edge"] = std::int64_t(row);
      block.children.push_back(std::move(edge));
    }
    cell.children.push_back(std::move(block));
  }
  if (all_none && sup.node_count > 0) cell.attrs["degenerate"] = true;

  DescNode root{sup.name, NodeKind::Network, json::object(), {}};
  root.children.push_back(std::move(cell));
  return ModelDescription{std::move(root)};
}

}  // namespace vega
