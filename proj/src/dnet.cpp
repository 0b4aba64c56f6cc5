#include "vega/dnet.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

namespace vega {
namespace {

struct Stream {
  std::int64_t channels = 0;
  std::string label;
};

std::int64_t effective_groups(const ConvStage& stage, std::int64_t cin, std::int64_t cout) {
  std::int64_t requested = 1;
  switch (stage.grule) {
    case GroupRule::One: requested = 1; break;
    case GroupRule::Fixed: requested = stage.group_arg; break;
    case GroupRule::Depthwise: requested = cin; break;
    case GroupRule::ChannelsDiv: requested = std::max<std::int64_t>(1, cin / stage.group_arg); break;
  }
  return std::max<std::int64_t>(1, std::gcd(requested, std::gcd(cin, cout)));
}

/// Valid skip pairs for a k-op stem, sorted: to - from >= 2 and not the
/// default (input, output) pair.
std::vector<std::pair<int, int>> skip_pairs(int k) {
  std::vector<std::pair<int, int>> pairs;
  for (int from = 0; from <= k + 1; ++from)
    for (int to = from + 2; to <= k + 1; ++to)
      if (!(from == 0 && to == k + 1)) pairs.emplace_back(from, to);
  return pairs;
}

struct Element {
  std::string type;  // Conv2d | BatchNorm2d | ReLU | Add | Concat
  json attrs;
};

}  // namespace

DnetVocab DnetVocab::defaults() {
  DnetVocab v;
  v.ops = {
      {"conv3x3", {{3, GroupRule::One, 1}}},
      {"conv1x1", {{1, GroupRule::One, 1}}},
      {"conv3x3_g2", {{3, GroupRule::Fixed, 2}}},
      {"conv3x3_g4", {{3, GroupRule::Fixed, 4}}},
      {"conv3x3_dw", {{3, GroupRule::Depthwise, 0}}},
      {"conv3x3_gc32", {{3, GroupRule::ChannelsDiv, 32}}},
      {"conv3x3_dw_1x1", {{3, GroupRule::Depthwise, 0}, {1, GroupRule::One, 1}}},
  };
  v.ratios = {0.25, 0.5, 1.0, 2.0, 4.0};
  return v;
}

DnetVocab DnetVocab::truncated(int n_ops, int n_ratios) const {
  DnetVocab v;
  v.ops.assign(ops.begin(), ops.begin() + std::min<size_t>(size_t(n_ops), ops.size()));
  v.ratios.assign(ratios.begin(),
                  ratios.begin() + std::min<size_t>(size_t(n_ratios), ratios.size()));
  return v;
}

std::string emit_dnet_code(const DnetBlockSpec& spec) {
  std::string code = "S" + std::to_string(spec.stem_ops.size()) + ":";
  for (size_t i = 0; i < spec.stem_ops.size(); ++i) {
    if (i) code += "-";
    code += std::to_string(spec.stem_ops[i]);
  }
  code += "_R:" + std::to_string(spec.ratio);
  if (!spec.skips.empty()) {
    code += "_K:";
    for (const DnetSkip& s : spec.skips) {
      code += "(" + std::to_string(s.from) + "," + std::to_string(s.to) + ")";
      code += s.merge == MergeOp::Add ? "A" : "C";
    }
  }
  return code;
}

DnetBlockSpec parse_dnet_code(const std::string& code) {
  DnetBlockSpec spec;
  size_t pos = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw ValueError("dnet code '" + code + "': " + msg + " at offset " +
                     std::to_string(pos));
  };
  auto expect = [&](const std::string& tok) {
    if (code.compare(pos, tok.size(), tok) != 0) fail("expected '" + tok + "'");
    pos += tok.size();
  };
  auto read_int = [&]() -> int {
    const size_t start = pos;
    while (pos < code.size() && std::isdigit(static_cast<unsigned char>(code[pos]))) ++pos;
    if (pos == start) fail("expected a number");
    return std::stoi(code.substr(start, pos - start));
  };

  expect("S");
  const int k = read_int();
  expect(":");
  for (int i = 0; i < k; ++i) {
    if (i) expect("-");
    spec.stem_ops.push_back(read_int());
  }
  expect("_R:");
  spec.ratio = read_int();
  if (pos < code.size()) {
    expect("_K:");
    while (pos < code.size()) {
      DnetSkip s;
      expect("(");
      s.from = read_int();
      expect(",");
      s.to = read_int();
      expect(")");
      if (pos >= code.size() || (code[pos] != 'A' && code[pos] != 'C'))
        fail("expected merge letter 'A' or 'C'");
      s.merge = code[pos] == 'A' ? MergeOp::Add : MergeOp::Concat;
      ++pos;
      spec.skips.push_back(s);
    }
  }
  return spec;
}

std::vector<Diagnostic> validate_dnet_block(const DnetBlockSpec& spec, const DnetVocab& vocab) {
  std::vector<Diagnostic> diags;
  const std::string code = emit_dnet_code(spec);
  auto report = [&](const std::string& rule, const std::string& msg) {
    diags.push_back({code, rule, msg});
  };

  const int k = int(spec.stem_ops.size());
  if (k < 1)
    report("stem-length", "stem must hold at least one operator");
  else if (k > 3)
    report("stem-length", "stem length > 3");
  for (const int op : spec.stem_ops)
    if (op < 0 || op >= int(vocab.ops.size()))
      report("op-index", "stem op index " + std::to_string(op) + " outside vocabulary");
  if (spec.ratio < 0 || spec.ratio >= int(vocab.ratios.size()))
    report("ratio-index", "ratio index " + std::to_string(spec.ratio) + " outside options");

  const int output = k + 1;
  std::map<int, MergeOp> merge_at;
  std::set<std::pair<int, int>> seen;
  for (const DnetSkip& s : spec.skips) {
    if (s.from < 0 || s.to > output || s.from >= s.to) {
      report("skip-bounds", "skip (" + std::to_string(s.from) + "," + std::to_string(s.to) +
                                ") out of node range");
      continue;
    }
    if (s.to - s.from < 2)
      report("non-disjunct", "non-disjunct skip (" + std::to_string(s.from) + "," +
                                 std::to_string(s.to) + ")");
    if (s.from == 0 && s.to == output)
      report("default-duplicate", "skip duplicates the default input->output connection");
    if (!seen.emplace(s.from, s.to).second)
      report("duplicate-skip", "duplicate skip (" + std::to_string(s.from) + "," +
                                   std::to_string(s.to) + ")");
    const auto [it, inserted] = merge_at.emplace(s.to, s.merge);
    if (!inserted && it->second != s.merge)
      report("merge-conflict",
             "conflicting merge operators at node " + std::to_string(s.to));
    if (s.merge == MergeOp::Concat && s.to == output)
      report("concat-at-output",
             "Concat at the output join cannot preserve the input channel count");
  }

  if (diags.empty()) {
    // channel flow: every path must close back to the input width
    ModelDescription rendered = render_dnet_block(spec, 64, vocab);
    const json& out_ch = rendered.root.attrs["outchannels"];
    if (out_ch.get<std::int64_t>() != 64)
      report("channel-mismatch", "block output channels differ from input channels");
  }
  return diags;
}

ModelDescription render_dnet_block(const DnetBlockSpec& spec, std::int64_t in_channels,
                                   const DnetVocab& vocab) {
  const int k = int(spec.stem_ops.size());
  const int output = k + 1;
  const double ratio = vocab.ratios.at(size_t(spec.ratio));
  const std::int64_t width =
      k == 1 ? in_channels : std::max<std::int64_t>(1, std::llround(double(in_channels) * ratio));

  // output channels of each node: input and last op at in_channels,
  // interior ops at the ratio width
  auto node_out = [&](int node) -> std::int64_t {
    if (node == 0 || node == k) return in_channels;
    return width;
  };

  std::map<int, MergeOp> merge_at;
  std::map<int, std::vector<int>> skips_to;
  for (const DnetSkip& s : spec.skips) {
    merge_at.emplace(s.to, s.merge);
    skips_to[s.to].push_back(s.from);
  }

  std::vector<Element> base;
  auto emit_join = [&](int node, const std::vector<Stream>& streams, MergeOp merge) {
    json inputs = json::array();
    std::int64_t merged = 0;
    if (merge == MergeOp::Add) {
      const std::int64_t ref = streams[0].channels;
      for (const Stream& s : streams) {
        inputs.push_back(s.label);
        if (s.channels != ref) {
          json attrs = {{"type", "Conv2d"}, {"kernel", 1},     {"inchannels", s.channels},
                        {"outchannels", ref}, {"groups", 1},   {"stride", 1},
                        {"role", "adapter"},  {"stream", s.label}};
          base.push_back({"Conv2d", std::move(attrs)});
        }
      }
      merged = ref;
      base.push_back({"Add", json{{"type", "Add"}, {"node", node}, {"inputs", inputs}}});
    } else {
      for (const Stream& s : streams) {
        inputs.push_back(s.label);
        merged += s.channels;
      }
      base.push_back({"Concat", json{{"type", "Concat"}, {"node", node}, {"inputs", inputs}}});
    }
    return merged;
  };

  std::int64_t carried = in_channels;  // channels flowing along the stem
  for (int node = 1; node <= k; ++node) {
    std::vector<Stream> streams{{carried, node == 1 ? "input" : "stem"}};
    for (const int from : skips_to[node])
      streams.push_back({node_out(from), "skip(" + std::to_string(from) + "," +
                                             std::to_string(node) + ")"});
    std::int64_t cin = streams[0].channels;
    if (streams.size() > 1) cin = emit_join(node, streams, merge_at.at(node));

    const DnetOp& op = vocab.ops.at(size_t(spec.stem_ops[size_t(node - 1)]));
    const std::int64_t target = node_out(node);
    for (size_t stage_idx = 0; stage_idx < op.stages.size(); ++stage_idx) {
      const ConvStage& stage = op.stages[stage_idx];
      const std::int64_t cout = stage_idx + 1 == op.stages.size() ? target : cin;
      json attrs = {{"type", "Conv2d"},
                    {"kernel", stage.kernel},
                    {"inchannels", cin},
                    {"outchannels", cout},
                    {"groups", effective_groups(stage, cin, cout)},
                    {"stride", 1},
                    {"role", "stem"},
                    {"op", op.name},
                    {"node", node}};
      base.push_back({"Conv2d", std::move(attrs)});
      base.push_back({"BatchNorm2d", json{{"type", "BatchNorm2d"}, {"channels", cout}}});
      cin = cout;
    }
    carried = target;
  }

  // output join: stem result + the default connection (+ any skips)
  std::vector<Stream> streams{{carried, "stem"}, {in_channels, "input"}};
  for (const int from : skips_to[output])
    streams.push_back({node_out(from), "skip(" + std::to_string(from) + "," +
                                           std::to_string(output) + ")"});
  const MergeOp out_merge =
      merge_at.count(output) ? merge_at.at(output) : MergeOp::Add;
  const std::int64_t out_channels = emit_join(output, streams, out_merge);

  // insert ReLUs: after every merge, and after every BatchNorm whose next
  // element is not a merge
  DescNode block{"block", NodeKind::Block, json::object(), {}};
  std::vector<Element> final_seq;
  for (size_t i = 0; i < base.size(); ++i) {
    final_seq.push_back(base[i]);
    const bool is_merge = base[i].type == "Add" || base[i].type == "Concat";
    const bool is_bn = base[i].type == "BatchNorm2d";
    const bool next_is_merge =
        i + 1 < base.size() && (base[i + 1].type == "Add" || base[i + 1].type == "Concat");
    if (is_merge || (is_bn && !next_is_merge))
      final_seq.push_back({"ReLU", json{{"type", "ReLU"}}});
  }
  for (size_t i = 0; i < final_seq.size(); ++i) {
    std::string label = final_seq[i].type;
    std::transform(label.begin(), label.end(), label.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    char name[32];
    std::snprintf(name, sizeof(name), "p%02zu_%s", i, label.c_str());
    block.children.push_back(
        {name, NodeKind::Operator, std::move(final_seq[i].attrs), {}});
  }

  block.attrs["inchannels"] = in_channels;
  block.attrs["outchannels"] = out_channels;
  block.attrs["code"] = emit_dnet_code(spec);
  return ModelDescription{std::move(block)};
}

void enumerate_dnet_blocks(int vocab_size, int ratio_count, int max_stem,
                           const std::function<void(const DnetBlockSpec&)>& fn) {
  for (int k = 1; k <= max_stem; ++k) {
    const std::vector<std::pair<int, int>> pairs = skip_pairs(k);
    std::vector<int> ops(size_t(k), 0);
    while (true) {
      for (int ratio = 0; ratio < ratio_count; ++ratio) {
        // per-pair states: 0 = absent, 1 = Add, 2 = Concat
        std::vector<int> state(pairs.size(), 0);
        while (true) {
          DnetBlockSpec spec;
          spec.stem_ops = ops;
          spec.ratio = ratio;
          bool valid = true;
          std::map<int, MergeOp> merge_at;
          for (size_t i = 0; i < pairs.size() && valid; ++i) {
            if (state[i] == 0) continue;
            const MergeOp m = state[i] == 1 ? MergeOp::Add : MergeOp::Concat;
            if (m == MergeOp::Concat && pairs[i].second == k + 1) valid = false;
            const auto [it, inserted] = merge_at.emplace(pairs[i].second, m);
            if (!inserted && it->second != m) valid = false;
            spec.skips.push_back({pairs[i].first, pairs[i].second, m});
          }
          if (valid) fn(spec);

          size_t d = pairs.size();
          while (d > 0 && state[d - 1] == 2) state[--d] = 0;
          if (d == 0) break;
          ++state[d - 1];
        }
      }
      size_t d = ops.size();
      while (d > 0 && ops[d - 1] == vocab_size - 1) ops[--d] = 0;
      if (d == 0) break;
      ++ops[d - 1];
    }
  }
}

std::uint64_t count_dnet_blocks(int vocab_size, int ratio_count, int max_stem) {
  std::uint64_t count = 0;
  enumerate_dnet_blocks(vocab_size, ratio_count, max_stem,
                        [&](const DnetBlockSpec&) { ++count; });
  return count;
}

}  // namespace vega
