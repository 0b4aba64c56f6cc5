#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vega/netdesc.hpp"

namespace vega {

/// How a stem conv derives its group count from its input channels.
/// Requested groups are clamped to the largest common divisor of the
/// actual in/out channel counts so every op renders at any width.
enum class GroupRule { One, Fixed, Depthwise, ChannelsDiv };

struct ConvStage {
  int kernel = 3;
  GroupRule grule = GroupRule::One;
  std::int64_t group_arg = 1;  // Fixed: the group count; ChannelsDiv: the divisor
};

struct DnetOp {
  std::string name;
  std::vector<ConvStage> stages;
};

/// The stem operator vocabulary and channel-ratio options. The identities
/// below are defaults and overridable; only the counts are structural.
struct DnetVocab {
  std::vector<DnetOp> ops;
  std::vector<double> ratios;

  static DnetVocab defaults();
  /// First n_ops / n_ratios entries (for reduced enumeration universes).
  DnetVocab truncated(int n_ops, int n_ratios) const;
};

enum class MergeOp { Add, Concat };

struct DnetSkip {
  int from = 0;
  int to = 0;
  MergeOp merge = MergeOp::Add;
  auto operator<=>(const DnetSkip&) const = default;
};

/// One block: nodes are {0 = input, 1..k = stem ops, k+1 = output}. The
/// default input->output connection is always present and is not listed in
/// `skips`.
struct DnetBlockSpec {
  std::vector<int> stem_ops;     // indices into vocab.ops
  int ratio = 0;                 // index into vocab.ratios
  std::vector<DnetSkip> skips;   // canonical order: sorted by (from, to)

  bool operator==(const DnetBlockSpec&) const = default;
  int output_node() const { return int(stem_ops.size()) + 1; }
};

/// Compact block code, e.g. "S3:2-5-1_R:1_K:(0,3)A". Grammar:
///   code   := stem "_R:" ratio ["_K:" skip+]
///   stem   := "S" k ":" op ("-" op)*
///   skip   := "(" from "," to ")" merge      merge := "A" | "C"
std::string emit_dnet_code(const DnetBlockSpec& spec);
DnetBlockSpec parse_dnet_code(const std::string& code);

/// All grammar violations; empty iff the spec is valid. Checks stem length
/// (1..3), index bounds, skip disjunctness (to - from >= 2, not the default
/// input->output pair, pairwise distinct), merge agreement per join point,
/// Concat feasibility (never at the output join) and channel preservation.
std::vector<Diagnostic> validate_dnet_block(const DnetBlockSpec& spec,
                                            const DnetVocab& vocab = DnetVocab::defaults());

/// Render a valid block at the given input width: stem convs each followed
/// by BatchNorm; joins merge streams with Add (conv1x1 adapters inserted
/// for channel mismatches) or Concat; ReLU after every merge and after
/// every BatchNorm not immediately followed by a merge; block output
/// channels equal in_channels.
ModelDescription render_dnet_block(const DnetBlockSpec& spec, std::int64_t in_channels,
                                   const DnetVocab& vocab = DnetVocab::defaults());

/// Visit every valid block exactly once in canonical order (stem length,
/// op indices, ratio index, skip states).
void enumerate_dnet_blocks(int vocab_size, int ratio_count, int max_stem,
                           const std::function<void(const DnetBlockSpec&)>& fn);

std::uint64_t count_dnet_blocks(int vocab_size, int ratio_count, int max_stem);

}  // namespace vega
