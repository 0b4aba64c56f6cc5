#pragma once

#include "vega/netdesc.hpp"

namespace vega {

/// Analytic parameter/FLOP totals for a concrete description. FLOPs use
/// the multiply-accumulate = 2 FLOPs convention.
struct CostEstimate {
  std::int64_t params = 0;
  std::int64_t flops = 0;

  double params_millions() const { return double(params) / 1e6; }
  double flops_billions() const { return double(flops) / 1e9; }

  CostEstimate& operator+=(const CostEstimate& other) {
    params += other.params;
    flops += other.flops;
    return *this;
  }
  friend CostEstimate operator+(CostEstimate a, const CostEstimate& b) { return a += b; }
  bool operator==(const CostEstimate&) const = default;
};

/// Sum per-operator closed forms over the tree. Convolutions count
/// kernel^2 * c_in * c_out / groups parameters (no bias; BatchNorm follows)
/// and 2 * params * H_out * W_out FLOPs; BatchNorm counts its two affine
/// vectors; ReLU/Add/Concat/none are free. The spatial size starts from a
/// `resolution` attr (innermost enclosing node wins, default 1) and is
/// divided by each operator's stride. Throws DescError on unknown operator
/// types.
CostEstimate estimate_cost(const ModelDescription& desc);

}  // namespace vega
