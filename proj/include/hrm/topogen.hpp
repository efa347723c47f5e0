#pragma once

#include <cstdint>

#include "hrm/tree.hpp"

namespace hrm {

/// Parameters for random tree generation. Delays are drawn uniformly from
/// [delay_min_ms, delay_max_ms) and losses from [loss_min, loss_max).
struct GenConfig {
  int nodes = 100;
  double delay_min_ms = 10.0;
  double delay_max_ms = 40.0;
  double loss_min = 0.0;
  double loss_max = 0.1;
  int max_children = 4;
};

/// Throws std::invalid_argument if the configuration cannot describe a valid
/// tree (fewer than two nodes, non-positive delays, inverted ranges, losses
/// outside [0, 1), or max_children below one).
void validate_config(const GenConfig& config);

/// Generates a rooted delay/loss tree by uniform attachment, reproducibly
/// from `seed`.
///
/// Nodes are created in id order. For each node i = 1 .. nodes-1, exactly
/// three values are drawn from one SplitMix64 stream seeded with `seed`, in
/// this order:
///   1. the parent: a uniform pick (rejection-sampled 64-bit draw) over the
///      ascending list of nodes j < i that still have fewer than
///      max_children children,
///   2. the link delay: a uniform real in [delay_min_ms, delay_max_ms),
///   3. the link loss: a uniform real in [loss_min, loss_max).
/// This draw order is a compatibility contract: a reimplementation that
/// follows it (and the SplitMix64 core in rng.hpp) reproduces identical
/// trees byte for byte.
Tree generate_tree(const GenConfig& config, std::uint64_t seed);

}  // namespace hrm
