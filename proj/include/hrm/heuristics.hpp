#pragma once

#include <cstdint>
#include <string>

#include "hrm/delay_model.hpp"
#include "hrm/tree.hpp"

namespace hrm {

/// Outcome of a placement strategy. achieved_k is the number of servers
/// actually placed (root included); it falls short of the requested k only
/// when the tree has too few internal nodes, or, for the longest-path
/// strategy, when every root-to-leaf path is already fully covered.
struct HeuristicResult {
  Placement placement;
  int requested_k = 0;
  int achieved_k = 0;
  double makespan_ms = 0.0;
  int worst_leaf = -1;
};

/// Uniform-random choice of k-1 distinct internal nodes (the root is always
/// a server and counts toward k). Selections are prefix-stable in k: for a
/// fixed seed, the set chosen for k is a subset of the set chosen for k+1.
HeuristicResult place_random(const TreeIndex& index, int k, std::uint64_t seed,
                             const DelayParams& params);

/// Greedy by link cost: each internal node is scored with the largest
/// expected single-link delivery delay among its outbound links, and the
/// k-1 highest-scoring nodes are placed (ties to the lower id).
HeuristicResult place_max_delay(const TreeIndex& index, int k,
                                const DelayParams& params);

/// Greedy by fan-out: the k-1 internal nodes with the most children are
/// placed (ties to the lower id).
HeuristicResult place_max_degree(const TreeIndex& index, int k,
                                 const DelayParams& params);

/// Iterative longest-path strategy. Each round recomputes all leaf delays
/// under the current placement, takes the leaf with the largest expected
/// delay (ties to the lower leaf id), and places a server on that leaf's
/// path at the unplaced internal node whose on-path outbound link has the
/// largest expected single-link delivery delay (ties to the lower id). If
/// the worst path has no unplaced internal node left, the next-worst path
/// is tried; the loop stops early when no path has one.
HeuristicResult place_long_path(const TreeIndex& index, int k,
                                const DelayParams& params);

/// Strategy names accepted by the command-line tool: "random", "max_delay",
/// "max_degree", "long_path". Throws std::invalid_argument for anything else.
enum class Strategy { random, max_delay, max_degree, long_path };
Strategy parse_strategy(const std::string& name);
std::string strategy_name(Strategy strategy);

/// Dispatches on `strategy`; `seed` is consulted only for Strategy::random.
HeuristicResult place(const TreeIndex& index, Strategy strategy, int k,
                      std::uint64_t seed, const DelayParams& params);

}  // namespace hrm
