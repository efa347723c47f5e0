#pragma once

#include <vector>

#include "hrm/tree.hpp"

namespace hrm {

/// Global model parameters. t_ms is the sending (and retransmission)
/// interval, i.e. the reciprocal of the sending rate. The default corresponds
/// to 1000-byte packets at 500 kb/s.
struct DelayParams {
  double t_ms = 16.0;
};

/// A maximal run of consecutive links between two repair points on a
/// root-to-leaf path: it starts at a repair server and ends at the next
/// repair server below it, or at the leaf.
struct Segment {
  int from = -1;
  int to = -1;
  std::vector<Edge> edges;
};

/// A repair-server set. Invariants (established by make_placement): sorted
/// ascending, unique, contains the root, contains no leaf. The sender always
/// acts as a repair server, so k() counts it.
struct Placement {
  std::vector<int> servers;
  int k() const { return static_cast<int>(servers.size()); }
  bool contains(int v) const;
};

/// Normalizes and checks a server list: sorts, removes duplicates, inserts
/// the root if absent, and throws std::invalid_argument for ids out of range
/// or leaves (receivers cannot act as repair servers).
Placement make_placement(const TreeIndex& index, std::vector<int> servers);

/// Nodes eligible to be chosen as repair servers besides the root: internal
/// (at least one child) and non-root. Ascending order.
std::vector<int> placement_candidates(const TreeIndex& index);

/// Closed forms on an aggregated run of links, where length_ms is the summed
/// delay and success the product of per-link delivery probabilities. With
/// f = (1 - success) / success:
///   expected inter-arrival  N = f * t + L
///   expected delivery delay D = L + f * N = L * (1 + f) + f^2 * t
/// Every run delay in this project funnels through these two helpers so that
/// all call sites agree bit for bit.
inline double run_expected_interarrival(double length_ms, double success, double t_ms) {
  const double f = (1.0 - success) / success;
  return f * t_ms + length_ms;
}
inline double run_expected_delay(double length_ms, double success, double t_ms) {
  const double f = (1.0 - success) / success;
  return length_ms * (1.0 + f) + f * f * t_ms;
}

/// Expected time between consecutive successfully delivered packets across a
/// segment. Requires a non-empty segment with all losses < 1.
double expected_interarrival(const Segment& segment, const DelayParams& params);

/// Expected delivery delay of one packet across a segment, accounting for
/// loss detection and retransmission from the segment head.
double segment_expected_delay(const Segment& segment, const DelayParams& params);

/// segment_expected_delay of the single-link segment consisting of `edge`.
double edge_expected_delay(const Edge& edge, const DelayParams& params);

/// Splits the root->leaf path at the placed servers that lie on it. Segments
/// appear root-first; servers not on the path play no role. Throws
/// std::invalid_argument if `leaf` is not a leaf.
std::vector<Segment> leaf_segments(const TreeIndex& index, const Placement& placement,
                                   int leaf);

/// Expected delivery delay to a leaf: the sum of its segments' expected
/// delays (each repair server forwards a packet only once it holds it).
double leaf_expected_delay(const TreeIndex& index, const Placement& placement,
                           int leaf, const DelayParams& params);

struct MakespanResult {
  double makespan_ms = 0.0;
  int worst_leaf = -1;
};

/// Maximum leaf_expected_delay over all leaves; ties resolve to the lowest
/// leaf id. Throws std::invalid_argument if the tree has no leaves.
MakespanResult makespan(const TreeIndex& index, const Placement& placement,
                        const DelayParams& params);

}  // namespace hrm
