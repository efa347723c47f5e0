#include "hrm/delay_model.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace hrm {

namespace {

void aggregate(const std::vector<Edge>& edges, double& length_ms, double& success) {
  length_ms = 0.0;
  success = 1.0;
  for (const Edge& e : edges) {
    length_ms += e.delay_ms;
    success *= 1.0 - e.loss;
  }
}

void require_usable(const Segment& segment, double success) {
  if (segment.edges.empty()) {
    throw std::invalid_argument("segment has no links");
  }
  if (success <= 0.0) {
    throw std::invalid_argument("segment success probability is zero");
  }
}

}  // namespace

bool Placement::contains(int v) const {
  return std::binary_search(servers.begin(), servers.end(), v);
}

Placement make_placement(const TreeIndex& index, std::vector<int> servers) {
  servers.push_back(Tree::kRoot);
  std::sort(servers.begin(), servers.end());
  servers.erase(std::unique(servers.begin(), servers.end()), servers.end());
  for (int v : servers) {
    if (v < 0 || v >= index.node_count()) {
      throw std::invalid_argument("server id out of range: " + std::to_string(v));
    }
    if (index.is_leaf(v)) {
      throw std::invalid_argument("node " + std::to_string(v) +
                                  " is a leaf and cannot host a repair server");
    }
  }
  return Placement{std::move(servers)};
}

std::vector<int> placement_candidates(const TreeIndex& index) {
  std::vector<int> out;
  for (int v = 1; v < index.node_count(); ++v) {
    if (!index.is_leaf(v)) {
      out.push_back(v);
    }
  }
  return out;
}

double expected_interarrival(const Segment& segment, const DelayParams& params) {
  double length = 0.0;
  double success = 1.0;
  aggregate(segment.edges, length, success);
  require_usable(segment, success);
  return run_expected_interarrival(length, success, params.t_ms);
}

double segment_expected_delay(const Segment& segment, const DelayParams& params) {
  double length = 0.0;
  double success = 1.0;
  aggregate(segment.edges, length, success);
  require_usable(segment, success);
  return run_expected_delay(length, success, params.t_ms);
}

double edge_expected_delay(const Edge& edge, const DelayParams& params) {
  Segment s;
  s.from = edge.parent;
  s.to = edge.child;
  s.edges.push_back(edge);
  return segment_expected_delay(s, params);
}

std::vector<Segment> leaf_segments(const TreeIndex& index, const Placement& placement,
                                   int leaf) {
  if (!index.is_leaf(leaf)) {
    throw std::invalid_argument("node " + std::to_string(leaf) + " is not a leaf");
  }
  const std::vector<int> path = index.path_from_root(leaf);
  std::vector<Segment> segments;
  Segment current;
  current.from = Tree::kRoot;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const int node = path[i];
    current.edges.push_back(index.in_edge(node));
    if (placement.contains(node) || node == leaf) {
      current.to = node;
      segments.push_back(std::move(current));
      current = Segment{};
      current.from = node;
    }
  }
  return segments;
}

double leaf_expected_delay(const TreeIndex& index, const Placement& placement,
                           int leaf, const DelayParams& params) {
  double total = 0.0;
  for (const Segment& segment : leaf_segments(index, placement, leaf)) {
    total += segment_expected_delay(segment, params);
  }
  return total;
}

MakespanResult makespan(const TreeIndex& index, const Placement& placement,
                        const DelayParams& params) {
  const std::vector<int>& leaves = index.leaves();
  if (leaves.empty()) {
    throw std::invalid_argument("tree has no leaves");
  }
  MakespanResult result;
  for (int leaf : leaves) {
    const double d = leaf_expected_delay(index, placement, leaf, params);
    if (result.worst_leaf < 0 || d > result.makespan_ms) {
      result.makespan_ms = d;
      result.worst_leaf = leaf;
    }
  }
  return result;
}

}  // namespace hrm
