#include "hrm/topogen.hpp"

#include <stdexcept>
#include <vector>

#include "hrm/rng.hpp"

namespace hrm {

void validate_config(const GenConfig& config) {
  if (config.nodes < 2) {
    throw std::invalid_argument("nodes must be at least 2");
  }
  if (config.delay_min_ms <= 0.0) {
    throw std::invalid_argument("delay_min_ms must be positive");
  }
  if (config.delay_max_ms < config.delay_min_ms) {
    throw std::invalid_argument("delay_max_ms must be >= delay_min_ms");
  }
  if (config.loss_min < 0.0 || config.loss_max < config.loss_min ||
      config.loss_max >= 1.0) {
    throw std::invalid_argument("loss range must satisfy 0 <= loss_min <= loss_max < 1");
  }
  if (config.max_children < 1) {
    throw std::invalid_argument("max_children must be at least 1");
  }
}

Tree generate_tree(const GenConfig& config, std::uint64_t seed) {
  validate_config(config);
  SplitMix64 rng(seed);
  Tree tree;
  tree.node_count = config.nodes;
  std::vector<int> child_count(static_cast<std::size_t>(config.nodes), 0);
  std::vector<int> eligible;
  for (int i = 1; i < config.nodes; ++i) {
    eligible.clear();
    for (int j = 0; j < i; ++j) {
      if (child_count[static_cast<std::size_t>(j)] < config.max_children) {
        eligible.push_back(j);
      }
    }
    const std::uint64_t pick = rng.next_below(static_cast<std::uint64_t>(eligible.size()));
    const int parent = eligible[static_cast<std::size_t>(pick)];
    Edge edge;
    edge.parent = parent;
    edge.child = i;
    edge.delay_ms = rng.next_real(config.delay_min_ms, config.delay_max_ms);
    edge.loss = rng.next_real(config.loss_min, config.loss_max);
    tree.edges.push_back(edge);
    ++child_count[static_cast<std::size_t>(parent)];
  }
  return tree;
}

}  // namespace hrm
