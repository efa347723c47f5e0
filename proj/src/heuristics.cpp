#include "hrm/heuristics.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hrm/rng.hpp"

namespace hrm {

namespace {

void require_k(int k) {
  if (k < 1) {
    throw std::invalid_argument("k must be at least 1 (the sender is a server)");
  }
}

HeuristicResult finish(const TreeIndex& index, int requested_k,
                       std::vector<int> servers, const DelayParams& params) {
  HeuristicResult result;
  result.placement = make_placement(index, std::move(servers));
  result.requested_k = requested_k;
  result.achieved_k = result.placement.k();
  const MakespanResult m = makespan(index, result.placement, params);
  result.makespan_ms = m.makespan_ms;
  result.worst_leaf = m.worst_leaf;
  return result;
}

/// Selects the first `want` highest-scoring candidates. Candidates arrive in
/// ascending id order, so a stable sort by descending score breaks ties
/// toward the lower id.
std::vector<int> top_by_score(const std::vector<int>& candidates,
                              const std::vector<double>& scores, int want) {
  std::vector<int> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = static_cast<int>(i);
  }
  std::stable_sort(order.begin(), order.end(), [&scores](int a, int b) {
    return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
  });
  const int take = std::min<int>(want, static_cast<int>(candidates.size()));
  std::vector<int> chosen;
  chosen.reserve(static_cast<std::size_t>(take));
  for (int i = 0; i < take; ++i) {
    chosen.push_back(candidates[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
  }
  return chosen;
}

}  // namespace

HeuristicResult place_random(const TreeIndex& index, int k, std::uint64_t seed,
                             const DelayParams& params) {
  require_k(k);
  std::vector<int> pool = placement_candidates(index);
  SplitMix64 rng(seed);
  const std::size_t take =
      std::min<std::size_t>(static_cast<std::size_t>(k - 1), pool.size());
  // Partial Fisher-Yates: position i receives a uniform pick from the not
  // yet selected tail. The i-th draw does not depend on `take`, so a larger
  // k extends the selection instead of reshuffling it.
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(pool.size() - i)));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(take);
  return finish(index, k, std::move(pool), params);
}

HeuristicResult place_max_delay(const TreeIndex& index, int k,
                                const DelayParams& params) {
  require_k(k);
  const std::vector<int> candidates = placement_candidates(index);
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (int v : candidates) {
    double worst = 0.0;
    for (int child : index.children(v)) {
      worst = std::max(worst, edge_expected_delay(index.in_edge(child), params));
    }
    scores.push_back(worst);
  }
  return finish(index, k, top_by_score(candidates, scores, k - 1), params);
}

HeuristicResult place_max_degree(const TreeIndex& index, int k,
                                 const DelayParams& params) {
  require_k(k);
  const std::vector<int> candidates = placement_candidates(index);
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (int v : candidates) {
    scores.push_back(static_cast<double>(index.children(v).size()));
  }
  return finish(index, k, top_by_score(candidates, scores, k - 1), params);
}

namespace {

/// Picks the unplaced internal node on `path` whose on-path outbound link
/// has the largest expected single-link delay; -1 if every internal node on
/// the path is already placed.
int best_unplaced_on_path(const TreeIndex& index, const Placement& placement,
                          const std::vector<int>& path, const DelayParams& params) {
  int best = -1;
  double best_score = 0.0;
  for (std::size_t i = 1; i + 1 < path.size(); ++i) {
    const int v = path[i];
    if (placement.contains(v)) {
      continue;
    }
    const double score = edge_expected_delay(index.in_edge(path[i + 1]), params);
    if (best < 0 || score > best_score || (score == best_score && v < best)) {
      best = v;
      best_score = score;
    }
  }
  return best;
}

}  // namespace

HeuristicResult place_long_path(const TreeIndex& index, int k,
                                const DelayParams& params) {
  require_k(k);
  Placement placement = make_placement(index, {});
  const std::vector<int>& leaves = index.leaves();
  while (placement.k() < k) {
    std::vector<std::pair<double, int>> ranked;
    ranked.reserve(leaves.size());
    for (int leaf : leaves) {
      ranked.emplace_back(leaf_expected_delay(index, placement, leaf, params), leaf);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    int chosen = -1;
    for (const auto& [delay, leaf] : ranked) {
      (void)delay;
      chosen = best_unplaced_on_path(index, placement, index.path_from_root(leaf), params);
      if (chosen >= 0) {
        break;
      }
    }
    if (chosen < 0) {
      break;  // every root-to-leaf path is fully covered
    }
    std::vector<int> servers = placement.servers;
    servers.push_back(chosen);
    placement = make_placement(index, std::move(servers));
  }
  return finish(index, k, placement.servers, params);
}

Strategy parse_strategy(const std::string& name) {
  if (name == "random") return Strategy::random;
  if (name == "max_delay") return Strategy::max_delay;
  if (name == "max_degree") return Strategy::max_degree;
  if (name == "long_path") return Strategy::long_path;
  throw std::invalid_argument("unknown strategy: " + name);
}

std::string strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::random: return "random";
    case Strategy::max_delay: return "max_delay";
    case Strategy::max_degree: return "max_degree";
    case Strategy::long_path: return "long_path";
  }
  throw std::invalid_argument("unknown strategy value");
}

HeuristicResult place(const TreeIndex& index, Strategy strategy, int k,
                      std::uint64_t seed, const DelayParams& params) {
  switch (strategy) {
    case Strategy::random: return place_random(index, k, seed, params);
    case Strategy::max_delay: return place_max_delay(index, k, params);
    case Strategy::max_degree: return place_max_degree(index, k, params);
    case Strategy::long_path: return place_long_path(index, k, params);
  }
  throw std::invalid_argument("unknown strategy value");
}

}  // namespace hrm
