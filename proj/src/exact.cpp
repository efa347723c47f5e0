#include "hrm/exact.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

#include "hrm/heuristics.hpp"
#include "hrm/text.hpp"

namespace hrm {

namespace {

std::uint64_t count_subsets_saturated(int n, int r, std::uint64_t cap) {
  // Partial binomials C(n-r+i, i) are integers and non-decreasing in i, so
  // the running product can bail out as soon as it clears the cap.
  unsigned __int128 acc = 1;
  for (int i = 1; i <= r; ++i) {
    acc = acc * static_cast<unsigned __int128>(n - r + i) /
          static_cast<unsigned __int128>(i);
    if (acc > cap) {
      return cap + 1;
    }
  }
  return static_cast<std::uint64_t>(acc);
}

void require_k_feasible(int k, std::size_t candidate_count) {
  if (k < 1) {
    throw std::invalid_argument("k must be at least 1 (the sender is a server)");
  }
  if (static_cast<std::size_t>(k - 1) > candidate_count) {
    throw std::invalid_argument(
        "k-1 = " + std::to_string(k - 1) + " exceeds the " +
        std::to_string(candidate_count) + " internal non-root nodes available");
  }
}

/// Calls fn(chosen) for every r-subset of candidates in lexicographic order.
template <typename Fn>
void for_each_subset(const std::vector<int>& candidates, int r, Fn&& fn) {
  std::vector<int> idx(static_cast<std::size_t>(r));
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<int> chosen(static_cast<std::size_t>(r));
  const int c = static_cast<int>(candidates.size());
  while (true) {
    for (int i = 0; i < r; ++i) {
      chosen[static_cast<std::size_t>(i)] =
          candidates[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
    }
    fn(chosen);
    int i = r - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == c - r + i) {
      --i;
    }
    if (i < 0) {
      break;
    }
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < r; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

/// Per-leaf path table for the enumeration hot loop: nodes after the root
/// with their incoming link delay and delivery probability.
struct LeafTable {
  std::vector<int> nodes;
  std::vector<double> delay;
  std::vector<double> keep;
};

std::vector<LeafTable> build_leaf_tables(const TreeIndex& index) {
  std::vector<LeafTable> tables;
  tables.reserve(index.leaves().size());
  for (int leaf : index.leaves()) {
    LeafTable table;
    const std::vector<int> path = index.path_from_root(leaf);
    for (std::size_t i = 1; i < path.size(); ++i) {
      const Edge& e = index.in_edge(path[i]);
      table.nodes.push_back(path[i]);
      table.delay.push_back(e.delay_ms);
      table.keep.push_back(1.0 - e.loss);
    }
    tables.push_back(std::move(table));
  }
  return tables;
}

double tables_makespan(const std::vector<LeafTable>& tables,
                       const std::vector<std::uint8_t>& placed, double t_ms) {
  double worst = -1.0;
  for (const LeafTable& table : tables) {
    double total = 0.0;
    double length = 0.0;
    double success = 1.0;
    const std::size_t n = table.nodes.size();
    for (std::size_t i = 0; i < n; ++i) {
      length += table.delay[i];
      success *= table.keep[i];
      if (placed[static_cast<std::size_t>(table.nodes[i])] || i + 1 == n) {
        total += run_expected_delay(length, success, t_ms);
        length = 0.0;
        success = 1.0;
      }
    }
    if (total > worst) {
      worst = total;
    }
  }
  return worst;
}

int nearest_placed_ancestor(const TreeIndex& index, const Placement& placement,
                            int v) {
  int p = index.parent(v);
  while (p != Tree::kRoot && !placement.contains(p)) {
    p = index.parent(p);
  }
  return p;
}

/// Expected delivery delay across the links from strict ancestor `top` down
/// to `bottom`, treated as one repair segment.
double span_expected_delay(const TreeIndex& index, int top, int bottom,
                           double t_ms) {
  double length = 0.0;
  double success = 1.0;
  for (int cur = bottom; cur != top; cur = index.parent(cur)) {
    const Edge& e = index.in_edge(cur);
    length += e.delay_ms;
    success *= 1.0 - e.loss;
  }
  return run_expected_delay(length, success, t_ms);
}

}  // namespace

EnumerationBudgetError::EnumerationBudgetError(std::uint64_t needed,
                                               std::uint64_t budget)
    : std::runtime_error("exhaustive placement search needs " +
                         (needed > budget ? std::string("more than ") +
                                                std::to_string(budget)
                                          : std::to_string(needed)) +
                         " candidate subsets; budget is " + std::to_string(budget)),
      needed_(needed),
      budget_(budget) {}

ExactResult exact_optimal(const TreeIndex& index, int k, const DelayParams& params,
                          std::uint64_t subset_budget) {
  const std::vector<int> candidates = placement_candidates(index);
  require_k_feasible(k, candidates.size());
  const int r = k - 1;
  const std::uint64_t needed =
      count_subsets_saturated(static_cast<int>(candidates.size()), r, subset_budget);
  if (needed > subset_budget) {
    throw EnumerationBudgetError(needed, subset_budget);
  }

  const std::vector<LeafTable> tables = build_leaf_tables(index);
  std::vector<std::uint8_t> placed(static_cast<std::size_t>(index.node_count()), 0);
  placed[Tree::kRoot] = 1;

  std::vector<int> best;
  double best_ms = 0.0;
  std::uint64_t examined = 0;
  bool have_best = false;
  for_each_subset(candidates, r, [&](const std::vector<int>& chosen) {
    for (int v : chosen) placed[static_cast<std::size_t>(v)] = 1;
    const double ms = tables_makespan(tables, placed, params.t_ms);
    for (int v : chosen) placed[static_cast<std::size_t>(v)] = 0;
    ++examined;
    if (!have_best || ms < best_ms) {
      have_best = true;
      best_ms = ms;
      best = chosen;
    }
  });

  ExactResult result;
  result.placement = make_placement(index, std::move(best));
  const MakespanResult m = makespan(index, result.placement, params);
  result.makespan_ms = m.makespan_ms;
  result.worst_leaf = m.worst_leaf;
  result.subsets_examined = examined;
  return result;
}

std::vector<AssignmentPair> induced_assignment(const TreeIndex& index,
                                               const Placement& placement) {
  std::vector<AssignmentPair> pairs;
  for (int v : placement.servers) {
    if (v != Tree::kRoot) {
      pairs.push_back(AssignmentPair{v, nearest_placed_ancestor(index, placement, v)});
    }
  }
  for (int leaf : index.leaves()) {
    pairs.push_back(
        AssignmentPair{leaf, nearest_placed_ancestor(index, placement, leaf)});
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const AssignmentPair& a, const AssignmentPair& b) {
              return a.source < b.source;
            });
  return pairs;
}

ConstraintReport check_constraints(const TreeIndex& index, const Placement& placement,
                                   int k, const std::vector<AssignmentPair>& pairs,
                                   double bound_ms, const DelayParams& params) {
  ConstraintReport report;
  auto add = [&report](std::string msg) { report.violations.push_back(std::move(msg)); };
  const int n = index.node_count();
  const std::vector<int>& leaves = index.leaves();

  if (placement.k() != k) {
    add("placement has " + std::to_string(placement.k()) + " servers, expected k = " +
        std::to_string(k));
  }
  if (!placement.contains(Tree::kRoot)) {
    add("the root is not placed");
  }
  bool placement_valid = true;
  for (int v : placement.servers) {
    if (v < 0 || v >= n) {
      add("placed node " + std::to_string(v) + " is out of range");
      placement_valid = false;
    } else if (index.is_leaf(v)) {
      add("placed node " + std::to_string(v) + " is a leaf");
    }
  }

  const std::size_t expected_pairs =
      static_cast<std::size_t>(k - 1) + leaves.size();
  if (pairs.size() != expected_pairs) {
    add("assignment has " + std::to_string(pairs.size()) + " pairs, expected k+m-1 = " +
        std::to_string(expected_pairs));
  }

  std::vector<std::uint8_t> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> target_of(static_cast<std::size_t>(n), -1);
  for (const AssignmentPair& pair : pairs) {
    if (pair.source < 0 || pair.source >= n || pair.target < 0 || pair.target >= n) {
      add("assignment pair (" + std::to_string(pair.source) + ", " +
          std::to_string(pair.target) + ") references a node out of range");
      continue;
    }
    if (seen[static_cast<std::size_t>(pair.source)]) {
      add("source " + std::to_string(pair.source) + " is assigned twice");
      continue;
    }
    seen[static_cast<std::size_t>(pair.source)] = 1;
    target_of[static_cast<std::size_t>(pair.source)] = pair.target;

    if (pair.source == Tree::kRoot) {
      add("the root cannot be a source");
      continue;
    }
    if (!index.is_leaf(pair.source) && !placement.contains(pair.source)) {
      add("source " + std::to_string(pair.source) +
          " is neither a placed server nor a leaf");
    }
    if (!placement.contains(pair.target)) {
      add("target " + std::to_string(pair.target) + " is not a placed server");
      continue;
    }
    if (!index.is_ancestor(pair.target, pair.source)) {
      add("target " + std::to_string(pair.target) +
          " is not a strict ancestor of source " + std::to_string(pair.source));
      continue;
    }
    for (int p = index.parent(pair.source); p != pair.target; p = index.parent(p)) {
      if (placement.contains(p)) {
        add("placed server " + std::to_string(p) + " lies strictly between target " +
            std::to_string(pair.target) + " and source " + std::to_string(pair.source));
        break;
      }
    }
  }
  if (placement_valid) {
    for (int v : placement.servers) {
      if (v != Tree::kRoot && !seen[static_cast<std::size_t>(v)]) {
        add("placed server " + std::to_string(v) + " has no assignment pair");
      }
    }
  }
  for (int leaf : leaves) {
    if (!seen[static_cast<std::size_t>(leaf)]) {
      add("leaf " + std::to_string(leaf) + " has no assignment pair");
    }
  }

  for (int leaf : leaves) {
    double total = 0.0;
    int cur = leaf;
    int steps = 0;
    bool broken = false;
    while (cur != Tree::kRoot) {
      const int t = target_of[static_cast<std::size_t>(cur)];
      if (t < 0 || !index.is_ancestor(t, cur)) {
        add("leaf " + std::to_string(leaf) +
            ": assignment chain does not reach the root");
        broken = true;
        break;
      }
      total += span_expected_delay(index, t, cur, params.t_ms);
      cur = t;
      if (++steps > n) {
        add("leaf " + std::to_string(leaf) + ": assignment chain cycles");
        broken = true;
        break;
      }
    }
    if (!broken && !bound_satisfied(total, bound_ms)) {
      add("leaf " + std::to_string(leaf) + " expected delay " + format_g6(total) +
          " ms exceeds bound " + format_g6(bound_ms) + " ms");
    }
  }
  return report;
}

ExactResult optimal_by_constraint_enumeration(const TreeIndex& index, int k,
                                              const DelayParams& params,
                                              std::uint64_t subset_budget) {
  const std::vector<int> candidates = placement_candidates(index);
  require_k_feasible(k, candidates.size());
  const int r = k - 1;
  const std::uint64_t needed =
      count_subsets_saturated(static_cast<int>(candidates.size()), r, subset_budget);
  if (needed > subset_budget) {
    throw EnumerationBudgetError(needed, subset_budget);
  }

  const int n = index.node_count();
  std::vector<int> best;
  double best_ms = 0.0;
  std::uint64_t examined = 0;
  bool have_best = false;
  for_each_subset(candidates, r, [&](const std::vector<int>& chosen) {
    const Placement placement = make_placement(index, chosen);
    const std::vector<AssignmentPair> pairs = induced_assignment(index, placement);
    std::vector<int> target_of(static_cast<std::size_t>(n), -1);
    std::vector<double> pair_delay(static_cast<std::size_t>(n), 0.0);
    for (const AssignmentPair& pair : pairs) {
      target_of[static_cast<std::size_t>(pair.source)] = pair.target;
      pair_delay[static_cast<std::size_t>(pair.source)] =
          span_expected_delay(index, pair.target, pair.source, params.t_ms);
    }
    double worst = -1.0;
    for (int leaf : index.leaves()) {
      double total = 0.0;
      for (int cur = leaf; cur != Tree::kRoot;
           cur = target_of[static_cast<std::size_t>(cur)]) {
        total += pair_delay[static_cast<std::size_t>(cur)];
      }
      if (total > worst) {
        worst = total;
      }
    }
    ++examined;
    if (!have_best || worst < best_ms) {
      have_best = true;
      best_ms = worst;
      best = chosen;
    }
  });

  ExactResult result;
  result.placement = make_placement(index, std::move(best));
  const MakespanResult m = makespan(index, result.placement, params);
  result.makespan_ms = m.makespan_ms;
  result.worst_leaf = m.worst_leaf;
  result.subsets_examined = examined;
  return result;
}

std::optional<MinServersResult> min_servers(const TreeIndex& index, double bound_ms,
                                            MinServersMode mode,
                                            const DelayParams& params,
                                            std::uint64_t subset_budget) {
  const std::vector<int> candidates = placement_candidates(index);
  const int max_k = static_cast<int>(candidates.size()) + 1;
  if (mode == MinServersMode::exact) {
    // Adding a server never increases any leaf delay, so the all-candidates
    // placement is the feasibility frontier.
    const Placement densest = make_placement(index, candidates);
    if (!bound_satisfied(makespan(index, densest, params).makespan_ms, bound_ms)) {
      return std::nullopt;
    }
    for (int k = 1; k <= max_k; ++k) {
      const ExactResult r = exact_optimal(index, k, params, subset_budget);
      if (bound_satisfied(r.makespan_ms, bound_ms)) {
        return MinServersResult{r.placement.k(), r.placement, r.makespan_ms};
      }
    }
    return std::nullopt;  // unreachable: k = max_k places every candidate
  }
  for (int k = 1; k <= max_k; ++k) {
    const HeuristicResult r = place_long_path(index, k, params);
    if (bound_satisfied(r.makespan_ms, bound_ms)) {
      return MinServersResult{r.placement.k(), r.placement, r.makespan_ms};
    }
    if (r.achieved_k < k) {
      break;  // saturated: larger k cannot change the placement
    }
  }
  return std::nullopt;
}

}  // namespace hrm
