#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hrm/delay_model.hpp"
#include "hrm/tree.hpp"

namespace hrm {

/// Thrown when an exhaustive search would examine more candidate subsets
/// than the caller allowed. subsets_needed() saturates at budget() + 1 when
/// the true count is larger still.
class EnumerationBudgetError : public std::runtime_error {
 public:
  EnumerationBudgetError(std::uint64_t needed, std::uint64_t budget);
  std::uint64_t subsets_needed() const { return needed_; }
  std::uint64_t budget() const { return budget_; }

 private:
  std::uint64_t needed_ = 0;
  std::uint64_t budget_ = 0;
};

struct ExactResult {
  Placement placement;
  double makespan_ms = 0.0;
  int worst_leaf = -1;
  std::uint64_t subsets_examined = 0;
};

constexpr std::uint64_t kDefaultSubsetBudget = 10'000'000;

/// Exhaustive optimum: examines every (k-1)-subset of the internal non-root
/// nodes (the root always serves) in lexicographic order and keeps the first
/// strictly best placement, so ties resolve to the lexicographically
/// smallest server set. Throws std::invalid_argument if k < 1 or k - 1
/// exceeds the candidate count, and EnumerationBudgetError if the subset
/// count exceeds subset_budget.
ExactResult exact_optimal(const TreeIndex& index, int k, const DelayParams& params,
                          std::uint64_t subset_budget = kDefaultSubsetBudget);

/// One routing decision: `source` (a non-root server or a leaf) obtains
/// repairs from `target`, its nearest placed strict ancestor.
struct AssignmentPair {
  int source = -1;
  int target = -1;
};

/// The assignment forced by a placement: every non-root server and every
/// leaf is paired with its nearest placed strict ancestor. Sorted by source.
std::vector<AssignmentPair> induced_assignment(const TreeIndex& index,
                                               const Placement& placement);

/// Delay-bound comparison used by the constraint checker and the minimum
/// server search, with a small relative slack against rounding.
inline bool bound_satisfied(double value_ms, double bound_ms) {
  const double slack = 1e-9 * (bound_ms > 1.0 ? bound_ms : 1.0);
  return value_ms <= bound_ms + slack;
}

struct ConstraintReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Validates a placement/assignment pair against the feasibility rules of
/// the server-placement problem:
///   - exactly k servers are placed, the root among them;
///   - there is one pair per non-root server and per leaf (k + m - 1 pairs
///     for m leaves), no source appearing twice;
///   - every target is a placed server, every source a placed server or a
///     leaf, never the root;
///   - each target is a strict ancestor of its source with no other placed
///     server strictly between the two;
///   - following the pairs from each leaf reaches the root, and the summed
///     expected segment delays stay within bound_ms (bound_satisfied slack).
ConstraintReport check_constraints(const TreeIndex& index, const Placement& placement,
                                   int k, const std::vector<AssignmentPair>& pairs,
                                   double bound_ms, const DelayParams& params);

/// Independent cross-check of exact_optimal: enumerates the same subsets but
/// scores each one through its induced assignment, summing expected segment
/// delays pair by pair from each leaf to the root (no path-splitting code
/// shared with the delay model). Selection order and tie handling mirror
/// exact_optimal exactly.
ExactResult optimal_by_constraint_enumeration(
    const TreeIndex& index, int k, const DelayParams& params,
    std::uint64_t subset_budget = kDefaultSubsetBudget);

struct MinServersResult {
  int k = 0;
  Placement placement;
  double makespan_ms = 0.0;
};

enum class MinServersMode { exact, long_path };

/// Smallest number of servers whose best placement meets the delay bound.
/// Mode exact first checks feasibility with every candidate placed (more
/// servers never increase any leaf delay) and then scans k upward with
/// exact_optimal; mode long_path scans k upward with the longest-path
/// strategy and stops once it saturates. Returns std::nullopt when even the
/// densest placement misses the bound.
std::optional<MinServersResult> min_servers(
    const TreeIndex& index, double bound_ms, MinServersMode mode,
    const DelayParams& params, std::uint64_t subset_budget = kDefaultSubsetBudget);

}  // namespace hrm
