#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace hrm {

/// One directed link of the control tree, oriented parent -> child.
struct Edge {
  int parent = -1;
  int child = -1;
  double delay_ms = 0.0;  ///< one-way propagation delay, strictly positive
  double loss = 0.0;      ///< independent loss probability, in [0, 1)
};

/// Rooted control tree. Node ids are 0..node_count-1 and node 0 is always the
/// sender. This is plain data with no invariants enforced at construction;
/// use validate_tree() to check a tree of unknown provenance, or TreeIndex
/// (which validates on construction) for queries. Trees are treated as
/// immutable once built.
struct Tree {
  static constexpr int kRoot = 0;
  int node_count = 0;
  std::vector<Edge> edges;
};

/// A root-to-leaf path: nodes.front() is the root, nodes.back() the leaf, and
/// edges[i] connects nodes[i] -> nodes[i+1].
struct Path {
  int leaf = -1;
  std::vector<int> nodes;
  std::vector<Edge> edges;
};

/// Outcome of validate_tree(). Violations are data, not exceptions, so that
/// callers can report all problems at once.
struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Thrown by the parser; the offending 1-based line number is part of the
/// message (0 means the problem is not tied to a single line).
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Checks structural soundness (edge count, unique parents, reachability from
/// the root) and attribute ranges (delay > 0, loss in [0, 1)).
ValidationReport validate_tree(const Tree& tree);

/// Parses the line-oriented text format:
///   line 1: magic "hrmtree v1"
///   line 2: node_count
///   then node_count-1 lines "<parent> <child> <delay_ms> <loss>"
/// Blank lines and lines whose first non-blank character is '#' are skipped.
/// Throws ParseError (with line number) on malformed or invalid input.
Tree parse_tree(std::istream& in);
Tree parse_tree(const std::string& text);
Tree load_tree_file(const std::string& path);

/// Canonical text form: edges sorted by (parent, child), reals printed with
/// 6 significant digits. serialize(parse(serialize(t))) == serialize(t).
std::string serialize_tree(const Tree& tree);

/// Read-only adjacency and ancestry queries over a valid tree. The
/// constructor copies what it needs, validates, and throws
/// std::invalid_argument (with the first violation) if the tree is broken.
class TreeIndex {
 public:
  explicit TreeIndex(const Tree& tree);

  int node_count() const { return node_count_; }
  /// Parent id, or -1 for the root.
  int parent(int v) const { return parent_[v]; }
  /// The unique edge entering `child`; child must not be the root.
  const Edge& in_edge(int child) const { return in_edge_[child]; }
  const std::vector<int>& children(int v) const { return children_[v]; }
  /// A leaf is a non-root node with no children (the root is the sender and
  /// never counts as a receiver).
  bool is_leaf(int v) const { return children_[v].empty() && v != Tree::kRoot; }
  /// Leaf ids in ascending order.
  const std::vector<int>& leaves() const { return leaves_; }
  int leaf_count() const { return static_cast<int>(leaves_.size()); }
  /// True iff a is a strict ancestor of b.
  bool is_ancestor(int a, int b) const {
    return tin_[a] < tin_[b] && tout_[b] <= tout_[a];
  }
  /// Nodes on the root->v path, both endpoints included.
  std::vector<int> path_from_root(int v) const;

 private:
  int node_count_ = 0;
  std::vector<int> parent_;
  std::vector<Edge> in_edge_;
  std::vector<std::vector<int>> children_;
  std::vector<int> leaves_;
  std::vector<int> tin_, tout_;
};

/// One Path per leaf, in ascending order of leaf id.
std::vector<Path> root_to_leaf_paths(const TreeIndex& index);
std::vector<Path> root_to_leaf_paths(const Tree& tree);

}  // namespace hrm
