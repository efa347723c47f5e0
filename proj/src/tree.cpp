#include "hrm/tree.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <vector>

#include "hrm/text.hpp"

namespace hrm {

namespace {

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

bool is_blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == ' ' || c == '\t') continue;
    return c == '#';
  }
  return true;
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

bool parse_int(const std::string& tok, int& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

bool parse_double(const std::string& tok, double& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

// Returns ids unreachable from the root by following child links.
std::vector<int> unreachable_nodes(int node_count, const std::vector<Edge>& edges) {
  std::vector<std::vector<int>> children(node_count);
  for (const Edge& e : edges) {
    if (e.parent >= 0 && e.parent < node_count && e.child >= 0 && e.child < node_count)
      children[e.parent].push_back(e.child);
  }
  std::vector<char> seen(node_count, 0);
  std::vector<int> stack = {Tree::kRoot};
  seen[Tree::kRoot] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int c : children[v]) {
      if (!seen[c]) {
        seen[c] = 1;
        stack.push_back(c);
      }
    }
  }
  std::vector<int> out;
  for (int v = 0; v < node_count; ++v)
    if (!seen[v]) out.push_back(v);
  return out;
}

}  // namespace

ValidationReport validate_tree(const Tree& tree) {
  ValidationReport report;
  auto add = [&report](std::string msg) { report.violations.push_back(std::move(msg)); };

  if (tree.node_count < 1) {
    add("node_count must be at least 1");
    return report;
  }
  const int n = tree.node_count;
  if (static_cast<int>(tree.edges.size()) != n - 1)
    add("expected " + std::to_string(n - 1) + " edges, found " +
        std::to_string(tree.edges.size()));

  std::vector<int> parent_count(n, 0);
  bool ids_ok = true;
  for (const Edge& e : tree.edges) {
    if (e.parent < 0 || e.parent >= n || e.child < 0 || e.child >= n) {
      add("edge " + std::to_string(e.parent) + "->" + std::to_string(e.child) +
          " references a node id outside [0, " + std::to_string(n) + ")");
      ids_ok = false;
      continue;
    }
    if (e.child == Tree::kRoot)
      add("node 0 (the root) cannot be a child");
    if (e.parent == e.child)
      add("self-loop at node " + std::to_string(e.parent));
    if (e.delay_ms <= 0.0)
      add("edge " + std::to_string(e.parent) + "->" + std::to_string(e.child) +
          " delay must be positive");
    if (!(e.loss >= 0.0) || e.loss >= 1.0)
      add("edge " + std::to_string(e.parent) + "->" + std::to_string(e.child) +
          " loss out of range [0,1)");
    ++parent_count[e.child];
  }
  for (int v = 0; v < n; ++v)
    if (v != Tree::kRoot && parent_count[v] > 1)
      add("node " + std::to_string(v) + " has two parents");

  if (ids_ok) {
    for (int v : unreachable_nodes(n, tree.edges))
      add("node " + std::to_string(v) + " unreachable from root");
  }
  return report;
}

Tree parse_tree(std::istream& in) {
  enum class Stage { magic, count, edges };
  Stage stage = Stage::magic;

  Tree tree;
  std::vector<char> has_parent;
  std::vector<int> parent_line;  // line that assigned each node its parent
  int edges_expected = 0;
  int edges_seen = 0;
  int line_no = 0;
  std::string raw;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip_cr(raw);
    if (is_blank_or_comment(line)) continue;
    const auto tokens = tokenize(line);

    switch (stage) {
      case Stage::magic: {
        if (tokens.size() != 2 || tokens[0] != "hrmtree" || tokens[1] != "v1")
          throw ParseError(line_no, "expected magic 'hrmtree v1'");
        stage = Stage::count;
        break;
      }
      case Stage::count: {
        int n = 0;
        if (tokens.size() != 1 || !parse_int(tokens[0], n) || n < 1)
          throw ParseError(line_no, "node_count must be a positive integer");
        tree.node_count = n;
        edges_expected = n - 1;
        has_parent.assign(n, 0);
        parent_line.assign(n, 0);
        stage = Stage::edges;
        break;
      }
      case Stage::edges: {
        if (edges_seen == edges_expected)
          throw ParseError(line_no, "unexpected extra edge line");
        Edge e;
        if (tokens.size() != 4 || !parse_int(tokens[0], e.parent) ||
            !parse_int(tokens[1], e.child) || !parse_double(tokens[2], e.delay_ms) ||
            !parse_double(tokens[3], e.loss))
          throw ParseError(line_no, "malformed edge line (want '<parent> <child> <delay_ms> <loss>')");
        const int n = tree.node_count;
        if (e.parent < 0 || e.parent >= n)
          throw ParseError(line_no, "parent id " + std::to_string(e.parent) +
                                        " out of range [0, " + std::to_string(n) + ")");
        if (e.child < 0 || e.child >= n)
          throw ParseError(line_no, "child id " + std::to_string(e.child) +
                                        " out of range [0, " + std::to_string(n) + ")");
        if (e.child == Tree::kRoot)
          throw ParseError(line_no, "node 0 (the root) cannot be a child");
        if (e.parent == e.child)
          throw ParseError(line_no, "self-loop at node " + std::to_string(e.parent));
        if (has_parent[e.child])
          throw ParseError(line_no, "node " + std::to_string(e.child) +
                                        " already has a parent (duplicate child)");
        if (e.delay_ms <= 0.0)
          throw ParseError(line_no, "delay must be positive");
        if (!(e.loss >= 0.0) || e.loss >= 1.0)
          throw ParseError(line_no, "loss out of range [0,1)");
        has_parent[e.child] = 1;
        parent_line[e.child] = line_no;
        tree.edges.push_back(e);
        ++edges_seen;
        break;
      }
    }
  }

  if (stage == Stage::magic) throw ParseError(line_no, "empty input, expected magic 'hrmtree v1'");
  if (stage == Stage::count) throw ParseError(line_no, "missing node_count line");
  if (edges_seen != edges_expected)
    throw ParseError(line_no, "expected " + std::to_string(edges_expected) +
                                  " edge lines, found " + std::to_string(edges_seen));

  // Every non-root node has exactly one parent here, so any node unreachable
  // from the root can only sit on a cycle.
  const auto orphans = unreachable_nodes(tree.node_count, tree.edges);
  if (!orphans.empty()) {
    const int v = orphans.front();
    throw ParseError(parent_line[v], "cycle detected: node " + std::to_string(v) +
                                         " unreachable from root");
  }
  return tree;
}

Tree parse_tree(const std::string& text) {
  std::istringstream in(text);
  return parse_tree(in);
}

Tree load_tree_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tree file: " + path);
  return parse_tree(in);
}

std::string serialize_tree(const Tree& tree) {
  std::vector<Edge> edges = tree.edges;
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.parent != b.parent) return a.parent < b.parent;
    return a.child < b.child;
  });
  std::string out = "hrmtree v1\n" + std::to_string(tree.node_count) + "\n";
  for (const Edge& e : edges) {
    out += std::to_string(e.parent);
    out += ' ';
    out += std::to_string(e.child);
    out += ' ';
    out += format_g6(e.delay_ms);
    out += ' ';
    out += format_g6(e.loss);
    out += '\n';
  }
  return out;
}

TreeIndex::TreeIndex(const Tree& tree) {
  const auto report = validate_tree(tree);
  if (!report.ok()) throw std::invalid_argument("invalid tree: " + report.violations.front());

  node_count_ = tree.node_count;
  parent_.assign(node_count_, -1);
  in_edge_.assign(node_count_, Edge{});
  children_.assign(node_count_, {});
  for (const Edge& e : tree.edges) {
    parent_[e.child] = e.parent;
    in_edge_[e.child] = e;
    children_[e.parent].push_back(e.child);
  }
  for (auto& c : children_) std::sort(c.begin(), c.end());
  for (int v = 0; v < node_count_; ++v)
    if (is_leaf(v)) leaves_.push_back(v);

  // Entry/exit stamps for O(1) ancestry tests.
  tin_.assign(node_count_, 0);
  tout_.assign(node_count_, 0);
  int clock = 0;
  std::vector<std::pair<int, bool>> stack = {{Tree::kRoot, false}};
  while (!stack.empty()) {
    auto [v, done] = stack.back();
    stack.pop_back();
    if (done) {
      tout_[v] = clock;
      continue;
    }
    tin_[v] = clock++;
    stack.emplace_back(v, true);
    for (auto it = children_[v].rbegin(); it != children_[v].rend(); ++it)
      stack.emplace_back(*it, false);
  }
}

std::vector<int> TreeIndex::path_from_root(int v) const {
  std::vector<int> nodes;
  for (int u = v; u != -1; u = parent_[u]) nodes.push_back(u);
  std::reverse(nodes.begin(), nodes.end());
  return nodes;
}

std::vector<Path> root_to_leaf_paths(const TreeIndex& index) {
  std::vector<Path> paths;
  paths.reserve(index.leaves().size());
  for (int leaf : index.leaves()) {
    Path p;
    p.leaf = leaf;
    p.nodes = index.path_from_root(leaf);
    p.edges.reserve(p.nodes.size() - 1);
    for (std::size_t i = 1; i < p.nodes.size(); ++i)
      p.edges.push_back(index.in_edge(p.nodes[i]));
    paths.push_back(std::move(p));
  }
  return paths;
}

std::vector<Path> root_to_leaf_paths(const Tree& tree) {
  return root_to_leaf_paths(TreeIndex(tree));
}

}  // namespace hrm
