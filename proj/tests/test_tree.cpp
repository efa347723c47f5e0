#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>
#include <string>

#include "hrm/tree.hpp"

namespace {

const char* kSmallTree =
    "# a four-node chain with a side branch\n"
    "hrmtree v1\n"
    "5\n"
    "\n"
    "0 1 10 0.1\r\n"
    "1 2 20 0.05\n"
    "2 3 10 0\n"
    "1 4 15.5 0.2\n";

void expect_parse_error(const std::string& text, int line, const std::string& needle) {
  try {
    hrm::parse_tree(text);
    FAIL_CHECK("expected ParseError containing '" << needle << "'");
  } catch (const hrm::ParseError& e) {
    CHECK(e.line() == line);
    CHECK(std::string(e.what()).find(needle) != std::string::npos);
  }
}

}  // namespace

TEST_CASE("parsing accepts comments, blank lines, and CRLF") {
  const hrm::Tree tree = hrm::parse_tree(kSmallTree);
  CHECK(tree.node_count == 5);
  REQUIRE(tree.edges.size() == 4);
  CHECK(tree.edges[3].delay_ms == doctest::Approx(15.5));

  const hrm::TreeIndex index(tree);
  CHECK(index.node_count() == 5);
  CHECK(index.parent(1) == 0);
  CHECK(index.parent(4) == 1);
  CHECK(index.children(1) == std::vector<int>{2, 4});
  CHECK(index.leaves() == std::vector<int>{3, 4});
  CHECK(index.leaf_count() == 2);
  CHECK(index.is_leaf(3));
  CHECK_FALSE(index.is_leaf(1));
  CHECK_FALSE(index.is_leaf(0));
  CHECK(index.in_edge(2).delay_ms == doctest::Approx(20.0));
  CHECK(index.path_from_root(3) == std::vector<int>{0, 1, 2, 3});
  CHECK(index.path_from_root(0) == std::vector<int>{0});
}

TEST_CASE("ancestor queries are strict") {
  const hrm::TreeIndex index(hrm::parse_tree(kSmallTree));
  CHECK(index.is_ancestor(0, 3));
  CHECK(index.is_ancestor(1, 3));
  CHECK(index.is_ancestor(1, 4));
  CHECK_FALSE(index.is_ancestor(3, 3));
  CHECK_FALSE(index.is_ancestor(3, 1));
  CHECK_FALSE(index.is_ancestor(2, 4));
  CHECK_FALSE(index.is_ancestor(4, 2));
}

TEST_CASE("serialization is sorted and stable after one round trip") {
  // Edges deliberately out of (parent, child) order.
  const std::string text =
      "hrmtree v1\n"
      "4\n"
      "0 2 12.25 0.125\n"
      "0 1 10 0\n"
      "2 3 30.125 0.0625\n";
  const hrm::Tree tree = hrm::parse_tree(text);
  const std::string first = hrm::serialize_tree(tree);
  const std::string second = hrm::serialize_tree(hrm::parse_tree(first));
  CHECK(first == second);
  std::istringstream lines(first);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "hrmtree v1");
  std::getline(lines, line);
  CHECK(line == "4");
  std::getline(lines, line);
  CHECK(line == "0 1 10 0");
  std::getline(lines, line);
  CHECK(line == "0 2 12.25 0.125");
}

TEST_CASE("parse errors carry line numbers") {
  SUBCASE("bad magic") {
    expect_parse_error("not a tree\n2\n0 1 10 0\n", 1, "magic");
  }
  SUBCASE("bad node count") {
    expect_parse_error("hrmtree v1\n-3\n", 2, "node_count");
    expect_parse_error("hrmtree v1\nbanana\n", 2, "node_count");
  }
  SUBCASE("malformed edge line") {
    expect_parse_error("hrmtree v1\n2\n0 1 10\n", 3, "malformed edge line");
    expect_parse_error("hrmtree v1\n2\n0 1 ten 0\n", 3, "malformed edge line");
  }
  SUBCASE("ids out of range") {
    expect_parse_error("hrmtree v1\n2\n0 7 10 0\n", 3, "child id 7");
    expect_parse_error("hrmtree v1\n2\n-1 1 10 0\n", 3, "parent id -1");
  }
  SUBCASE("root as child") {
    expect_parse_error("hrmtree v1\n2\n1 0 10 0\n", 3, "root");
  }
  SUBCASE("self loop") {
    expect_parse_error("hrmtree v1\n3\n0 1 10 0\n1 1 10 0\n", 4, "self-loop");
  }
  SUBCASE("duplicate parent") {
    expect_parse_error("hrmtree v1\n3\n0 1 10 0\n0 1 12 0\n", 4,
                       "already has a parent");
  }
  SUBCASE("bad delay") {
    expect_parse_error("hrmtree v1\n2\n0 1 0 0\n", 3, "delay must be positive");
    expect_parse_error("hrmtree v1\n2\n0 1 -4 0\n", 3, "delay must be positive");
  }
  SUBCASE("bad loss") {
    expect_parse_error("hrmtree v1\n2\n0 1 10 1\n", 3, "loss out of range");
    expect_parse_error("hrmtree v1\n2\n0 1 10 -0.5\n", 3, "loss out of range");
  }
  SUBCASE("missing edges") {
    expect_parse_error("hrmtree v1\n3\n0 1 10 0\n", 3, "expected 2 edge");
  }
  SUBCASE("extra edge line") {
    expect_parse_error("hrmtree v1\n2\n0 1 10 0\n0 1 10 0\n", 4, "extra edge");
  }
  SUBCASE("cycle off the root") {
    expect_parse_error("hrmtree v1\n4\n0 1 10 0\n2 3 10 0\n3 2 10 0\n", 5,
                       "unreachable");
  }
}

TEST_CASE("validate_tree collects every violation") {
  hrm::Tree tree;
  tree.node_count = 4;
  tree.edges = {
      hrm::Edge{0, 1, 10.0, 0.0},
      hrm::Edge{1, 2, 10.0, 0.0},
      hrm::Edge{0, 2, 10.0, 0.0},  // second parent for node 2; node 3 unreachable
  };
  const hrm::ValidationReport report = hrm::validate_tree(tree);
  CHECK_FALSE(report.ok());
  bool saw_two_parents = false;
  bool saw_unreachable = false;
  for (const std::string& v : report.violations) {
    if (v.find("two parents") != std::string::npos) saw_two_parents = true;
    if (v.find("unreachable") != std::string::npos) saw_unreachable = true;
  }
  CHECK(saw_two_parents);
  CHECK(saw_unreachable);
  CHECK_THROWS_AS(hrm::TreeIndex{tree}, std::invalid_argument);
}

TEST_CASE("a valid in-memory tree passes validation") {
  const hrm::Tree tree = hrm::parse_tree(kSmallTree);
  CHECK(hrm::validate_tree(tree).ok());
}
