#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hrm/delay_model.hpp"
#include "hrm/rng.hpp"
#include "hrm/topogen.hpp"
#include "hrm/tree.hpp"

namespace {

const hrm::DelayParams kParams{16.0};

/// Chain 0 -> 1 -> 2 -> 3, 10 ms per link, losses 0.1, 0.1, 0.2.
hrm::Tree chain_tree() {
  hrm::Tree tree;
  tree.node_count = 4;
  tree.edges = {
      hrm::Edge{0, 1, 10.0, 0.1},
      hrm::Edge{1, 2, 10.0, 0.1},
      hrm::Edge{2, 3, 10.0, 0.2},
  };
  return tree;
}

double rel_close(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("closed forms on hand-checked single links") {
  // Lossless: the delay is the propagation time, bit for bit.
  CHECK(hrm::run_expected_delay(10.0, 1.0, 16.0) == 10.0);
  CHECK(hrm::run_expected_interarrival(10.0, 1.0, 16.0) == 10.0);

  // One link, 10 ms, loss 0.1: f = 1/9.
  const hrm::Edge link{0, 1, 10.0, 0.1};
  CHECK(rel_close(hrm::edge_expected_delay(link, kParams), 916.0 / 81.0) < 1e-12);

  // One link, 10 ms, loss 0.2: f = 1/4, delay 12.5 + 1 = 13.5.
  const hrm::Edge lossy{0, 1, 10.0, 0.2};
  CHECK(rel_close(hrm::edge_expected_delay(lossy, kParams), 13.5) < 1e-12);

  // One link, 10 ms, loss 0.5: f = 1, delay 20 + 16 = 36, exact in binary.
  const hrm::Edge half{0, 1, 10.0, 0.5};
  CHECK(hrm::edge_expected_delay(half, kParams) == 36.0);

  // Inter-arrival, one link, 10 ms, loss 0.1: 16/9 + 10.
  hrm::Segment seg;
  seg.edges = {link};
  CHECK(rel_close(hrm::expected_interarrival(seg, kParams), 106.0 / 9.0) < 1e-12);
}

TEST_CASE("two aggregated links match the hand-reduced fraction") {
  // Two 10 ms links, loss 0.1 each: s = 0.81, f = 19/81,
  // delay = 20*(100/81) + (19/81)^2 * 16 = 167776/6561.
  hrm::Segment seg;
  seg.edges = {hrm::Edge{0, 1, 10.0, 0.1}, hrm::Edge{1, 2, 10.0, 0.1}};
  CHECK(rel_close(hrm::segment_expected_delay(seg, kParams), 167776.0 / 6561.0) <
        1e-12);
}

TEST_CASE("segment helpers reject degenerate inputs") {
  hrm::Segment empty;
  CHECK_THROWS_AS(hrm::segment_expected_delay(empty, kParams), std::invalid_argument);
}

TEST_CASE("placements normalize and validate") {
  const hrm::TreeIndex index(chain_tree());
  const hrm::Placement p = hrm::make_placement(index, {2, 1, 2});
  CHECK(p.servers == std::vector<int>{0, 1, 2});
  CHECK(p.k() == 3);
  CHECK(p.contains(0));
  CHECK(p.contains(2));
  CHECK_FALSE(p.contains(3));

  CHECK(hrm::make_placement(index, {}).servers == std::vector<int>{0});
  CHECK_THROWS_AS(hrm::make_placement(index, {3}), std::invalid_argument);  // leaf
  CHECK_THROWS_AS(hrm::make_placement(index, {9}), std::invalid_argument);
  CHECK(hrm::placement_candidates(index) == std::vector<int>{1, 2});
}

TEST_CASE("path splitting follows the placed servers") {
  const hrm::TreeIndex index(chain_tree());
  const hrm::Placement p = hrm::make_placement(index, {2});
  const std::vector<hrm::Segment> segs = hrm::leaf_segments(index, p, 3);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0].from == 0);
  CHECK(segs[0].to == 2);
  CHECK(segs[0].edges.size() == 2);
  CHECK(segs[1].from == 2);
  CHECK(segs[1].to == 3);
  CHECK(segs[1].edges.size() == 1);
  CHECK_THROWS_AS(hrm::leaf_segments(index, p, 1), std::invalid_argument);
}

TEST_CASE("leaf delays on the chain match hand-reduced fractions") {
  const hrm::TreeIndex index(chain_tree());

  // No intermediate server: one three-link segment, 334726/6561 ms.
  const hrm::Placement root_only = hrm::make_placement(index, {});
  CHECK(rel_close(hrm::leaf_expected_delay(index, root_only, 3, kParams),
                  334726.0 / 6561.0) < 1e-12);

  // Server at 2: 167776/6561 + 13.5.
  const hrm::Placement at2 = hrm::make_placement(index, {2});
  CHECK(rel_close(hrm::leaf_expected_delay(index, at2, 3, kParams),
                  167776.0 / 6561.0 + 13.5) < 1e-12);

  // Server at 1: 916/81 + 9784/324.
  const hrm::Placement at1 = hrm::make_placement(index, {1});
  CHECK(rel_close(hrm::leaf_expected_delay(index, at1, 3, kParams),
                  916.0 / 81.0 + 9784.0 / 324.0) < 1e-12);

  // Servers everywhere: 916/81 + 916/81 + 13.5.
  const hrm::Placement all = hrm::make_placement(index, {1, 2});
  CHECK(rel_close(hrm::leaf_expected_delay(index, all, 3, kParams),
                  1832.0 / 81.0 + 13.5) < 1e-12);
}

TEST_CASE("makespan picks the worst leaf, lowest id on ties") {
  hrm::Tree tree;
  tree.node_count = 4;
  tree.edges = {
      hrm::Edge{0, 1, 10.0, 0.0},
      hrm::Edge{0, 2, 25.0, 0.1},
      hrm::Edge{0, 3, 25.0, 0.1},
  };
  const hrm::TreeIndex index(tree);
  const hrm::MakespanResult m =
      hrm::makespan(index, hrm::make_placement(index, {}), kParams);
  CHECK(m.worst_leaf == 2);  // leaves 2 and 3 tie; 1 is cheaper
  CHECK(rel_close(m.makespan_ms, 25.0 * (10.0 / 9.0) + 16.0 / 81.0) < 1e-12);
}

TEST_CASE("splitting a run never increases its expected delay") {
  hrm::SplitMix64 rng(314159);
  for (int i = 0; i < 200; ++i) {
    const double d1 = rng.next_real(10.0, 40.0);
    const double d2 = rng.next_real(10.0, 40.0);
    const bool lossy1 = rng.next_below(4) != 0;
    const bool lossy2 = rng.next_below(4) != 0;
    const double p1 = lossy1 ? rng.next_real(0.01, 0.5) : 0.0;
    const double p2 = lossy2 ? rng.next_real(0.01, 0.5) : 0.0;
    const double whole =
        hrm::run_expected_delay(d1 + d2, (1.0 - p1) * (1.0 - p2), 16.0);
    const double split = hrm::run_expected_delay(d1, 1.0 - p1, 16.0) +
                         hrm::run_expected_delay(d2, 1.0 - p2, 16.0);
    CHECK(whole >= split - 1e-9);
    if (lossy1 || lossy2) {
      CHECK(whole > split);
    } else {
      CHECK(whole == split);
    }
  }
}

TEST_CASE("adding a server never increases the makespan") {
  hrm::GenConfig config;
  config.nodes = 30;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const hrm::TreeIndex index(hrm::generate_tree(config, seed));
    const std::vector<int> candidates = hrm::placement_candidates(index);
    std::vector<int> servers;
    double prev = hrm::makespan(index, hrm::make_placement(index, servers), kParams)
                      .makespan_ms;
    for (int v : candidates) {
      servers.push_back(v);
      const double next =
          hrm::makespan(index, hrm::make_placement(index, servers), kParams)
              .makespan_ms;
      CHECK(next <= prev * (1.0 + 1e-12) + 1e-9);
      prev = next;
    }
  }
}
