#pragma once

#include <cstdint>
#include <vector>

#include "hrm/delay_model.hpp"
#include "hrm/rng.hpp"
#include "hrm/tree.hpp"

namespace hrm {

/// One Monte-Carlo draw of the delivery delay across an aggregated run of
/// links (summed delay length_ms, product delivery probability success).
/// The draw walks the loss-recovery recursion directly: each failed
/// transmission costs one inter-arrival period (a geometric number of
/// sending intervals plus one traversal) before the retransmission, and the
/// final successful traversal costs length_ms. A lossless run returns
/// exactly length_ms. Throws std::invalid_argument if success is zero.
double sample_run_delay(SplitMix64& rng, double length_ms, double success,
                        double t_ms);

/// Monte-Carlo estimate of per-leaf delays and makespan obtained by sampling
/// sample_run_delay independently for every (packet, leaf, segment) triple.
/// Packet p draws from a dedicated substream seeded with
/// derive_key(mix64(seed), p); within a packet, draws are consumed leaf by
/// leaf in ascending id order and segment by segment from the root down.
struct RecursionStats {
  std::uint64_t packets = 0;
  std::vector<int> leaves;                  // ascending, as in TreeIndex
  std::vector<double> mean_leaf_delay_ms;   // aligned with leaves
  double mean_makespan_ms = 0.0;            // mean over packets of worst leaf draw
};

RecursionStats simulate_recursion(const TreeIndex& index, const Placement& placement,
                                  const DelayParams& params, std::uint64_t packets,
                                  std::uint64_t seed);

/// Discrete-event simulation parameters. t_ms is the sender's packet
/// spacing; interval_ms is both the cadence of the trailing end-of-stream
/// announcements and the minimum spacing between two repair rounds for the
/// same packet at the same server.
struct SimParams {
  double t_ms = 16.0;
  double interval_ms = 16.0;
  std::uint64_t packets = 1000;
  std::uint64_t seed = 0;
};

struct SimStats {
  std::uint64_t packets = 0;
  std::vector<int> leaves;                 // ascending, as in TreeIndex
  std::vector<double> mean_leaf_delay_ms;  // mean delivery delay per leaf
  std::vector<double> max_leaf_delay_ms;   // worst single delivery per leaf
  double mean_makespan_ms = 0.0;  // mean over packets of the worst leaf delay
  double max_delay_ms = 0.0;      // worst single delivery overall
  std::uint64_t transmissions = 0;  // link sends, lost ones included
  std::uint64_t repairs = 0;        // link sends belonging to repair rounds
  std::uint64_t nacks = 0;          // repair requests received by servers
  double horizon_ms = 0.0;          // virtual time when the last leaf completed
};

/// Packet-level discrete-event simulation of the repair protocol.
///
/// The sender emits packets 0..packets-1 every t_ms and forwards each down
/// its links; every transmission is dropped independently with the link's
/// loss probability. A node forwards a packet to all children on first
/// receipt. Leaves and repair servers detect sequence gaps on every arrival
/// and immediately request every missing lower id from their nearest placed
/// ancestor; a server that holds the packet answers by re-flooding its
/// subtree (a repair round), at most once per interval_ms per packet.
/// Repair copies are relayed through nodes that already hold the packet
/// until they reach a placed server, so they penetrate regions the original
/// wave already covered. After the last packet the sender keeps emitting
/// end-of-stream announcements every interval_ms (fresh ids past the real
/// range, excluded from the statistics) so trailing losses are still
/// detected; the run ends when every leaf holds every packet.
///
/// Per-delivery delay is measured from the packet's emission time. Link
/// outcomes are a pure function of (seed, packet id, receiving node, attempt
/// number), so runs are reproducible event for event. Throws
/// std::invalid_argument for non-positive spacing or zero packets and
/// std::runtime_error if the run fails to converge.
SimStats simulate_events(const TreeIndex& index, const Placement& placement,
                         const SimParams& params);

}  // namespace hrm
