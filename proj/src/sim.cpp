#include "hrm/sim.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace hrm {

double sample_run_delay(SplitMix64& rng, double length_ms, double success,
                        double t_ms) {
  if (!(success > 0.0)) {
    throw std::invalid_argument("run success probability is zero");
  }
  double total = 0.0;
  while (rng.next_unit() >= success) {
    // The transmission failed. The receiver notices once the next surviving
    // later packet arrives (a geometric number of sending intervals plus one
    // traversal), after which the retransmission is under way.
    double gap = 0.0;
    while (rng.next_unit() >= success) {
      gap += 1.0;
    }
    total += gap * t_ms + length_ms;
  }
  return total + length_ms;
}

RecursionStats simulate_recursion(const TreeIndex& index, const Placement& placement,
                                  const DelayParams& params, std::uint64_t packets,
                                  std::uint64_t seed) {
  if (packets == 0) {
    throw std::invalid_argument("packets must be at least 1");
  }
  struct Run {
    double length_ms;
    double success;
  };
  const std::vector<int>& leaves = index.leaves();
  std::vector<std::vector<Run>> runs;
  runs.reserve(leaves.size());
  for (int leaf : leaves) {
    std::vector<Run> leaf_runs;
    for (const Segment& segment : leaf_segments(index, placement, leaf)) {
      double length = 0.0;
      double success = 1.0;
      for (const Edge& e : segment.edges) {
        length += e.delay_ms;
        success *= 1.0 - e.loss;
      }
      leaf_runs.push_back(Run{length, success});
    }
    runs.push_back(std::move(leaf_runs));
  }

  std::vector<double> sums(leaves.size(), 0.0);
  double makespan_sum = 0.0;
  const std::uint64_t base = mix64(seed);
  for (std::uint64_t pkt = 0; pkt < packets; ++pkt) {
    SplitMix64 rng(derive_key(base, pkt));
    double worst = 0.0;
    for (std::size_t li = 0; li < leaves.size(); ++li) {
      double total = 0.0;
      for (const Run& run : runs[li]) {
        total += sample_run_delay(rng, run.length_ms, run.success, params.t_ms);
      }
      sums[li] += total;
      worst = std::max(worst, total);
    }
    makespan_sum += worst;
  }

  RecursionStats stats;
  stats.packets = packets;
  stats.leaves = leaves;
  stats.mean_leaf_delay_ms.reserve(leaves.size());
  for (double s : sums) {
    stats.mean_leaf_delay_ms.push_back(s / static_cast<double>(packets));
  }
  stats.mean_makespan_ms = makespan_sum / static_cast<double>(packets);
  return stats;
}

namespace {

struct Event {
  double abs_ms = 0.0;
  std::uint64_t seq = 0;  // insertion order, breaks time ties deterministically
  bool is_emission = false;
  std::uint64_t id = 0;  // packet id; ids >= packets are end-of-stream markers
  int node = -1;         // arrival target (unused for emissions)
  double rel_ms = 0.0;   // delay since the packet's emission
  bool repair = false;   // part of a repair round
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.abs_ms != b.abs_ms) return a.abs_ms > b.abs_ms;
    return a.seq > b.seq;
  }
};

class EventSim {
 public:
  EventSim(const TreeIndex& index, const Placement& placement, const SimParams& params)
      : index_(index), params_(params) {
    if (params.packets == 0) {
      throw std::invalid_argument("packets must be at least 1");
    }
    if (!(params.t_ms > 0.0) || !(params.interval_ms > 0.0)) {
      throw std::invalid_argument("t_ms and interval_ms must be positive");
    }
    const int n = index.node_count();
    const std::size_t packets = params.packets;
    base_key_ = mix64(params.seed);
    holds_.assign(static_cast<std::size_t>(n) * packets, 0);
    attempts_.assign(static_cast<std::size_t>(n) * packets, 0);
    placed_.assign(static_cast<std::size_t>(n), 0);
    for (int v : placement.servers) {
      placed_[static_cast<std::size_t>(v)] = 1;
      last_round_[v].assign(packets, -1e300);
    }
    tracking_.assign(static_cast<std::size_t>(n), 0);
    governor_.assign(static_cast<std::size_t>(n), -1);
    max_seen_.assign(static_cast<std::size_t>(n), -1);
    holes_.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
      if (v == Tree::kRoot) continue;
      if (index.is_leaf(v) || placed_[static_cast<std::size_t>(v)]) {
        tracking_[static_cast<std::size_t>(v)] = 1;
        int p = index.parent(v);
        while (p != Tree::kRoot && !placed_[static_cast<std::size_t>(p)]) {
          p = index.parent(p);
        }
        governor_[static_cast<std::size_t>(v)] = p;
      }
    }
    leaf_index_.assign(static_cast<std::size_t>(n), -1);
    const std::vector<int>& leaves = index.leaves();
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      leaf_index_[static_cast<std::size_t>(leaves[i])] = static_cast<int>(i);
    }
    leaf_sum_.assign(leaves.size(), 0.0);
    leaf_max_.assign(leaves.size(), 0.0);
    packet_worst_.assign(packets, 0.0);
    remaining_ = static_cast<std::uint64_t>(leaves.size()) * packets;
  }

  SimStats run() {
    push_emission(0, 0.0);
    while (remaining_ > 0) {
      if (heap_.empty()) {
        throw std::runtime_error("event queue drained before all deliveries completed");
      }
      Event ev = heap_.top();
      heap_.pop();
      if (ev.is_emission) {
        handle_emission(ev);
      } else {
        handle_arrival(ev);
      }
    }
    return collect();
  }

 private:
  // Link outcome as a pure function of (seed, packet id, receiving node,
  // attempt index): reproducible regardless of event processing order.
  bool link_delivers(std::uint64_t id, int child, std::uint32_t attempt,
                     double loss) {
    SplitMix64 rng(derive_key(derive_key(derive_key(base_key_, id),
                                         static_cast<std::uint64_t>(child)),
                              attempt));
    return rng.next_unit() >= loss;
  }

  std::uint32_t bump_attempt(std::uint64_t id, int child) {
    if (id >= params_.packets) {
      return 0;  // announcements cross each link at most once
    }
    std::uint32_t& slot =
        attempts_[static_cast<std::size_t>(id) * static_cast<std::size_t>(index_.node_count()) +
                  static_cast<std::size_t>(child)];
    return slot++;
  }

  void send_down(int from, std::uint64_t id, double abs_ms, double rel_ms,
                 bool repair) {
    for (int child : index_.children(from)) {
      const Edge& e = index_.in_edge(child);
      const std::uint32_t attempt = bump_attempt(id, child);
      ++transmissions_;
      if (repair) {
        ++repair_sends_;
      }
      if (!link_delivers(id, e.child, attempt, e.loss)) {
        continue;
      }
      Event ev;
      ev.abs_ms = abs_ms + e.delay_ms;
      ev.seq = next_seq_++;
      ev.is_emission = false;
      ev.id = id;
      ev.node = e.child;
      ev.rel_ms = rel_ms + e.delay_ms;
      ev.repair = repair;
      heap_.push(ev);
    }
  }

  void push_emission(std::uint64_t id, double abs_ms) {
    Event ev;
    ev.abs_ms = abs_ms;
    ev.seq = next_seq_++;
    ev.is_emission = true;
    ev.id = id;
    heap_.push(ev);
  }

  void handle_emission(const Event& ev) {
    if (ev.id < params_.packets) {
      hold(Tree::kRoot, ev.id);
      send_down(Tree::kRoot, ev.id, ev.abs_ms, 0.0, false);
      if (ev.id + 1 < params_.packets) {
        push_emission(ev.id + 1, ev.abs_ms + params_.t_ms);
      } else {
        push_emission(params_.packets, ev.abs_ms + params_.interval_ms);
      }
      return;
    }
    if (ev.id - params_.packets > kMarkerCap) {
      throw std::runtime_error("simulation failed to converge (announcement cap hit)");
    }
    send_down(Tree::kRoot, ev.id, ev.abs_ms, 0.0, false);
    push_emission(ev.id + 1, ev.abs_ms + params_.interval_ms);
  }

  void handle_arrival(const Event& ev) {
    const int v = ev.node;
    const bool real = ev.id < params_.packets;
    if (real) {
      if (!held(v, ev.id)) {
        hold(v, ev.id);
        const int li = leaf_index_[static_cast<std::size_t>(v)];
        if (li >= 0) {
          leaf_sum_[static_cast<std::size_t>(li)] += ev.rel_ms;
          leaf_max_[static_cast<std::size_t>(li)] =
              std::max(leaf_max_[static_cast<std::size_t>(li)], ev.rel_ms);
          packet_worst_[static_cast<std::size_t>(ev.id)] =
              std::max(packet_worst_[static_cast<std::size_t>(ev.id)], ev.rel_ms);
          --remaining_;
          horizon_ms_ = std::max(horizon_ms_, ev.abs_ms);
          if (remaining_ == 0) {
            return;
          }
        } else {
          send_down(v, ev.id, ev.abs_ms, ev.rel_ms, false);
        }
      } else if (ev.repair && !placed_[static_cast<std::size_t>(v)] &&
                 !index_.is_leaf(v)) {
        // Repair rounds are relayed through covered ground so they can reach
        // the gap that requested them; they stop at the next server, which
        // repairs its own subtree.
        send_down(v, ev.id, ev.abs_ms, ev.rel_ms, true);
      }
    } else if (!index_.is_leaf(v)) {
      send_down(v, ev.id, ev.abs_ms, ev.rel_ms, false);
    }
    if (tracking_[static_cast<std::size_t>(v)]) {
      detect_and_request(v, ev.id, ev.abs_ms);
    }
  }

  void detect_and_request(int v, std::uint64_t id, double now_ms) {
    std::set<std::uint64_t>& holes = holes_[static_cast<std::size_t>(v)];
    if (id < params_.packets) {
      holes.erase(id);
    }
    const std::int64_t sid = static_cast<std::int64_t>(id);
    std::int64_t lo = max_seen_[static_cast<std::size_t>(v)] + 1;
    const std::int64_t hi =
        std::min<std::int64_t>(sid, static_cast<std::int64_t>(params_.packets));
    for (std::int64_t missing = lo; missing < hi; ++missing) {
      if (!held(v, static_cast<std::uint64_t>(missing))) {
        holes.insert(static_cast<std::uint64_t>(missing));
      }
    }
    max_seen_[static_cast<std::size_t>(v)] =
        std::max(max_seen_[static_cast<std::size_t>(v)], sid);
    const int server = governor_[static_cast<std::size_t>(v)];
    for (auto it = holes.begin(); it != holes.end() && *it < id; ++it) {
      request_repair(server, *it, now_ms);
    }
  }

  void request_repair(int server, std::uint64_t id, double now_ms) {
    ++nacks_;
    if (!held(server, id)) {
      return;  // the server will flood its subtree when the packet reaches it
    }
    double& last = last_round_.at(server)[static_cast<std::size_t>(id)];
    if (now_ms < last + params_.interval_ms - 1e-9) {
      return;  // one repair round per packet per interval
    }
    last = now_ms;
    send_down(server, id, now_ms,
              now_ms - static_cast<double>(id) * params_.t_ms, true);
  }

  bool held(int v, std::uint64_t id) const {
    return holds_[static_cast<std::size_t>(v) * params_.packets +
                  static_cast<std::size_t>(id)] != 0;
  }
  void hold(int v, std::uint64_t id) {
    holds_[static_cast<std::size_t>(v) * params_.packets +
           static_cast<std::size_t>(id)] = 1;
  }

  SimStats collect() const {
    SimStats stats;
    stats.packets = params_.packets;
    stats.leaves = index_.leaves();
    const double n = static_cast<double>(params_.packets);
    stats.mean_leaf_delay_ms.reserve(leaf_sum_.size());
    for (double s : leaf_sum_) {
      stats.mean_leaf_delay_ms.push_back(s / n);
    }
    stats.max_leaf_delay_ms = leaf_max_;
    double worst_sum = 0.0;
    double worst_max = 0.0;
    for (double w : packet_worst_) {
      worst_sum += w;
      worst_max = std::max(worst_max, w);
    }
    stats.mean_makespan_ms = worst_sum / n;
    stats.max_delay_ms = worst_max;
    stats.transmissions = transmissions_;
    stats.repairs = repair_sends_;
    stats.nacks = nacks_;
    stats.horizon_ms = horizon_ms_;
    return stats;
  }

  static constexpr std::uint64_t kMarkerCap = 1'000'000;

  const TreeIndex& index_;
  const SimParams& params_;
  std::uint64_t base_key_ = 0;

  std::priority_queue<Event, std::vector<Event>, EventAfter> heap_;
  std::uint64_t next_seq_ = 0;

  std::vector<std::uint8_t> holds_;      // node x packet
  std::vector<std::uint32_t> attempts_;  // packet x node (receiving child)
  std::vector<std::uint8_t> placed_;
  std::vector<std::uint8_t> tracking_;
  std::vector<int> governor_;
  std::vector<std::int64_t> max_seen_;
  std::vector<std::set<std::uint64_t>> holes_;
  std::unordered_map<int, std::vector<double>> last_round_;
  std::vector<int> leaf_index_;

  std::vector<double> leaf_sum_;
  std::vector<double> leaf_max_;
  std::vector<double> packet_worst_;
  std::uint64_t remaining_ = 0;
  double horizon_ms_ = 0.0;
  std::uint64_t transmissions_ = 0;
  std::uint64_t repair_sends_ = 0;
  std::uint64_t nacks_ = 0;
};

}  // namespace

SimStats simulate_events(const TreeIndex& index, const Placement& placement,
                         const SimParams& params) {
  EventSim sim(index, placement, params);
  return sim.run();
}

}  // namespace hrm
