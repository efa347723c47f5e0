// Command-line front end for the repair-server placement toolkit: generate
// random delay/loss trees, evaluate placements, run the placement
// strategies, sweep server budgets, search for minimum server counts, and
// run the packet-level simulator.
//
// Exit codes: 0 success, 1 usage error, 2 bad input data, 3 enumeration
// budget exceeded.

#include <charconv>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hrm/delay_model.hpp"
#include "hrm/exact.hpp"
#include "hrm/heuristics.hpp"
#include "hrm/sim.hpp"
#include "hrm/text.hpp"
#include "hrm/topogen.hpp"
#include "hrm/tree.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitBudget = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes through a temporary file and renames it into place so readers
/// never observe a partially written file.
void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    out.flush();
    if (!out) {
      throw std::runtime_error("cannot write " + tmp);
    }
  }
  std::filesystem::rename(tmp, path);
}

/// Parses a comma-separated id list such as "0,2,5". An empty string means
/// no servers beyond the root.
std::vector<int> parse_server_list(const std::string& text) {
  std::vector<int> out;
  if (text.empty()) {
    return out;
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const char* first = text.data() + pos;
    const char* last = text.data() + comma;
    int value = 0;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || first == last) {
      throw UsageError("bad server list entry: '" + text.substr(pos, comma - pos) +
                       "'");
    }
    out.push_back(value);
    pos = comma + 1;
  }
  return out;
}

std::string join_ids(const std::vector<int>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) {
      out += ',';
    }
    out += std::to_string(ids[i]);
  }
  return out;
}

struct Common {
  std::string tree_path;
  double t_ms = 16.0;
};

hrm::TreeIndex load_index(const Common& common) {
  return hrm::TreeIndex(hrm::load_tree_file(common.tree_path));
}

void print_placement_report(const hrm::TreeIndex& index,
                            const hrm::Placement& placement,
                            const hrm::DelayParams& params) {
  const hrm::MakespanResult m = hrm::makespan(index, placement, params);
  std::cout << "k " << placement.k() << "\n";
  std::cout << "servers " << join_ids(placement.servers) << "\n";
  std::cout << "makespan_ms " << hrm::format_g6(m.makespan_ms) << "\n";
  std::cout << "worst_leaf " << m.worst_leaf << "\n";
  for (int leaf : index.leaves()) {
    std::cout << "leaf_delay_ms " << leaf << " "
              << hrm::format_g6(hrm::leaf_expected_delay(index, placement, leaf, params))
              << "\n";
  }
}

int run_gen(const hrm::GenConfig& config, std::uint64_t seed,
            const std::string& out_path) {
  hrm::Tree tree = hrm::generate_tree(config, seed);
  const std::string text = hrm::serialize_tree(tree);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file_atomic(out_path, text);
  }
  return kExitOk;
}

int run_eval(const Common& common, const std::string& servers_text) {
  const std::vector<int> servers = parse_server_list(servers_text);
  const hrm::TreeIndex index = load_index(common);
  const hrm::Placement placement = hrm::make_placement(index, servers);
  print_placement_report(index, placement, hrm::DelayParams{common.t_ms});
  return kExitOk;
}

int run_place(const Common& common, const std::string& method, int k,
              std::optional<std::uint64_t> seed, std::uint64_t budget) {
  const hrm::TreeIndex index = load_index(common);
  const hrm::DelayParams params{common.t_ms};
  hrm::Placement placement;
  int requested_k = k;
  int achieved_k = 0;
  if (method == "exact") {
    const hrm::ExactResult r = hrm::exact_optimal(index, k, params, budget);
    placement = r.placement;
    achieved_k = r.placement.k();
  } else {
    const hrm::Strategy strategy = hrm::parse_strategy(method);
    if (strategy == hrm::Strategy::random && !seed.has_value()) {
      throw UsageError("--seed is required with --method random");
    }
    const hrm::HeuristicResult r =
        hrm::place(index, strategy, k, seed.value_or(0), params);
    placement = r.placement;
    achieved_k = r.achieved_k;
  }
  std::cout << "method " << method << "\n";
  std::cout << "requested_k " << requested_k << "\n";
  std::cout << "achieved_k " << achieved_k << "\n";
  print_placement_report(index, placement, hrm::DelayParams{common.t_ms});
  return kExitOk;
}

int run_sweep(const Common& common, const std::vector<std::string>& methods,
              int k_max, std::optional<std::uint64_t> seed, std::uint64_t budget,
              const std::string& out_path) {
  const hrm::TreeIndex index = load_index(common);
  const hrm::DelayParams params{common.t_ms};
  const int candidate_count = static_cast<int>(hrm::placement_candidates(index).size());
  const int top_k = (k_max > 0) ? k_max : candidate_count + 1;

  for (const std::string& method : methods) {
    if (method == "exact") {
      continue;
    }
    if (hrm::parse_strategy(method) == hrm::Strategy::random && !seed.has_value()) {
      throw UsageError("--seed is required when the sweep includes the random method");
    }
  }

  std::ostringstream csv;
  csv << "method,k,achieved_k,makespan_ms\n";
  struct Floor {
    double makespan_ms = 0.0;
    int k = 0;
    bool set = false;
  };
  std::vector<Floor> floors(methods.size());
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    const std::string& method = methods[mi];
    // The exhaustive method cannot request more servers than the tree has
    // internal nodes (root included); strategies simply saturate there.
    const int method_top =
        (method == "exact") ? std::min(top_k, candidate_count + 1) : top_k;
    for (int k = 1; k <= method_top; ++k) {
      int achieved_k = 0;
      double makespan_ms = 0.0;
      if (method == "exact") {
        try {
          const hrm::ExactResult r = hrm::exact_optimal(index, k, params, budget);
          achieved_k = r.placement.k();
          makespan_ms = r.makespan_ms;
        } catch (const hrm::EnumerationBudgetError& e) {
          std::cerr << "note: skipping exact k=" << k << ": " << e.what() << "\n";
          continue;
        }
      } else {
        const hrm::HeuristicResult r =
            hrm::place(index, hrm::parse_strategy(method), k, seed.value_or(0), params);
        achieved_k = r.achieved_k;
        makespan_ms = r.makespan_ms;
      }
      csv << method << "," << k << "," << achieved_k << ","
          << hrm::format_g6(makespan_ms) << "\n";
      Floor& floor = floors[mi];
      if (!floor.set || makespan_ms < floor.makespan_ms) {
        floor.set = true;
        floor.makespan_ms = makespan_ms;
        floor.k = k;
      }
    }
  }
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    write_file_atomic(out_path, csv.str());
  }
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    if (floors[mi].set) {
      std::cout << "floor method=" << methods[mi]
                << " makespan_ms=" << hrm::format_g6(floors[mi].makespan_ms)
                << " k=" << floors[mi].k << "\n";
    }
  }
  return kExitOk;
}

int run_minservers(const Common& common, double bound_ms, const std::string& mode,
                   std::uint64_t budget) {
  const hrm::TreeIndex index = load_index(common);
  hrm::MinServersMode parsed_mode;
  if (mode == "exact") {
    parsed_mode = hrm::MinServersMode::exact;
  } else if (mode == "long_path") {
    parsed_mode = hrm::MinServersMode::long_path;
  } else {
    throw UsageError("unknown mode: " + mode);
  }
  const auto result = hrm::min_servers(index, bound_ms, parsed_mode,
                                       hrm::DelayParams{common.t_ms}, budget);
  if (!result.has_value()) {
    std::cout << "feasible false\n";
    return kExitOk;
  }
  std::cout << "feasible true\n";
  std::cout << "k " << result->k << "\n";
  std::cout << "servers " << join_ids(result->placement.servers) << "\n";
  std::cout << "makespan_ms " << hrm::format_g6(result->makespan_ms) << "\n";
  return kExitOk;
}

int run_simulate(const Common& common, const std::string& servers_text,
                 std::uint64_t packets, std::uint64_t seed, double interval_ms) {
  const hrm::TreeIndex index = load_index(common);
  const hrm::Placement placement =
      hrm::make_placement(index, parse_server_list(servers_text));
  hrm::SimParams params;
  params.t_ms = common.t_ms;
  params.interval_ms = (interval_ms > 0.0) ? interval_ms : common.t_ms;
  params.packets = packets;
  params.seed = seed;
  const hrm::SimStats stats = hrm::simulate_events(index, placement, params);
  std::cout << "packets " << stats.packets << "\n";
  std::cout << "servers " << join_ids(placement.servers) << "\n";
  std::cout << "mean_makespan_ms " << hrm::format_g6(stats.mean_makespan_ms) << "\n";
  std::cout << "max_delay_ms " << hrm::format_g6(stats.max_delay_ms) << "\n";
  std::cout << "transmissions " << stats.transmissions << "\n";
  std::cout << "repairs " << stats.repairs << "\n";
  std::cout << "nacks " << stats.nacks << "\n";
  std::cout << "horizon_ms " << hrm::format_g6(stats.horizon_ms) << "\n";
  for (std::size_t i = 0; i < stats.leaves.size(); ++i) {
    std::cout << "leaf_mean_ms " << stats.leaves[i] << " "
              << hrm::format_g6(stats.mean_leaf_delay_ms[i]) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"repair-server placement toolkit for delay/loss multicast trees"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a random tree");
  hrm::GenConfig gen_config;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--nodes", gen_config.nodes, "number of nodes")
      ->capture_default_str();
  gen->add_option("--delay-min", gen_config.delay_min_ms, "minimum link delay (ms)")
      ->capture_default_str();
  gen->add_option("--delay-max", gen_config.delay_max_ms, "maximum link delay (ms)")
      ->capture_default_str();
  gen->add_option("--loss-min", gen_config.loss_min, "minimum link loss")
      ->capture_default_str();
  gen->add_option("--loss-max", gen_config.loss_max, "maximum link loss")
      ->capture_default_str();
  gen->add_option("--max-children", gen_config.max_children,
                  "maximum children per node")
      ->capture_default_str();
  gen->add_option("--seed", gen_seed, "RNG seed")->required();
  gen->add_option("-o,--out", gen_out, "output file (default: stdout)");

  auto add_common = [](CLI::App* cmd, Common& common) {
    cmd->add_option("--tree", common.tree_path, "tree file")->required();
    cmd->add_option("--t-ms", common.t_ms, "sending interval (ms)")
        ->capture_default_str();
  };

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a server placement");
  Common eval_common;
  std::string eval_servers;
  add_common(eval, eval_common);
  eval->add_option("--servers", eval_servers,
                   "comma-separated server ids (the root is always included)");

  // place
  auto* place = app.add_subcommand("place", "run a placement strategy");
  Common place_common;
  std::string place_method;
  int place_k = 1;
  std::optional<std::uint64_t> place_seed;
  std::uint64_t place_budget = hrm::kDefaultSubsetBudget;
  add_common(place, place_common);
  place->add_option("--method", place_method,
                    "random | max_delay | max_degree | long_path | exact")
      ->required();
  place->add_option("--k", place_k, "number of servers, sender included")->required();
  place->add_option("--seed", place_seed, "RNG seed (required for random)");
  place->add_option("--budget", place_budget, "subset budget for exact")
      ->capture_default_str();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "makespan for every method and k");
  Common sweep_common;
  std::vector<std::string> sweep_methods{"random", "max_delay", "max_degree",
                                         "long_path"};
  int sweep_k_max = 0;
  std::optional<std::uint64_t> sweep_seed;
  std::uint64_t sweep_budget = hrm::kDefaultSubsetBudget;
  std::string sweep_out;
  add_common(sweep, sweep_common);
  sweep->add_option("--methods", sweep_methods,
                    "methods to sweep (default: the four strategies)")
      ->delimiter(',');
  sweep->add_option("--k-max", sweep_k_max,
                    "largest k (default: internal node count)");
  sweep->add_option("--seed", sweep_seed, "RNG seed (required with random)");
  sweep->add_option("--budget", sweep_budget, "subset budget for exact")
      ->capture_default_str();
  sweep->add_option("-o,--out", sweep_out, "CSV output file (default: stdout)");

  // minservers
  auto* minservers =
      app.add_subcommand("minservers", "minimum k meeting a delay bound");
  Common min_common;
  double min_bound = 0.0;
  std::string min_mode = "exact";
  std::uint64_t min_budget = hrm::kDefaultSubsetBudget;
  add_common(minservers, min_common);
  minservers->add_option("--bound-ms", min_bound, "makespan bound (ms)")->required();
  minservers->add_option("--mode", min_mode, "exact | long_path")
      ->capture_default_str();
  minservers->add_option("--budget", min_budget, "subset budget for exact")
      ->capture_default_str();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "packet-level event simulation");
  Common sim_common;
  std::string sim_servers;
  std::uint64_t sim_packets = 1000;
  std::uint64_t sim_seed = 0;
  double sim_interval = 0.0;
  add_common(simulate, sim_common);
  simulate->add_option("--servers", sim_servers,
                       "comma-separated server ids (the root is always included)");
  simulate->add_option("--packets", sim_packets, "number of packets")
      ->capture_default_str();
  simulate->add_option("--seed", sim_seed, "RNG seed")->required();
  simulate->add_option("--interval-ms", sim_interval,
                       "repair/announcement interval (default: --t-ms)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      return run_gen(gen_config, gen_seed, gen_out);
    }
    if (eval->parsed()) {
      return run_eval(eval_common, eval_servers);
    }
    if (place->parsed()) {
      return run_place(place_common, place_method, place_k, place_seed, place_budget);
    }
    if (sweep->parsed()) {
      return run_sweep(sweep_common, sweep_methods, sweep_k_max, sweep_seed,
                       sweep_budget, sweep_out);
    }
    if (minservers->parsed()) {
      return run_minservers(min_common, min_bound, min_mode, min_budget);
    }
    if (simulate->parsed()) {
      return run_simulate(sim_common, sim_servers, sim_packets, sim_seed,
                          sim_interval);
    }
    std::cerr << "error: no subcommand\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const hrm::EnumerationBudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const hrm::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
