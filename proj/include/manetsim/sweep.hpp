#pragma once

// The two predefined measurement campaigns and a multi-threaded sweep
// runner. Every (protocol, node count, seed) cell is an independent
// simulation, so cells run in parallel and land in pre-assigned result
// slots; the output is identical for any worker count.

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "config.hpp"
#include "report.hpp"
#include "simulation.hpp"

namespace manetsim {

struct Campaign {
  std::string name;
  MobilityModel model = MobilityModel::rwp;
  double duration_s = 300;
  double v_min = 1, v_max = 10, pause_s = 0;
  std::vector<int> node_counts;
  std::function<double(int)> area_for;  // square side in metres for a node count
};

// Group mobility, long runs, density held roughly constant by growing the
// area with the node count.
inline Campaign campaign_sim1() {
  Campaign c;
  c.name = "sim1";
  c.model = MobilityModel::rpgm;
  c.duration_s = 900;
  c.v_min = 0.5;
  c.v_max = 5;
  c.node_counts = {20, 40, 60, 80};
  c.area_for = [](int nodes) { return 500.0 * (nodes / 20); };
  return c;
}

// Independent waypoint mobility on a fixed small field, node count swept.
inline Campaign campaign_sim2() {
  Campaign c;
  c.name = "sim2";
  c.model = MobilityModel::rwp;
  c.duration_s = 300;
  c.v_min = 1;
  c.v_max = 10;
  c.node_counts = {5, 10, 15, 20, 25};
  c.area_for = [](int) { return 600.0; };
  return c;
}

inline Campaign campaign_by_name(const std::string& name) {
  if (name == "sim1") return campaign_sim1();
  if (name == "sim2") return campaign_sim2();
  throw std::invalid_argument("unknown scenario: " + name + " (expected sim1 or sim2)");
}

inline ScenarioConfig campaign_config(const Campaign& c, Protocol p, int nodes) {
  ScenarioConfig cfg;
  cfg.protocol = p;
  cfg.node_count = nodes;
  cfg.area_m = c.area_for(nodes);
  cfg.duration_s = c.duration_s;
  cfg.mobility.model = c.model;
  cfg.mobility.v_min = c.v_min;
  cfg.mobility.v_max = c.v_max;
  cfg.mobility.pause_s = c.pause_s;
  validate(cfg);
  return cfg;
}

// Runs every (protocol, node count, seed) cell and returns rows sorted by
// protocol name, node count and seed — grouped per configuration, with the
// "avg" row appended after each configuration's seed rows. The ordering is
// independent of the order the inputs were given in and of worker timing.
inline std::vector<ResultRow> run_sweep(const Campaign& c, std::vector<Protocol> protocols,
                                        std::vector<std::uint64_t> seeds, int jobs,
                                        const std::function<void(const std::string&)>& progress = {}) {
  std::vector<int> node_counts = c.node_counts;
  auto sort_unique = [](auto& v, auto less) {
    std::sort(v.begin(), v.end(), less);
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  sort_unique(protocols, [](Protocol a, Protocol b) {
    return std::string_view(to_string(a)) < std::string_view(to_string(b));
  });
  sort_unique(node_counts, std::less<int>());
  sort_unique(seeds, std::less<std::uint64_t>());
  if (protocols.empty() || seeds.empty() || node_counts.empty())
    throw std::invalid_argument("run_sweep: nothing to run");

  struct Task {
    Protocol p;
    int nodes;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (Protocol p : protocols)
    for (int nodes : node_counts)
      for (std::uint64_t seed : seeds) tasks.push_back({p, nodes, seed});

  std::vector<ResultRow> seed_rows(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;

  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (failure) return;
      }
      const Task& t = tasks[i];
      try {
        Simulation sim(campaign_config(c, t.p, t.nodes), t.seed);
        sim.run();
        ResultRow row;
        row.protocol = to_string(t.p);
        row.nodes = t.nodes;
        row.area_m = c.area_for(t.nodes);
        row.duration_s = c.duration_s;
        row.seed = std::to_string(t.seed);
        row.m = sim.metrics();
        seed_rows[i] = std::move(row);
        if (progress) {
          std::lock_guard<std::mutex> lock(mu);
          progress(std::string(to_string(t.p)) + " nodes=" + std::to_string(t.nodes) +
                   " seed=" + std::to_string(t.seed));
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  int n_workers = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_workers));
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  // group output: the seeds of one configuration, then their average
  std::vector<ResultRow> rows;
  std::size_t i = 0;
  for (std::size_t pi = 0; pi < protocols.size(); ++pi) {
    for (std::size_t ni = 0; ni < node_counts.size(); ++ni) {
      std::vector<ResultRow> cell;
      for (std::size_t si = 0; si < seeds.size(); ++si) cell.push_back(std::move(seed_rows[i++]));
      ResultRow avg = average_rows(cell);
      for (ResultRow& r : cell) rows.push_back(std::move(r));
      rows.push_back(std::move(avg));
    }
  }
  return rows;
}

}  // namespace manetsim
