#pragma once

// Constant-bit-rate traffic: each flow emits fixed-size packets at a fixed
// rate from a staggered start. Endpoints are either given explicitly or
// drawn as disjoint src/dst pairs from a shuffled node list, so no node
// serves two roles in the default setup.

#include <stdexcept>
#include <string>
#include <vector>

#include "config.hpp"
#include "core.hpp"

namespace manetsim {

struct CbrFlow {
  int flow_id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  double start_s = 0;
  double rate_pps = 0;
  int payload_bytes = 0;

  // emission time of the k-th packet, anchored to the start so rounding
  // never accumulates across a long run
  SimTime packet_time(std::int64_t k) const { return start_s + static_cast<double>(k) / rate_pps; }
};

inline std::vector<CbrFlow> build_flows(const TrafficConfig& cfg, int node_count,
                                        RngStream& rng) {
  std::vector<CbrFlow> flows;
  if (!cfg.pairs.empty()) {
    for (std::size_t i = 0; i < cfg.pairs.size(); ++i) {
      auto [src, dst] = cfg.pairs[i];
      flows.push_back({static_cast<int>(i), src, dst, rng.uniform(0, cfg.start_stagger_s),
                       cfg.rate_pps, cfg.payload_bytes});
    }
    return flows;
  }

  int want = cfg.flows < 0 ? default_flow_count(node_count) : cfg.flows;
  if (2 * want > node_count)
    throw std::invalid_argument("traffic: not enough nodes for " + std::to_string(want) +
                                " flows with distinct endpoints");
  std::vector<NodeId> ids(static_cast<std::size_t>(node_count));
  for (int i = 0; i < node_count; ++i) ids[static_cast<std::size_t>(i)] = i;
  rng.shuffle(ids);
  for (int i = 0; i < want; ++i) {
    flows.push_back({i, ids[static_cast<std::size_t>(2 * i)], ids[static_cast<std::size_t>(2 * i + 1)],
                     rng.uniform(0, cfg.start_stagger_s), cfg.rate_pps, cfg.payload_bytes});
  }
  return flows;
}

}  // namespace manetsim
