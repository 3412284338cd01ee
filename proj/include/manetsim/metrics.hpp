#pragma once

// Run-level accounting and the derived comparison metrics. Counters are
// collected while the run executes; metrics are pure functions of the final
// counters and meters.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "energy.hpp"

namespace manetsim {

struct RunCounters {
  long long data_originated = 0;
  long long data_delivered = 0;
  long long data_dropped = 0;
  std::map<std::string, long long> drop_reasons;

  long long control_transmissions = 0;  // per-hop, retries included
  long long data_transmissions = 0;
  long long delivered_payload_bits = 0;

  long long loop_violations = 0;            // delivered packets that revisited a node
  std::vector<NodeId> first_loop_path;      // first offending trail, for diagnostics

  // packets neither delivered nor dropped (buffered or in flight at run end)
  long long unresolved() const { return data_originated - data_delivered - data_dropped; }
};

struct RunMetrics {
  long long originated = 0;
  long long delivered = 0;
  std::optional<double> pdr;  // empty when nothing was originated
  std::optional<double> ro;   // control transmissions per delivered packet; empty at 0 delivered
  double throughput_kbps = 0;  // delivered payload bits per second / 1000

  // per-node means, joules
  double e_tx_j = 0;
  double e_rx_j = 0;
  double e_idle_j = 0;
  double e_over_j = 0;
  double avg_remaining_j = 0;
};

inline RunMetrics compute_metrics(const RunCounters& c, const std::vector<EnergyMeter>& meters,
                                  double duration_s) {
  RunMetrics m;
  m.originated = c.data_originated;
  m.delivered = c.data_delivered;
  if (c.data_originated > 0)
    m.pdr = static_cast<double>(c.data_delivered) / static_cast<double>(c.data_originated);
  if (c.data_delivered > 0)
    m.ro = static_cast<double>(c.control_transmissions) / static_cast<double>(c.data_delivered);
  m.throughput_kbps = static_cast<double>(c.delivered_payload_bits) / duration_s / 1000.0;
  if (!meters.empty()) {
    double n = static_cast<double>(meters.size());
    for (const EnergyMeter& em : meters) {
      m.e_tx_j += em.e_tx();
      m.e_rx_j += em.e_rx();
      m.e_idle_j += em.e_idle();
      m.e_over_j += em.e_over();
      m.avg_remaining_j += em.remaining();
    }
    m.e_tx_j /= n;
    m.e_rx_j /= n;
    m.e_idle_j /= n;
    m.e_over_j /= n;
    m.avg_remaining_j /= n;
  }
  return m;
}

}  // namespace manetsim
