#pragma once

// Scenario configuration: every tunable the simulator honours, JSON load
// with unknown-key rejection, and a JSON echo for run metadata.

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "core.hpp"
#include "mobility.hpp"

namespace manetsim {

enum class Protocol { aodv, dsdv, dsr };

inline const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::aodv: return "aodv";
    case Protocol::dsdv: return "dsdv";
    case Protocol::dsr: return "dsr";
  }
  return "?";
}

inline Protocol protocol_from_string(const std::string& s) {
  if (s == "aodv") return Protocol::aodv;
  if (s == "dsdv") return Protocol::dsdv;
  if (s == "dsr") return Protocol::dsr;
  throw std::invalid_argument("unknown protocol: " + s);
}

enum class MobilityModel { rwp, rpgm, fixed };

inline const char* to_string(MobilityModel m) {
  switch (m) {
    case MobilityModel::rwp: return "rwp";
    case MobilityModel::rpgm: return "rpgm";
    case MobilityModel::fixed: return "static";
  }
  return "?";
}

inline MobilityModel mobility_model_from_string(const std::string& s) {
  if (s == "rwp") return MobilityModel::rwp;
  if (s == "rpgm") return MobilityModel::rpgm;
  if (s == "static") return MobilityModel::fixed;
  throw std::invalid_argument("unknown mobility model: " + s);
}

struct MobilityConfig {
  MobilityModel model = MobilityModel::rwp;
  double v_min = 1.0;
  double v_max = 10.0;
  double pause_s = 0.0;
  RpgmConfig rpgm;
  std::vector<Vec2> positions;  // static model only; one entry per node
};

struct TrafficConfig {
  int flows = -1;  // -1: min(10, node_count / 2)
  double rate_pps = 8.0;
  int payload_bytes = 512;
  double start_stagger_s = 5.0;  // each flow starts uniformly inside [0, stagger]
  std::vector<std::pair<NodeId, NodeId>> pairs;  // explicit endpoints; overrides `flows`
};

struct LinkSettings {
  double range_m = 250.0;
  double bitrate_bps = 2e6;
  int queue_capacity = 50;           // drop-tail interface queue, data and control alike
  int retry_limit = 4;               // unicast retransmissions after the first attempt
  double broadcast_jitter_s = 0.01;  // uniform delay before a broadcast is queued
  int data_header_bytes = 32;        // fixed per-packet overhead outside routing headers
  int max_hops = 32;                 // hop budget; exceeding it drops the packet
};

struct EnergySettings {
  double tx_w = 0.330;
  double rx_w = 0.230;  // also the idle and overhear draw
  double initial_j = 1000.0;
};

struct DsdvSettings {
  double dump_interval_s = 15.0;
  double trigger_min_gap_s = 1.0;  // rate limit between consecutive update broadcasts
  int update_base_bytes = 8;
  int update_entry_bytes = 12;
  int buffer_packets = 64;  // origin-side packets held until a route appears
};

struct AodvSettings {
  double route_timeout_s = 10.0;
  double seen_expiry_s = 3.0;       // (src, bid) flood dedupe window
  double discovery_timeout_s = 1.0;
  int rreq_retries = 3;             // re-floods after the first request
  int buffer_packets = 64;          // per destination, while discovery runs
  bool intermediate_rrep = true;    // nodes with a fresh route answer on the dst's behalf
  int rreq_bytes = 48;
  int rrep_bytes = 44;
  int rerr_bytes = 32;
};

struct DsrSettings {
  double cache_lifetime_s = 300.0;
  int cache_capacity = 64;  // FIFO eviction
  double discovery_timeout_s = 1.0;
  int rreq_retries = 3;
  int buffer_packets = 64;
  int ctrl_base_bytes = 16;      // request/reply/error frames
  int ctrl_per_node_bytes = 4;   // per recorded node
  int srcroute_base_bytes = 8;   // data source-route header
  int srcroute_per_hop_bytes = 4;
};

struct ScenarioConfig {
  Protocol protocol = Protocol::aodv;
  int node_count = 20;
  double area_m = 600.0;  // square side; the playground is area_m x area_m
  double duration_s = 300.0;
  MobilityConfig mobility;
  TrafficConfig traffic;
  LinkSettings link;
  EnergySettings energy;
  DsdvSettings dsdv;
  AodvSettings aodv;
  DsrSettings dsr;
};

inline int default_flow_count(int node_count) { return std::min(10, node_count / 2); }

inline void validate(const ScenarioConfig& cfg) {
  if (cfg.node_count < 1) throw std::invalid_argument("config: node_count must be >= 1");
  if (cfg.area_m <= 0) throw std::invalid_argument("config: area_m must be positive");
  if (cfg.duration_s <= 0) throw std::invalid_argument("config: duration_s must be positive");
  if (cfg.mobility.model != MobilityModel::fixed) {
    if (cfg.mobility.v_min <= 0) throw std::invalid_argument("config: v_min must be positive");
    if (cfg.mobility.v_max < cfg.mobility.v_min)
      throw std::invalid_argument("config: v_max < v_min");
    if (cfg.mobility.pause_s < 0) throw std::invalid_argument("config: negative pause");
  } else if (static_cast<int>(cfg.mobility.positions.size()) != cfg.node_count) {
    throw std::invalid_argument("config: static mobility needs one position per node");
  }
  if (cfg.mobility.model == MobilityModel::rpgm && cfg.mobility.rpgm.groups < 1)
    throw std::invalid_argument("config: rpgm needs at least one group");
  if (cfg.traffic.rate_pps <= 0) throw std::invalid_argument("config: rate_pps must be positive");
  if (cfg.traffic.payload_bytes <= 0)
    throw std::invalid_argument("config: payload_bytes must be positive");
  if (cfg.traffic.start_stagger_s < 0)
    throw std::invalid_argument("config: negative start_stagger_s");
  if (cfg.traffic.pairs.empty()) {
    int flows = cfg.traffic.flows < 0 ? default_flow_count(cfg.node_count) : cfg.traffic.flows;
    if (flows > cfg.node_count / 2)
      throw std::invalid_argument("config: flows exceed node_count / 2 (endpoints are distinct)");
  } else {
    for (auto [src, dst] : cfg.traffic.pairs) {
      if (src == dst) throw std::invalid_argument("config: flow src == dst");
      if (src < 0 || src >= cfg.node_count || dst < 0 || dst >= cfg.node_count)
        throw std::invalid_argument("config: flow endpoint out of range");
    }
  }
  if (cfg.link.range_m <= 0 || cfg.link.bitrate_bps <= 0 || cfg.link.queue_capacity < 1 ||
      cfg.link.retry_limit < 0 || cfg.link.broadcast_jitter_s < 0 || cfg.link.max_hops < 1 ||
      cfg.link.data_header_bytes < 0)
    throw std::invalid_argument("config: bad link settings");
  if (cfg.energy.tx_w <= 0 || cfg.energy.rx_w <= 0 || cfg.energy.initial_j <= 0)
    throw std::invalid_argument("config: bad energy settings");
  if (cfg.dsdv.dump_interval_s <= 0 || cfg.dsdv.trigger_min_gap_s < 0 ||
      cfg.dsdv.update_base_bytes < 1 || cfg.dsdv.update_entry_bytes < 1 ||
      cfg.dsdv.buffer_packets < 0)
    throw std::invalid_argument("config: bad dsdv settings");
  if (cfg.aodv.route_timeout_s <= 0 || cfg.aodv.seen_expiry_s <= 0 ||
      cfg.aodv.discovery_timeout_s <= 0 || cfg.aodv.rreq_retries < 0 ||
      cfg.aodv.buffer_packets < 0 || cfg.aodv.rreq_bytes < 1 || cfg.aodv.rrep_bytes < 1 ||
      cfg.aodv.rerr_bytes < 1)
    throw std::invalid_argument("config: bad aodv settings");
  if (cfg.dsr.cache_lifetime_s <= 0 || cfg.dsr.cache_capacity < 1 ||
      cfg.dsr.discovery_timeout_s <= 0 || cfg.dsr.rreq_retries < 0 || cfg.dsr.buffer_packets < 0 ||
      cfg.dsr.ctrl_base_bytes < 1 || cfg.dsr.ctrl_per_node_bytes < 0 ||
      cfg.dsr.srcroute_base_bytes < 0 || cfg.dsr.srcroute_per_hop_bytes < 0)
    throw std::invalid_argument("config: bad dsr settings");
}

namespace detail {

// Wrapper that tracks which keys were consumed and rejects leftovers, so
// typos in config files fail loudly instead of silently using defaults.
class StrictObject {
 public:
  StrictObject(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw std::invalid_argument("config: " + path_ + " must be an object");
  }

  bool has(const char* key) {
    if (!j_.contains(key)) return false;
    seen_.insert(key);
    return true;
  }

  template <typename T>
  void get(const char* key, T& out) {
    if (!has(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw std::invalid_argument("config: bad value for " + path_ + key);
    }
  }

  const nlohmann::json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key()))
        throw std::invalid_argument("config: unknown key " + path_ + it.key());
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace detail

inline ScenarioConfig config_from_json(const nlohmann::json& j) {
  ScenarioConfig cfg;
  detail::StrictObject top(j, "");

  if (top.has("protocol")) cfg.protocol = protocol_from_string(top.raw("protocol").get<std::string>());
  top.get("node_count", cfg.node_count);
  top.get("area_m", cfg.area_m);
  top.get("duration_s", cfg.duration_s);

  if (top.has("mobility")) {
    detail::StrictObject m(top.raw("mobility"), "mobility.");
    if (m.has("model")) cfg.mobility.model = mobility_model_from_string(m.raw("model").get<std::string>());
    m.get("v_min", cfg.mobility.v_min);
    m.get("v_max", cfg.mobility.v_max);
    m.get("pause_s", cfg.mobility.pause_s);
    m.get("rpgm_groups", cfg.mobility.rpgm.groups);
    m.get("rpgm_offset_radius_m", cfg.mobility.rpgm.offset_radius_m);
    m.get("rpgm_jitter_radius_m", cfg.mobility.rpgm.jitter_radius_m);
    if (m.has("positions")) {
      for (const auto& p : m.raw("positions")) {
        if (!p.is_array() || p.size() != 2)
          throw std::invalid_argument("config: mobility.positions entries must be [x, y]");
        cfg.mobility.positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      }
    }
    m.finish();
  }

  if (top.has("traffic")) {
    detail::StrictObject t(top.raw("traffic"), "traffic.");
    t.get("flows", cfg.traffic.flows);
    t.get("rate_pps", cfg.traffic.rate_pps);
    t.get("payload_bytes", cfg.traffic.payload_bytes);
    t.get("start_stagger_s", cfg.traffic.start_stagger_s);
    if (t.has("pairs")) {
      for (const auto& p : t.raw("pairs")) {
        if (!p.is_array() || p.size() != 2)
          throw std::invalid_argument("config: traffic.pairs entries must be [src, dst]");
        cfg.traffic.pairs.emplace_back(p.at(0).get<NodeId>(), p.at(1).get<NodeId>());
      }
    }
    t.finish();
  }

  if (top.has("link")) {
    detail::StrictObject l(top.raw("link"), "link.");
    l.get("range_m", cfg.link.range_m);
    l.get("bitrate_bps", cfg.link.bitrate_bps);
    l.get("queue_capacity", cfg.link.queue_capacity);
    l.get("retry_limit", cfg.link.retry_limit);
    l.get("broadcast_jitter_s", cfg.link.broadcast_jitter_s);
    l.get("data_header_bytes", cfg.link.data_header_bytes);
    l.get("max_hops", cfg.link.max_hops);
    l.finish();
  }

  if (top.has("energy")) {
    detail::StrictObject e(top.raw("energy"), "energy.");
    e.get("tx_w", cfg.energy.tx_w);
    e.get("rx_w", cfg.energy.rx_w);
    e.get("initial_j", cfg.energy.initial_j);
    e.finish();
  }

  if (top.has("dsdv")) {
    detail::StrictObject d(top.raw("dsdv"), "dsdv.");
    d.get("dump_interval_s", cfg.dsdv.dump_interval_s);
    d.get("trigger_min_gap_s", cfg.dsdv.trigger_min_gap_s);
    d.get("update_base_bytes", cfg.dsdv.update_base_bytes);
    d.get("update_entry_bytes", cfg.dsdv.update_entry_bytes);
    d.get("buffer_packets", cfg.dsdv.buffer_packets);
    d.finish();
  }

  if (top.has("aodv")) {
    detail::StrictObject a(top.raw("aodv"), "aodv.");
    a.get("route_timeout_s", cfg.aodv.route_timeout_s);
    a.get("seen_expiry_s", cfg.aodv.seen_expiry_s);
    a.get("discovery_timeout_s", cfg.aodv.discovery_timeout_s);
    a.get("rreq_retries", cfg.aodv.rreq_retries);
    a.get("buffer_packets", cfg.aodv.buffer_packets);
    a.get("intermediate_rrep", cfg.aodv.intermediate_rrep);
    a.get("rreq_bytes", cfg.aodv.rreq_bytes);
    a.get("rrep_bytes", cfg.aodv.rrep_bytes);
    a.get("rerr_bytes", cfg.aodv.rerr_bytes);
    a.finish();
  }

  if (top.has("dsr")) {
    detail::StrictObject d(top.raw("dsr"), "dsr.");
    d.get("cache_lifetime_s", cfg.dsr.cache_lifetime_s);
    d.get("cache_capacity", cfg.dsr.cache_capacity);
    d.get("discovery_timeout_s", cfg.dsr.discovery_timeout_s);
    d.get("rreq_retries", cfg.dsr.rreq_retries);
    d.get("buffer_packets", cfg.dsr.buffer_packets);
    d.get("ctrl_base_bytes", cfg.dsr.ctrl_base_bytes);
    d.get("ctrl_per_node_bytes", cfg.dsr.ctrl_per_node_bytes);
    d.get("srcroute_base_bytes", cfg.dsr.srcroute_base_bytes);
    d.get("srcroute_per_hop_bytes", cfg.dsr.srcroute_per_hop_bytes);
    d.finish();
  }

  top.finish();
  validate(cfg);
  return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config: " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

inline nlohmann::json config_to_json(const ScenarioConfig& cfg) {
  nlohmann::json j;
  j["protocol"] = to_string(cfg.protocol);
  j["node_count"] = cfg.node_count;
  j["area_m"] = cfg.area_m;
  j["duration_s"] = cfg.duration_s;
  auto& m = j["mobility"];
  m["model"] = to_string(cfg.mobility.model);
  m["v_min"] = cfg.mobility.v_min;
  m["v_max"] = cfg.mobility.v_max;
  m["pause_s"] = cfg.mobility.pause_s;
  m["rpgm_groups"] = cfg.mobility.rpgm.groups;
  m["rpgm_offset_radius_m"] = cfg.mobility.rpgm.offset_radius_m;
  m["rpgm_jitter_radius_m"] = cfg.mobility.rpgm.jitter_radius_m;
  if (!cfg.mobility.positions.empty()) {
    auto& arr = m["positions"] = nlohmann::json::array();
    for (Vec2 p : cfg.mobility.positions) arr.push_back({p.x, p.y});
  }
  auto& t = j["traffic"];
  t["flows"] = cfg.traffic.flows;
  t["rate_pps"] = cfg.traffic.rate_pps;
  t["payload_bytes"] = cfg.traffic.payload_bytes;
  t["start_stagger_s"] = cfg.traffic.start_stagger_s;
  if (!cfg.traffic.pairs.empty()) {
    auto& arr = t["pairs"] = nlohmann::json::array();
    for (auto [src, dst] : cfg.traffic.pairs) arr.push_back({src, dst});
  }
  auto& l = j["link"];
  l["range_m"] = cfg.link.range_m;
  l["bitrate_bps"] = cfg.link.bitrate_bps;
  l["queue_capacity"] = cfg.link.queue_capacity;
  l["retry_limit"] = cfg.link.retry_limit;
  l["broadcast_jitter_s"] = cfg.link.broadcast_jitter_s;
  l["data_header_bytes"] = cfg.link.data_header_bytes;
  l["max_hops"] = cfg.link.max_hops;
  auto& e = j["energy"];
  e["tx_w"] = cfg.energy.tx_w;
  e["rx_w"] = cfg.energy.rx_w;
  e["initial_j"] = cfg.energy.initial_j;
  auto& d = j["dsdv"];
  d["dump_interval_s"] = cfg.dsdv.dump_interval_s;
  d["trigger_min_gap_s"] = cfg.dsdv.trigger_min_gap_s;
  d["update_base_bytes"] = cfg.dsdv.update_base_bytes;
  d["update_entry_bytes"] = cfg.dsdv.update_entry_bytes;
  d["buffer_packets"] = cfg.dsdv.buffer_packets;
  auto& a = j["aodv"];
  a["route_timeout_s"] = cfg.aodv.route_timeout_s;
  a["seen_expiry_s"] = cfg.aodv.seen_expiry_s;
  a["discovery_timeout_s"] = cfg.aodv.discovery_timeout_s;
  a["rreq_retries"] = cfg.aodv.rreq_retries;
  a["buffer_packets"] = cfg.aodv.buffer_packets;
  a["intermediate_rrep"] = cfg.aodv.intermediate_rrep;
  a["rreq_bytes"] = cfg.aodv.rreq_bytes;
  a["rrep_bytes"] = cfg.aodv.rrep_bytes;
  a["rerr_bytes"] = cfg.aodv.rerr_bytes;
  auto& ds = j["dsr"];
  ds["cache_lifetime_s"] = cfg.dsr.cache_lifetime_s;
  ds["cache_capacity"] = cfg.dsr.cache_capacity;
  ds["discovery_timeout_s"] = cfg.dsr.discovery_timeout_s;
  ds["rreq_retries"] = cfg.dsr.rreq_retries;
  ds["buffer_packets"] = cfg.dsr.buffer_packets;
  ds["ctrl_base_bytes"] = cfg.dsr.ctrl_base_bytes;
  ds["ctrl_per_node_bytes"] = cfg.dsr.ctrl_per_node_bytes;
  ds["srcroute_base_bytes"] = cfg.dsr.srcroute_base_bytes;
  ds["srcroute_per_hop_bytes"] = cfg.dsr.srcroute_per_hop_bytes;
  return j;
}

}  // namespace manetsim
