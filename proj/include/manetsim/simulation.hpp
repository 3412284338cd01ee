#pragma once

// One complete run: wires the event engine, mobility tracks, energy meters,
// link layer, routing agents and traffic sources together, executes the
// scenario, and checks the run-end invariants. Identical config + seed give
// a bit-identical run on every platform.

#include <iomanip>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "aodv.hpp"
#include "config.hpp"
#include "core.hpp"
#include "dsdv.hpp"
#include "dsr.hpp"
#include "energy.hpp"
#include "messages.hpp"
#include "metrics.hpp"
#include "mobility.hpp"
#include "phy.hpp"
#include "routing.hpp"
#include "traffic.hpp"

namespace manetsim {

class Simulation : public NetworkApi {
 public:
  Simulation(ScenarioConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), seed_(seed), engine_(cfg_.duration_s) {
    validate(cfg_);
    build_tracks();
    build_meters();
    build_link();
    build_agents();
    build_traffic();
  }

  // --- NetworkApi ---
  SimTime now() const override { return engine_.now(); }
  std::uint64_t schedule(SimTime at, std::function<void()> fn) override {
    return engine_.schedule(at, std::move(fn));
  }
  void cancel_event(std::uint64_t id) override { engine_.cancel(id); }
  void unicast(NodeId src, NodeId dst, Frame f, std::function<void(const Frame&)> on_fail) override {
    link_->send_unicast(src, dst, std::move(f), std::move(on_fail));
  }
  void broadcast(NodeId src, Frame f) override { link_->send_broadcast(src, std::move(f)); }
  std::uint64_t next_frame_uid() override { return ++frame_uid_; }

  RngStream& stream(const std::string& label) override {
    auto it = streams_.find(label);
    if (it == streams_.end()) it = streams_.emplace(label, RngStream(seed_, label)).first;
    return it->second;
  }

  void deliver_data(NodeId at, const DataPacket& pkt) override {
    ++counters_.data_delivered;
    counters_.delivered_payload_bits += static_cast<long long>(pkt.payload_bytes) * 8;
    std::set<NodeId> unique(pkt.path.begin(), pkt.path.end());
    if (unique.size() != pkt.path.size()) {
      ++counters_.loop_violations;
      if (counters_.first_loop_path.empty()) counters_.first_loop_path = pkt.path;
    }
    (void)at;
  }

  void drop_data(const DataPacket& pkt, const char* reason) override {
    ++counters_.data_dropped;
    ++counters_.drop_reasons[reason];
    (void)pkt;
  }

  int max_hops() const override { return cfg_.link.max_hops; }
  int data_header_bytes() const override { return cfg_.link.data_header_bytes; }
  double frame_airtime(int size_bytes) const override {
    return tx_duration(size_bytes, cfg_.link.bitrate_bps);
  }

  // --- tracing (set before run) ---

  // CSV: t,node,x,y sampled every interval_s, starting at t = 0
  void trace_positions_to(std::ostream& out, double interval_s = 1.0) {
    motion_out_ = &out;
    motion_interval_ = interval_s;
  }

  // CSV: t,event,node,frame_uid,kind,bytes for tx/rx/overhear/drop/fail
  void trace_link_events_to(std::ostream& out) {
    link_->set_trace([&out](SimTime t, const char* ev, NodeId n, const Frame& f) {
      out << std::setprecision(9) << t << ',' << ev << ',' << n << ',' << f.uid << ','
          << (f.kind == FrameKind::control ? "control" : "data") << ',' << f.size_bytes << '\n';
    });
  }

  // --- execution ---

  void run() {
    if (ran_) throw invariant_error("run: called twice");
    ran_ = true;
    if (motion_out_) {
      *motion_out_ << "t,node,x,y\n";
      schedule_motion_sample(0.0);
    }
    for (auto& agent : agents_) agent->start();
    for (std::size_t i = 0; i < flows_.size(); ++i) schedule_packet(i, 0);

    engine_.run_until(cfg_.duration_s);
    engine_.drain_remaining();
    for (EnergyMeter& m : meters_) m.finalize_idle(cfg_.duration_s);

    counters_.control_transmissions = link_->stats().control_tx;
    counters_.data_transmissions = link_->stats().data_tx;
    check_invariants();
  }

  // --- results and inspection ---

  const RunCounters& counters() const { return counters_; }
  RunMetrics metrics() const {
    if (!ran_) throw invariant_error("metrics: run() has not completed");
    return compute_metrics(counters_, meters_, cfg_.duration_s);
  }
  const LinkLayer::Stats& link_stats() const { return link_->stats(); }
  std::uint64_t event_hash() const { return engine_.event_hash(); }

  const ScenarioConfig& config() const { return cfg_; }
  std::uint64_t seed() const { return seed_; }
  Engine& engine() { return engine_; }
  LinkLayer& link() { return *link_; }
  const std::vector<CbrFlow>& flows() const { return flows_; }
  const EnergyMeter& meter(NodeId n) const { return meters_.at(static_cast<std::size_t>(n)); }
  Vec2 position(NodeId n, SimTime t) const { return tracks_.at(static_cast<std::size_t>(n))->at(t); }
  RoutingAgent& agent(NodeId n) { return *agents_.at(static_cast<std::size_t>(n)); }

  template <typename T>
  T& agent_as(NodeId n) {
    return dynamic_cast<T&>(agent(n));
  }

 private:
  void build_tracks() {
    Area area{cfg_.area_m, cfg_.area_m};
    const MobilityConfig& mc = cfg_.mobility;
    StreamFactory fresh = [this](const std::string& label) { return RngStream(seed_, label); };
    switch (mc.model) {
      case MobilityModel::rwp:
        tracks_ = build_rwp_tracks(cfg_.node_count, area, mc.v_min, mc.v_max, mc.pause_s,
                                   cfg_.duration_s, fresh);
        break;
      case MobilityModel::rpgm:
        tracks_ = build_rpgm_tracks(cfg_.node_count, area, mc.v_min, mc.v_max, mc.pause_s,
                                    cfg_.duration_s, mc.rpgm, fresh);
        break;
      case MobilityModel::fixed:
        tracks_ = build_fixed_tracks(mc.positions, area);
        break;
    }
  }

  void build_meters() {
    PowerProfile p;
    p.tx_w = cfg_.energy.tx_w;
    p.rx_w = cfg_.energy.rx_w;
    p.initial_j = cfg_.energy.initial_j;
    p.bitrate_bps = cfg_.link.bitrate_bps;
    meters_.assign(static_cast<std::size_t>(cfg_.node_count), EnergyMeter(p));
  }

  void build_link() {
    link_ = std::make_unique<LinkLayer>(
        engine_, cfg_.link, cfg_.node_count, meters_, RngStream(seed_, "link.jitter"),
        [this](NodeId n, SimTime t) { return tracks_[static_cast<std::size_t>(n)]->at(t); },
        [this](NodeId n, SimTime t) { return meters_[static_cast<std::size_t>(n)].alive_at(t); },
        [this](NodeId n, const Frame& f) { agents_[static_cast<std::size_t>(n)]->receive(f); },
        [this](const DataPacket& pkt, const char* reason) { drop_data(pkt, reason); });
  }

  void build_agents() {
    agents_.reserve(static_cast<std::size_t>(cfg_.node_count));
    for (NodeId id = 0; id < cfg_.node_count; ++id) {
      switch (cfg_.protocol) {
        case Protocol::aodv:
          agents_.push_back(std::make_unique<AodvAgent>(id, *this, cfg_.aodv));
          break;
        case Protocol::dsdv:
          agents_.push_back(std::make_unique<DsdvAgent>(id, *this, cfg_.dsdv));
          break;
        case Protocol::dsr:
          agents_.push_back(std::make_unique<DsrAgent>(id, *this, cfg_.dsr));
          break;
      }
    }
  }

  void build_traffic() { flows_ = build_flows(cfg_.traffic, cfg_.node_count, stream("traffic")); }

  void schedule_packet(std::size_t flow_idx, std::int64_t k) {
    const CbrFlow& flow = flows_[flow_idx];
    SimTime at = flow.packet_time(k);
    if (at >= cfg_.duration_s) return;
    engine_.schedule(at, [this, flow_idx, k] {
      const CbrFlow& f = flows_[flow_idx];
      DataPacket pkt;
      pkt.flow_id = f.flow_id;
      pkt.seq = k;
      pkt.origin = f.src;
      pkt.dst = f.dst;
      pkt.payload_bytes = f.payload_bytes;
      pkt.originated_at = now();
      ++counters_.data_originated;
      agents_[static_cast<std::size_t>(f.src)]->send_data(std::move(pkt));
      schedule_packet(flow_idx, k + 1);
    });
  }

  void schedule_motion_sample(SimTime t) {
    if (t > cfg_.duration_s) return;
    engine_.schedule(t, [this, t] {
      for (NodeId n = 0; n < cfg_.node_count; ++n) {
        Vec2 p = tracks_[static_cast<std::size_t>(n)]->at(t);
        *motion_out_ << std::setprecision(9) << t << ',' << n << ',' << p.x << ',' << p.y << '\n';
      }
      schedule_motion_sample(t + motion_interval_);
    });
  }

  void check_invariants() const {
    if (engine_.delivered_count() != engine_.scheduled_count() - engine_.cancelled_count())
      throw invariant_error("run end: event bookkeeping does not balance");
    for (const EnergyMeter& m : meters_) {
      double balance = m.profile().initial_j - m.remaining() - m.consumed();
      if (std::abs(balance) > 1e-9 * m.profile().initial_j)
        throw invariant_error("run end: energy accounts do not balance");
    }
    const LinkLayer::Stats& s = *&link_->stats();
    if (s.enqueued != s.completed + link_->residual())
      throw invariant_error("run end: frame accounting does not balance");
    if (counters_.unresolved() < 0)
      throw invariant_error("run end: more packet fates than originated packets");
  }

  ScenarioConfig cfg_;
  std::uint64_t seed_;
  Engine engine_;
  std::map<std::string, RngStream> streams_;
  std::vector<std::unique_ptr<Trajectory>> tracks_;
  std::vector<EnergyMeter> meters_;
  std::unique_ptr<LinkLayer> link_;
  std::vector<std::unique_ptr<RoutingAgent>> agents_;
  std::vector<CbrFlow> flows_;
  RunCounters counters_;
  std::uint64_t frame_uid_ = 0;
  bool ran_ = false;
  std::ostream* motion_out_ = nullptr;
  double motion_interval_ = 1.0;
};

}  // namespace manetsim
