#pragma once

// Proactive distance-vector agent. Every node keeps a route to every known
// destination, stamped with the destination's sequence number: destinations
// advertise even numbers, and a node that detects a broken link re-stamps
// the affected routes with the next odd number. A route is adopted iff its
// sequence number is newer, or equally fresh with a shorter metric.
//
// Full-table dumps go out periodically; adopted metric changes additionally
// trigger incremental updates, rate-limited to one per trigger_min_gap_s.
// Packets with no usable route wait in a small origin-side buffer until an
// update produces one.

#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "config.hpp"
#include "messages.hpp"
#include "routing.hpp"

namespace manetsim {

class DsdvAgent : public RoutingAgent {
 public:
  struct Entry {
    NodeId next_hop = 0;
    int hops = kInfHops;
    std::uint32_t seq = 0;
    SimTime installed_at = 0;
  };

  struct Counters {
    long long dumps_sent = 0;
    long long triggered_sent = 0;
    long long updates_heard = 0;
  };

  DsdvAgent(NodeId self, NetworkApi& net, DsdvSettings cfg) : RoutingAgent(self, net), cfg_(cfg) {
    table_[self_] = Entry{self_, 0, own_seq_, 0};
  }

  const char* name() const override { return "dsdv"; }

  void start() override {
    // stagger first dumps so the network does not fire in lockstep
    double first = net_.stream("dsdv." + std::to_string(self_))
                       .uniform(0, std::min(1.0, cfg_.dump_interval_s));
    net_.schedule(net_.now() + first, [this] { periodic_dump(); });
  }

  void send_data(DataPacket pkt) override {
    note_hop(pkt);
    NodeId dst = pkt.dst;
    const Entry* e = usable_route(dst);
    auto it = buffers_.find(dst);
    bool queue_empty = it == buffers_.end() || it->second.empty();
    if (e && queue_empty) {
      transmit(std::move(pkt), e->next_hop);
      return;
    }
    // no route yet, or older packets are still draining ahead of this one
    enqueue_buffered(std::move(pkt));
    if (e) start_drain(dst);
  }

  void receive(const Frame& f) override {
    if (const auto* upd = std::get_if<DsdvUpdate>(&f.payload)) {
      handle_update(*upd, f.src);
    } else if (const DataPacket* d = as_data(f)) {
      handle_data(*d);
    }
  }

  // --- inspection ---
  const std::map<NodeId, Entry>& table() const { return table_; }
  const Entry* route(NodeId dst) const {
    auto it = table_.find(dst);
    return it == table_.end() ? nullptr : &it->second;
  }
  const Counters& counters() const { return counters_; }
  std::size_t buffered() const {
    std::size_t n = 0;
    for (const auto& [dst, q] : buffers_) n += q.size();
    return n;
  }

 private:
  const Entry* usable_route(NodeId dst) const {
    auto it = table_.find(dst);
    if (it == table_.end() || it->second.hops >= kInfHops) return nullptr;
    return &it->second;
  }

  void handle_data(DataPacket pkt) {
    note_hop(pkt);
    if (pkt.dst == self_) {
      net_.deliver_data(self_, pkt);
      return;
    }
    if (hop_budget_exceeded(pkt)) {
      net_.drop_data(pkt, "ttl_exceeded");
      return;
    }
    const Entry* e = usable_route(pkt.dst);
    if (!e) {
      net_.drop_data(pkt, "no_route");
      return;
    }
    transmit(std::move(pkt), e->next_hop);
  }

  void transmit(DataPacket pkt, NodeId next_hop) {
    Frame f;
    f.kind = FrameKind::data;
    f.size_bytes = pkt.payload_bytes + net_.data_header_bytes();
    f.uid = net_.next_frame_uid();
    f.payload = std::move(pkt);
    net_.unicast(self_, next_hop, std::move(f), [this](const Frame& failed) {
      handle_link_break(failed.dst);
      if (const DataPacket* d = as_data(failed)) net_.drop_data(*d, "link_break");
    });
  }

  void handle_update(const DsdvUpdate& upd, NodeId from) {
    ++counters_.updates_heard;
    bool gained_route = false;
    for (const DsdvEntryAdv& adv : upd.entries) {
      if (adv.dest == self_) continue;  // nobody else speaks for this node
      int cand_hops = adv.hops >= kInfHops ? kInfHops : adv.hops + 1;
      auto it = table_.find(adv.dest);
      bool adopt;
      if (it == table_.end())
        adopt = true;
      else if (adv.seq != it->second.seq)
        adopt = static_cast<std::int32_t>(adv.seq - it->second.seq) > 0;  // newer wins
      else
        adopt = cand_hops < it->second.hops;  // same generation: shorter wins
      if (!adopt) continue;
      bool metric_change = it == table_.end() || it->second.hops != cand_hops;
      table_[adv.dest] = Entry{from, cand_hops, adv.seq, net_.now()};
      if (metric_change) dirty_.insert(adv.dest);
      if (cand_hops < kInfHops) gained_route = true;
    }
    if (!dirty_.empty()) schedule_trigger();
    if (gained_route) flush_buffers();
  }

  void handle_link_break(NodeId neighbor) {
    bool changed = false;
    for (auto& [dest, e] : table_) {
      if (e.next_hop != neighbor || e.hops >= kInfHops || dest == self_) continue;
      e.hops = kInfHops;
      e.seq += 1;  // odd: break marker, beats any advert of the same generation
      e.installed_at = net_.now();
      dirty_.insert(dest);
      changed = true;
    }
    if (changed) schedule_trigger();
  }

  void periodic_dump() {
    own_seq_ += 2;  // destinations always advertise even numbers
    table_[self_] = Entry{self_, 0, own_seq_, net_.now()};
    DsdvUpdate upd;
    upd.origin = self_;
    for (const auto& [dest, e] : table_) upd.entries.push_back({dest, e.hops, e.seq});
    send_update(upd);
    ++counters_.dumps_sent;
    dirty_.clear();  // the full dump supersedes anything pending
    net_.schedule(net_.now() + cfg_.dump_interval_s, [this] { periodic_dump(); });
  }

  void schedule_trigger() {
    if (trigger_pending_) return;
    trigger_pending_ = true;
    SimTime at = std::max(net_.now(), last_update_at_ + cfg_.trigger_min_gap_s);
    net_.schedule(at, [this] {
      trigger_pending_ = false;
      if (dirty_.empty()) return;  // a periodic dump got there first
      DsdvUpdate upd;
      upd.origin = self_;
      for (NodeId dest : dirty_) {
        auto it = table_.find(dest);
        if (it != table_.end()) upd.entries.push_back({dest, it->second.hops, it->second.seq});
      }
      dirty_.clear();
      send_update(upd);
      ++counters_.triggered_sent;
    });
  }

  void send_update(const DsdvUpdate& upd) {
    Frame f;
    f.kind = FrameKind::control;
    f.size_bytes =
        cfg_.update_base_bytes + cfg_.update_entry_bytes * static_cast<int>(upd.entries.size());
    f.uid = net_.next_frame_uid();
    f.payload = upd;
    net_.broadcast(self_, std::move(f));
    last_update_at_ = net_.now();
  }

  void enqueue_buffered(DataPacket pkt) {
    auto& buf = buffers_[pkt.dst];
    buf.push_back(std::move(pkt));
    if (static_cast<int>(buf.size()) > cfg_.buffer_packets) {
      net_.drop_data(buf.front(), "buffer_overflow");
      buf.pop_front();
    }
  }

  void flush_buffers() {
    for (const auto& [dst, q] : buffers_)
      if (!q.empty() && usable_route(dst)) start_drain(dst);
  }

  // Buffered packets are released one frame-time apart, matching the rate
  // the interface serializes them at; a burst handed down all at once would
  // only overflow the bounded interface queue.
  void start_drain(NodeId dst) {
    if (!draining_.insert(dst).second) return;  // a drain chain is already running
    drain_step(dst);
  }

  void drain_step(NodeId dst) {
    auto it = buffers_.find(dst);
    if (it == buffers_.end() || it->second.empty()) {
      if (it != buffers_.end()) buffers_.erase(it);
      draining_.erase(dst);
      return;
    }
    const Entry* e = usable_route(dst);
    if (!e) {
      draining_.erase(dst);  // route went away; wait for the next table change
      return;
    }
    DataPacket pkt = std::move(it->second.front());
    it->second.pop_front();
    int frame_bytes = pkt.payload_bytes + net_.data_header_bytes();
    transmit(std::move(pkt), e->next_hop);
    net_.schedule(net_.now() + net_.frame_airtime(frame_bytes), [this, dst] { drain_step(dst); });
  }

  DsdvSettings cfg_;
  std::uint32_t own_seq_ = 0;
  std::map<NodeId, Entry> table_;
  std::set<NodeId> dirty_;  // destinations whose metric changed since the last update
  std::map<NodeId, std::deque<DataPacket>> buffers_;
  std::set<NodeId> draining_;  // destinations with a release chain in flight
  bool trigger_pending_ = false;
  SimTime last_update_at_ = -1e9;
  Counters counters_;
};

}  // namespace manetsim
