#pragma once

// Reactive distance-vector agent. Routes are built only when traffic needs
// them: the origin floods a route request, the destination (or a node with a
// fresh enough cached route, when enabled) unicasts a reply back along the
// reverse path, and every node on the way installs next-hop state stamped
// with the destination's sequence number. Routes idle out after
// route_timeout_s; a failed transmission invalidates every route through the
// lost neighbor and advertises the loss in a route-error broadcast.
//
// Request floods are deduplicated per (src, bid) for seen_expiry_s. An
// origin retries the flood rreq_retries times, one discovery_timeout_s
// apart, before dropping everything buffered for that destination.

#include <deque>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "messages.hpp"
#include "routing.hpp"

namespace manetsim {

class AodvAgent : public RoutingAgent {
 public:
  struct Route {
    NodeId next_hop = 0;
    int hops = 0;
    std::uint32_t seq = 0;
    bool valid = false;
    SimTime expires_at = 0;
  };

  struct Counters {
    long long discoveries = 0;      // buffered destinations that triggered a flood
    long long rreq_floods = 0;      // floods originated here, retries included
    long long rrep_as_target = 0;   // replies sent because this node was asked for
    long long rrep_from_cache = 0;  // replies sent on the target's behalf
    long long rerr_sent = 0;
  };

  AodvAgent(NodeId self, NetworkApi& net, AodvSettings cfg) : RoutingAgent(self, net), cfg_(cfg) {}

  const char* name() const override { return "aodv"; }

  void send_data(DataPacket pkt) override {
    note_hop(pkt);
    NodeId dst = pkt.dst;
    const Route* r = fresh_route(dst);
    auto it = buffers_.find(dst);
    bool queue_empty = it == buffers_.end() || it->second.empty();
    if (r && queue_empty) {
      transmit_data(std::move(pkt), r->next_hop);
      return;
    }
    // no route yet, or older packets are still draining ahead of this one
    enqueue_buffered(std::move(pkt));
    if (r)
      start_drain(dst);
    else
      ensure_discovery(dst);
  }

  void receive(const Frame& f) override {
    if (const auto* rreq = std::get_if<AodvRreq>(&f.payload)) {
      handle_rreq(*rreq, f.src);
    } else if (const auto* rrep = std::get_if<AodvRrep>(&f.payload)) {
      handle_rrep(*rrep, f.src);
    } else if (const auto* rerr = std::get_if<AodvRerr>(&f.payload)) {
      handle_rerr(*rerr, f.src);
    } else if (const DataPacket* d = as_data(f)) {
      handle_data(*d);
    }
  }

  // --- inspection ---
  const Route* route(NodeId dst) const {
    auto it = routes_.find(dst);
    return it == routes_.end() ? nullptr : &it->second;
  }
  bool has_fresh_route(NodeId dst) const { return fresh_route(dst) != nullptr; }
  const Counters& counters() const { return counters_; }
  std::size_t buffered() const {
    std::size_t n = 0;
    for (const auto& [dst, q] : buffers_) n += q.size();
    return n;
  }

 private:
  const Route* fresh_route(NodeId dst) const {
    auto it = routes_.find(dst);
    if (it == routes_.end()) return nullptr;
    const Route& r = it->second;
    if (!r.valid || net_.now() >= r.expires_at) return nullptr;
    return &r;
  }

  void refresh(Route& r) { r.expires_at = net_.now() + cfg_.route_timeout_s; }

  static std::int32_t seq_newer(std::uint32_t a, std::uint32_t b) {
    return static_cast<std::int32_t>(a - b);  // >0 when a is fresher than b
  }

  // Install or update the route to `dest`, preferring fresher sequence
  // numbers and, within a generation, shorter paths. Returns true on adopt.
  bool offer_route(NodeId dest, NodeId next_hop, int hops, std::uint32_t seq) {
    if (dest == self_) return false;
    auto it = routes_.find(dest);
    bool adopt;
    if (it == routes_.end()) {
      adopt = true;
    } else {
      const Route& e = it->second;
      std::int32_t d = seq_newer(seq, e.seq);
      adopt = d > 0 || (d == 0 && (!e.valid || hops < e.hops));
    }
    if (!adopt) return false;
    Route& r = routes_[dest];
    r = Route{next_hop, hops, seq, true, net_.now() + cfg_.route_timeout_s};
    route_became_usable(dest);
    return true;
  }

  void route_became_usable(NodeId dest) {
    auto p = pending_.find(dest);
    if (p != pending_.end()) {
      net_.cancel_event(p->second.timer);
      pending_.erase(p);
    }
    auto b = buffers_.find(dest);
    if (b != buffers_.end() && !b->second.empty()) start_drain(dest);
  }

  void enqueue_buffered(DataPacket pkt) {
    auto& buf = buffers_[pkt.dst];
    buf.push_back(std::move(pkt));
    if (static_cast<int>(buf.size()) > cfg_.buffer_packets) {
      net_.drop_data(buf.front(), "buffer_overflow");
      buf.pop_front();
    }
  }

  void ensure_discovery(NodeId dst) {
    if (pending_.count(dst)) return;
    ++counters_.discoveries;
    pending_[dst];  // attempts start at zero
    flood_request(dst);
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
    const Route* r = fresh_route(dst);
    if (!r) {
      draining_.erase(dst);  // route died mid-drain; go look for a new one
      ensure_discovery(dst);
      return;
    }
    DataPacket pkt = std::move(it->second.front());
    it->second.pop_front();
    int frame_bytes = pkt.payload_bytes + net_.data_header_bytes();
    transmit_data(std::move(pkt), r->next_hop);
    net_.schedule(net_.now() + net_.frame_airtime(frame_bytes), [this, dst] { drain_step(dst); });
  }

  void transmit_data(DataPacket pkt, NodeId next_hop) {
    auto it = routes_.find(pkt.dst);
    if (it != routes_.end()) refresh(it->second);
    Frame f;
    f.kind = FrameKind::data;
    f.size_bytes = pkt.payload_bytes + net_.data_header_bytes();
    f.uid = net_.next_frame_uid();
    f.payload = std::move(pkt);
    net_.unicast(self_, next_hop, std::move(f), [this](const Frame& failed) {
      neighbor_lost(failed.dst);
      if (const DataPacket* d = as_data(failed)) net_.drop_data(*d, "link_break");
    });
  }

  void flood_request(NodeId dst) {
    auto& p = pending_[dst];
    ++p.attempts;
    ++counters_.rreq_floods;
    ++own_seq_;
    ++bid_;
    AodvRreq rreq;
    rreq.bid = bid_;
    rreq.src = self_;
    rreq.src_seq = own_seq_;
    rreq.dst = dst;
    auto it = routes_.find(dst);
    rreq.dst_seq_known = it == routes_.end() ? -1 : static_cast<std::int64_t>(it->second.seq);
    rreq.hop_count = 0;
    seen_[{self_, bid_}] = net_.now() + cfg_.seen_expiry_s;  // ignore echoes of our own flood

    Frame f;
    f.kind = FrameKind::control;
    f.size_bytes = cfg_.rreq_bytes;
    f.uid = net_.next_frame_uid();
    f.payload = rreq;
    net_.broadcast(self_, std::move(f));

    p.timer = net_.schedule(net_.now() + cfg_.discovery_timeout_s, [this, dst] {
      discovery_timed_out(dst);
    });
  }

  void discovery_timed_out(NodeId dst) {
    auto p = pending_.find(dst);
    if (p == pending_.end()) return;
    if (p->second.attempts <= cfg_.rreq_retries) {
      flood_request(dst);
      return;
    }
    pending_.erase(p);
    auto b = buffers_.find(dst);
    if (b == buffers_.end()) return;
    for (const DataPacket& pkt : b->second) net_.drop_data(pkt, "no_route_discovery");
    buffers_.erase(b);
  }

  void handle_rreq(const AodvRreq& rreq, NodeId prev) {
    auto key = std::make_pair(rreq.src, rreq.bid);
    auto s = seen_.find(key);
    if (s != seen_.end() && net_.now() < s->second) return;  // duplicate copy of this flood
    seen_[key] = net_.now() + cfg_.seen_expiry_s;
    if (rreq.src == self_) return;

    offer_route(rreq.src, prev, rreq.hop_count + 1, rreq.src_seq);

    if (rreq.dst == self_) {
      ++own_seq_;
      if (rreq.dst_seq_known >= 0 &&
          seq_newer(static_cast<std::uint32_t>(rreq.dst_seq_known), own_seq_) > 0)
        own_seq_ = static_cast<std::uint32_t>(rreq.dst_seq_known);
      ++counters_.rrep_as_target;
      send_rrep(prev, AodvRrep{self_, own_seq_, 0, rreq.src});
      return;
    }

    if (cfg_.intermediate_rrep) {
      const Route* r = fresh_route(rreq.dst);
      if (r && (rreq.dst_seq_known < 0 ||
                seq_newer(r->seq, static_cast<std::uint32_t>(rreq.dst_seq_known)) >= 0)) {
        ++counters_.rrep_from_cache;
        send_rrep(prev, AodvRrep{rreq.dst, r->seq, r->hops, rreq.src});
        return;
      }
    }

    AodvRreq fwd = rreq;
    fwd.hop_count += 1;
    if (fwd.hop_count > net_.max_hops()) return;
    Frame f;
    f.kind = FrameKind::control;
    f.size_bytes = cfg_.rreq_bytes;
    f.uid = net_.next_frame_uid();
    f.payload = fwd;
    net_.broadcast(self_, std::move(f));
  }

  void send_rrep(NodeId to, AodvRrep rrep) {
    Frame f;
    f.kind = FrameKind::control;
    f.size_bytes = cfg_.rrep_bytes;
    f.uid = net_.next_frame_uid();
    f.payload = std::move(rrep);
    net_.unicast(self_, to, std::move(f),
                 [this](const Frame& failed) { neighbor_lost(failed.dst); });
  }

  void handle_rrep(const AodvRrep& rrep, NodeId prev) {
    offer_route(rrep.dst, prev, rrep.hop_count + 1, rrep.dst_seq);
    if (rrep.origin == self_) return;  // buffered traffic was flushed on install
    const Route* back = fresh_route(rrep.origin);
    if (!back) return;  // reverse path evaporated; the origin's retry will rebuild it
    auto it = routes_.find(rrep.origin);
    if (it != routes_.end()) refresh(it->second);
    AodvRrep fwd = rrep;
    fwd.hop_count += 1;
    send_rrep(back->next_hop, fwd);
  }

  // Invalidate every route through a neighbor that stopped answering and
  // advertise the loss so upstream nodes purge their own tables.
  void neighbor_lost(NodeId neighbor) {
    std::vector<std::pair<NodeId, std::uint32_t>> lost;
    for (auto& [dest, r] : routes_) {
      if (!r.valid || r.next_hop != neighbor) continue;
      r.valid = false;
      r.seq += 1;
      lost.emplace_back(dest, r.seq);
    }
    if (!lost.empty()) send_rerr(std::move(lost));
  }

  void send_rerr(std::vector<std::pair<NodeId, std::uint32_t>> unreachable) {
    ++counters_.rerr_sent;
    Frame f;
    f.kind = FrameKind::control;
    f.size_bytes = cfg_.rerr_bytes;
    f.uid = net_.next_frame_uid();
    f.payload = AodvRerr{std::move(unreachable)};
    net_.broadcast(self_, std::move(f));
  }

  void handle_rerr(const AodvRerr& rerr, NodeId from) {
    std::vector<std::pair<NodeId, std::uint32_t>> forward;
    for (auto [dest, seq] : rerr.unreachable) {
      auto it = routes_.find(dest);
      if (it == routes_.end() || !it->second.valid || it->second.next_hop != from) continue;
      it->second.valid = false;
      if (seq_newer(seq, it->second.seq) > 0) it->second.seq = seq;
      forward.emplace_back(dest, it->second.seq);
    }
    if (!forward.empty()) send_rerr(std::move(forward));  // only losses that bit here propagate
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
    const Route* r = fresh_route(pkt.dst);
    if (!r) {
      auto it = routes_.find(pkt.dst);
      std::uint32_t seq = it == routes_.end() ? 0 : it->second.seq + (it->second.valid ? 1 : 0);
      if (it != routes_.end()) it->second.valid = false;
      net_.drop_data(pkt, "no_route");
      send_rerr({{pkt.dst, seq}});
      return;
    }
    transmit_data(std::move(pkt), r->next_hop);
  }

  struct Pending {
    int attempts = 0;       // floods sent so far for this destination
    std::uint64_t timer = 0;
  };

  AodvSettings cfg_;
  std::uint32_t own_seq_ = 0;
  std::uint32_t bid_ = 0;
  std::map<NodeId, Route> routes_;
  std::map<std::pair<NodeId, std::uint32_t>, SimTime> seen_;  // flood id -> dedupe expiry
  std::map<NodeId, std::deque<DataPacket>> buffers_;
  std::set<NodeId> draining_;  // destinations with a release chain in flight
  std::map<NodeId, Pending> pending_;
  Counters counters_;
};

}  // namespace manetsim
