#pragma once

// Source-routing agent. The origin discovers a complete node-by-node path,
// embeds it in every data packet, and intermediate nodes forward by cursor
// without any per-destination state. Request floods accumulate the traversed
// path in a route record; only the destination answers, sending the reply
// hop-by-hop back along the reversed record. Discovered routes live in a
// bounded FIFO cache at the endpoints, so later packets (and failures) can
// fall back to alternate cached paths without a fresh flood.
//
// A forwarder that loses its downstream hop reports the broken link to the
// packet's source along the traversed prefix; every node relaying the report
// evicts cached routes using that link. The origin itself retries a failed
// first hop over an alternate cached route before resorting to discovery.

#include <algorithm>
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

class DsrAgent : public RoutingAgent {
 public:
  struct CachedRoute {
    std::vector<NodeId> path;  // self .. destination
    SimTime stored_at = 0;
  };

  struct Counters {
    long long discoveries = 0;
    long long rreq_floods = 0;   // floods originated here, retries included
    long long rrep_sent = 0;     // replies sent as the asked-for destination
    long long rerr_sent = 0;     // broken-link reports originated here
    long long cache_hits = 0;    // packets sent without a flood
    long long reroutes = 0;      // first-hop failures recovered from cache
  };

  DsrAgent(NodeId self, NetworkApi& net, DsrSettings cfg) : RoutingAgent(self, net), cfg_(cfg) {}

  const char* name() const override { return "dsr"; }

  void send_data(DataPacket pkt) override {
    note_hop(pkt);
    NodeId dst = pkt.dst;
    const std::vector<NodeId>* path = lookup(dst);
    auto it = buffers_.find(dst);
    bool queue_empty = it == buffers_.end() || it->second.empty();
    if (path && queue_empty) {
      ++counters_.cache_hits;
      dispatch(std::move(pkt), *path);
      return;
    }
    if (path) {
      // older packets are still draining ahead of this one; keep the order
      ++counters_.cache_hits;
      enqueue_buffered(std::move(pkt));
      start_drain(dst);
      return;
    }
    buffer_and_discover(std::move(pkt));
  }

  void receive(const Frame& f) override {
    if (const auto* rreq = std::get_if<DsrRreq>(&f.payload)) {
      handle_rreq(*rreq);
    } else if (const auto* rrep = std::get_if<DsrRrep>(&f.payload)) {
      handle_rrep(*rrep);
    } else if (const auto* rerr = std::get_if<DsrRerr>(&f.payload)) {
      handle_rerr(*rerr);
    } else if (const DataPacket* d = as_data(f)) {
      handle_data(*d);
    }
  }

  // --- inspection ---
  const std::deque<CachedRoute>& cache() const { return cache_; }
  const std::vector<NodeId>* cached_route(NodeId dst) const { return lookup(dst); }
  const Counters& counters() const { return counters_; }
  std::size_t buffered() const {
    std::size_t n = 0;
    for (const auto& [dst, q] : buffers_) n += q.size();
    return n;
  }

 private:
  // --- route cache ---

  bool expired(const CachedRoute& r) const {
    return net_.now() - r.stored_at > cfg_.cache_lifetime_s;
  }

  // Shortest live route to dst; on equal length the earliest-stored wins.
  const std::vector<NodeId>* lookup(NodeId dst) const {
    const std::vector<NodeId>* best = nullptr;
    for (const CachedRoute& r : cache_) {
      if (expired(r) || r.path.back() != dst) continue;
      if (!best || r.path.size() < best->size()) best = &r.path;
    }
    return best;
  }

  void store_route(std::vector<NodeId> path) {
    if (path.size() < 2 || path.front() != self_) return;
    for (auto it = cache_.begin(); it != cache_.end(); ++it) {
      if (it->path == path) {
        cache_.erase(it);  // re-learned: refresh its age and FIFO position
        break;
      }
    }
    cache_.push_back(CachedRoute{std::move(path), net_.now()});
    while (static_cast<int>(cache_.size()) > cfg_.cache_capacity) cache_.pop_front();
  }

  // Drop every cached route that would cross the broken directed link.
  void prune_link(NodeId from, NodeId to) {
    auto uses_link = [&](const CachedRoute& r) {
      for (std::size_t i = 0; i + 1 < r.path.size(); ++i)
        if (r.path[i] == from && r.path[i + 1] == to) return true;
      return false;
    };
    cache_.erase(std::remove_if(cache_.begin(), cache_.end(), uses_link), cache_.end());
  }

  // --- data path ---

  void dispatch(DataPacket pkt, const std::vector<NodeId>& path) {
    pkt.source_route = path;
    pkt.sr_cursor = 1;
    transmit(std::move(pkt));
  }

  // Sends the packet to source_route[sr_cursor]; the transmitter is always
  // source_route[sr_cursor - 1] == self.
  void transmit(DataPacket pkt) {
    NodeId next = pkt.source_route[pkt.sr_cursor];
    int hops = static_cast<int>(pkt.source_route.size()) - 1;
    Frame f;
    f.kind = FrameKind::data;
    f.size_bytes = pkt.payload_bytes + net_.data_header_bytes() + cfg_.srcroute_base_bytes +
                   cfg_.srcroute_per_hop_bytes * hops;
    f.uid = net_.next_frame_uid();
    f.payload = std::move(pkt);
    net_.unicast(self_, next, std::move(f), [this](const Frame& failed) {
      const DataPacket* d = as_data(failed);
      if (!d) return;
      NodeId bad_next = d->source_route[d->sr_cursor];
      if (d->sr_cursor == 1) {
        origin_reroute(*d, bad_next);  // the origin still owns the packet
      } else {
        prune_link(self_, bad_next);
        report_broken_link(*d, bad_next);
        net_.drop_data(*d, "link_break");
      }
    });
  }

  void origin_reroute(DataPacket pkt, NodeId bad_next) {
    prune_link(self_, bad_next);
    const std::vector<NodeId>* alt = lookup(pkt.dst);
    if (alt) {
      ++counters_.reroutes;
      pkt.source_route.clear();
      pkt.sr_cursor = 0;
      dispatch(std::move(pkt), *alt);
      return;
    }
    pkt.source_route.clear();
    pkt.sr_cursor = 0;
    buffer_and_discover(std::move(pkt));
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
    if (pkt.sr_cursor + 1 >= pkt.source_route.size() ||
        pkt.source_route[pkt.sr_cursor] != self_) {
      net_.drop_data(pkt, "no_route");  // malformed or truncated source route
      return;
    }
    pkt.sr_cursor += 1;
    transmit(std::move(pkt));
  }

  // --- discovery ---

  void buffer_and_discover(DataPacket pkt) {
    NodeId dst = pkt.dst;
    enqueue_buffered(std::move(pkt));
    ensure_discovery(dst);
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
    pending_[dst];
    flood_request(dst);
  }

  void flood_request(NodeId dst) {
    auto& p = pending_[dst];
    ++p.attempts;
    ++counters_.rreq_floods;
    ++request_id_;
    DsrRreq rreq;
    rreq.request_id = request_id_;
    rreq.src = self_;
    rreq.dst = dst;
    rreq.route_record = {self_};
    seen_.insert({self_, request_id_});  // ignore echoes of our own flood
    broadcast_rreq(rreq);
    p.timer = net_.schedule(net_.now() + cfg_.discovery_timeout_s,
                            [this, dst] { discovery_timed_out(dst); });
  }

  void broadcast_rreq(const DsrRreq& rreq) {
    Frame f;
    f.kind = FrameKind::control;
    f.size_bytes =
        cfg_.ctrl_base_bytes + cfg_.ctrl_per_node_bytes * static_cast<int>(rreq.route_record.size());
    f.uid = net_.next_frame_uid();
    f.payload = rreq;
    net_.broadcast(self_, std::move(f));
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

  void handle_rreq(const DsrRreq& rreq) {
    if (rreq.src == self_) return;
    if (!seen_.insert({rreq.src, rreq.request_id}).second) return;  // later copy of this flood
    // a node already in the record would only create a loop
    for (NodeId n : rreq.route_record)
      if (n == self_) return;

    if (rreq.dst == self_) {
      std::vector<NodeId> full = rreq.route_record;
      full.push_back(self_);
      store_route({full.rbegin(), full.rend()});  // reverse path serves reply traffic
      ++counters_.rrep_sent;
      DsrRrep rrep;
      rrep.request_id = rreq.request_id;
      rrep.path = std::move(full);
      rrep.cursor = rrep.path.size() - 2;  // next stop on the way back
      send_rrep(std::move(rrep));
      return;
    }

    DsrRreq fwd = rreq;
    fwd.route_record.push_back(self_);
    if (static_cast<int>(fwd.route_record.size()) > net_.max_hops()) return;
    broadcast_rreq(fwd);
  }

  void send_rrep(DsrRrep rrep) {
    NodeId to = rrep.path[rrep.cursor];
    Frame f;
    f.kind = FrameKind::control;
    f.size_bytes =
        cfg_.ctrl_base_bytes + cfg_.ctrl_per_node_bytes * static_cast<int>(rrep.path.size());
    f.uid = net_.next_frame_uid();
    f.payload = std::move(rrep);
    // a reply lost on the way back is not worth a report: the origin's
    // discovery timer already covers it
    net_.unicast(self_, to, std::move(f), nullptr);
  }

  void handle_rrep(const DsrRrep& rrep) {
    if (rrep.cursor == 0) {  // back at the origin
      store_route(rrep.path);
      NodeId dst = rrep.path.back();
      auto p = pending_.find(dst);
      if (p != pending_.end()) {
        net_.cancel_event(p->second.timer);
        pending_.erase(p);
      }
      flush_buffer(dst);
      return;
    }
    DsrRrep fwd = rrep;
    fwd.cursor -= 1;
    send_rrep(std::move(fwd));
  }

  void flush_buffer(NodeId dst) {
    auto b = buffers_.find(dst);
    if (b != buffers_.end() && !b->second.empty()) start_drain(dst);
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
    const std::vector<NodeId>* path = lookup(dst);
    if (!path) {
      draining_.erase(dst);  // cache ran dry mid-drain; go look for a new route
      ensure_discovery(dst);
      return;
    }
    DataPacket pkt = std::move(it->second.front());
    it->second.pop_front();
    int hops = static_cast<int>(path->size()) - 1;
    int frame_bytes = pkt.payload_bytes + net_.data_header_bytes() + cfg_.srcroute_base_bytes +
                      cfg_.srcroute_per_hop_bytes * hops;
    dispatch(std::move(pkt), *path);
    net_.schedule(net_.now() + net_.frame_airtime(frame_bytes), [this, dst] { drain_step(dst); });
  }

  // --- broken-link reports ---

  void report_broken_link(const DataPacket& pkt, NodeId bad_next) {
    // walk the traversed prefix back to the source: self .. origin
    std::size_t my_index = pkt.sr_cursor - 1;  // transmitter position in the route
    std::vector<NodeId> back;
    for (std::size_t i = my_index + 1; i-- > 0;) back.push_back(pkt.source_route[i]);
    if (back.size() < 2) return;  // the origin learns through its own failure callback
    ++counters_.rerr_sent;
    DsrRerr rerr;
    rerr.broken_from = self_;
    rerr.broken_to = bad_next;
    rerr.back_path = std::move(back);
    rerr.cursor = 1;
    send_rerr(std::move(rerr));
  }

  void send_rerr(DsrRerr rerr) {
    NodeId to = rerr.back_path[rerr.cursor];
    Frame f;
    f.kind = FrameKind::control;
    f.size_bytes =
        cfg_.ctrl_base_bytes + cfg_.ctrl_per_node_bytes * static_cast<int>(rerr.back_path.size());
    f.uid = net_.next_frame_uid();
    f.payload = std::move(rerr);
    net_.unicast(self_, to, std::move(f), nullptr);  // best effort, like the data it reports on
  }

  void handle_rerr(const DsrRerr& rerr) {
    prune_link(rerr.broken_from, rerr.broken_to);
    if (rerr.cursor + 1 >= rerr.back_path.size()) return;  // reached the packet source
    DsrRerr fwd = rerr;
    fwd.cursor += 1;
    send_rerr(std::move(fwd));
  }

  struct Pending {
    int attempts = 0;
    std::uint64_t timer = 0;
  };

  DsrSettings cfg_;
  std::uint32_t request_id_ = 0;
  std::deque<CachedRoute> cache_;  // insertion order doubles as FIFO eviction order
  std::set<std::pair<NodeId, std::uint32_t>> seen_;  // flood ids never repeat
  std::map<NodeId, std::deque<DataPacket>> buffers_;
  std::set<NodeId> draining_;  // destinations with a release chain in flight
  std::map<NodeId, Pending> pending_;
  Counters counters_;
};

}  // namespace manetsim
