#pragma once

// Simplified wireless link layer. Each node owns a drop-tail interface
// queue and a transmitter that serialises frames at the channel bitrate.
// Reception is deterministic: a frame reaches its receiver iff the receiver
// is inside radio range at the moment transmission starts. There is no
// contention or collision model; a node's transmissions only queue behind
// each other.
//
// Unicast frames are retried on failure up to retry_limit extra attempts and
// then reported through the sender's failure callback (this is what routing
// agents treat as a link break). Broadcasts are fire-and-forget after a
// small random jitter. Every transmission charges the sender's meter;
// receivers are charged on delivery, and unrelated nodes inside range are
// charged for overhearing.

#include <deque>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "config.hpp"
#include "core.hpp"
#include "energy.hpp"
#include "messages.hpp"
#include "mobility.hpp"

namespace manetsim {

// seconds a frame of this size occupies the channel
inline double tx_duration(int size_bytes, double bitrate_bps) {
  if (size_bytes <= 0) throw std::invalid_argument("tx_duration: empty frame");
  if (bitrate_bps <= 0) throw std::invalid_argument("tx_duration: bad bitrate");
  return static_cast<double>(size_bytes) * 8.0 / bitrate_bps;
}

class LinkLayer {
 public:
  using FailFn = std::function<void(const Frame&)>;
  using PosFn = std::function<Vec2(NodeId, SimTime)>;
  using AliveFn = std::function<bool(NodeId, SimTime)>;
  using DeliverFn = std::function<void(NodeId, const Frame&)>;
  using DataDropFn = std::function<void(const DataPacket&, const char*)>;
  // (time, event, node, frame); event is tx|rx|overhear|drop|fail
  using TraceFn = std::function<void(SimTime, const char*, NodeId, const Frame&)>;

  struct Stats {
    long long enqueued = 0;
    long long queue_drops = 0;
    long long tx_starts = 0;       // every attempt, retries included
    long long control_tx = 0;      // tx_starts restricted to control frames
    long long data_tx = 0;
    long long delivered = 0;       // frames handed to a receiver
    long long overhears = 0;
    long long unicast_failures = 0;  // retry budget exhausted
    long long discarded_dead = 0;    // transmitter battery empty
    long long completed = 0;         // frames that finished service
  };

  LinkLayer(Engine& engine, LinkSettings cfg, int node_count, std::vector<EnergyMeter>& meters,
            RngStream jitter_rng, PosFn position, AliveFn alive, DeliverFn deliver,
            DataDropFn data_drop)
      : engine_(engine),
        cfg_(cfg),
        meters_(meters),
        jitter_rng_(std::move(jitter_rng)),
        position_(std::move(position)),
        alive_(std::move(alive)),
        deliver_(std::move(deliver)),
        data_drop_(std::move(data_drop)),
        ports_(static_cast<std::size_t>(node_count)) {}

  void set_trace(TraceFn trace) { trace_ = std::move(trace); }

  bool in_range(NodeId a, NodeId b, SimTime t) const {
    return dist(position_(a, t), position_(b, t)) <= cfg_.range_m;  // boundary counts as in range
  }

  void send_unicast(NodeId src, NodeId dst, Frame f, FailFn on_fail) {
    if (dst == kBroadcast) throw std::invalid_argument("send_unicast: broadcast destination");
    f.src = src;
    f.dst = dst;
    enqueue(src, Item{std::move(f), std::move(on_fail), 0});
  }

  // Queued after a uniform jitter in [0, broadcast_jitter_s]; no retries and
  // no failure callback.
  void send_broadcast(NodeId src, Frame f) {
    f.src = src;
    f.dst = kBroadcast;
    SimTime at = engine_.now() + jitter_rng_.uniform(0, cfg_.broadcast_jitter_s);
    engine_.schedule(at, [this, src, frame = std::move(f)]() mutable {
      enqueue(src, Item{std::move(frame), nullptr, 0});
    });
  }

  const Stats& stats() const { return stats_; }

  int queue_length(NodeId n) const { return static_cast<int>(ports_[static_cast<std::size_t>(n)].q.size()); }

  // frames still queued or in service (used by end-of-run conservation checks)
  long long residual() const {
    long long r = 0;
    for (const auto& p : ports_) r += static_cast<long long>(p.q.size()) + (p.current ? 1 : 0);
    return r;
  }

 private:
  struct Item {
    Frame f;
    FailFn on_fail;
    int attempts = 0;
  };

  struct Port {
    std::deque<Item> q;
    std::optional<Item> current;
    bool busy = false;
  };

  void trace(const char* ev, NodeId n, const Frame& f) {
    if (trace_) trace_(engine_.now(), ev, n, f);
  }

  void enqueue(NodeId src, Item item) {
    Port& port = ports_[static_cast<std::size_t>(src)];
    if (static_cast<int>(port.q.size()) >= cfg_.queue_capacity) {
      ++stats_.queue_drops;  // drop-tail: the newcomer is discarded, no failure callback
      trace("drop", src, item.f);
      if (const DataPacket* d = as_data(item.f)) data_drop_(*d, "queue_full");
      return;
    }
    port.q.push_back(std::move(item));
    ++stats_.enqueued;
    kick(src);
  }

  void kick(NodeId src) {
    Port& port = ports_[static_cast<std::size_t>(src)];
    while (!port.busy && !port.q.empty()) {
      port.current = std::move(port.q.front());
      port.q.pop_front();
      port.busy = true;
      if (!start_attempt(src)) {
        // transmitter is dead; discard and try to drain the rest
        ++stats_.discarded_dead;
        ++stats_.completed;
        if (const DataPacket* d = as_data(port.current->f)) data_drop_(*d, "node_dead");
        port.current.reset();
        port.busy = false;
      }
    }
  }

  // Seizes the channel for one attempt. Returns false if the transmitter's
  // battery is empty (frame must be discarded by the caller).
  bool start_attempt(NodeId src) {
    Port& port = ports_[static_cast<std::size_t>(src)];
    Item& item = *port.current;
    SimTime t0 = engine_.now();
    if (!alive_(src, t0)) return false;

    const Frame& f = item.f;
    double dur = tx_duration(f.size_bytes, cfg_.bitrate_bps);
    meters_[static_cast<std::size_t>(src)].charge_tx(f.size_bytes);
    ++stats_.tx_starts;
    if (f.kind == FrameKind::control)
      ++stats_.control_tx;
    else
      ++stats_.data_tx;
    trace("tx", src, f);

    bool is_broadcast = f.dst == kBroadcast;
    bool dst_reachable = false;
    for (NodeId n = 0; n < static_cast<NodeId>(ports_.size()); ++n) {
      if (n == src) continue;
      if (!alive_(n, t0) || !in_range(src, n, t0)) continue;
      if (is_broadcast || n == f.dst) {
        if (n == f.dst) dst_reachable = true;
        engine_.schedule(t0 + dur, [this, n, frame = f] {
          if (!alive_(n, engine_.now())) return;
          meters_[static_cast<std::size_t>(n)].charge_rx(frame.size_bytes);
          ++stats_.delivered;
          trace("rx", n, frame);
          deliver_(n, frame);
        });
      } else {
        // bystander decodes the frame it cannot use
        meters_[static_cast<std::size_t>(n)].charge_overhear(f.size_bytes);
        ++stats_.overhears;
        trace("overhear", n, f);
      }
    }
    engine_.schedule(t0 + dur, [this, src, is_broadcast, dst_reachable] {
      end_attempt(src, is_broadcast, dst_reachable);
    });
    return true;
  }

  void end_attempt(NodeId src, bool was_broadcast, bool dst_reachable) {
    Port& port = ports_[static_cast<std::size_t>(src)];
    Item& item = *port.current;
    if (!was_broadcast && !dst_reachable) {
      if (item.attempts < cfg_.retry_limit) {
        ++item.attempts;
        if (start_attempt(src)) return;
        ++stats_.discarded_dead;  // died mid-retry
        ++stats_.completed;
        if (const DataPacket* d = as_data(item.f)) data_drop_(*d, "node_dead");
        port.current.reset();
        port.busy = false;
        kick(src);
        return;
      }
      ++stats_.unicast_failures;
      ++stats_.completed;
      trace("fail", src, item.f);
      Item failed = std::move(*port.current);
      port.current.reset();
      port.busy = false;
      if (failed.on_fail) failed.on_fail(failed.f);
      kick(src);
      return;
    }
    ++stats_.completed;
    port.current.reset();
    port.busy = false;
    kick(src);
  }

  Engine& engine_;
  LinkSettings cfg_;
  std::vector<EnergyMeter>& meters_;
  RngStream jitter_rng_;
  PosFn position_;
  AliveFn alive_;
  DeliverFn deliver_;
  DataDropFn data_drop_;
  TraceFn trace_;
  std::vector<Port> ports_;
  Stats stats_;
};

}  // namespace manetsim
