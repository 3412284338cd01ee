#pragma once

// Interface between routing agents and the rest of the simulator. Agents
// see the network only through NetworkApi: the clock, timers, unicast and
// broadcast primitives, named random streams, and the data accounting hooks.

#include <functional>
#include <string>

#include "core.hpp"
#include "messages.hpp"

namespace manetsim {

class NetworkApi {
 public:
  virtual ~NetworkApi() = default;

  virtual SimTime now() const = 0;
  virtual std::uint64_t schedule(SimTime at, std::function<void()> fn) = 0;
  virtual void cancel_event(std::uint64_t id) = 0;

  // src is the transmitting node; on_fail fires after the retry budget is
  // exhausted. Broadcasts have neither retries nor a failure callback.
  virtual void unicast(NodeId src, NodeId dst, Frame f, std::function<void(const Frame&)> on_fail) = 0;
  virtual void broadcast(NodeId src, Frame f) = 0;

  virtual std::uint64_t next_frame_uid() = 0;
  virtual RngStream& stream(const std::string& label) = 0;

  // data accounting: exactly one of these per packet fate
  virtual void deliver_data(NodeId at, const DataPacket& pkt) = 0;
  virtual void drop_data(const DataPacket& pkt, const char* reason) = 0;

  virtual int max_hops() const = 0;          // per-packet hop budget
  virtual int data_header_bytes() const = 0; // fixed overhead on every data frame

  // Serialization time of a frame of the given size on the shared medium.
  // Agents use it to pace buffered-packet release at the link drain rate.
  virtual double frame_airtime(int size_bytes) const = 0;
};

class RoutingAgent {
 public:
  RoutingAgent(NodeId self, NetworkApi& net) : self_(self), net_(net) {}
  virtual ~RoutingAgent() = default;

  virtual const char* name() const = 0;
  virtual void start() {}                        // schedule periodic behaviour
  virtual void send_data(DataPacket pkt) = 0;    // packet originated at this node
  virtual void receive(const Frame& f) = 0;      // frame addressed to (or heard by) this node

  NodeId self() const { return self_; }

 protected:
  // Appends this node to the packet's trail unless it is already the last
  // entry (re-sends at the same node must not duplicate it; genuine loops
  // must, so the delivery check can catch them).
  void note_hop(DataPacket& pkt) const {
    if (pkt.path.empty() || pkt.path.back() != self_) pkt.path.push_back(self_);
  }

  bool hop_budget_exceeded(const DataPacket& pkt) const {
    return static_cast<int>(pkt.path.size()) > net_.max_hops();
  }

  NodeId self_;
  NetworkApi& net_;
};

}  // namespace manetsim
