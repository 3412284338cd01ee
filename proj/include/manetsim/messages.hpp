#pragma once

// Wire formats shared by the link layer and the routing agents: the data
// packet plus each protocol's control messages, carried inside a Frame.

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "core.hpp"

namespace manetsim {

// Application payload plus the per-hop trail used for loop checks. DSR adds
// a source route; other protocols leave it empty.
struct DataPacket {
  int flow_id = 0;
  std::int64_t seq = 0;
  NodeId origin = 0;
  NodeId dst = 0;
  int payload_bytes = 0;
  SimTime originated_at = 0;
  std::vector<NodeId> path;  // every node that handled the packet, in order

  std::vector<NodeId> source_route;  // DSR only: origin..dst
  std::size_t sr_cursor = 0;         // index of the hop this frame is addressed to
};

// --- distance-vector updates ---

inline constexpr int kInfHops = 1 << 20;  // unreachable metric sentinel

struct DsdvEntryAdv {
  NodeId dest = 0;
  int hops = 0;       // kInfHops marks a broken route
  std::uint32_t seq = 0;  // even: fresh from the destination; odd: break marker
};

struct DsdvUpdate {
  NodeId origin = 0;
  std::vector<DsdvEntryAdv> entries;
};

// --- on-demand distance-vector control ---

struct AodvRreq {
  std::uint32_t bid = 0;  // per-source flood id; (src, bid) dedupes the flood
  NodeId src = 0;
  std::uint32_t src_seq = 0;
  NodeId dst = 0;
  std::int64_t dst_seq_known = -1;  // -1 when the requester has no sequence number
  int hop_count = 0;
};

struct AodvRrep {
  NodeId dst = 0;
  std::uint32_t dst_seq = 0;
  int hop_count = 0;
  NodeId origin = 0;  // requester the reply travels back to
};

struct AodvRerr {
  std::vector<std::pair<NodeId, std::uint32_t>> unreachable;  // (dest, bumped seq)
};

// --- source-routing control ---

struct DsrRreq {
  std::uint32_t request_id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  std::vector<NodeId> route_record;  // nodes traversed so far, starting at src
};

struct DsrRrep {
  std::uint32_t request_id = 0;
  std::vector<NodeId> path;  // full discovered route src..dst
  std::size_t cursor = 0;    // index of the hop this frame is addressed to (walks toward 0)
};

struct DsrRerr {
  NodeId broken_from = 0;
  NodeId broken_to = 0;
  std::vector<NodeId> back_path;  // detecting node back to the packet source
  std::size_t cursor = 0;         // index of the hop this frame is addressed to
};

enum class FrameKind { data, control };

struct Frame {
  FrameKind kind = FrameKind::data;
  int size_bytes = 0;
  NodeId src = 0;  // transmitter of this hop
  NodeId dst = 0;  // receiver of this hop, or kBroadcast
  std::uint64_t uid = 0;
  std::variant<DataPacket, DsdvUpdate, AodvRreq, AodvRrep, AodvRerr, DsrRreq, DsrRrep, DsrRerr>
      payload;
};

inline const DataPacket* as_data(const Frame& f) { return std::get_if<DataPacket>(&f.payload); }

}  // namespace manetsim
