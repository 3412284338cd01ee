// On-demand routing agent: request flooding with retry/backoff, reverse-path
// installation, destination and cached intermediate replies, error
// propagation, and origin-side buffering. A static line network at the end
// checks the installed hop count and loss-free delivery end to end.

#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include <manetsim/aodv.hpp>
#include <manetsim/config.hpp>
#include <manetsim/simulation.hpp>

#include "test_net.hpp"

using namespace manetsim;
using manetsim::test::SentFrame;
using manetsim::test::TestNet;
using manetsim::test::make_packet;

namespace {

Frame rreq_frame(NodeId prev, AodvRreq rreq) {
  Frame f;
  f.kind = FrameKind::control;
  f.size_bytes = AodvSettings{}.rreq_bytes;
  f.src = prev;
  f.dst = kBroadcast;
  f.payload = rreq;
  return f;
}

Frame rrep_frame(NodeId prev, NodeId to, AodvRrep rrep) {
  Frame f;
  f.kind = FrameKind::control;
  f.size_bytes = AodvSettings{}.rrep_bytes;
  f.src = prev;
  f.dst = to;
  f.payload = rrep;
  return f;
}

Frame rerr_frame(NodeId prev, AodvRerr rerr) {
  Frame f;
  f.kind = FrameKind::control;
  f.size_bytes = AodvSettings{}.rerr_bytes;
  f.src = prev;
  f.dst = kBroadcast;
  f.payload = rerr;
  return f;
}

}  // namespace

TEST_CASE("a packet for an unknown destination starts one discovery") {
  TestNet net;
  AodvAgent agent(0, net, AodvSettings{});
  agent.send_data(make_packet(0, 9, 512, 0));
  agent.send_data(make_packet(0, 9, 512, 1));  // coalesces into the same discovery
  CHECK(agent.buffered() == 2);
  CHECK(agent.counters().discoveries == 1);
  auto rreqs = net.sent_of<AodvRreq>();
  REQUIRE(rreqs.size() == 1);
  CHECK(rreqs[0]->is_broadcast());
  CHECK(rreqs[0]->frame.size_bytes == 48);
  const auto& rreq = std::get<AodvRreq>(rreqs[0]->frame.payload);
  CHECK(rreq.src == 0);
  CHECK(rreq.dst == 9);
  CHECK(rreq.hop_count == 0);
  CHECK(rreq.dst_seq_known == -1);  // never heard of this destination
}

TEST_CASE("discovery retries three times then drops the buffer") {
  TestNet net;
  AodvAgent agent(0, net, AodvSettings{});
  agent.send_data(make_packet(0, 9, 512, 0));
  agent.send_data(make_packet(0, 9, 512, 1));

  net.run_to(0.5);
  CHECK(agent.counters().rreq_floods == 1);
  net.run_to(1.5);  // one-second discovery timeout
  CHECK(agent.counters().rreq_floods == 2);
  net.run_to(3.5);
  CHECK(agent.counters().rreq_floods == 4);  // initial flood + 3 retries
  CHECK(net.drops.empty());

  net.run_to(4.5);  // final timeout expires the whole buffer
  CHECK(agent.counters().rreq_floods == 4);
  CHECK(agent.buffered() == 0);
  CHECK(net.drop_count("no_route_discovery") == 2);
}

TEST_CASE("duplicate request copies are ignored") {
  TestNet net;
  AodvAgent agent(5, net, AodvSettings{});
  AodvRreq rreq{7, 1, 4, 9, -1, 2};
  agent.receive(rreq_frame(2, rreq));
  REQUIRE(net.sent_of<AodvRreq>().size() == 1);  // re-flooded once
  CHECK(std::get<AodvRreq>(net.sent_of<AodvRreq>()[0]->frame.payload).hop_count == 3);

  agent.receive(rreq_frame(3, rreq));  // same (src, bid) via another neighbor
  CHECK(net.sent_of<AodvRreq>().size() == 1);
  // the reverse route keeps the first copy's path
  REQUIRE(agent.route(1) != nullptr);
  CHECK(agent.route(1)->next_hop == 2);
  CHECK(agent.route(1)->hops == 3);
}

TEST_CASE("a forwarded request installs the reverse route") {
  TestNet net;
  AodvAgent agent(5, net, AodvSettings{});
  agent.receive(rreq_frame(2, AodvRreq{1, 1, 4, 9, -1, 2}));
  const AodvAgent::Route* back = agent.route(1);
  REQUIRE(back != nullptr);
  CHECK(back->next_hop == 2);
  CHECK(back->hops == 3);  // advertised hops plus the link it arrived on
  CHECK(back->seq == 4);
  CHECK(back->valid);
}

TEST_CASE("the destination answers with a sequence-stamped reply") {
  TestNet net;
  AodvAgent agent(9, net, AodvSettings{});
  agent.receive(rreq_frame(2, AodvRreq{1, 1, 4, 9, -1, 1}));
  CHECK(agent.counters().rrep_as_target == 1);
  auto rreps = net.sent_of<AodvRrep>();
  REQUIRE(rreps.size() == 1);
  CHECK(rreps[0]->dst == 2);  // unicast back the way the request came
  CHECK(rreps[0]->frame.size_bytes == 44);
  const auto& rrep = std::get<AodvRrep>(rreps[0]->frame.payload);
  CHECK(rrep.dst == 9);
  CHECK(rrep.hop_count == 0);
  CHECK(rrep.origin == 1);
  CHECK(rrep.dst_seq == 1);  // destination bumps its own sequence number
  CHECK(net.sent_of<AodvRreq>().empty());  // the target never re-floods
}

TEST_CASE("an intermediate with a fresh enough route answers from cache") {
  TestNet net;
  AodvAgent agent(5, net, AodvSettings{});  // intermediate replies enabled
  // teach node 5 a route to 9 (two hops via 4, generation 10)
  agent.receive(rrep_frame(4, 5, AodvRrep{9, 10, 1, 5}));
  REQUIRE(agent.has_fresh_route(9));
  net.sent.clear();

  agent.receive(rreq_frame(2, AodvRreq{1, 1, 4, 9, -1, 0}));
  CHECK(agent.counters().rrep_from_cache == 1);
  CHECK(net.sent_of<AodvRreq>().empty());  // answered instead of re-flooding
  auto rreps = net.sent_of<AodvRrep>();
  REQUIRE(rreps.size() == 1);
  const auto& rrep = std::get<AodvRrep>(rreps[0]->frame.payload);
  CHECK(rrep.dst == 9);
  CHECK(rrep.dst_seq == 10);
  CHECK(rrep.hop_count == 2);

  // a requester that already knows a fresher generation is not satisfied
  net.sent.clear();
  agent.receive(rreq_frame(2, AodvRreq{2, 1, 5, 9, 11, 0}));
  CHECK(agent.counters().rrep_from_cache == 1);
  CHECK(net.sent_of<AodvRreq>().size() == 1);  // stale cache: keep flooding
}

TEST_CASE("intermediate replies can be disabled") {
  TestNet net;
  AodvSettings cfg;
  cfg.intermediate_rrep = false;
  AodvAgent agent(5, net, cfg);
  agent.receive(rrep_frame(4, 5, AodvRrep{9, 10, 1, 5}));
  net.sent.clear();
  agent.receive(rreq_frame(2, AodvRreq{1, 1, 4, 9, -1, 0}));
  CHECK(agent.counters().rrep_from_cache == 0);
  CHECK(net.sent_of<AodvRreq>().size() == 1);  // always defers to the target
}

TEST_CASE("replies walk back along the reverse route") {
  TestNet net;
  AodvAgent agent(5, net, AodvSettings{});
  // request from 1 passed through: reverse route 1 -> (via 1 itself, 1 hop)
  agent.receive(rreq_frame(1, AodvRreq{3, 1, 4, 9, -1, 0}));
  net.sent.clear();
  // reply from the destination side arrives from neighbor 9
  agent.receive(rrep_frame(9, 5, AodvRrep{9, 12, 0, 1}));
  REQUIRE(agent.has_fresh_route(9));
  CHECK(agent.route(9)->next_hop == 9);
  CHECK(agent.route(9)->hops == 1);
  auto rreps = net.sent_of<AodvRrep>();
  REQUIRE(rreps.size() == 1);
  CHECK(rreps[0]->dst == 1);  // forwarded to the reverse next hop
  CHECK(std::get<AodvRrep>(rreps[0]->frame.payload).hop_count == 1);
}

TEST_CASE("a transmit failure invalidates routes and advertises the loss") {
  TestNet net;
  AodvAgent agent(0, net, AodvSettings{});
  agent.receive(rrep_frame(3, 0, AodvRrep{7, 2, 0, 0}));  // 7 via 3
  agent.receive(rrep_frame(3, 0, AodvRrep{8, 2, 1, 0}));  // 8 via 3
  agent.receive(rrep_frame(4, 0, AodvRrep{6, 2, 0, 0}));  // 6 via 4
  net.sent.clear();

  agent.send_data(make_packet(0, 7));
  REQUIRE(net.sent.size() == 1);
  CHECK(net.sent[0].dst == 3);
  net.sent[0].fail();

  CHECK_FALSE(agent.has_fresh_route(7));
  CHECK_FALSE(agent.has_fresh_route(8));
  CHECK(agent.has_fresh_route(6));  // different neighbor, untouched
  CHECK(net.drop_count("link_break") == 1);
  CHECK(agent.counters().rerr_sent == 1);
  auto rerrs = net.sent_of<AodvRerr>();
  REQUIRE(rerrs.size() == 1);
  CHECK(rerrs[0]->is_broadcast());
  CHECK(rerrs[0]->frame.size_bytes == 32);
  const auto& rerr = std::get<AodvRerr>(rerrs[0]->frame.payload);
  REQUIRE(rerr.unreachable.size() == 2);
  for (auto [dest, seq] : rerr.unreachable) {
    CHECK((dest == 7 || dest == 8));
    CHECK(seq == 3);  // invalidation bumps the stored generation
  }
}

TEST_CASE("route errors only propagate where they invalidated something") {
  AodvRerr loss{{{7, 9}}};

  TestNet net_a;
  AodvAgent affected(0, net_a, AodvSettings{});
  affected.receive(rrep_frame(3, 0, AodvRrep{7, 2, 0, 0}));  // 7 via 3
  net_a.sent.clear();
  affected.receive(rerr_frame(3, loss));
  CHECK_FALSE(affected.has_fresh_route(7));
  CHECK(affected.route(7)->seq == 9);  // adopts the advertised generation
  CHECK(net_a.sent_of<AodvRerr>().size() == 1);  // re-broadcast once

  TestNet net_b;
  AodvAgent bystander(1, net_b, AodvSettings{});
  bystander.receive(rrep_frame(5, 1, AodvRrep{7, 2, 0, 1}));  // 7 via 5
  net_b.sent.clear();
  bystander.receive(rerr_frame(3, loss));  // loss is behind a different neighbor
  CHECK(bystander.has_fresh_route(7));
  CHECK(net_b.sent_of<AodvRerr>().empty());  // absorbed
}

TEST_CASE("idle routes expire and trigger rediscovery") {
  TestNet net;
  AodvAgent agent(0, net, AodvSettings{});  // route_timeout_s = 10
  agent.receive(rrep_frame(3, 0, AodvRrep{7, 2, 0, 0}));
  CHECK(agent.has_fresh_route(7));
  net.run_to(11.0);
  CHECK_FALSE(agent.has_fresh_route(7));
  net.sent.clear();
  agent.send_data(make_packet(0, 7));
  CHECK(agent.buffered() == 1);
  CHECK(net.sent_of<AodvRreq>().size() == 1);  // discovery starts over
}

TEST_CASE("buffered packets flush in order once the reply arrives") {
  TestNet net;
  AodvAgent agent(0, net, AodvSettings{});
  for (int i = 0; i < 3; ++i) agent.send_data(make_packet(0, 9, 512, i));
  REQUIRE(agent.counters().rreq_floods == 1);
  agent.receive(rrep_frame(4, 0, AodvRrep{9, 6, 0, 0}));  // 9 is one hop via 4
  net.run_to(0.5);  // paced release at the frame serialization rate
  CHECK(agent.buffered() == 0);
  auto out = net.sent_of<DataPacket>();
  REQUIRE(out.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(out[static_cast<std::size_t>(i)]->dst == 4);
    CHECK(std::get<DataPacket>(out[static_cast<std::size_t>(i)]->frame.payload).seq == i);
  }
  // the discovery timer was cancelled: no retry flood later
  net.run_to(5.0);
  CHECK(agent.counters().rreq_floods == 1);
}

TEST_CASE("line network: discovered route spans four hops and loses nothing") {
  ScenarioConfig cfg;
  cfg.protocol = Protocol::aodv;
  cfg.node_count = 5;
  cfg.area_m = 800;
  cfg.duration_s = 60;
  cfg.mobility.model = MobilityModel::fixed;
  for (int i = 0; i < 5; ++i) cfg.mobility.positions.push_back({200.0 * i, 0.0});
  cfg.traffic.pairs = {{0, 4}};
  cfg.traffic.start_stagger_s = 0;

  Simulation sim(cfg, 1);
  sim.run();
  const AodvAgent& agent = sim.agent_as<AodvAgent>(0);
  REQUIRE(agent.route(4) != nullptr);
  CHECK(agent.route(4)->hops == 4);
  RunMetrics m = sim.metrics();
  REQUIRE(m.pdr.has_value());
  CHECK(*m.pdr == 1.0);  // discovery buffering protects the first packets
}
