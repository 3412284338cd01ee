// Constant-bit-rate flow construction and emission timing, plus two
// whole-simulation checks: the source count over a long run, and the
// guarantee that node trajectories depend only on the seed, never on the
// routing protocol under test.

#include <catch2/catch_amalgamated.hpp>

#include <memory>
#include <set>
#include <vector>

#include <manetsim/config.hpp>
#include <manetsim/simulation.hpp>
#include <manetsim/traffic.hpp>

using namespace manetsim;

TEST_CASE("default flow count is half the nodes, capped at ten") {
  CHECK(default_flow_count(5) == 2);
  CHECK(default_flow_count(20) == 10);
  CHECK(default_flow_count(80) == 10);  // cap
  CHECK(default_flow_count(2) == 1);
  CHECK(default_flow_count(1) == 0);
}

TEST_CASE("drawn flows use disjoint endpoints") {
  TrafficConfig cfg;  // flows = -1: use the default count
  RngStream rng(7, "traffic");
  auto flows = build_flows(cfg, 20, rng);
  REQUIRE(flows.size() == 10);
  std::set<NodeId> endpoints;
  for (const CbrFlow& f : flows) {
    CHECK(f.src != f.dst);
    endpoints.insert(f.src);
    endpoints.insert(f.dst);
    CHECK(f.rate_pps == 8.0);
    CHECK(f.payload_bytes == 512);
    CHECK(f.start_s >= 0.0);
    CHECK(f.start_s <= 5.0);
  }
  CHECK(endpoints.size() == 20);  // no node serves two flows
  for (std::size_t i = 0; i < flows.size(); ++i)
    CHECK(flows[i].flow_id == static_cast<int>(i));
}

TEST_CASE("too many flows for the node count is an error") {
  TrafficConfig cfg;
  cfg.flows = 3;
  RngStream rng(7, "traffic");
  CHECK_THROWS_AS(build_flows(cfg, 5, rng), std::invalid_argument);  // needs 6 nodes
  cfg.flows = 2;
  CHECK(build_flows(cfg, 5, rng).size() == 2);
}

TEST_CASE("explicit pairs are taken verbatim") {
  TrafficConfig cfg;
  cfg.pairs = {{3, 1}, {0, 4}};
  cfg.start_stagger_s = 0;
  RngStream rng(7, "traffic");
  auto flows = build_flows(cfg, 5, rng);
  REQUIRE(flows.size() == 2);
  CHECK(flows[0].src == 3);
  CHECK(flows[0].dst == 1);
  CHECK(flows[1].src == 0);
  CHECK(flows[1].dst == 4);
  CHECK(flows[0].start_s == 0.0);
  CHECK(flows[1].start_s == 0.0);
}

TEST_CASE("same seed draws the same flows") {
  TrafficConfig cfg;
  RngStream a(11, "traffic"), b(11, "traffic"), c(12, "traffic");
  auto fa = build_flows(cfg, 20, a);
  auto fb = build_flows(cfg, 20, b);
  auto fc = build_flows(cfg, 20, c);
  bool same = true, diff = false;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    same = same && fa[i].src == fb[i].src && fa[i].dst == fb[i].dst && fa[i].start_s == fb[i].start_s;
    diff = diff || fa[i].src != fc[i].src || fa[i].dst != fc[i].dst || fa[i].start_s != fc[i].start_s;
  }
  CHECK(same);
  CHECK(diff);
}

TEST_CASE("packet emission times never drift") {
  CbrFlow f{0, 0, 1, 2.5, 8.0, 512};
  CHECK(f.packet_time(0) == 2.5);
  CHECK(f.packet_time(1) == 2.625);  // exactly 1/8 s apart
  CHECK(f.packet_time(2) == 2.75);
  // anchored arithmetic: the 2400th packet lands exactly 300 s after start
  CHECK(f.packet_time(2400) == 302.5);
}

TEST_CASE("a two-node run originates one packet per tick") {
  ScenarioConfig cfg;
  cfg.protocol = Protocol::aodv;
  cfg.node_count = 2;
  cfg.area_m = 600;
  cfg.duration_s = 300;
  cfg.mobility.model = MobilityModel::fixed;
  cfg.mobility.positions = {{100, 100}, {200, 100}};
  cfg.traffic.pairs = {{0, 1}};
  cfg.traffic.start_stagger_s = 0;
  Simulation sim(cfg, 3);
  sim.run();
  // 8 packets per second for 300 s from t = 0: ticks 0 .. 2399
  CHECK(sim.counters().data_originated == 2400);
  CHECK(sim.counters().data_delivered == 2400);
}

TEST_CASE("trajectories depend on the seed, not the protocol") {
  ScenarioConfig base;
  base.node_count = 10;
  base.area_m = 600;
  base.duration_s = 30;
  base.mobility.model = MobilityModel::rwp;

  std::vector<std::unique_ptr<Simulation>> sims;
  for (Protocol p : {Protocol::aodv, Protocol::dsdv, Protocol::dsr}) {
    ScenarioConfig cfg = base;
    cfg.protocol = p;
    sims.push_back(std::make_unique<Simulation>(cfg, 99));
  }
  for (NodeId n = 0; n < 10; ++n)
    for (double t : {0.0, 7.5, 15.0, 29.9}) {
      Vec2 a = sims[0]->position(n, t);
      Vec2 b = sims[1]->position(n, t);
      Vec2 c = sims[2]->position(n, t);
      REQUIRE(a == b);
      REQUIRE(b == c);
    }
}
