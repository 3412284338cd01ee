// Mobility tracks: straight-line kinematics against hand-computed fixes,
// waypoint-chain structure, area confinement, and the group model's
// geometry. Trajectories must be pure functions of (seed, label, t).

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include <manetsim/core.hpp>
#include <manetsim/mobility.hpp>

using namespace manetsim;

namespace {
StreamFactory factory(std::uint64_t seed) {
  return [seed](const std::string& label) { return RngStream(seed, label); };
}
}  // namespace

TEST_CASE("straight leg interpolates the 3-4-5 triangle") {
  // travel (0,0) -> (3,4): distance 5 at speed 1 takes 5 seconds
  std::vector<Leg> legs{Leg{{0, 0}, {3, 4}, 1.0, 0.0, 5.0}};
  WaypointTrack track({0, 0}, legs);
  CHECK(track.at(0.0) == Vec2{0, 0});
  CHECK(track.at(2.5) == Vec2{1.5, 2.0});  // halfway in time = halfway in space
  CHECK(track.at(5.0) == Vec2{3, 4});
  CHECK(track.at(20.0) == Vec2{3, 4});  // holds at the waypoint afterwards
}

TEST_CASE("leg arrival time is distance over speed") {
  RngStream rng(1, "legs");
  Area area{600, 600};
  // speed 5 over the same 5-metre diagonal: exactly one second of travel
  Leg manual{{0, 0}, {3, 4}, 5.0, 0.0, 1.0};
  CHECK(dist(manual.origin, manual.waypoint) / manual.speed == 1.0);

  for (int i = 0; i < 200; ++i) {
    Leg leg = next_leg(rng, area, 1.0, 10.0, 0.5, {300, 300}, 7.0);
    CHECK(leg.depart_at == 7.5);  // pause served before departure
    double travel = dist(leg.origin, leg.waypoint) / leg.speed;
    CHECK_THAT(leg.arrive_at - leg.depart_at, Catch::Matchers::WithinRel(travel, 1e-12));
    CHECK(leg.speed >= 1.0);
    CHECK(leg.speed < 10.0);
    CHECK(area.contains(leg.waypoint));
  }
}

TEST_CASE("next_leg rejects bad kinematics") {
  RngStream rng(1, "bad");
  Area area{600, 600};
  CHECK_THROWS_AS(next_leg(rng, area, 0.0, 5.0, 0, {0, 0}, 0), std::invalid_argument);
  CHECK_THROWS_AS(next_leg(rng, area, -1.0, 5.0, 0, {0, 0}, 0), std::invalid_argument);
  CHECK_THROWS_AS(next_leg(rng, area, 2.0, 1.0, 0, {0, 0}, 0), std::invalid_argument);
  CHECK_THROWS_AS(next_leg(rng, area, 1.0, 5.0, -0.1, {0, 0}, 0), std::invalid_argument);
}

TEST_CASE("zero pause chains legs without gaps") {
  RngStream rng(3, "chain");
  Area area{600, 600};
  WaypointTrack track = WaypointTrack::random_waypoint(rng, area, 1.0, 10.0, 0.0, 300.0);
  const auto& legs = track.legs();
  REQUIRE(legs.size() >= 2);
  CHECK(legs.front().depart_at == 0.0);
  for (std::size_t i = 0; i + 1 < legs.size(); ++i) {
    CHECK(legs[i + 1].depart_at == legs[i].arrive_at);   // no idle gap
    CHECK(legs[i + 1].origin == legs[i].waypoint);       // no teleporting
  }
}

TEST_CASE("degenerate speed range uses the single speed exactly") {
  RngStream rng(5, "fixed-speed");
  Area area{600, 600};
  WaypointTrack track = WaypointTrack::random_waypoint(rng, area, 4.0, 4.0, 0.0, 120.0);
  REQUIRE(!track.legs().empty());
  for (const Leg& leg : track.legs()) CHECK(leg.speed == 4.0);
}

TEST_CASE("tracks never leave the area") {
  Area area{600, 600};
  auto tracks = build_rwp_tracks(10, area, 1.0, 10.0, 0.25, 300.0, factory(11));
  RngStream probe(99, "probe-times");
  for (const auto& t : tracks) {
    for (int i = 0; i < 1000; ++i) {
      Vec2 p = t->at(probe.uniform(0, 300.0));
      REQUIRE(area.contains(p));
    }
  }
}

TEST_CASE("observed speed between samples equals the leg speed") {
  RngStream rng(13, "speed-check");
  Area area{600, 600};
  WaypointTrack track = WaypointTrack::random_waypoint(rng, area, 1.0, 10.0, 0.0, 300.0);
  for (const Leg& leg : track.legs()) {
    double span = leg.arrive_at - leg.depart_at;
    if (span < 0.5) continue;  // probe strictly inside the leg
    double t0 = leg.depart_at + span * 0.25;
    double t1 = leg.depart_at + span * 0.5;
    double v = dist(track.at(t0), track.at(t1)) / (t1 - t0);
    CHECK_THAT(v, Catch::Matchers::WithinRel(leg.speed, 1e-9));
  }
}

TEST_CASE("position queries before the run start are rejected") {
  WaypointTrack track({1, 2}, {});
  CHECK_THROWS_AS(track.at(-0.001), std::invalid_argument);
  FixedTrack fixed({5, 5});
  CHECK_THROWS_AS(fixed.at(-1.0), std::invalid_argument);
  CHECK(fixed.at(123.0) == Vec2{5, 5});
}

TEST_CASE("disk_point stays inside its radius") {
  RngStream rng(17, "disk");
  for (int i = 0; i < 10000; ++i) {
    Vec2 p = disk_point(rng, 50.0);
    REQUIRE(p.x * p.x + p.y * p.y <= 50.0 * 50.0 + 1e-9);
  }
  CHECK(disk_point(rng, 0.0) == Vec2{0, 0});
}

TEST_CASE("group members are assigned round-robin") {
  Area area{1000, 1000};
  RpgmConfig cfg;
  cfg.groups = 4;
  std::vector<std::shared_ptr<const RpgmGroup>> groups;
  auto tracks = build_rpgm_tracks(10, area, 1.0, 5.0, 0.0, 60.0, cfg, factory(21), &groups);
  REQUIRE(groups.size() == 4);
  CHECK(groups[0]->members == std::vector<NodeId>{0, 4, 8});
  CHECK(groups[1]->members == std::vector<NodeId>{1, 5, 9});
  CHECK(groups[2]->members == std::vector<NodeId>{2, 6});
  CHECK(groups[3]->members == std::vector<NodeId>{3, 7});
  CHECK(tracks.size() == 10);
}

TEST_CASE("zero offset and jitter collapse members onto the reference") {
  Area area{1000, 1000};
  RpgmConfig cfg;
  cfg.groups = 2;
  cfg.offset_radius_m = 0;
  cfg.jitter_radius_m = 0;
  std::vector<std::shared_ptr<const RpgmGroup>> groups;
  build_rpgm_tracks(6, area, 1.0, 5.0, 0.0, 120.0, cfg, factory(23), &groups);
  for (const auto& g : groups) {
    for (double t : {0.0, 1.5, 30.0, 77.25, 120.0}) {
      Vec2 ref = g->reference.at(t);
      for (std::size_t m = 0; m < g->members.size(); ++m) {
        Vec2 p = g->member_at(m, t);
        CHECK_THAT(dist(p, ref), Catch::Matchers::WithinAbs(0.0, 1e-12));
      }
    }
  }
}

TEST_CASE("members stay near the reference and inside the area") {
  Area area{1000, 1000};
  RpgmConfig cfg;
  cfg.groups = 3;
  cfg.offset_radius_m = 50;
  cfg.jitter_radius_m = 10;
  std::vector<std::shared_ptr<const RpgmGroup>> groups;
  build_rpgm_tracks(12, area, 1.0, 5.0, 0.0, 120.0, cfg, factory(29), &groups);
  RngStream probe(31, "rpgm-probe");
  for (const auto& g : groups) {
    for (int i = 0; i < 500; ++i) {
      double t = probe.uniform(0, 120.0);
      Vec2 ref = g->reference.at(t);
      for (std::size_t m = 0; m < g->members.size(); ++m) {
        Vec2 p = g->member_at(m, t);
        REQUIRE(area.contains(p));
        // clamping can only pull a member closer to the reference's side of
        // the boundary, never push it further out than offset + jitter
        REQUIRE(dist(p, ref) <= 50.0 + 10.0 + 1e-9);
      }
    }
  }
}

TEST_CASE("rebuilding from the same seed reproduces every position") {
  Area area{600, 600};
  auto a = build_rwp_tracks(8, area, 1.0, 10.0, 0.0, 300.0, factory(37));
  auto b = build_rwp_tracks(8, area, 1.0, 10.0, 0.0, 300.0, factory(37));
  auto c = build_rwp_tracks(8, area, 1.0, 10.0, 0.0, 300.0, factory(38));
  bool all_equal = true, any_diff_seed = false;
  for (std::size_t n = 0; n < a.size(); ++n) {
    for (double t : {0.0, 10.5, 100.0, 299.9}) {
      if (!(a[n]->at(t) == b[n]->at(t))) all_equal = false;
      if (!(a[n]->at(t) == c[n]->at(t))) any_diff_seed = true;
    }
  }
  CHECK(all_equal);
  CHECK(any_diff_seed);
}

TEST_CASE("track builders validate their inputs") {
  Area area{600, 600};
  CHECK_THROWS_AS(build_rwp_tracks(0, area, 1, 2, 0, 10, factory(1)), std::invalid_argument);
  RpgmConfig bad;
  bad.groups = 0;
  CHECK_THROWS_AS(build_rpgm_tracks(4, area, 1, 2, 0, 10, bad, factory(1)), std::invalid_argument);
  CHECK_THROWS_AS(build_fixed_tracks({}, area), std::invalid_argument);
  CHECK_THROWS_AS(build_fixed_tracks({{700, 0}}, area), std::invalid_argument);
}
