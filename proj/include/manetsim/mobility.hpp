#pragma once

// Node mobility: random-waypoint tracks, reference-group tracks built on top
// of them, and fixed positions. Trajectories are generated up front from
// dedicated random streams, so position lookups are pure functions of time
// and no protocol activity can perturb them.

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "core.hpp"

namespace manetsim {

struct Vec2 {
  double x = 0;
  double y = 0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  bool operator==(const Vec2&) const = default;
};

inline double dist(Vec2 a, Vec2 b) {
  double dx = a.x - b.x, dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

struct Area {
  double width = 600;
  double height = 600;

  bool contains(Vec2 p) const { return p.x >= 0 && p.x <= width && p.y >= 0 && p.y <= height; }
  Vec2 clamp(Vec2 p) const {
    return {std::min(std::max(p.x, 0.0), width), std::min(std::max(p.y, 0.0), height)};
  }
};

// One travel segment: sit at `origin` until depart_at, then move to
// `waypoint` at constant `speed`, arriving at arrive_at.
struct Leg {
  Vec2 origin;
  Vec2 waypoint;
  double speed = 0;
  SimTime depart_at = 0;
  SimTime arrive_at = 0;
};

// Draws the next waypoint/speed pair. The pause is served before departure,
// so with pause 0 the node departs the moment it arrives.
inline Leg next_leg(RngStream& rng, const Area& area, double v_min, double v_max, double pause,
                    Vec2 from, SimTime arrived_at) {
  if (v_min <= 0) throw std::invalid_argument("next_leg: v_min must be positive");
  if (v_max < v_min) throw std::invalid_argument("next_leg: v_max < v_min");
  if (pause < 0) throw std::invalid_argument("next_leg: negative pause");
  Vec2 wp;
  double d;
  do {  // redraw coincident waypoints so every leg makes progress
    wp = {rng.uniform(0, area.width), rng.uniform(0, area.height)};
    d = dist(from, wp);
  } while (d < 1e-9);
  double speed = rng.uniform(v_min, v_max);
  SimTime depart = arrived_at + pause;
  return Leg{from, wp, speed, depart, depart + d / speed};
}

// Uniform point in a disk of the given radius; rejection-sampled to avoid
// trig so results are bit-identical across platforms.
inline Vec2 disk_point(RngStream& rng, double radius) {
  if (radius <= 0) return {0, 0};
  for (;;) {
    double x = rng.uniform(-1.0, 1.0);
    double y = rng.uniform(-1.0, 1.0);
    if (x * x + y * y <= 1.0) return {x * radius, y * radius};
  }
}

class Trajectory {
 public:
  virtual ~Trajectory() = default;
  virtual Vec2 at(SimTime t) const = 0;
};

// Piecewise-linear track over a leg list. Between a leg's arrival and the
// next leg's departure the node holds at the waypoint.
class WaypointTrack : public Trajectory {
 public:
  WaypointTrack(Vec2 start, std::vector<Leg> legs) : start_(start), legs_(std::move(legs)) {}

  Vec2 at(SimTime t) const override {
    if (t < 0) throw std::invalid_argument("position query before start of run");
    if (legs_.empty() || t < legs_.front().depart_at) return start_;
    const Leg& leg = *leg_at(t);
    if (t >= leg.arrive_at) return leg.waypoint;
    double frac = (t - leg.depart_at) / (leg.arrive_at - leg.depart_at);
    return leg.origin + (leg.waypoint - leg.origin) * frac;
  }

  const std::vector<Leg>& legs() const { return legs_; }
  Vec2 start() const { return start_; }

  // index of the leg covering t (last leg with depart_at <= t); -1 before the
  // first departure
  int leg_index(SimTime t) const {
    if (legs_.empty() || t < legs_.front().depart_at) return -1;
    return static_cast<int>(leg_at(t) - legs_.data());
  }

  // fraction of the covering leg's travel completed at t, clamped to [0, 1]
  double leg_progress(SimTime t) const {
    int i = leg_index(t);
    if (i < 0) return 0;
    const Leg& leg = legs_[static_cast<std::size_t>(i)];
    if (t >= leg.arrive_at) return 1;
    return (t - leg.depart_at) / (leg.arrive_at - leg.depart_at);
  }

  static WaypointTrack fixed(Vec2 pos) { return WaypointTrack(pos, {}); }

  static WaypointTrack random_waypoint(RngStream& rng, const Area& area, double v_min, double v_max,
                                       double pause, SimTime duration) {
    Vec2 start{rng.uniform(0, area.width), rng.uniform(0, area.height)};
    std::vector<Leg> legs;
    Vec2 from = start;
    SimTime arrived = 0;
    while (arrived < duration) {
      Leg leg = next_leg(rng, area, v_min, v_max, pause, from, arrived);
      if (leg.depart_at > duration) break;  // pausing through the end of the run
      legs.push_back(leg);
      from = leg.waypoint;
      arrived = leg.arrive_at;
    }
    return WaypointTrack(start, std::move(legs));
  }

 private:
  const Leg* leg_at(SimTime t) const {
    // last leg with depart_at <= t
    std::size_t lo = 0, hi = legs_.size();
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      if (legs_[mid].depart_at <= t)
        lo = mid;
      else
        hi = mid;
    }
    return &legs_[lo];
  }

  Vec2 start_;
  std::vector<Leg> legs_;
};

struct RpgmConfig {
  int groups = 4;
  double offset_radius_m = 50;  // fixed member displacement from the reference point
  double jitter_radius_m = 10;  // per-leg member deviation, blended linearly over the leg
};

// A reference point that follows its own waypoint track, plus per-member
// fixed offsets and per-leg jitter knots. Member positions are clamped to
// the area.
struct RpgmGroup {
  WaypointTrack reference{Vec2{}, {}};
  Area area;
  std::vector<NodeId> members;
  std::vector<Vec2> offsets;                // one per member
  std::vector<std::vector<Vec2>> jitters;   // per member: legs().size() + 1 knots

  Vec2 member_at(std::size_t m, SimTime t) const {
    if (m >= members.size()) throw std::invalid_argument("member_at: no such member");
    Vec2 ref = reference.at(t);
    int leg = reference.leg_index(t);
    const auto& knots = jitters[m];
    Vec2 jitter;
    if (leg < 0) {
      jitter = knots.front();
    } else {
      double p = reference.leg_progress(t);
      Vec2 a = knots[static_cast<std::size_t>(leg)];
      Vec2 b = knots[static_cast<std::size_t>(leg) + 1];
      jitter = a + (b - a) * p;
    }
    return area.clamp(ref + offsets[m] + jitter);
  }
};

// Positions of every member of the group at time t, in member order.
inline std::vector<Vec2> rpgm_positions_at(const RpgmGroup& group, SimTime t) {
  if (group.members.empty()) throw std::invalid_argument("rpgm_positions_at: empty group");
  std::vector<Vec2> out;
  out.reserve(group.members.size());
  for (std::size_t m = 0; m < group.members.size(); ++m) out.push_back(group.member_at(m, t));
  return out;
}

class RpgmMemberTrack : public Trajectory {
 public:
  RpgmMemberTrack(std::shared_ptr<const RpgmGroup> group, std::size_t member)
      : group_(std::move(group)), member_(member) {}
  Vec2 at(SimTime t) const override { return group_->member_at(member_, t); }

 private:
  std::shared_ptr<const RpgmGroup> group_;
  std::size_t member_;
};

class FixedTrack : public Trajectory {
 public:
  explicit FixedTrack(Vec2 pos) : pos_(pos) {}
  Vec2 at(SimTime t) const override {
    if (t < 0) throw std::invalid_argument("position query before start of run");
    return pos_;
  }

 private:
  Vec2 pos_;
};

using StreamFactory = std::function<RngStream(const std::string&)>;

inline std::vector<std::unique_ptr<Trajectory>> build_rwp_tracks(int node_count, const Area& area,
                                                                 double v_min, double v_max,
                                                                 double pause, SimTime duration,
                                                                 const StreamFactory& make_stream) {
  if (node_count <= 0) throw std::invalid_argument("build_rwp_tracks: need at least one node");
  std::vector<std::unique_ptr<Trajectory>> tracks;
  tracks.reserve(static_cast<std::size_t>(node_count));
  for (NodeId id = 0; id < node_count; ++id) {
    RngStream rng = make_stream("mob.rwp." + std::to_string(id));
    tracks.push_back(std::make_unique<WaypointTrack>(
        WaypointTrack::random_waypoint(rng, area, v_min, v_max, pause, duration)));
  }
  return tracks;
}

// Members are assigned to groups round-robin; each group's reference point
// follows its own waypoint track drawn from a group-labelled stream.
inline std::vector<std::unique_ptr<Trajectory>> build_rpgm_tracks(
    int node_count, const Area& area, double v_min, double v_max, double pause, SimTime duration,
    const RpgmConfig& cfg, const StreamFactory& make_stream,
    std::vector<std::shared_ptr<const RpgmGroup>>* groups_out = nullptr) {
  if (node_count <= 0) throw std::invalid_argument("build_rpgm_tracks: need at least one node");
  if (cfg.groups <= 0) throw std::invalid_argument("build_rpgm_tracks: need at least one group");
  int group_count = std::min(cfg.groups, node_count);

  std::vector<std::shared_ptr<RpgmGroup>> groups;
  groups.reserve(static_cast<std::size_t>(group_count));
  for (int g = 0; g < group_count; ++g) {
    auto group = std::make_shared<RpgmGroup>();
    RngStream rng = make_stream("mob.rpgm.ref." + std::to_string(g));
    group->reference = WaypointTrack::random_waypoint(rng, area, v_min, v_max, pause, duration);
    group->area = area;
    groups.push_back(std::move(group));
  }
  for (NodeId id = 0; id < node_count; ++id)
    groups[static_cast<std::size_t>(id % group_count)]->members.push_back(id);

  std::vector<std::unique_ptr<Trajectory>> tracks(static_cast<std::size_t>(node_count));
  for (auto& group : groups) {
    std::size_t knot_count = group->reference.legs().size() + 1;
    for (std::size_t m = 0; m < group->members.size(); ++m) {
      NodeId id = group->members[m];
      RngStream rng = make_stream("mob.rpgm.member." + std::to_string(id));
      group->offsets.push_back(disk_point(rng, cfg.offset_radius_m));
      std::vector<Vec2> knots;
      knots.reserve(knot_count);
      for (std::size_t k = 0; k < knot_count; ++k) knots.push_back(disk_point(rng, cfg.jitter_radius_m));
      group->jitters.push_back(std::move(knots));
    }
    std::shared_ptr<const RpgmGroup> frozen = group;
    for (std::size_t m = 0; m < frozen->members.size(); ++m)
      tracks[static_cast<std::size_t>(frozen->members[m])] =
          std::make_unique<RpgmMemberTrack>(frozen, m);
    if (groups_out) groups_out->push_back(frozen);
  }
  return tracks;
}

inline std::vector<std::unique_ptr<Trajectory>> build_fixed_tracks(const std::vector<Vec2>& positions,
                                                                   const Area& area) {
  if (positions.empty()) throw std::invalid_argument("build_fixed_tracks: no positions");
  std::vector<std::unique_ptr<Trajectory>> tracks;
  tracks.reserve(positions.size());
  for (Vec2 p : positions) {
    if (!area.contains(p)) throw std::invalid_argument("build_fixed_tracks: position outside area");
    tracks.push_back(std::make_unique<FixedTrack>(p));
  }
  return tracks;
}

}  // namespace manetsim
