#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "lanewrap/types.hpp"

namespace lanewrap::testing {

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(LANEWRAP_TEST_FIXTURES) / name;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("lanewrap_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline Lane straight_lane(const std::string& id, Vec2 from, Vec2 to, double spacing = 1.0) {
  Lane lane;
  lane.id = id;
  const double len = distance(from, to);
  const int n = std::max(1, static_cast<int>(std::ceil(len / spacing)));
  const double heading = std::atan2(to.y - from.y, to.x - from.x);
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    lane.centerline.push_back({from.x + t * (to.x - from.x), from.y + t * (to.y - from.y), heading});
  }
  return lane;
}

/// Circular arc around `center`; positive sweep is counter-clockwise.
inline Lane arc_lane(const std::string& id, Vec2 center, double radius, double start_angle, double sweep,
                     double spacing = 1.0) {
  Lane lane;
  lane.id = id;
  const int n = std::max(2, static_cast<int>(std::ceil(std::abs(sweep) * radius / spacing)));
  const double dir = sweep > 0.0 ? 1.0 : -1.0;
  for (int i = 0; i <= n; ++i) {
    const double a = start_angle + sweep * i / n;
    lane.centerline.push_back(
        {center.x + radius * std::cos(a), center.y + radius * std::sin(a), normalize_angle(a + dir * kPi / 2.0)});
  }
  return lane;
}

inline void link(Lane& from, Lane& to) {
  from.successors.push_back(to.id);
  to.predecessors.push_back(from.id);
}

/// Constant-speed history ending at `pos` (t = 0), moving along `heading`.
inline AgentHistory straight_history(const std::string& id, Vec2 pos, double heading, double speed,
                                     int steps = kDefaultHistorySteps, double dt = kDefaultDt) {
  AgentHistory h;
  h.id = id;
  for (int i = -steps; i <= 0; ++i) {
    AgentState s;
    s.t = i * dt;
    s.x = pos.x + std::cos(heading) * speed * s.t;
    s.y = pos.y + std::sin(heading) * speed * s.t;
    s.heading = normalize_angle(heading);
    s.speed = speed;
    h.states.push_back(s);
  }
  return h;
}

inline std::vector<Vec2> straight_future(Vec2 pos, double heading, double speed, int steps = kDefaultFutureSteps,
                                         double dt = kDefaultDt) {
  std::vector<Vec2> out;
  for (int i = 1; i <= steps; ++i) {
    out.push_back({pos.x + std::cos(heading) * speed * i * dt, pos.y + std::sin(heading) * speed * i * dt});
  }
  return out;
}

/// One 200 m lane along +x, TV at x = 20 driving at 10 m/s, one lead agent.
inline Scene straight_scene(double tv_d = 0.0, double speed = 10.0) {
  Scene s;
  s.scene_id = "straight";
  s.tv_id = "tv";
  s.lanes.push_back(straight_lane("lane_0", {0.0, 0.0}, {200.0, 0.0}));
  s.agents.push_back(straight_history("tv", {20.0, tv_d}, 0.0, speed));
  s.agents.push_back(straight_history("agent_1", {45.0, 0.0}, 0.0, 8.0));
  s.gt_future = straight_future({20.0, tv_d}, 0.0, speed);
  return s;
}

/// Y-fork: stem along +x to x = 60, branches at +-angle. The TV sits at
/// x = 20. Ground truth follows the branch chosen by `gt_left`.
inline Scene fork_scene(bool gt_left = true, double angle_deg = 30.0, double speed = 10.0, double tv_x = 45.0) {
  Scene s;
  s.scene_id = "fork";
  s.tv_id = "tv";
  const double a = angle_deg * kPi / 180.0;
  Lane stem = straight_lane("lane_0", {0.0, 0.0}, {60.0, 0.0});
  Lane left = straight_lane("lane_1", {60.0, 0.0}, {60.0 + 150.0 * std::cos(a), 150.0 * std::sin(a)});
  Lane right = straight_lane("lane_2", {60.0, 0.0}, {60.0 + 150.0 * std::cos(a), -150.0 * std::sin(a)});
  link(stem, left);
  link(stem, right);
  s.lanes = {stem, left, right};
  s.agents.push_back(straight_history("tv", {tv_x, 0.0}, 0.0, speed));
  std::vector<Vec2> gt;
  const double sign = gt_left ? 1.0 : -1.0;
  for (int i = 1; i <= kDefaultFutureSteps; ++i) {
    const double travel = speed * i * kDefaultDt;
    const double x = tv_x + travel;
    if (x <= 60.0) {
      gt.push_back({x, 0.0});
    } else {
      const double past = x - 60.0;
      gt.push_back({60.0 + past * std::cos(a), sign * past * std::sin(a)});
    }
  }
  s.gt_future = gt;
  return s;
}

/// Counter-clockwise arc of radius R starting at the origin heading +x,
/// preceded by a 30 m straight approach. The TV is `tv_s` metres into the
/// approach (negative x is the approach).
inline Scene curve_scene(double radius = 30.0, double speed = 10.0) {
  Scene s;
  s.scene_id = "curve";
  s.tv_id = "tv";
  Lane approach = straight_lane("lane_0", {-30.0, 0.0}, {0.0, 0.0});
  Lane arc = arc_lane("lane_1", {0.0, radius}, radius, -kPi / 2.0, kPi, 0.5);
  link(approach, arc);
  s.lanes = {approach, arc};
  s.agents.push_back(straight_history("tv", {0.0, 0.0}, 0.0, speed));
  std::vector<Vec2> gt;
  for (int i = 1; i <= kDefaultFutureSteps; ++i) {
    const double phi = speed * i * kDefaultDt / radius;
    gt.push_back({radius * std::sin(phi), radius * (1.0 - std::cos(phi))});
  }
  s.gt_future = gt;
  return s;
}

inline Trajectory constant_trajectory(const std::vector<Vec2>& base, Vec2 offset, double prob) {
  Trajectory t;
  for (const auto& p : base) t.waypoints.push_back(p + offset);
  t.probability = prob;
  return t;
}

}  // namespace lanewrap::testing
