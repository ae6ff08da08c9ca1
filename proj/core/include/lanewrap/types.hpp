#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace lanewrap {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kGravity = 9.81;

inline constexpr double kDefaultDt = 0.1;
inline constexpr int kDefaultHistorySteps = 20;
inline constexpr int kDefaultFutureSteps = 30;
inline constexpr double kDefaultLaneWidth = 3.7;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 left_normal(Vec2 t) { return {-t.y, t.x}; }

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

enum class FrameKind { kCartesian, kFrenet };

struct FrameTag {
  FrameKind kind = FrameKind::kCartesian;
  // Index of the centerline sequence a Frenet scene is expressed in.
  std::optional<int> centerline_index;

  bool is_frenet() const { return kind == FrameKind::kFrenet; }
  friend bool operator==(const FrameTag&, const FrameTag&) = default;
};

/// One timestamped agent state. In a Frenet-tagged scene `x`/`y` hold
/// (s, d) and `heading` is relative to the reference tangent.
struct AgentState {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double speed = 0.0;
  double yaw_rate = 0.0;
  double accel = 0.0;

  Vec2 position() const { return {x, y}; }
};

struct AgentHistory {
  std::string id;
  std::vector<AgentState> states;

  const AgentState& current() const { return states.back(); }
};

/// Centerline pose. The third channel is the tangent heading (rad) in a
/// Cartesian scene and the reference-line curvature (1/m) in a Frenet scene.
struct LanePose {
  double x = 0.0;
  double y = 0.0;
  double theta_or_kappa = 0.0;

  Vec2 position() const { return {x, y}; }
};

struct Lane {
  std::string id;
  std::vector<LanePose> centerline;
  double width = kDefaultLaneWidth;
  std::vector<std::string> successors;
  std::vector<std::string> predecessors;
};

struct Scene {
  std::string scene_id;
  double dt = kDefaultDt;
  int history_steps = kDefaultHistorySteps;
  int future_steps = kDefaultFutureSteps;
  std::string tv_id;
  FrameTag frame;
  std::vector<AgentHistory> agents;
  std::vector<Lane> lanes;
  std::optional<std::vector<Vec2>> gt_future;

  const AgentHistory* find_agent(const std::string& id) const;
  const AgentHistory& tv() const;
  const Lane* find_lane(const std::string& id) const;
};

struct Trajectory {
  std::vector<Vec2> waypoints;
  double probability = 0.0;
  std::optional<int> source_centerline;
  // Set by greedy selection when the member came back from the suppressed
  // pool to fill the requested count.
  bool refilled = false;

  Vec2 endpoint() const { return waypoints.back(); }
};

/// The final forecast for one scene.
struct PredictionSet {
  std::string scene_id;
  std::vector<Trajectory> trajectories;
};

}  // namespace lanewrap
