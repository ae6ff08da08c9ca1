#include "lanewrap/frenet_scene.hpp"

#include <cmath>

#include "lanewrap/error.hpp"

namespace lanewrap {

namespace {

bool beyond_radius(const ParamPolyline& poly, double s, double d) {
  return std::abs(d * poly.curvature_at(s)) >= 1.0;
}

}  // namespace

FrenetPoint to_frenet_point(const CenterlineSequence& ref, double origin_s, Vec2 p) {
  const Projection proj = ref.polyline.project(p);
  return {proj.s_unclamped - origin_s, proj.point.d};
}

Vec2 to_cartesian_point(const CenterlineSequence& ref, double origin_s, FrenetPoint fp) {
  return ref.polyline.to_cartesian({fp.s + origin_s, fp.d}).position;
}

FrenetScene scene_to_frenet(const Scene& scene, const CenterlineSequence& ref) {
  if (scene.frame.is_frenet()) throw GeometryError("scene '" + scene.scene_id + "' is already frenet-tagged");
  if (ref.polyline.empty() || ref.polyline.length() <= 0.0) throw GeometryError("degenerate reference polyline");
  const ParamPolyline& poly = ref.polyline;

  FrenetScene out;
  out.reference = ref;
  out.origin_s = poly.project(scene.tv().current().position()).s_unclamped;
  const double origin = out.origin_s;

  Scene& fs = out.scene;
  fs.scene_id = scene.scene_id;
  fs.dt = scene.dt;
  fs.history_steps = scene.history_steps;
  fs.future_steps = scene.future_steps;
  fs.tv_id = scene.tv_id;
  fs.frame = FrameTag{FrameKind::kFrenet, ref.index};

  fs.agents.reserve(scene.agents.size());
  for (const auto& agent : scene.agents) {
    AgentHistory fa;
    fa.id = agent.id;
    fa.states.reserve(agent.states.size());
    for (const auto& st : agent.states) {
      const Projection proj = poly.project(st.position());
      AgentState f = st;
      f.x = proj.s_unclamped - origin;
      f.y = proj.point.d;
      f.heading = normalize_angle(st.heading - poly.heading_at(proj.s_unclamped));
      if (beyond_radius(poly, proj.s_unclamped, f.y)) ++out.unreliable_points;
      fa.states.push_back(f);
    }
    fs.agents.push_back(std::move(fa));
  }
  // The TV's current state sits on the origin by definition.
  for (auto& a : fs.agents) {
    if (a.id == scene.tv_id && !a.states.empty()) a.states.back().x = 0.0;
  }

  fs.lanes.reserve(scene.lanes.size());
  for (const auto& lane : scene.lanes) {
    Lane fl = lane;
    for (auto& pose : fl.centerline) {
      const Projection proj = poly.project(pose.position());
      pose.x = proj.s_unclamped - origin;
      pose.y = proj.point.d;
      pose.theta_or_kappa = poly.curvature_at(proj.s_unclamped);
      if (beyond_radius(poly, proj.s_unclamped, pose.y)) ++out.unreliable_points;
    }
    fs.lanes.push_back(std::move(fl));
  }

  if (scene.gt_future) {
    std::vector<Vec2> gt;
    gt.reserve(scene.gt_future->size());
    for (const auto& p : *scene.gt_future) {
      const Projection proj = poly.project(p);
      gt.push_back({proj.s_unclamped - origin, proj.point.d});
      if (beyond_radius(poly, proj.s_unclamped, proj.point.d)) ++out.unreliable_points;
    }
    fs.gt_future = std::move(gt);
  }
  return out;
}

Scene scene_to_cartesian(const FrenetScene& fscene) {
  const Scene& fs = fscene.scene;
  if (!fs.frame.is_frenet()) throw GeometryError("scene '" + fs.scene_id + "' is not frenet-tagged");
  if (fscene.reference.polyline.empty()) throw GeometryError("frenet scene is missing its reference");
  const ParamPolyline& poly = fscene.reference.polyline;
  const double origin = fscene.origin_s;

  Scene out = fs;
  out.frame = FrameTag{};
  for (auto& agent : out.agents) {
    for (auto& st : agent.states) {
      const double s = st.x + origin;
      const Vec2 p = poly.to_cartesian({s, st.y}).position;
      st.heading = normalize_angle(st.heading + poly.heading_at(s));
      st.x = p.x;
      st.y = p.y;
    }
  }
  for (auto& lane : out.lanes) {
    for (auto& pose : lane.centerline) {
      const Vec2 p = poly.to_cartesian({pose.x + origin, pose.y}).position;
      pose.x = p.x;
      pose.y = p.y;
    }
    auto& c = lane.centerline;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::size_t a = i == 0 ? 0 : i - 1;
      const std::size_t b = i + 1 < c.size() ? i + 1 : i;
      if (a == b) {
        c[i].theta_or_kappa = 0.0;
        continue;
      }
      c[i].theta_or_kappa = std::atan2(c[b].y - c[a].y, c[b].x - c[a].x);
    }
  }
  if (out.gt_future) {
    for (auto& p : *out.gt_future) p = poly.to_cartesian({p.x + origin, p.y}).position;
  }
  return out;
}

}  // namespace lanewrap
