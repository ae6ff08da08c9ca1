#include "lanewrap/centerlines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "lanewrap/error.hpp"

namespace lanewrap {

namespace {

std::vector<Vec2> positions(const Lane& lane) {
  std::vector<Vec2> pts;
  pts.reserve(lane.centerline.size());
  for (const auto& p : lane.centerline) pts.push_back(p.position());
  return pts;
}

double lane_length(const Lane& lane) {
  double len = 0.0;
  for (std::size_t i = 1; i < lane.centerline.size(); ++i) {
    len += distance(lane.centerline[i - 1].position(), lane.centerline[i].position());
  }
  return len;
}

struct Assignment {
  int lane = -1;
  double s_on_lane = 0.0;
};

Assignment assign(const Scene& scene, const LaneMap& map) {
  const AgentState& tv = scene.tv().current();
  Assignment best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < map.size(); ++i) {
    const auto& poly = map.polyline(i);
    const Projection proj = poly.project(tv.position());
    const double offset = std::abs(normalize_angle(tv.heading - poly.heading_at(proj.point.s)));
    if (offset >= kLaneOrientationGate) continue;
    const double dist = std::hypot(proj.point.d, proj.overshoot);
    const bool better = dist < best_dist - 1e-12 ||
                        (std::abs(dist - best_dist) <= 1e-12 && map.lane(i).id < map.lane(best.lane).id);
    if (better) {
      best_dist = dist;
      best.lane = static_cast<int>(i);
      best.s_on_lane = proj.s_unclamped;
    }
  }
  if (best.lane < 0) {
    throw LaneAssignmentError("scene '" + scene.scene_id + "': no assignable lane within pi/4 of the TV heading");
  }
  return best;
}

struct Expansion {
  const Scene& scene;
  const LaneMap& map;
  std::vector<std::vector<int>> leaves;

  void dfs(std::vector<int>& path, double ahead) {
    const Lane& tail = map.lane(static_cast<std::size_t>(path.back()));
    bool extended = false;
    if (ahead < kSequenceLengthAhead) {
      const Vec2 end = tail.centerline.back().position();
      for (const auto& succ_id : tail.successors) {
        const int succ = map.find(succ_id);
        if (succ < 0) continue;
        if (std::find(path.begin(), path.end(), succ) != path.end()) continue;
        const Lane& next = map.lane(static_cast<std::size_t>(succ));
        const double gap = distance(end, next.centerline.front().position());
        if (gap >= kMaxJunctionGap) continue;
        extended = true;
        path.push_back(succ);
        dfs(path, ahead + gap + lane_length(next));
        path.pop_back();
      }
    }
    if (!extended) leaves.push_back(path);
  }
};

}  // namespace

LaneMap::LaneMap(const std::vector<Lane>& lanes, double resample_step) {
  lanes_.reserve(lanes.size());
  polylines_.reserve(lanes.size());
  for (const auto& l : lanes) {
    lanes_.push_back(&l);
    polylines_.push_back(ParamPolyline::build(positions(l), resample_step));
  }
}

int LaneMap::find(const std::string& id) const {
  for (std::size_t i = 0; i < lanes_.size(); ++i) {
    if (lanes_[i]->id == id) return static_cast<int>(i);
  }
  return -1;
}

std::string assign_current_lane(const Scene& scene) {
  const LaneMap map(scene.lanes);
  return map.lane(static_cast<std::size_t>(assign(scene, map).lane)).id;
}

std::vector<CenterlineSequence> enumerate_sequences(const Scene& scene) {
  const LaneMap map(scene.lanes);
  const Assignment start = assign(scene, map);
  const Lane& current = map.lane(static_cast<std::size_t>(start.lane));
  const double ahead0 = map.polyline(static_cast<std::size_t>(start.lane)).length() - start.s_on_lane;

  Expansion expansion{scene, map, {}};
  std::vector<int> path{start.lane};
  expansion.dfs(path, ahead0);

  const Vec2 tv_pos = scene.tv().current().position();
  std::vector<CenterlineSequence> out;
  for (const auto& leaf : expansion.leaves) {
    std::vector<Vec2> pts = positions(current);
    CenterlineSequence seq;
    seq.lane_ids.push_back(current.id);
    for (std::size_t k = 1; k < leaf.size(); ++k) {
      const Lane& lane = map.lane(static_cast<std::size_t>(leaf[k]));
      seq.lane_ids.push_back(lane.id);
      for (const auto& p : lane.centerline) pts.push_back(p.position());
    }
    const auto full = ParamPolyline::build(pts);
    const double s_tv = full.project(tv_pos).s_unclamped;
    seq.polyline = full.slice(s_tv - kSequenceLengthBehind, s_tv + kSequenceLengthAhead);
    seq.start_s_tv = seq.polyline.project(tv_pos).s_unclamped;
    seq.index = static_cast<int>(out.size());
    out.push_back(std::move(seq));
  }
  return out;
}

double mean_abs_lateral(const CenterlineSequence& seq, const std::vector<Vec2>& points) {
  if (points.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : points) sum += std::abs(seq.polyline.project(p).point.d);
  return sum / static_cast<double>(points.size());
}

int assign_gt_centerline(const Scene& scene, const std::vector<CenterlineSequence>& seqs) {
  if (!scene.gt_future) throw ValidationError("scene '" + scene.scene_id + "' has no gt_future");
  if (seqs.empty()) throw ValidationError("no centerline sequences to assign");
  int best = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    const double err = mean_abs_lateral(seqs[i], *scene.gt_future);
    if (err < best_err - 1e-12) {
      best_err = err;
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace lanewrap
