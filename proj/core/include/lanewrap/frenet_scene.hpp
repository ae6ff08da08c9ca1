#pragma once

#include <cstddef>

#include "lanewrap/centerlines.hpp"
#include "lanewrap/types.hpp"

namespace lanewrap {

/// A scene re-expressed in the Frenet frame of one centerline sequence.
struct FrenetScene {
  Scene scene;  // frenet-tagged
  CenterlineSequence reference;
  // Polyline arc-length of the TV's current position (Frenet s = 0).
  double origin_s = 0.0;
  // Points whose |d| reaches the local radius of curvature; the transform
  // is not invertible there.
  std::size_t unreliable_points = 0;
};

/// Positions become (s - s_TV, d); agent headings become relative to the
/// reference tangent; lane poses carry the reference curvature in their
/// third channel. Speed, yaw rate and acceleration are copied unchanged.
FrenetScene scene_to_frenet(const Scene& scene, const CenterlineSequence& ref);

/// Inverse of scene_to_frenet. Lane tangent headings are re-derived from
/// neighbouring points.
Scene scene_to_cartesian(const FrenetScene& fscene);

// Point transforms relative to a Frenet origin on `ref`.
FrenetPoint to_frenet_point(const CenterlineSequence& ref, double origin_s, Vec2 p);
Vec2 to_cartesian_point(const CenterlineSequence& ref, double origin_s, FrenetPoint fp);

}  // namespace lanewrap
