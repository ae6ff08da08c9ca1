#pragma once

#include <span>
#include <vector>

#include "lanewrap/types.hpp"

namespace lanewrap {

inline constexpr double kDefaultResampleStep = 0.5;

/// Frenet coordinates: `s` is arc-length along the reference, `d` the
/// lateral offset, positive to the left of the direction of travel.
struct FrenetPoint {
  double s = 0.0;
  double d = 0.0;
};

struct Projection {
  FrenetPoint point;      // s clamped to [0, length]
  double overshoot = 0.0; // > 0 iff the point lies beyond an end of the reference
  double s_unclamped = 0.0;  // s along the extended end tangents
};

struct CartesianPoint {
  Vec2 position;
  bool extrapolated = false;  // s was outside [0, length]
};

/// Arc-length parameterized polyline.
///
/// Input vertices are kept and every segment is subdivided evenly so that no
/// spacing exceeds the resample step; the total length is that of the input.
/// Each point carries a unit normal: the bisector of the adjacent segments at
/// interior points, linearly blended along a segment. Projection and its
/// inverse use this continuous normal field, so `to_cartesian(project(p))`
/// reproduces `p` exactly and, for points sampled on a circle, the normals
/// are the exact radial directions.
class ParamPolyline {
 public:
  ParamPolyline() = default;

  /// Throws GeometryError when fewer than two distinct points remain after
  /// dropping consecutive duplicates.
  static ParamPolyline build(std::span<const Vec2> points, double resample_step = kDefaultResampleStep);

  const std::vector<Vec2>& points() const { return pts_; }
  const std::vector<double>& arclength() const { return s_; }
  const std::vector<Vec2>& segment_tangents() const { return tangents_; }
  /// Signed curvature per point (positive = turning left).
  const std::vector<double>& curvature() const { return kappa_; }
  /// Deduplicated input vertices.
  const std::vector<Vec2>& vertices() const { return raw_; }
  double length() const { return s_.empty() ? 0.0 : s_.back(); }
  double resample_step() const { return step_; }
  bool empty() const { return pts_.empty(); }

  Projection project(Vec2 p) const;
  CartesianPoint to_cartesian(FrenetPoint fp) const;

  Vec2 point_at(double s) const { return to_cartesian({s, 0.0}).position; }
  /// Unit tangent of the frame at arc-length s (extrapolated past the ends).
  Vec2 tangent_at(double s) const;
  double heading_at(double s) const;
  double curvature_at(double s) const;

  /// Sub-polyline covering [s_from, s_to] (clamped to the polyline), built
  /// from the original vertices so curvature estimates carry over.
  ParamPolyline slice(double s_from, double s_to) const;

 private:
  static ParamPolyline from_vertices(std::vector<Vec2> raw, std::vector<double> raw_kappa, double step,
                                     Vec2 head_tangent, Vec2 tail_tangent);
  std::size_t segment_for(double s) const;
  Vec2 normal_on_segment(std::size_t i, double t) const;

  std::vector<Vec2> raw_;
  std::vector<double> raw_s_;
  std::vector<double> raw_kappa_;

  std::vector<Vec2> pts_;
  std::vector<double> s_;
  std::vector<Vec2> tangents_;  // per segment
  std::vector<Vec2> normals_;   // per point
  std::vector<double> kappa_;   // per point
  Vec2 head_tangent_;           // frame tangent at s = 0
  Vec2 tail_tangent_;           // frame tangent at s = length
  double step_ = kDefaultResampleStep;
};

/// Signed curvature of the circle through three points; 0 when collinear.
double circumcircle_curvature(Vec2 a, Vec2 b, Vec2 c);

// Free-function forms of the polyline operations.
ParamPolyline build_polyline(std::span<const Vec2> points, double resample_step = kDefaultResampleStep);
Projection project(const ParamPolyline& poly, Vec2 p);
CartesianPoint to_cartesian(const ParamPolyline& poly, FrenetPoint fp);
std::vector<double> curvature_profile(const ParamPolyline& poly);

}  // namespace lanewrap
