#pragma once

#include <string>
#include <vector>

#include "lanewrap/geometry.hpp"
#include "lanewrap/types.hpp"

namespace lanewrap {

inline constexpr double kSequenceLengthAhead = 110.0;
inline constexpr double kSequenceLengthBehind = 10.0;
inline constexpr double kMaxJunctionGap = 0.5;
inline constexpr double kLaneOrientationGate = kPi / 4.0;

/// One candidate reference path: a chain of successor-connected lanes.
struct CenterlineSequence {
  int index = 0;
  std::vector<std::string> lane_ids;
  ParamPolyline polyline;
  // Arc-length of the TV's projection on `polyline`; Frenet s is measured
  // from here.
  double start_s_tv = 0.0;
};

/// Polylines for every lane of a scene, built once.
class LaneMap {
 public:
  explicit LaneMap(const std::vector<Lane>& lanes, double resample_step = kDefaultResampleStep);

  std::size_t size() const { return lanes_.size(); }
  const Lane& lane(std::size_t i) const { return *lanes_[i]; }
  const ParamPolyline& polyline(std::size_t i) const { return polylines_[i]; }
  /// Index of the lane with the given id, or -1.
  int find(const std::string& id) const;

 private:
  std::vector<const Lane*> lanes_;
  std::vector<ParamPolyline> polylines_;
};

/// The closest lane (by distance to its centerline) whose tangent at the
/// TV's projection is within pi/4 of the TV heading. Ties go to the smaller
/// lane id. Throws LaneAssignmentError when no lane passes the gate.
std::string assign_current_lane(const Scene& scene);

/// Depth-first successor expansion from the current lane until each branch
/// reaches 110 m ahead of the TV or the graph ends. One sequence per leaf.
std::vector<CenterlineSequence> enumerate_sequences(const Scene& scene);

/// Index of the sequence with the smallest mean |d| of the ground-truth
/// waypoints. Throws ValidationError without gt_future.
int assign_gt_centerline(const Scene& scene, const std::vector<CenterlineSequence>& seqs);

/// Mean |d| of `points` projected onto `seq`.
double mean_abs_lateral(const CenterlineSequence& seq, const std::vector<Vec2>& points);

}  // namespace lanewrap
