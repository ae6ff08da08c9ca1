#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lanewrap/centerlines.hpp"
#include "lanewrap/types.hpp"

namespace lanewrap {

inline constexpr double kMissThreshold = 2.0;
inline constexpr double kCorridorEndTolerance = 0.5;

/// Union of lane corridors (centerline buffered by half the lane width).
class RoadCorridors {
 public:
  explicit RoadCorridors(const std::vector<Lane>& lanes);

  bool on_road(Vec2 p) const;
  bool empty() const { return map_.size() == 0; }

 private:
  LaneMap map_;
};

/// True iff any waypoint lies outside every corridor.
bool off_road(const Trajectory& traj, const RoadCorridors& road);
bool off_road(const Trajectory& traj, const std::vector<Lane>& lanes);

/// Probability mass of the off-road trajectories. Throws NormalizationError
/// when the probabilities do not sum to one within 1e-6.
double orp(const PredictionSet& pred, const RoadCorridors& road);
double orp(const PredictionSet& pred, const std::vector<Lane>& lanes);

double ade(const Trajectory& traj, const std::vector<Vec2>& gt);
double fde(const Trajectory& traj, const std::vector<Vec2>& gt);
double min_ade(const PredictionSet& pred, const std::vector<Vec2>& gt);
double min_fde(const PredictionSet& pred, const std::vector<Vec2>& gt);

/// 1 iff the most probable endpoint (first on ties) is more than 2 m from
/// the last ground-truth point.
int mr1(const PredictionSet& pred, const std::vector<Vec2>& gt);

/// Mean distance of the endpoints to their centroid, unweighted.
double mied(const PredictionSet& pred);

struct MetricRow {
  std::string scene_id;
  std::optional<std::string> attack;
  std::optional<std::string> direction;
  double min_ade = 0.0;
  double min_fde = 0.0;
  double orp = 0.0;
  int mr1 = 0;
  double mied = 0.0;
  double speed_scale = 1.0;
};

/// All five metrics for one scene. `scene` supplies lanes and gt_future.
MetricRow evaluate_scene(const Scene& scene, const PredictionSet& pred);

struct MetricAggregate {
  std::size_t scenes = 0;
  double min_ade = 0.0;
  double min_fde = 0.0;
  double orp = 0.0;  // fraction
  double mr1 = 0.0;  // rate
  double mied = 0.0;
};

MetricAggregate aggregate_rows(const std::vector<MetricRow>& rows);

/// Per-metric worse of two rows: max for errors, ORP and MR1, min for MIED.
MetricRow worse_row(const MetricRow& a, const MetricRow& b);

struct MetricReport {
  std::vector<MetricRow> rows;
  MetricAggregate aggregate;
};

std::string report_to_json(const MetricReport& report);
std::string report_to_csv(const MetricReport& report);
void save_report(const MetricReport& report, const std::filesystem::path& json_path);

}  // namespace lanewrap
