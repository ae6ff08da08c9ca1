#include "lanewrap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json_internal.hpp"
#include "lanewrap/error.hpp"

namespace lanewrap {

namespace {

void check_lengths(const Trajectory& traj, const std::vector<Vec2>& gt) {
  if (traj.waypoints.size() != gt.size() || gt.empty()) {
    throw ValidationError("trajectory has " + std::to_string(traj.waypoints.size()) + " waypoints, ground truth " +
                          std::to_string(gt.size()));
  }
}

void check_normalized(const PredictionSet& pred) {
  double total = 0.0;
  for (const auto& t : pred.trajectories) total += t.probability;
  if (std::abs(total - 1.0) > 1e-6) {
    throw NormalizationError("scene '" + pred.scene_id + "': probabilities sum to " + std::to_string(total));
  }
}

// Squared distance from p to segment ab.
double segment_distance_sq(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Vec2 r = p - (a + t * ab);
  return dot(r, r);
}

std::string json_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

RoadCorridors::RoadCorridors(const std::vector<Lane>& lanes) : map_(lanes) {}

bool RoadCorridors::on_road(Vec2 p) const {
  for (std::size_t i = 0; i < map_.size(); ++i) {
    const double half = 0.5 * map_.lane(i).width;
    const auto& poly = map_.polyline(i);
    // |d| bounds the distance to the polyline, so a point farther than the
    // corridor reach from every segment cannot be inside.
    const double reach = std::hypot(half, kCorridorEndTolerance);
    const auto& v = poly.vertices();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < v.size() && best > reach * reach; ++k) {
      best = std::min(best, segment_distance_sq(p, v[k], v[k + 1]));
    }
    if (best > reach * reach) continue;
    const Projection proj = poly.project(p);
    if (std::abs(proj.point.d) <= half && proj.overshoot <= kCorridorEndTolerance) return true;
  }
  return false;
}

bool off_road(const Trajectory& traj, const RoadCorridors& road) {
  return std::any_of(traj.waypoints.begin(), traj.waypoints.end(), [&](Vec2 p) { return !road.on_road(p); });
}

bool off_road(const Trajectory& traj, const std::vector<Lane>& lanes) { return off_road(traj, RoadCorridors(lanes)); }

double orp(const PredictionSet& pred, const RoadCorridors& road) {
  check_normalized(pred);
  double mass = 0.0;
  for (const auto& t : pred.trajectories) {
    if (off_road(t, road)) mass += t.probability;
  }
  return std::clamp(mass, 0.0, 1.0);
}

double orp(const PredictionSet& pred, const std::vector<Lane>& lanes) { return orp(pred, RoadCorridors(lanes)); }

double ade(const Trajectory& traj, const std::vector<Vec2>& gt) {
  check_lengths(traj, gt);
  double sum = 0.0;
  for (std::size_t i = 0; i < gt.size(); ++i) sum += distance(traj.waypoints[i], gt[i]);
  return sum / static_cast<double>(gt.size());
}

double fde(const Trajectory& traj, const std::vector<Vec2>& gt) {
  check_lengths(traj, gt);
  return distance(traj.waypoints.back(), gt.back());
}

double min_ade(const PredictionSet& pred, const std::vector<Vec2>& gt) {
  if (pred.trajectories.empty()) throw ValidationError("empty prediction set");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : pred.trajectories) best = std::min(best, ade(t, gt));
  return best;
}

double min_fde(const PredictionSet& pred, const std::vector<Vec2>& gt) {
  if (pred.trajectories.empty()) throw ValidationError("empty prediction set");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : pred.trajectories) best = std::min(best, fde(t, gt));
  return best;
}

int mr1(const PredictionSet& pred, const std::vector<Vec2>& gt) {
  if (pred.trajectories.empty()) throw ValidationError("empty prediction set");
  if (gt.empty()) throw ValidationError("empty ground truth");
  std::size_t top = 0;
  for (std::size_t i = 1; i < pred.trajectories.size(); ++i) {
    if (pred.trajectories[i].probability > pred.trajectories[top].probability) top = i;
  }
  return distance(pred.trajectories[top].endpoint(), gt.back()) > kMissThreshold ? 1 : 0;
}

double mied(const PredictionSet& pred) {
  if (pred.trajectories.empty()) throw ValidationError("empty prediction set");
  Vec2 centroid;
  for (const auto& t : pred.trajectories) centroid = centroid + t.endpoint();
  centroid = (1.0 / static_cast<double>(pred.trajectories.size())) * centroid;
  double sum = 0.0;
  for (const auto& t : pred.trajectories) sum += distance(t.endpoint(), centroid);
  return sum / static_cast<double>(pred.trajectories.size());
}

MetricRow evaluate_scene(const Scene& scene, const PredictionSet& pred) {
  if (!scene.gt_future) throw ValidationError("scene '" + scene.scene_id + "' has no gt_future");
  if (pred.scene_id != scene.scene_id) {
    throw ValidationError("prediction for '" + pred.scene_id + "' joined with scene '" + scene.scene_id + "'");
  }
  const auto& gt = *scene.gt_future;
  MetricRow row;
  row.scene_id = scene.scene_id;
  row.min_ade = min_ade(pred, gt);
  row.min_fde = min_fde(pred, gt);
  row.orp = orp(pred, scene.lanes);
  row.mr1 = mr1(pred, gt);
  row.mied = mied(pred);
  return row;
}

MetricAggregate aggregate_rows(const std::vector<MetricRow>& rows) {
  MetricAggregate agg;
  agg.scenes = rows.size();
  if (rows.empty()) return agg;
  for (const auto& r : rows) {
    agg.min_ade += r.min_ade;
    agg.min_fde += r.min_fde;
    agg.orp += r.orp;
    agg.mr1 += r.mr1;
    agg.mied += r.mied;
  }
  const double n = static_cast<double>(rows.size());
  agg.min_ade /= n;
  agg.min_fde /= n;
  agg.orp /= n;
  agg.mr1 /= n;
  agg.mied /= n;
  return agg;
}

MetricRow worse_row(const MetricRow& a, const MetricRow& b) {
  MetricRow w = a;
  w.direction = std::nullopt;
  w.min_ade = std::max(a.min_ade, b.min_ade);
  w.min_fde = std::max(a.min_fde, b.min_fde);
  w.orp = std::max(a.orp, b.orp);
  w.mr1 = std::max(a.mr1, b.mr1);
  w.mied = std::min(a.mied, b.mied);
  w.speed_scale = std::min(a.speed_scale, b.speed_scale);
  return w;
}

std::string report_to_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json row;
    row["scene_id"] = r.scene_id;
    if (r.attack) row["attack"] = *r.attack;
    if (r.direction) row["direction"] = *r.direction;
    row["min_ade"] = r.min_ade;
    row["min_fde"] = r.min_fde;
    row["orp"] = r.orp;
    row["mr1"] = r.mr1;
    row["mied"] = r.mied;
    row["speed_scale"] = r.speed_scale;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  const auto& a = report.aggregate;
  j["aggregate"] = {{"scenes", a.scenes},        {"min_ade", a.min_ade}, {"min_fde", a.min_fde},
                    {"orp_percent", 100.0 * a.orp}, {"mr1_percent", 100.0 * a.mr1}, {"mied", a.mied}};
  return j.dump(2) + "\n";
}

std::string report_to_csv(const MetricReport& report) {
  std::string out = "scene_id,attack,direction,min_ade,min_fde,orp,mr1,mied,speed_scale\n";
  for (const auto& r : report.rows) {
    out += r.scene_id + "," + r.attack.value_or("") + "," + r.direction.value_or("") + "," + json_number(r.min_ade) +
           "," + json_number(r.min_fde) + "," + json_number(r.orp) + "," + std::to_string(r.mr1) + "," +
           json_number(r.mied) + "," + json_number(r.speed_scale) + "\n";
  }
  return out;
}

void save_report(const MetricReport& report, const std::filesystem::path& json_path) {
  detail::write_text_file(json_path, report_to_json(report));
  auto csv = json_path;
  csv.replace_extension(".csv");
  detail::write_text_file(csv, report_to_csv(report));
}

}  // namespace lanewrap
