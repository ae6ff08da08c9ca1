#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lanewrap/types.hpp"

namespace lanewrap {

enum class AttackFamily { kSmooth, kDouble, kRipple };
enum class AttackDirection { kLeft, kRight };

struct AttackSpec {
  AttackFamily family = AttackFamily::kSmooth;
  AttackDirection direction = AttackDirection::kLeft;
  double b = 15.0;
  // smooth: sigma * c * u^2 up to u_sat, then linear
  double smooth_c = 0.008;
  double smooth_u_sat = 50.0;
  // double: raised-cosine S-curve out and back
  double double_amplitude = 10.0;
  double double_wavelength = 60.0;
  // ripple: raised-cosine lead-in followed by a cosine wave
  double ripple_amplitude = 3.0;
  double ripple_wavelength = 30.0;
  double g = kGravity;
  double a_lat_max_fraction = 0.7;

  /// Scale parameter of the active family (c for smooth, A otherwise).
  double amplitude() const;
  void set_amplitude(double value);
  double sign() const { return direction == AttackDirection::kLeft ? 1.0 : -1.0; }
  /// Throws ConfigError on out-of-range parameters.
  void validate() const;
};

std::string family_name(AttackFamily f);
AttackFamily parse_family(const std::string& name);
std::string direction_name(AttackDirection d);
AttackDirection parse_direction(const std::string& name);

/// Lateral offset g(u) at u metres past the onset; 0 for u < 0.
double lateral_offset(const AttackSpec& spec, double u);
/// dg/du.
double lateral_slope(const AttackSpec& spec, double u);

struct PerturbedScene {
  Scene scene;  // gt_future holds the pseudo ground truth
  double speed_scale = 1.0;
  AttackSpec spec;
  double kappa_max = 0.0;
  double v_peak = 0.0;
  // Per pseudo-gt waypoint: chord speed and path curvature after retiming.
  std::vector<double> gt_speed;
  std::vector<double> gt_curvature;

  /// max v^2 |kappa| over the pseudo ground truth.
  double max_lateral_accel() const;
};

struct RescaleResult {
  std::vector<AgentState> history;
  std::vector<Vec2> gt;
  double speed_scale = 1.0;
  double kappa_max = 0.0;
  double v_peak = 0.0;
  std::vector<double> gt_speed;
  std::vector<double> gt_curvature;
};

/// Slows the TV so the path through `gt` stays under the lateral limit.
/// Waypoints slide back along the same path; the current state is fixed.
RescaleResult feasibility_rescale(const std::vector<AgentState>& history, const std::vector<Vec2>& gt, double dt,
                                  double a_lat_max);

/// Shifts every scene point beyond `spec.b` in the TV frame, then rescales
/// the TV history and ground truth for feasibility.
PerturbedScene apply_attack(const Scene& scene, const AttackSpec& spec);

struct OnsetCheck {
  std::size_t checked = 0;     // points at or before the onset
  std::size_t violations = 0;  // of those, points whose bits changed
};

/// Compares every point at or before the onset bit for bit. The TV history
/// and ground truth are skipped when they were retimed (speed_scale < 1).
OnsetCheck check_onset_invariance(const Scene& original, const PerturbedScene& perturbed);

/// Reflection across the TV's heading axis.
Scene mirror_scene(const Scene& scene);

/// Metric values for one perturbed scene.
using AttackEvaluator = std::function<std::vector<double>(const PerturbedScene&)>;

struct DirectionalResult {
  std::vector<double> left;
  std::vector<double> right;
  std::vector<double> worst;
};

/// Runs both directions and keeps the worse value per metric. Entries of
/// `higher_is_worse` default to true when the span is shorter.
DirectionalResult worst_of_directions(const Scene& scene, AttackSpec spec, const AttackEvaluator& evaluator,
                                      std::span<const bool> higher_is_worse = {});

}  // namespace lanewrap
