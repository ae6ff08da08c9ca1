#include "lanewrap/scene_attack.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "lanewrap/error.hpp"
#include "lanewrap/geometry.hpp"

namespace lanewrap {

namespace {

// TV-centred, heading-aligned working frame.
struct Frame {
  Vec2 origin;
  double heading = 0.0;
  double c = 1.0;
  double s = 0.0;

  Frame(Vec2 o, double h) : origin(o), heading(h), c(std::cos(h)), s(std::sin(h)) {}

  Vec2 to_local(Vec2 p) const {
    const Vec2 r = p - origin;
    return {c * r.x + s * r.y, -s * r.x + c * r.y};
  }
  Vec2 to_world(Vec2 l) const { return {origin.x + c * l.x - s * l.y, origin.y + s * l.x + c * l.y}; }
};

struct Shifter {
  const AttackSpec& spec;
  Frame frame;

  // Returns false (and leaves the inputs untouched) for points at or before
  // the onset so they stay bit-identical. `stretch` receives the path length
  // factor along the original heading.
  bool shift(double& x, double& y, double* heading, double* stretch = nullptr) const {
    Vec2 local = frame.to_local({x, y});
    if (!(local.x > spec.b)) return false;
    const double u = local.x - spec.b;
    local.y += lateral_offset(spec, u);
    const Vec2 w = frame.to_world(local);
    x = w.x;
    y = w.y;
    if (heading != nullptr) {
      const double phi = *heading - frame.heading;
      const double gp = lateral_slope(spec, u);
      const double ty = std::sin(phi) + gp * std::cos(phi);
      *heading = normalize_angle(std::atan2(ty, std::cos(phi)) + frame.heading);
      if (stretch != nullptr) *stretch = std::hypot(std::cos(phi), ty);
    }
    return true;
  }
};

std::vector<double> vertex_curvature(const std::vector<Vec2>& pts) {
  std::vector<double> k(pts.size(), 0.0);
  if (pts.size() < 3) return k;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) k[i] = circumcircle_curvature(pts[i - 1], pts[i], pts[i + 1]);
  k.front() = k[1];
  k.back() = k[pts.size() - 2];
  return k;
}

std::vector<double> cumulative_length(const std::vector<Vec2>& pts) {
  std::vector<double> s(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) s[i] = s[i - 1] + distance(pts[i - 1], pts[i]);
  return s;
}

// Segment index and fraction of arc length `target` on a polyline with
// cumulative lengths `s`.
std::pair<std::size_t, double> locate(const std::vector<double>& s, double target) {
  auto it = std::upper_bound(s.begin(), s.end(), target);
  std::size_t i = it == s.begin() ? 0 : static_cast<std::size_t>(it - s.begin()) - 1;
  i = std::min(i, s.size() - 2);
  const double len = s[i + 1] - s[i];
  const double t = len > 0.0 ? std::clamp((target - s[i]) / len, 0.0, 1.0) : 0.0;
  return {i, t};
}

double lerp_angle(double a, double b, double t) { return normalize_angle(a + t * normalize_angle(b - a)); }

}  // namespace

double AttackSpec::amplitude() const {
  switch (family) {
    case AttackFamily::kSmooth: return smooth_c;
    case AttackFamily::kDouble: return double_amplitude;
    case AttackFamily::kRipple: return ripple_amplitude;
  }
  return 0.0;
}

void AttackSpec::set_amplitude(double value) {
  switch (family) {
    case AttackFamily::kSmooth: smooth_c = value; break;
    case AttackFamily::kDouble: double_amplitude = value; break;
    case AttackFamily::kRipple: ripple_amplitude = value; break;
  }
}

void AttackSpec::validate() const {
  if (!(b > 0.0)) throw ConfigError("attack onset b must be > 0");
  if (!(smooth_c >= 0.0) || !(double_amplitude >= 0.0) || !(ripple_amplitude >= 0.0)) {
    throw ConfigError("attack amplitude must be >= 0");
  }
  if (!(smooth_u_sat > 0.0) || !(double_wavelength > 0.0) || !(ripple_wavelength > 0.0)) {
    throw ConfigError("attack length parameters must be > 0");
  }
  if (!(g > 0.0) || !(a_lat_max_fraction > 0.0)) throw ConfigError("lateral acceleration limit must be > 0");
}

std::string family_name(AttackFamily f) {
  switch (f) {
    case AttackFamily::kSmooth: return "smooth";
    case AttackFamily::kDouble: return "double";
    case AttackFamily::kRipple: return "ripple";
  }
  return "unknown";
}

AttackFamily parse_family(const std::string& name) {
  if (name == "smooth") return AttackFamily::kSmooth;
  if (name == "double") return AttackFamily::kDouble;
  if (name == "ripple") return AttackFamily::kRipple;
  throw ConfigError("unknown attack family '" + name + "'");
}

std::string direction_name(AttackDirection d) { return d == AttackDirection::kLeft ? "left" : "right"; }

AttackDirection parse_direction(const std::string& name) {
  if (name == "left") return AttackDirection::kLeft;
  if (name == "right") return AttackDirection::kRight;
  throw ConfigError("unknown attack direction '" + name + "'");
}

double lateral_offset(const AttackSpec& spec, double u) {
  if (u < 0.0) return 0.0;
  const double sigma = spec.sign();
  switch (spec.family) {
    case AttackFamily::kSmooth: {
      const double c = spec.smooth_c;
      const double us = spec.smooth_u_sat;
      if (u <= us) return sigma * c * u * u;
      return sigma * (c * us * us + 2.0 * c * us * (u - us));
    }
    case AttackFamily::kDouble: {
      const double a = spec.double_amplitude;
      const double l = spec.double_wavelength;
      if (u > l) return 0.0;
      return sigma * a * (1.0 - std::cos(2.0 * kPi * u / l)) / 2.0;
    }
    case AttackFamily::kRipple: {
      const double a = spec.ripple_amplitude;
      const double l = spec.ripple_wavelength;
      if (u <= l / 2.0) return sigma * a * (1.0 - std::cos(2.0 * kPi * u / l)) / 2.0;
      return sigma * a * std::cos(2.0 * kPi * (u - l / 2.0) / l);
    }
  }
  return 0.0;
}

double lateral_slope(const AttackSpec& spec, double u) {
  if (u < 0.0) return 0.0;
  const double sigma = spec.sign();
  switch (spec.family) {
    case AttackFamily::kSmooth:
      return sigma * 2.0 * spec.smooth_c * std::min(u, spec.smooth_u_sat);
    case AttackFamily::kDouble: {
      const double a = spec.double_amplitude;
      const double l = spec.double_wavelength;
      if (u > l) return 0.0;
      return sigma * a * (kPi / l) * std::sin(2.0 * kPi * u / l);
    }
    case AttackFamily::kRipple: {
      const double a = spec.ripple_amplitude;
      const double l = spec.ripple_wavelength;
      if (u <= l / 2.0) return sigma * a * (kPi / l) * std::sin(2.0 * kPi * u / l);
      return -sigma * a * (2.0 * kPi / l) * std::sin(2.0 * kPi * (u - l / 2.0) / l);
    }
  }
  return 0.0;
}

double PerturbedScene::max_lateral_accel() const {
  double m = 0.0;
  for (std::size_t i = 0; i < gt_speed.size(); ++i) {
    m = std::max(m, gt_speed[i] * gt_speed[i] * std::abs(gt_curvature[i]));
  }
  return m;
}

RescaleResult feasibility_rescale(const std::vector<AgentState>& history, const std::vector<Vec2>& gt, double dt,
                                  double a_lat_max) {
  if (history.empty() || gt.empty()) throw GeometryError("feasibility rescaling needs a history and a ground truth");
  RescaleResult out;
  const Vec2 start = history.back().position();

  std::vector<Vec2> path;
  path.reserve(gt.size() + 1);
  path.push_back(start);
  path.insert(path.end(), gt.begin(), gt.end());
  const auto s = cumulative_length(path);
  if (!(s.back() > 0.0)) throw GeometryError("ground-truth path has zero length");
  const auto kappa = vertex_curvature(path);

  for (double k : kappa) out.kappa_max = std::max(out.kappa_max, std::abs(k));
  for (const auto& st : history) out.v_peak = std::max(out.v_peak, st.speed);
  for (std::size_t i = 1; i < path.size(); ++i) out.v_peak = std::max(out.v_peak, (s[i] - s[i - 1]) / dt);

  if (out.kappa_max > 0.0 && out.v_peak > 0.0) {
    out.speed_scale = std::min(1.0, std::sqrt(a_lat_max / out.kappa_max) / out.v_peak);
  }
  const double scale = out.speed_scale;

  auto curvature_at = [&](double target) {
    const auto [i, t] = locate(s, target);
    return (1.0 - t) * kappa[i] + t * kappa[i + 1];
  };

  if (scale == 1.0) {
    out.history = history;
    out.gt = gt;
  } else {
    out.gt.reserve(gt.size());
    for (std::size_t i = 1; i < path.size(); ++i) {
      const auto [j, t] = locate(s, scale * s[i]);
      out.gt.push_back(path[j] + t * (path[j + 1] - path[j]));
    }

    // History arc length measured backwards from the current position.
    const std::size_t n = history.size();
    std::vector<Vec2> back(n);
    for (std::size_t i = 0; i < n; ++i) back[i] = history[n - 1 - i].position();
    const auto sb = cumulative_length(back);
    out.history = history;
    for (std::size_t i = 1; i < n && sb.back() > 0.0; ++i) {
      const auto [j, t] = locate(sb, scale * sb[i]);
      const Vec2 p = back[j] + t * (back[j + 1] - back[j]);
      AgentState& st = out.history[n - 1 - i];
      st.x = p.x;
      st.y = p.y;
      st.heading = lerp_angle(history[n - 1 - j].heading, history[n - 2 - j].heading, t);
    }
    for (auto& st : out.history) {
      st.speed *= scale;
      st.yaw_rate *= scale;
      st.accel *= scale * scale;
    }
  }

  out.gt_speed.reserve(out.gt.size());
  out.gt_curvature.reserve(out.gt.size());
  Vec2 prev = start;
  for (std::size_t i = 0; i < out.gt.size(); ++i) {
    out.gt_speed.push_back(distance(out.gt[i], prev) / dt);
    out.gt_curvature.push_back(curvature_at(scale * s[i + 1]));
    prev = out.gt[i];
  }
  return out;
}

PerturbedScene apply_attack(const Scene& scene, const AttackSpec& spec) {
  spec.validate();
  if (scene.frame.is_frenet()) throw GeometryError("attacks apply to Cartesian scenes only");
  if (!scene.gt_future || scene.gt_future->empty()) {
    throw ValidationError("scene '" + scene.scene_id + "' has no gt_future to attack");
  }
  const AgentState& cur = scene.tv().current();
  if (!std::isfinite(cur.heading) || !std::isfinite(cur.x) || !std::isfinite(cur.y)) {
    throw GeometryError("scene '" + scene.scene_id + "': degenerate TV pose");
  }

  const Shifter shifter{spec, Frame(cur.position(), cur.heading)};
  PerturbedScene out;
  out.spec = spec;
  out.scene = scene;
  Scene& ps = out.scene;

  for (auto& agent : ps.agents) {
    for (auto& st : agent.states) {
      double stretch = 1.0;
      // Speed follows the stretched path so it stays consistent with the new geometry.
      if (shifter.shift(st.x, st.y, &st.heading, &stretch)) st.speed *= stretch;
    }
  }
  for (auto& lane : ps.lanes) {
    for (auto& pose : lane.centerline) shifter.shift(pose.x, pose.y, &pose.theta_or_kappa);
  }
  for (auto& p : *ps.gt_future) shifter.shift(p.x, p.y, nullptr);

  AgentHistory* tv = nullptr;
  for (auto& a : ps.agents) {
    if (a.id == ps.tv_id) tv = &a;
  }
  const RescaleResult r =
      feasibility_rescale(tv->states, *ps.gt_future, ps.dt, spec.a_lat_max_fraction * spec.g);
  if (spec.amplitude() == 0.0) {
    // Zero amplitude returns the input untouched, even if the source is already near the limit.
    ps = scene;
    out.speed_scale = 1.0;
  } else {
    tv->states = r.history;
    ps.gt_future = r.gt;
    out.speed_scale = r.speed_scale;
  }
  out.kappa_max = r.kappa_max;
  out.v_peak = r.v_peak;
  out.gt_speed = r.gt_speed;
  out.gt_curvature = r.gt_curvature;
  return out;
}

OnsetCheck check_onset_invariance(const Scene& original, const PerturbedScene& perturbed) {
  const Scene& ps = perturbed.scene;
  const AgentState& cur = original.tv().current();
  const Frame frame(cur.position(), cur.heading);
  const double b = perturbed.spec.b;
  const bool retimed = perturbed.speed_scale < 1.0;
  auto before_onset = [&](double x, double y) { return !(frame.to_local({x, y}).x > b); };
  auto same = [](double a, double c) { return std::memcmp(&a, &c, sizeof(double)) == 0; };

  OnsetCheck out;
  if (ps.agents.size() != original.agents.size() || ps.lanes.size() != original.lanes.size()) {
    out.violations = 1;
    return out;
  }
  for (std::size_t i = 0; i < original.agents.size(); ++i) {
    const auto& oa = original.agents[i];
    if (retimed && oa.id == original.tv_id) continue;
    for (std::size_t k = 0; k < oa.states.size(); ++k) {
      const AgentState& o = oa.states[k];
      if (!before_onset(o.x, o.y)) continue;
      const AgentState& p = ps.agents[i].states[k];
      ++out.checked;
      if (!same(o.x, p.x) || !same(o.y, p.y) || !same(o.heading, p.heading) || !same(o.speed, p.speed) ||
          !same(o.yaw_rate, p.yaw_rate) || !same(o.accel, p.accel)) {
        ++out.violations;
      }
    }
  }
  for (std::size_t i = 0; i < original.lanes.size(); ++i) {
    for (std::size_t k = 0; k < original.lanes[i].centerline.size(); ++k) {
      const LanePose& o = original.lanes[i].centerline[k];
      if (!before_onset(o.x, o.y)) continue;
      const LanePose& p = ps.lanes[i].centerline[k];
      ++out.checked;
      if (!same(o.x, p.x) || !same(o.y, p.y) || !same(o.theta_or_kappa, p.theta_or_kappa)) ++out.violations;
    }
  }
  if (!retimed && original.gt_future && ps.gt_future) {
    for (std::size_t k = 0; k < original.gt_future->size(); ++k) {
      const Vec2 o = (*original.gt_future)[k];
      if (!before_onset(o.x, o.y)) continue;
      const Vec2 p = (*ps.gt_future)[k];
      ++out.checked;
      if (!same(o.x, p.x) || !same(o.y, p.y)) ++out.violations;
    }
  }
  return out;
}

Scene mirror_scene(const Scene& scene) {
  if (scene.frame.is_frenet()) throw GeometryError("mirroring applies to Cartesian scenes only");
  const AgentState& cur = scene.tv().current();
  const Frame frame(cur.position(), cur.heading);
  auto reflect = [&](double& x, double& y) {
    Vec2 l = frame.to_local({x, y});
    l.y = -l.y;
    const Vec2 w = frame.to_world(l);
    x = w.x;
    y = w.y;
  };
  auto reflect_heading = [&](double h) { return normalize_angle(2.0 * frame.heading - h); };

  Scene out = scene;
  for (auto& agent : out.agents) {
    for (auto& st : agent.states) {
      reflect(st.x, st.y);
      st.heading = reflect_heading(st.heading);
      st.yaw_rate = -st.yaw_rate;
    }
  }
  for (auto& lane : out.lanes) {
    for (auto& pose : lane.centerline) {
      reflect(pose.x, pose.y);
      pose.theta_or_kappa = reflect_heading(pose.theta_or_kappa);
    }
  }
  if (out.gt_future) {
    for (auto& p : *out.gt_future) reflect(p.x, p.y);
  }
  return out;
}

DirectionalResult worst_of_directions(const Scene& scene, AttackSpec spec, const AttackEvaluator& evaluator,
                                      std::span<const bool> higher_is_worse) {
  DirectionalResult out;
  spec.direction = AttackDirection::kLeft;
  out.left = evaluator(apply_attack(scene, spec));
  spec.direction = AttackDirection::kRight;
  out.right = evaluator(apply_attack(scene, spec));
  if (out.left.size() != out.right.size()) throw ValidationError("evaluator returned differing metric counts");
  out.worst.resize(out.left.size());
  for (std::size_t i = 0; i < out.left.size(); ++i) {
    const bool higher = i < higher_is_worse.size() ? higher_is_worse[i] : true;
    out.worst[i] = higher ? std::max(out.left[i], out.right[i]) : std::min(out.left[i], out.right[i]);
  }
  return out;
}

}  // namespace lanewrap
