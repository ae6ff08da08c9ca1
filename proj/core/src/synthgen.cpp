#include "lanewrap/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

#include "json_internal.hpp"
#include "lanewrap/error.hpp"
#include "lanewrap/geometry.hpp"
#include "lanewrap/scene_io.hpp"

namespace lanewrap {

namespace {

constexpr double kLateralLimit = 0.7 * kGravity;
constexpr double kSpeedMargin = 0.9;
constexpr double kAheadExtent = 170.0;
constexpr double kBehindMargin = 30.0;

struct Pose {
  Vec2 p;
  double heading = 0.0;
};

struct Piece {
  double length = 0.0;
  double kappa = 0.0;
};

Pose advance(Pose a, double l, double kappa) {
  if (kappa == 0.0) return {{a.p.x + l * std::cos(a.heading), a.p.y + l * std::sin(a.heading)}, a.heading};
  const double h1 = a.heading + kappa * l;
  return {{a.p.x + (std::sin(h1) - std::sin(a.heading)) / kappa, a.p.y + (std::cos(a.heading) - std::cos(h1)) / kappa},
          h1};
}

// Arc-length parametrized chain of straights and circular arcs, extended by
// straight lines before its start and after its end.
class Route {
 public:
  Route(Pose start, std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    starts_.push_back(start);
    s0_.push_back(0.0);
    for (const auto& pc : pieces_) {
      starts_.push_back(advance(starts_.back(), pc.length, pc.kappa));
      s0_.push_back(s0_.back() + pc.length);
    }
  }

  double length() const { return s0_.back(); }

  Pose at(double s) const {
    if (s <= 0.0) return advance(starts_.front(), s, 0.0);
    if (s >= length()) return advance(starts_.back(), s - length(), 0.0);
    const auto it = std::upper_bound(s0_.begin(), s0_.end(), s);
    const auto i = static_cast<std::size_t>(it - s0_.begin()) - 1;
    return advance(starts_[i], s - s0_[i], pieces_[i].kappa);
  }

  double kappa(double s) const {
    if (s <= 0.0 || s >= length()) return 0.0;
    const auto it = std::upper_bound(s0_.begin(), s0_.end(), s);
    return pieces_[static_cast<std::size_t>(it - s0_.begin()) - 1].kappa;
  }

  double min_radius() const {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& pc : pieces_) {
      if (pc.kappa != 0.0) r = std::min(r, 1.0 / std::abs(pc.kappa));
    }
    return r;
  }

 private:
  std::vector<Piece> pieces_;
  std::vector<Pose> starts_;
  std::vector<double> s0_;
};

std::vector<Piece> concat(std::vector<Piece> a, const std::vector<Piece>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

Lane sample_lane(const std::string& id, const Route& route, double s_a, double s_b, double spacing, double width) {
  Lane lane;
  lane.id = id;
  lane.width = width;
  const auto n = std::max<long>(1, static_cast<long>(std::ceil((s_b - s_a) / spacing - 1e-9)));
  for (long i = 0; i <= n; ++i) {
    const double s = s_a + (s_b - s_a) * static_cast<double>(i) / static_cast<double>(n);
    const Pose p = route.at(s);
    lane.centerline.push_back({p.p.x, p.p.y, normalize_angle(p.heading)});
  }
  return lane;
}

void link(Lane& from, Lane& to) {
  from.successors.push_back(to.id);
  to.predecessors.push_back(from.id);
}

// Smooth lateral offset n(s) with derivative.
struct Offset {
  std::function<double(double)> value;
  std::function<double(double)> slope;
};

// Raised-cosine ramp from 0 at s0 to 1 at s1.
double ramp(double s, double s0, double s1) {
  if (s <= s0) return 0.0;
  if (s >= s1) return 1.0;
  return 0.5 * (1.0 - std::cos(kPi * (s - s0) / (s1 - s0)));
}

double ramp_slope(double s, double s0, double s1) {
  if (s <= s0 || s >= s1) return 0.0;
  return 0.5 * kPi / (s1 - s0) * std::sin(kPi * (s - s0) / (s1 - s0));
}

struct TrackPoint {
  Vec2 p;
  double heading = 0.0;
};

TrackPoint track(const Route& route, const Offset& off, double s) {
  const Pose base = route.at(s);
  const double n = off.value(s);
  const double dn = off.slope(s);
  const Vec2 normal{-std::sin(base.heading), std::cos(base.heading)};
  return {base.p + n * normal, base.heading + std::atan2(dn, 1.0 - n * route.kappa(s))};
}

AgentHistory integrate_history(const std::string& id, const Route& route, const Offset& off, double s_now,
                               double speed, const Scene& scene) {
  AgentHistory a;
  a.id = id;
  const int h = scene.history_steps;
  std::vector<TrackPoint> pts;
  for (int k = 0; k <= h; ++k) pts.push_back(track(route, off, s_now - speed * (h - k) * scene.dt));
  for (int k = 0; k <= h; ++k) {
    AgentState st;
    st.t = (k - h) * scene.dt;
    st.x = pts[static_cast<std::size_t>(k)].p.x;
    st.y = pts[static_cast<std::size_t>(k)].p.y;
    st.heading = normalize_angle(pts[static_cast<std::size_t>(k)].heading);
    const int a0 = k == 0 ? 0 : k - 1;
    const int a1 = k == 0 ? 1 : k;
    st.speed = distance(pts[static_cast<std::size_t>(a0)].p, pts[static_cast<std::size_t>(a1)].p) / scene.dt;
    st.yaw_rate =
        normalize_angle(pts[static_cast<std::size_t>(a1)].heading - pts[static_cast<std::size_t>(a0)].heading) /
        scene.dt;
    st.accel = 0.0;
    a.states.push_back(st);
  }
  return a;
}

double max_lateral_accel(Vec2 start, const std::vector<Vec2>& gt, double dt) {
  std::vector<Vec2> path{start};
  path.insert(path.end(), gt.begin(), gt.end());
  double m = 0.0;
  for (std::size_t i = 1; i + 1 < path.size(); ++i) {
    const double k = std::abs(circumcircle_curvature(path[i - 1], path[i], path[i + 1]));
    const double v = std::max(distance(path[i - 1], path[i]), distance(path[i], path[i + 1])) / dt;
    m = std::max(m, v * v * k);
  }
  return m;
}

struct Layout {
  std::vector<Lane> lanes;
  Route route{{}, {}};
  std::vector<std::string> route_lanes;
  std::vector<double> route_lane_end;
  double s_tv = 0.0;
  std::string variant;
  // Lateral drift toward the chosen branch (forks), as a function of s.
  Offset drift{[](double) { return 0.0; }, [](double) { return 0.0; }};
};

class Builder {
 public:
  Builder(std::mt19937_64& rng, const SynthParams& params) : rng_(rng), params_(params) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  bool coin() { return uniform(0.0, 1.0) < 0.5; }

  Lane lane(const std::string& id, const Route& r, double a, double b) const {
    return sample_lane(id, r, a, b, params_.vertex_spacing, params_.lane_width);
  }

  Layout straight(double back) {
    Layout l;
    l.s_tv = back;
    l.route = Route({}, {{back + kAheadExtent, 0.0}});
    l.lanes.push_back(lane("lane_0", l.route, 0.0, l.route.length()));
    l.route_lanes = {"lane_0"};
    l.route_lane_end = {l.route.length()};
    l.variant = "straight";
    return l;
  }

  Layout curve(double back, double radius) {
    Layout l;
    l.s_tv = back;
    const double sign = coin() ? 1.0 : -1.0;
    const double angle = uniform(60.0, 120.0) * kPi / 180.0;
    const double arc = radius * angle;
    const bool pre = params_.curve_variant ? *params_.curve_variant == "pre" : coin();
    const double start = pre ? back + uniform(10.0, 40.0) : back - uniform(5.0, std::min(40.0, 0.6 * arc));
    const double exit = std::max(kAheadExtent, start + arc + 60.0 - back);
    l.route = Route({}, {{start, 0.0}, {arc, sign / radius}, {back + exit - start - arc, 0.0}});
    l.lanes.push_back(lane("lane_0", l.route, 0.0, start));
    l.lanes.push_back(lane("lane_1", l.route, start, start + arc));
    l.lanes.push_back(lane("lane_2", l.route, start + arc, l.route.length()));
    link(l.lanes[0], l.lanes[1]);
    link(l.lanes[1], l.lanes[2]);
    l.route_lanes = {"lane_0", "lane_1", "lane_2"};
    l.route_lane_end = {start, start + arc, l.route.length()};
    l.variant = pre ? "pre" : "mid";
    return l;
  }

  Layout s_curve(double back, double radius) {
    Layout l;
    l.s_tv = back;
    const double sign = coin() ? 1.0 : -1.0;
    const double arc = radius * uniform(30.0, 70.0) * kPi / 180.0;
    const double start = back + uniform(5.0, 30.0);
    const double tail = std::max(60.0, back + kAheadExtent - start - 2.0 * arc);
    l.route = Route({}, {{start, 0.0}, {arc, sign / radius}, {arc, -sign / radius}, {tail, 0.0}});
    const double e1 = start + arc;
    const double e2 = e1 + arc;
    l.lanes.push_back(lane("lane_0", l.route, 0.0, start));
    l.lanes.push_back(lane("lane_1", l.route, start, e1));
    l.lanes.push_back(lane("lane_2", l.route, e1, e2));
    l.lanes.push_back(lane("lane_3", l.route, e2, l.route.length()));
    for (int i = 0; i < 3; ++i) link(l.lanes[static_cast<std::size_t>(i)], l.lanes[static_cast<std::size_t>(i + 1)]);
    l.route_lanes = {"lane_0", "lane_1", "lane_2", "lane_3"};
    l.route_lane_end = {start, e1, e2, l.route.length()};
    l.variant = sign > 0.0 ? "left_first" : "right_first";
    return l;
  }

  Layout fork(double back, double angle_deg, double radius) {
    Layout l;
    l.s_tv = back;
    const double split = back + uniform(10.0, 40.0);
    const double half = 0.5 * angle_deg * kPi / 180.0;
    const double arc = radius * half;
    const double tail = back + kAheadExtent - split - arc;
    const std::vector<Piece> stem{{split, 0.0}};
    const Route left({}, concat(stem, {{arc, 1.0 / radius}, {tail, 0.0}}));
    const Route right({}, concat(stem, {{arc, -1.0 / radius}, {tail, 0.0}}));
    const bool go_left = coin();
    const bool left_first = coin();

    Lane s = lane("lane_0", left, 0.0, split);
    Lane bl = lane("lane_1", left, split, left.length());
    Lane br = lane("lane_2", right, split, right.length());
    if (left_first) {
      link(s, bl);
      link(s, br);
    } else {
      link(s, br);
      link(s, bl);
    }
    l.lanes = {s, bl, br};
    l.route = go_left ? left : right;
    l.route_lanes = {"lane_0", go_left ? "lane_1" : "lane_2"};
    l.route_lane_end = {split, l.route.length()};
    l.variant = go_left ? "left" : "right";

    // The TV edges toward its branch before the split and recentres after it.
    const double d0 = (go_left ? 1.0 : -1.0) * uniform(0.4, 1.0);
    const double r0 = back - uniform(15.0, 25.0);
    const double s_tv = back;
    const double r1 = split + 20.0;
    l.drift.value = [=](double q) {
      if (q <= s_tv) return d0 * ramp(q, r0, s_tv);
      return d0 * (1.0 - ramp(q, split, r1));
    };
    l.drift.slope = [=](double q) {
      if (q <= s_tv) return d0 * ramp_slope(q, r0, s_tv);
      return -d0 * ramp_slope(q, split, r1);
    };
    return l;
  }

  Layout crossing(double back) {
    Layout l;
    l.s_tv = back;
    // Close enough that the ground truth commits to its branch.
    const double entry = back + uniform(4.0, 10.0);
    const double r_right = uniform(10.0, 13.0);
    const double r_left = r_right + params_.lane_width;
    const double exit = 60.0;
    const std::vector<Piece> approach{{entry, 0.0}};
    const Route through({}, concat(approach, {{back + kAheadExtent - entry, 0.0}}));
    const Route left({}, concat(approach, {{r_left * kPi / 2.0, 1.0 / r_left}, {exit, 0.0}}));
    const Route right({}, concat(approach, {{r_right * kPi / 2.0, -1.0 / r_right}, {exit, 0.0}}));

    Lane a = lane("lane_0", through, 0.0, entry);
    Lane st = lane("lane_1", through, entry, through.length());
    Lane lt = lane("lane_2", left, entry, left.length());
    Lane rt = lane("lane_3", right, entry, right.length());
    std::vector<Lane*> succ{&st, &lt, &rt};
    std::shuffle(succ.begin(), succ.end(), rng_);
    for (Lane* s : succ) link(a, *s);

    const double reach = 60.0;
    const Route south({{entry + r_right, reach}, -kPi / 2.0}, {{2.0 * reach, 0.0}});
    const Route north({{entry + r_left, -reach}, kPi / 2.0}, {{2.0 * reach, 0.0}});
    Lane sb = lane("lane_4", south, 0.0, south.length());
    Lane nb = lane("lane_5", north, 0.0, north.length());
    l.lanes = {a, st, lt, rt, sb, nb};

    const int choice = std::uniform_int_distribution<int>(0, 2)(rng_);
    const Route* routes[3] = {&through, &left, &right};
    const char* ids[3] = {"lane_1", "lane_2", "lane_3"};
    const char* names[3] = {"straight", "left", "right"};
    l.route = *routes[choice];
    l.route_lanes = {"lane_0", ids[choice]};
    l.route_lane_end = {entry, l.route.length()};
    l.variant = names[choice];
    return l;
  }

 private:
  std::mt19937_64& rng_;
  const SynthParams& params_;
};

void transform_scene(Scene& scene, double angle, Vec2 shift) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  auto move = [&](double& x, double& y) {
    const double nx = c * x - s * y + shift.x;
    const double ny = s * x + c * y + shift.y;
    x = nx;
    y = ny;
  };
  for (auto& a : scene.agents) {
    for (auto& st : a.states) {
      move(st.x, st.y);
      st.heading = normalize_angle(st.heading + angle);
    }
  }
  for (auto& lane : scene.lanes) {
    for (auto& p : lane.centerline) {
      move(p.x, p.y);
      p.theta_or_kappa = normalize_angle(p.theta_or_kappa + angle);
    }
  }
  if (scene.gt_future) {
    for (auto& p : *scene.gt_future) move(p.x, p.y);
  }
}

std::string pad_index(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%05zu", i);
  return buf;
}

}  // namespace

std::string topology_name(Topology t) {
  switch (t) {
    case Topology::kStraight: return "straight";
    case Topology::kCurve: return "curve";
    case Topology::kSCurve: return "s_curve";
    case Topology::kFork: return "fork";
    case Topology::kCrossing: return "crossing";
  }
  return "unknown";
}

Topology parse_topology(const std::string& name) {
  if (name == "straight") return Topology::kStraight;
  if (name == "curve") return Topology::kCurve;
  if (name == "s_curve") return Topology::kSCurve;
  if (name == "fork") return Topology::kFork;
  if (name == "crossing") return Topology::kCrossing;
  throw ConfigError("unknown topology '" + name + "'");
}

void SynthParams::validate() const {
  if (radius && !(*radius >= 10.0)) throw ConfigError("curve radius must be >= 10 m");
  if (fork_angle_deg && !(*fork_angle_deg >= 10.0 && *fork_angle_deg <= 60.0)) {
    throw ConfigError("fork angle must be within [10, 60] degrees");
  }
  if (speed && !(*speed > 0.0)) throw ConfigError("speed must be > 0");
  if (curve_variant && *curve_variant != "mid" && *curve_variant != "pre") {
    throw ConfigError("curve variant must be 'mid' or 'pre'");
  }
  if (!(noise >= 0.0)) throw ConfigError("noise must be >= 0");
  if (!(lane_width > 0.0)) throw ConfigError("lane width must be > 0");
  if (!(vertex_spacing >= 0.1)) throw ConfigError("vertex spacing must be >= 0.1 m");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t corpus_seed, std::uint64_t index) {
  return splitmix64(splitmix64(corpus_seed) ^ index);
}

GeneratedScene generate(Topology topology, std::uint64_t seed, const SynthParams& params) {
  params.validate();
  std::mt19937_64 rng(splitmix64(seed));
  Builder b(rng, params);

  const double requested = params.speed.value_or(b.uniform(10.0, 20.0));
  const double radius = params.radius.value_or(b.uniform(30.0, 150.0));
  const double fork_angle = params.fork_angle_deg.value_or(b.uniform(20.0, 45.0));
  const double fork_radius = b.uniform(60.0, 120.0);
  const double wander_amp = std::clamp(std::normal_distribution<double>(0.0, 1.0)(rng) * params.noise,
                                       -3.0 * params.noise, 3.0 * params.noise);
  const double wander_len = b.uniform(30.0, 60.0);
  const double wander_phase = b.uniform(0.0, 2.0 * kPi);
  const double lead_gap = b.uniform(15.0, 35.0);
  const double lead_ratio = b.uniform(0.8, 1.1);
  const double yaw = b.uniform(-kPi, kPi);
  const Vec2 shift{b.uniform(-200.0, 200.0), b.uniform(-200.0, 200.0)};

  Scene scene;
  scene.tv_id = "tv";
  // Back extent covers the longest possible history at the top speed.
  const double back = requested * scene.history_steps * scene.dt + kBehindMargin;

  Layout layout;
  switch (topology) {
    case Topology::kStraight: layout = b.straight(back); break;
    case Topology::kCurve: layout = b.curve(back, radius); break;
    case Topology::kSCurve: layout = b.s_curve(back, radius); break;
    case Topology::kFork: layout = b.fork(back, fork_angle, fork_radius); break;
    case Topology::kCrossing: layout = b.crossing(back); break;
  }

  GeneratedScene out;
  out.topology = topology;
  out.variant = layout.variant;
  out.seed = seed;
  for (std::size_t i = 0; i < layout.route_lanes.size(); ++i) {
    if (layout.route_lane_end[i] > layout.s_tv + 1e-9) out.gt_lane_ids.push_back(layout.route_lanes[i]);
  }

  const Offset drift = layout.drift;
  const Offset wander{
      [=](double s) { return drift.value(s) + wander_amp * std::sin(2.0 * kPi * s / wander_len + wander_phase); },
      [=](double s) {
        return drift.slope(s) +
               wander_amp * 2.0 * kPi / wander_len * std::cos(2.0 * kPi * s / wander_len + wander_phase);
      }};
  const Offset none{[](double) { return 0.0; }, [](double) { return 0.0; }};

  double speed = std::min(requested, kSpeedMargin * std::sqrt(kLateralLimit * layout.route.min_radius()));
  out.speed_reduced = speed < requested;

  for (int attempt = 0;; ++attempt) {
    scene.agents.clear();
    scene.agents.push_back(integrate_history("tv", layout.route, wander, layout.s_tv, speed, scene));
    std::vector<Vec2> gt;
    for (int k = 1; k <= scene.future_steps; ++k) {
      gt.push_back(track(layout.route, wander, layout.s_tv + speed * k * scene.dt).p);
    }
    if (max_lateral_accel(scene.agents.front().current().position(), gt, scene.dt) <= kLateralLimit ||
        attempt >= 50) {
      scene.gt_future = std::move(gt);
      break;
    }
    speed *= 0.95;
    out.speed_reduced = true;
  }
  out.speed = speed;

  if (params.lead_vehicle) {
    const double lead_speed = speed * lead_ratio;
    scene.agents.push_back(
        integrate_history("agent_1", layout.route, none, layout.s_tv + lead_gap, lead_speed, scene));
  }
  scene.lanes = std::move(layout.lanes);
  transform_scene(scene, yaw, shift);

  char id[64];
  std::snprintf(id, sizeof(id), "%s_%016llx", topology_name(topology).c_str(), static_cast<unsigned long long>(seed));
  scene.scene_id = id;
  validate_scene(scene);
  out.scene = std::move(scene);
  return out;
}

std::vector<std::pair<Topology, double>> parse_mixture(const std::string& text) {
  std::vector<std::pair<Topology, double>> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    pos = comma + 1;
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) {
      out.emplace_back(parse_topology(item), 1.0);
      continue;
    }
    double w = 0.0;
    try {
      std::size_t used = 0;
      w = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError("bad mixture weight in '" + item + "'");
    }
    if (!(w >= 0.0)) throw ConfigError("mixture weights must be >= 0");
    out.emplace_back(parse_topology(item.substr(0, eq)), w);
  }
  return out;
}

std::vector<Topology> corpus_topologies(const CorpusSpec& spec) {
  double total = 0.0;
  for (const auto& [t, w] : spec.mixture) total += w;
  if (spec.count < 1 || !(total > 0.0)) throw ConfigError("corpus mixture yields no scenes");

  const auto n = static_cast<std::size_t>(spec.count);
  std::vector<std::size_t> counts(spec.mixture.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < spec.mixture.size(); ++i) {
    const double exact = spec.mixture[i].second / total * static_cast<double>(n);
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++counts[remainders[k % remainders.size()].second];

  std::vector<Topology> out;
  out.reserve(n);
  for (std::size_t i = 0; i < counts.size(); ++i) out.insert(out.end(), counts[i], spec.mixture[i].first);
  std::mt19937_64 rng(splitmix64(spec.seed ^ 0x5bd1e995ULL));
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

std::vector<GeneratedScene> generate_corpus(const CorpusSpec& spec) {
  const auto topologies = corpus_topologies(spec);
  std::vector<GeneratedScene> out;
  out.reserve(topologies.size());
  for (std::size_t i = 0; i < topologies.size(); ++i) {
    out.push_back(generate(topologies[i], derive_seed(spec.seed, i), spec.params));
    out.back().scene.scene_id = topology_name(topologies[i]) + "_" + pad_index(i);
  }
  return out;
}

void write_corpus(const CorpusSpec& spec, const std::vector<GeneratedScene>& scenes,
                  const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

  nlohmann::ordered_json manifest;
  manifest["kind"] = "corpus";
  manifest["seed"] = spec.seed;
  manifest["count"] = spec.count;
  auto mix = nlohmann::ordered_json::object();
  for (const auto& [t, w] : spec.mixture) mix[topology_name(t)] = w;
  manifest["mixture"] = std::move(mix);
  nlohmann::ordered_json params;
  const auto& p = spec.params;
  params["speed"] = p.speed ? nlohmann::ordered_json(*p.speed) : nlohmann::ordered_json("drawn:[10,20]");
  params["radius"] = p.radius ? nlohmann::ordered_json(*p.radius) : nlohmann::ordered_json("drawn:[30,150]");
  params["fork_angle_deg"] =
      p.fork_angle_deg ? nlohmann::ordered_json(*p.fork_angle_deg) : nlohmann::ordered_json("drawn:[20,45]");
  params["curve_variant"] = p.curve_variant.value_or("drawn");
  params["noise"] = p.noise;
  params["lane_width"] = p.lane_width;
  params["vertex_spacing"] = p.vertex_spacing;
  params["lead_vehicle"] = p.lead_vehicle;
  manifest["params"] = std::move(params);
  manifest["seed_derivation"] = "splitmix64(splitmix64(corpus_seed) ^ index)";

  auto entries = nlohmann::ordered_json::array();
  for (const auto& g : scenes) {
    const std::string file = g.scene.scene_id + ".json";
    save_scene(g.scene, out_dir / file);
    nlohmann::ordered_json e;
    e["scene_id"] = g.scene.scene_id;
    e["file"] = file;
    e["topology"] = topology_name(g.topology);
    e["variant"] = g.variant;
    e["seed"] = g.seed;
    e["gt_lane_ids"] = g.gt_lane_ids;
    e["speed"] = g.speed;
    e["speed_reduced"] = g.speed_reduced;
    entries.push_back(std::move(e));
  }
  manifest["scenes"] = std::move(entries);
  detail::write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace lanewrap
