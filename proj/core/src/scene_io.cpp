#include <fstream>
#include <sstream>

#include "json_internal.hpp"
#include "lanewrap/error.hpp"
#include "lanewrap/scene_io.hpp"

namespace lanewrap {
namespace detail {

using nlohmann::json;

namespace {

std::string id_from(const json& j, const char* what) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw ParseError(std::string(what) + " must be a string or integer id");
}

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing key '") + key + "'");
  return *it;
}

double number(const json& j, const char* what) {
  if (!j.is_number()) throw ParseError(std::string(what) + " must be a number");
  return j.get<double>();
}

std::vector<std::string> id_list(const json& j, const char* key) {
  std::vector<std::string> out;
  auto it = j.find(key);
  if (it == j.end()) return out;
  if (!it->is_array()) throw ParseError(std::string(key) + " must be an array");
  for (const auto& e : *it) out.push_back(id_from(e, key));
  return out;
}

}  // namespace

json scene_to_json(const Scene& scene) {
  json j;
  j["scene_id"] = scene.scene_id;
  j["dt"] = scene.dt;
  j["history_steps"] = scene.history_steps;
  j["future_steps"] = scene.future_steps;
  j["tv_id"] = scene.tv_id;
  json frame;
  frame["tag"] = scene.frame.is_frenet() ? "frenet" : "cartesian";
  if (scene.frame.centerline_index) frame["centerline_index"] = *scene.frame.centerline_index;
  j["frame"] = frame;

  json agents = json::array();
  for (const auto& a : scene.agents) {
    json states = json::array();
    for (const auto& s : a.states) {
      states.push_back({s.t, s.x, s.y, s.heading, s.speed, s.yaw_rate, s.accel});
    }
    agents.push_back({{"id", a.id}, {"states", std::move(states)}});
  }
  j["agents"] = std::move(agents);

  json lanes = json::array();
  for (const auto& l : scene.lanes) {
    json pts = json::array();
    for (const auto& p : l.centerline) pts.push_back({p.x, p.y, p.theta_or_kappa});
    lanes.push_back({{"id", l.id},
                     {"width", l.width},
                     {"centerline", std::move(pts)},
                     {"successors", l.successors},
                     {"predecessors", l.predecessors}});
  }
  j["lanes"] = std::move(lanes);

  if (scene.gt_future) {
    json gt = json::array();
    for (const auto& p : *scene.gt_future) gt.push_back({p.x, p.y});
    j["gt_future"] = std::move(gt);
  }
  return j;
}

Scene scene_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("scenario must be a JSON object");
  Scene scene;
  scene.scene_id = id_from(require(j, "scene_id"), "scene_id");
  scene.tv_id = id_from(require(j, "tv_id"), "tv_id");
  if (auto it = j.find("dt"); it != j.end()) scene.dt = number(*it, "dt");
  if (auto it = j.find("history_steps"); it != j.end()) scene.history_steps = it->get<int>();
  if (auto it = j.find("future_steps"); it != j.end()) scene.future_steps = it->get<int>();

  if (auto it = j.find("frame"); it != j.end()) {
    const auto& tag = require(*it, "tag");
    if (!tag.is_string()) throw ParseError("frame.tag must be a string");
    const auto t = tag.get<std::string>();
    if (t == "cartesian") {
      scene.frame.kind = FrameKind::kCartesian;
    } else if (t == "frenet") {
      scene.frame.kind = FrameKind::kFrenet;
    } else {
      throw ParseError("unknown frame tag '" + t + "'");
    }
    if (auto ci = it->find("centerline_index"); ci != it->end() && !ci->is_null()) {
      scene.frame.centerline_index = ci->get<int>();
    }
  }

  const auto& agents = require(j, "agents");
  if (!agents.is_array()) throw ParseError("agents must be an array");
  for (const auto& aj : agents) {
    AgentHistory a;
    a.id = id_from(require(aj, "id"), "agent id");
    const auto& states = require(aj, "states");
    if (!states.is_array()) throw ParseError("agent states must be an array");
    for (const auto& sj : states) {
      if (!sj.is_array() || sj.size() != 7) {
        throw ParseError("agent '" + a.id + "': each state must be [t,x,y,heading,speed,yaw_rate,accel]");
      }
      a.states.push_back({number(sj[0], "t"), number(sj[1], "x"), number(sj[2], "y"), number(sj[3], "heading"),
                          number(sj[4], "speed"), number(sj[5], "yaw_rate"), number(sj[6], "accel")});
    }
    scene.agents.push_back(std::move(a));
  }

  const auto& lanes = require(j, "lanes");
  if (!lanes.is_array()) throw ParseError("lanes must be an array");
  for (const auto& lj : lanes) {
    Lane l;
    l.id = id_from(require(lj, "id"), "lane id");
    if (auto w = lj.find("width"); w != lj.end() && !w->is_null()) l.width = number(*w, "width");
    const auto& pts = require(lj, "centerline");
    if (!pts.is_array()) throw ParseError("lane '" + l.id + "': centerline must be an array");
    for (const auto& pj : pts) {
      if (!pj.is_array() || pj.size() != 3) {
        throw ParseError("lane '" + l.id + "': centerline points must be [x,y,theta_or_kappa]");
      }
      l.centerline.push_back({number(pj[0], "x"), number(pj[1], "y"), number(pj[2], "theta_or_kappa")});
    }
    l.successors = id_list(lj, "successors");
    l.predecessors = id_list(lj, "predecessors");
    scene.lanes.push_back(std::move(l));
  }

  if (auto it = j.find("gt_future"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw ParseError("gt_future must be an array");
    std::vector<Vec2> gt;
    for (const auto& pj : *it) {
      if (!pj.is_array() || pj.size() != 2) throw ParseError("gt_future entries must be [x,y]");
      gt.push_back({number(pj[0], "x"), number(pj[1], "y")});
    }
    scene.gt_future = std::move(gt);
  }
  return scene;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace detail

namespace {

Scene parse_and_validate(const nlohmann::json& j, const std::string& origin) {
  Scene scene;
  try {
    scene = detail::scene_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(origin + ": " + e.what());
  }
  const auto violations = validate_scene(scene);
  if (!violations.empty()) {
    std::ostringstream os;
    os << origin << ": invalid scene:";
    for (const auto& v : violations) os << "\n  - " << v;
    throw ValidationError(os.str());
  }
  return scene;
}

}  // namespace

Scene load_scene(const std::filesystem::path& path) {
  return parse_and_validate(detail::read_json_file(path), path.string());
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
  detail::write_text_file(path, detail::scene_to_json(scene).dump(1) + "\n");
}

Scene scene_from_json_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what());
  }
  return parse_and_validate(j, "scene");
}

std::string scene_to_json_string(const Scene& scene, int indent) {
  return detail::scene_to_json(scene).dump(indent);
}

void save_predictions(const PredictionSet& preds, const std::filesystem::path& path) {
  nlohmann::json j;
  j["scene_id"] = preds.scene_id;
  auto trajs = nlohmann::json::array();
  auto probs = nlohmann::json::array();
  auto sources = nlohmann::json::array();
  auto refilled = nlohmann::json::array();
  for (const auto& t : preds.trajectories) {
    auto wps = nlohmann::json::array();
    for (const auto& p : t.waypoints) wps.push_back({p.x, p.y});
    trajs.push_back(std::move(wps));
    probs.push_back(t.probability);
    sources.push_back(t.source_centerline ? nlohmann::json(*t.source_centerline) : nlohmann::json(nullptr));
    refilled.push_back(t.refilled);
  }
  j["trajectories"] = std::move(trajs);
  j["probs"] = std::move(probs);
  j["source_centerlines"] = std::move(sources);
  j["refilled"] = std::move(refilled);
  detail::write_text_file(path, j.dump() + "\n");
}

PredictionSet load_predictions(const std::filesystem::path& path) {
  const auto j = detail::read_json_file(path);
  PredictionSet out;
  try {
    const auto& id = j.at("scene_id");
    out.scene_id = id.is_string() ? id.get<std::string>() : std::to_string(id.get<long long>());
    const auto& trajs = j.at("trajectories");
    const auto& probs = j.at("probs");
    if (trajs.size() != probs.size()) throw ParseError(path.string() + ": trajectories/probs length mismatch");
    for (std::size_t k = 0; k < trajs.size(); ++k) {
      Trajectory t;
      for (const auto& p : trajs[k]) t.waypoints.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      t.probability = probs[k].get<double>();
      if (auto it = j.find("source_centerlines"); it != j.end() && k < it->size() && !(*it)[k].is_null()) {
        t.source_centerline = (*it)[k].get<int>();
      }
      if (auto it = j.find("refilled"); it != j.end() && k < it->size()) t.refilled = (*it)[k].get<bool>();
      out.trajectories.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return out;
}

}  // namespace lanewrap
