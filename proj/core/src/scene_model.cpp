#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>

#include "lanewrap/error.hpp"
#include "lanewrap/scene_io.hpp"
#include "lanewrap/types.hpp"

namespace lanewrap {

const AgentHistory* Scene::find_agent(const std::string& id) const {
  for (const auto& a : agents) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

const AgentHistory& Scene::tv() const {
  const AgentHistory* a = find_agent(tv_id);
  if (a == nullptr) throw ValidationError("tv_id '" + tv_id + "' does not name an agent");
  return *a;
}

const Lane* Scene::find_lane(const std::string& id) const {
  for (const auto& l : lanes) {
    if (l.id == id) return &l;
  }
  return nullptr;
}

namespace {

constexpr double kTimeTol = 1e-6;
constexpr double kMinPointSpacing = 0.01;

bool finite(const AgentState& s) {
  return std::isfinite(s.t) && std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.heading) &&
         std::isfinite(s.speed) && std::isfinite(s.yaw_rate) && std::isfinite(s.accel);
}

void check_history(const Scene& scene, const AgentHistory& agent, std::vector<std::string>& out) {
  const std::string who = "agent '" + agent.id + "'";
  const auto expected = static_cast<std::size_t>(scene.history_steps + 1);
  if (agent.states.size() != expected) {
    out.push_back(who + ": history has " + std::to_string(agent.states.size()) + " states, expected " +
                  std::to_string(expected));
  }
  if (agent.states.empty()) return;
  for (std::size_t i = 0; i < agent.states.size(); ++i) {
    const auto& s = agent.states[i];
    if (!finite(s)) {
      out.push_back(who + ": state " + std::to_string(i) + " has a non-finite value");
      continue;
    }
    if (s.speed < 0.0) out.push_back(who + ": state " + std::to_string(i) + " has negative speed");
    if (!(s.heading > -kPi && s.heading <= kPi)) {
      out.push_back(who + ": state " + std::to_string(i) + " heading outside (-pi, pi]");
    }
  }
  for (std::size_t i = 1; i < agent.states.size(); ++i) {
    const double step = agent.states[i].t - agent.states[i - 1].t;
    if (std::abs(step - scene.dt) > kTimeTol) {
      std::ostringstream os;
      os << who << ": time step " << step << " s between states " << i - 1 << " and " << i
         << " differs from dt " << scene.dt;
      out.push_back(os.str());
    }
  }
  if (std::abs(agent.states.back().t) > kTimeTol) {
    out.push_back(who + ": last state is not at t = 0");
  }
}

void check_lane(const Lane& lane, std::vector<std::string>& out) {
  const std::string who = "lane '" + lane.id + "'";
  if (lane.centerline.size() < 2) {
    out.push_back(who + ": centerline has fewer than 2 points");
  }
  if (!(lane.width > 0.0) || !std::isfinite(lane.width)) out.push_back(who + ": width must be > 0");
  for (std::size_t i = 0; i < lane.centerline.size(); ++i) {
    const auto& p = lane.centerline[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.theta_or_kappa)) {
      out.push_back(who + ": centerline point " + std::to_string(i) + " is not finite");
    }
  }
  for (std::size_t i = 1; i < lane.centerline.size(); ++i) {
    if (distance(lane.centerline[i].position(), lane.centerline[i - 1].position()) < kMinPointSpacing) {
      out.push_back(who + ": centerline points " + std::to_string(i - 1) + " and " + std::to_string(i) +
                    " are closer than 0.01 m");
      break;
    }
  }
}

bool contains(const std::vector<std::string>& ids, const std::string& id) {
  for (const auto& x : ids) {
    if (x == id) return true;
  }
  return false;
}

}  // namespace

std::vector<std::string> validate_scene(const Scene& scene) {
  std::vector<std::string> out;
  if (!(scene.dt > 0.0)) out.push_back("dt must be > 0");
  if (scene.history_steps < 1) out.push_back("history_steps must be >= 1");
  if (scene.future_steps < 1) out.push_back("future_steps must be >= 1");
  if (scene.frame.is_frenet() && !scene.frame.centerline_index) {
    out.push_back("frenet-tagged scene lacks a centerline index");
  }

  if (scene.find_agent(scene.tv_id) == nullptr) {
    out.push_back("tv_id '" + scene.tv_id + "' does not refer to an existing agent");
  }
  std::set<std::string> agent_ids;
  for (const auto& a : scene.agents) {
    if (!agent_ids.insert(a.id).second) out.push_back("duplicate agent id '" + a.id + "'");
    check_history(scene, a, out);
  }

  std::unordered_map<std::string, const Lane*> by_id;
  for (const auto& l : scene.lanes) {
    if (!by_id.emplace(l.id, &l).second) out.push_back("duplicate lane id '" + l.id + "'");
    check_lane(l, out);
  }
  for (const auto& l : scene.lanes) {
    for (const auto& s : l.successors) {
      auto it = by_id.find(s);
      if (it == by_id.end()) {
        out.push_back("lane '" + l.id + "': unknown successor '" + s + "'");
      } else if (!contains(it->second->predecessors, l.id)) {
        out.push_back("lane '" + l.id + "': successor '" + s + "' does not list it as predecessor");
      }
    }
    for (const auto& p : l.predecessors) {
      auto it = by_id.find(p);
      if (it == by_id.end()) {
        out.push_back("lane '" + l.id + "': unknown predecessor '" + p + "'");
      } else if (!contains(it->second->successors, l.id)) {
        out.push_back("lane '" + l.id + "': predecessor '" + p + "' does not list it as successor");
      }
    }
  }

  if (scene.gt_future) {
    if (scene.gt_future->size() != static_cast<std::size_t>(scene.future_steps)) {
      out.push_back("gt_future has " + std::to_string(scene.gt_future->size()) + " entries, expected " +
                    std::to_string(scene.future_steps));
    }
    for (const auto& p : *scene.gt_future) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        out.push_back("gt_future contains a non-finite position");
        break;
      }
    }
  }
  return out;
}

}  // namespace lanewrap
