#include "lanewrap/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lanewrap/error.hpp"

namespace lanewrap {

double current_acceleration(const AgentHistory& tv, double dt) {
  const AgentState& cur = tv.states.back();
  if (std::isfinite(cur.accel)) return cur.accel;
  if (tv.states.size() < 2) throw PredictorError("TV history too short to derive acceleration");
  return (cur.speed - tv.states[tv.states.size() - 2].speed) / dt;
}

double ca_distance(double v, double a, double t) {
  if (a < 0.0) {
    const double t_stop = v / -a;
    if (t >= t_stop) return v * t_stop + 0.5 * a * t_stop * t_stop;
  }
  return v * t + 0.5 * a * t * t;
}

PredictorResponse predict_ca(const Scene& scene, int k) {
  if (k != kCaModes) throw PredictorError("the constant-acceleration predictor produces exactly 6 modes");
  const AgentHistory* tv = scene.find_agent(scene.tv_id);
  if (tv == nullptr || tv->states.size() < 2) throw PredictorError("insufficient TV history for CA prediction");
  const AgentState& cur = tv->current();
  const std::array<double, kCaModes> accels{-4.0, -2.0, 0.0, 2.0, 4.0, current_acceleration(*tv, scene.dt)};

  // Cartesian: along the heading ray. Frenet: along s at constant d.
  const Vec2 dir = scene.frame.is_frenet() ? Vec2{1.0, 0.0} : Vec2{std::cos(cur.heading), std::sin(cur.heading)};
  const Vec2 origin = cur.position();

  PredictorResponse out;
  for (double a : accels) {
    Trajectory traj;
    traj.waypoints.reserve(static_cast<std::size_t>(scene.future_steps));
    for (int i = 1; i <= scene.future_steps; ++i) {
      const double t = i * scene.dt;
      traj.waypoints.push_back(origin + ca_distance(cur.speed, a, t) * dir);
    }
    traj.probability = 1.0 / kCaModes;
    out.trajectories.push_back(std::move(traj));
    out.conditional_probs.push_back(1.0 / kCaModes);
  }
  return out;
}

std::vector<PredictorResponse> ConstantAccelerationPredictor::predict(const std::string&,
                                                                      const std::vector<PredictorRequest>& frames) {
  std::vector<PredictorResponse> out;
  out.reserve(frames.size());
  for (const auto& f : frames) {
    auto r = predict_ca(f.scene, f.k);
    r.frame_index = f.frame_index;
    out.push_back(std::move(r));
  }
  return out;
}

void validate_response(const PredictorRequest& request, const PredictorResponse& response, int future_steps) {
  const std::string where = "frame_index " + std::to_string(request.frame_index);
  if (response.frame_index != request.frame_index) {
    throw ProtocolError(where + ": response answers frame_index " + std::to_string(response.frame_index));
  }
  if (static_cast<int>(response.trajectories.size()) != request.k ||
      static_cast<int>(response.conditional_probs.size()) != request.k) {
    std::ostringstream os;
    os << where << ": shape error: expected " << request.k << " trajectories, got " << response.trajectories.size()
       << " trajectories and " << response.conditional_probs.size() << " probabilities";
    throw ProtocolError(os.str());
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < response.trajectories.size(); ++j) {
    const auto& t = response.trajectories[j];
    if (static_cast<int>(t.waypoints.size()) != future_steps) {
      throw ProtocolError(where + ": shape error: trajectory " + std::to_string(j) + " has " +
                          std::to_string(t.waypoints.size()) + " waypoints, expected " +
                          std::to_string(future_steps));
    }
    for (const auto& p : t.waypoints) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw ProtocolError(where + ": trajectory " + std::to_string(j) + " has non-finite waypoints");
      }
    }
    const double p = response.conditional_probs[j];
    if (!std::isfinite(p) || p < 0.0) throw ProtocolError(where + ": invalid probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    std::ostringstream os;
    os << where << ": normalization error: probabilities sum to " << sum;
    throw ProtocolError(os.str());
  }
}

CandidateSet wrap_frenet(const Scene& scene, Predictor& predictor, int k) {
  CandidateSet out;
  out.k = k;
  out.sequences = enumerate_sequences(scene);

  std::vector<FrenetScene> frames;
  std::vector<PredictorRequest> requests;
  frames.reserve(out.sequences.size());
  requests.reserve(out.sequences.size());
  for (const auto& seq : out.sequences) {
    frames.push_back(scene_to_frenet(scene, seq));
    requests.push_back({seq.index, k, frames.back().scene});
  }

  auto responses = predictor.predict(scene.scene_id, requests);
  if (responses.size() != requests.size()) {
    throw ProtocolError("predictor answered " + std::to_string(responses.size()) + " frames for " +
                        std::to_string(requests.size()) + " requested");
  }
  for (std::size_t i = 0; i < requests.size(); ++i) {
    validate_response(requests[i], responses[i], scene.future_steps);
    const FrenetScene& fs = frames[i];
    for (std::size_t j = 0; j < responses[i].trajectories.size(); ++j) {
      Trajectory t;
      t.waypoints.reserve(responses[i].trajectories[j].waypoints.size());
      for (const auto& w : responses[i].trajectories[j].waypoints) {
        t.waypoints.push_back(to_cartesian_point(fs.reference, fs.origin_s, {w.x, w.y}));
      }
      t.probability = responses[i].conditional_probs[j];
      t.source_centerline = fs.reference.index;
      out.candidates.push_back(std::move(t));
    }
  }
  return out;
}

std::vector<Trajectory> predict_cartesian(const Scene& scene, Predictor& predictor, int k) {
  if (scene.frame.is_frenet()) throw PredictorError("predict_cartesian expects a Cartesian scene");
  const std::vector<PredictorRequest> requests{{0, k, scene}};
  auto responses = predictor.predict(scene.scene_id, requests);
  if (responses.size() != 1) throw ProtocolError("predictor answered the wrong number of frames");
  validate_response(requests[0], responses[0], scene.future_steps);
  auto trajs = std::move(responses[0].trajectories);
  for (std::size_t j = 0; j < trajs.size(); ++j) trajs[j].probability = responses[0].conditional_probs[j];
  return trajs;
}

}  // namespace lanewrap
