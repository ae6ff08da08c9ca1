#pragma once

#include <array>
#include <string>
#include <vector>

#include "lanewrap/centerlines.hpp"
#include "lanewrap/frenet_scene.hpp"
#include "lanewrap/types.hpp"

namespace lanewrap {

/// One frame of a batched prediction request. Frenet-tagged scenes carry
/// their centerline index in `scene.frame`.
struct PredictorRequest {
  int frame_index = 0;
  int k = 6;
  Scene scene;
};

/// K trajectories in the request's frame with conditional probabilities.
struct PredictorResponse {
  int frame_index = 0;
  std::vector<Trajectory> trajectories;
  std::vector<double> conditional_probs;
};

/// A trajectory predictor. One call covers every frame of a scene.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::vector<PredictorResponse> predict(const std::string& scene_id,
                                                 const std::vector<PredictorRequest>& frames) = 0;
};

inline constexpr int kCaModes = 6;

/// Constant-acceleration extrapolation of the TV with accelerations
/// {-4, -2, 0, +2, +4, a_t} m/s^2 and uniform probabilities. In a Cartesian
/// scene the TV moves along its current heading; in a Frenet scene it moves
/// along s at constant d. Speed is clamped at zero.
PredictorResponse predict_ca(const Scene& scene, int k = kCaModes);

/// The TV's current acceleration: the accel channel when finite, else the
/// finite difference of the last two speeds.
double current_acceleration(const AgentHistory& tv, double dt);

/// Distance travelled after time t from speed v under constant acceleration
/// a, stopping (not reversing) once the speed reaches zero.
double ca_distance(double v, double a, double t);

class ConstantAccelerationPredictor final : public Predictor {
 public:
  std::vector<PredictorResponse> predict(const std::string& scene_id,
                                         const std::vector<PredictorRequest>& frames) override;
};

/// Checks count, waypoint length, finiteness and per-frame normalization.
/// Throws ProtocolError naming the frame index.
void validate_response(const PredictorRequest& request, const PredictorResponse& response, int future_steps);

/// Per-centerline predictions mapped back to Cartesian coordinates.
struct CandidateSet {
  std::vector<CenterlineSequence> sequences;
  // K*N trajectories; `probability` holds p(t | C) and `source_centerline`
  // the sequence index.
  std::vector<Trajectory> candidates;
  int k = 0;
};

/// Runs `predictor` in the Frenet frame of every centerline sequence of the
/// scene (one batched call) and projects the outputs back to Cartesian.
CandidateSet wrap_frenet(const Scene& scene, Predictor& predictor, int k);

/// Runs `predictor` directly on the Cartesian scene.
std::vector<Trajectory> predict_cartesian(const Scene& scene, Predictor& predictor, int k);

}  // namespace lanewrap
