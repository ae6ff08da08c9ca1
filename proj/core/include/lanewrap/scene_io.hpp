#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lanewrap/types.hpp"

namespace lanewrap {

/// Checks every scene invariant. Returns one human-readable message per
/// violation; an empty list means the scene is valid.
std::vector<std::string> validate_scene(const Scene& scene);

/// Parses and validates a scenario file. Throws ParseError on malformed
/// JSON or schema mismatches and ValidationError naming the violated
/// invariant(s).
Scene load_scene(const std::filesystem::path& path);
void save_scene(const Scene& scene, const std::filesystem::path& path);

// String forms of the scenario schema, used by the predictor protocol.
Scene scene_from_json_string(const std::string& text);
std::string scene_to_json_string(const Scene& scene, int indent = -1);

/// Prediction file: {scene_id, trajectories:[[x,y]x30 xK], probs,
/// source_centerlines}.
void save_predictions(const PredictionSet& preds, const std::filesystem::path& path);
PredictionSet load_predictions(const std::filesystem::path& path);

}  // namespace lanewrap
