#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lanewrap/types.hpp"

namespace lanewrap {

enum class Topology { kStraight, kCurve, kSCurve, kFork, kCrossing };

std::string topology_name(Topology t);
Topology parse_topology(const std::string& name);

/// Shape knobs. Unset optionals are drawn per scene from the seed.
struct SynthParams {
  std::optional<double> speed;           // requested TV speed, m/s; drawn in [10, 20]
  std::optional<double> radius;          // curve radius, m (>= 10); drawn in [30, 150]
  std::optional<double> fork_angle_deg;  // in [10, 60]; drawn in [20, 45]
  std::optional<std::string> curve_variant;  // "mid" or "pre"; drawn
  double noise = 0.05;                   // std of the lateral wander amplitude, m
  double lane_width = kDefaultLaneWidth;
  double vertex_spacing = 1.0;
  bool lead_vehicle = true;

  void validate() const;
};

struct GeneratedScene {
  Scene scene;
  Topology topology = Topology::kStraight;
  std::string variant;
  std::uint64_t seed = 0;
  // Lanes the ground truth follows, starting at the TV's current lane.
  std::vector<std::string> gt_lane_ids;
  double speed = 0.0;
  // True when the requested speed was lowered to respect the lateral limit.
  bool speed_reduced = false;
};

/// Deterministic for a fixed (topology, seed, params).
GeneratedScene generate(Topology topology, std::uint64_t seed, const SynthParams& params = {});

/// splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);
/// Seed of scene `index` in a corpus seeded with `corpus_seed`.
std::uint64_t derive_seed(std::uint64_t corpus_seed, std::uint64_t index);

struct CorpusSpec {
  std::vector<std::pair<Topology, double>> mixture;
  int count = 0;
  std::uint64_t seed = 0;
  SynthParams params;
};

/// Parses "fork=0.5,curve=0.3,straight=0.2".
std::vector<std::pair<Topology, double>> parse_mixture(const std::string& text);

/// Per-scene topologies: exact largest-remainder counts, shuffled by seed.
std::vector<Topology> corpus_topologies(const CorpusSpec& spec);

std::vector<GeneratedScene> generate_corpus(const CorpusSpec& spec);

/// Writes one scene file per scene plus manifest.json into `out_dir`.
void write_corpus(const CorpusSpec& spec, const std::vector<GeneratedScene>& scenes,
                  const std::filesystem::path& out_dir);

}  // namespace lanewrap
