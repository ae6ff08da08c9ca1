#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lanewrap/centerlines.hpp"
#include "lanewrap/lane_scorer.hpp"
#include "lanewrap/predictors.hpp"
#include "lanewrap/types.hpp"

namespace lanewrap {

enum class AggregationStrategy { kGreedySampling, kLaneScoring, kKmeans, kUniform, kPrivileged, kAll };
enum class PriorSource { kUniform, kScorer, kPrivileged };

struct AggregationConfig {
  AggregationStrategy strategy = AggregationStrategy::kGreedySampling;
  // Number of output trajectories; 0 or less keeps every candidate (N*K).
  int k_hat = 6;
  double nms_radius = 1.0;
  PriorSource prior_source = PriorSource::kUniform;
  // Required when prior_source is kScorer. Not owned.
  const ScorerParams* scorer = nullptr;
  std::uint64_t seed = 0;
};

std::string strategy_name(AggregationStrategy s);
/// Accepts the names printed by strategy_name plus "greedy".
AggregationStrategy parse_strategy(const std::string& name);
std::string prior_name(PriorSource p);
PriorSource parse_prior(const std::string& name);

/// p(t) = p(t | C) * p(C). Throws NormalizationError when the priors or the
/// conditionals of any centerline do not sum to one within 1e-6.
std::vector<Trajectory> marginalize(const std::vector<Trajectory>& candidates, std::span<const double> priors);

std::vector<double> uniform_prior(std::size_t n);

/// One-hot on assign_gt_centerline's index.
std::vector<double> privileged_prior(const Scene& scene, const std::vector<CenterlineSequence>& seqs);

/// Greedy endpoint non-maximum suppression. Members pulled back from the
/// suppressed pool to reach min(k_hat, total) are flagged `refilled`.
/// Output is sorted by probability (stable) and renormalized.
std::vector<Trajectory> greedy_select(const std::vector<Trajectory>& candidates, int k_hat, double nms_radius);

/// The k_hat most probable candidates (stable on ties), renormalized.
std::vector<Trajectory> top_k_select(const std::vector<Trajectory>& candidates, int k_hat);

/// 1 + 1/2 + ... + 1/n.
double harmonic_number(int n);

/// K-means on endpoints with k-means++ seeding. One representative per
/// cluster (the member nearest the centroid), ranked by member count then
/// summed probability, with probability (1/rank) / H(k_hat).
std::vector<Trajectory> kmeans_select(const std::vector<Trajectory>& candidates, int k_hat, std::uint64_t seed);

/// Priors for `config`, then marginalization, then the configured selection.
PredictionSet aggregate(const Scene& scene, const CandidateSet& candidates, const AggregationConfig& config);

}  // namespace lanewrap
