#include "lanewrap/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "lanewrap/error.hpp"

namespace lanewrap {

namespace {

constexpr double kNormTol = 1e-6;

void renormalize(std::vector<Trajectory>& trajs) {
  double total = 0.0;
  for (const auto& t : trajs) total += t.probability;
  if (total > 0.0) {
    for (auto& t : trajs) t.probability /= total;
  } else if (!trajs.empty()) {
    for (auto& t : trajs) t.probability = 1.0 / static_cast<double>(trajs.size());
  }
}

std::vector<std::size_t> order_by_probability(const std::vector<Trajectory>& trajs) {
  std::vector<std::size_t> order(trajs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return trajs[a].probability > trajs[b].probability; });
  return order;
}

std::size_t resolve_k(int k_hat, std::size_t total) {
  if (k_hat <= 0) return total;
  return std::min(static_cast<std::size_t>(k_hat), total);
}

}  // namespace

std::string strategy_name(AggregationStrategy s) {
  switch (s) {
    case AggregationStrategy::kGreedySampling: return "greedy_sampling";
    case AggregationStrategy::kLaneScoring: return "lane_scoring";
    case AggregationStrategy::kKmeans: return "kmeans";
    case AggregationStrategy::kUniform: return "uniform";
    case AggregationStrategy::kPrivileged: return "privileged";
    case AggregationStrategy::kAll: return "all";
  }
  return "unknown";
}

AggregationStrategy parse_strategy(const std::string& name) {
  if (name == "greedy_sampling" || name == "greedy") return AggregationStrategy::kGreedySampling;
  if (name == "lane_scoring") return AggregationStrategy::kLaneScoring;
  if (name == "kmeans") return AggregationStrategy::kKmeans;
  if (name == "uniform") return AggregationStrategy::kUniform;
  if (name == "privileged") return AggregationStrategy::kPrivileged;
  if (name == "all") return AggregationStrategy::kAll;
  throw ConfigError("unknown aggregation strategy '" + name + "'");
}

std::string prior_name(PriorSource p) {
  switch (p) {
    case PriorSource::kUniform: return "uniform";
    case PriorSource::kScorer: return "scorer";
    case PriorSource::kPrivileged: return "privileged";
  }
  return "unknown";
}

PriorSource parse_prior(const std::string& name) {
  if (name == "uniform") return PriorSource::kUniform;
  if (name == "scorer") return PriorSource::kScorer;
  if (name == "privileged") return PriorSource::kPrivileged;
  throw ConfigError("unknown prior source '" + name + "'");
}

std::vector<Trajectory> marginalize(const std::vector<Trajectory>& candidates, std::span<const double> priors) {
  const double prior_sum = std::accumulate(priors.begin(), priors.end(), 0.0);
  if (std::abs(prior_sum - 1.0) > kNormTol) {
    throw NormalizationError("centerline priors sum to " + std::to_string(prior_sum));
  }
  std::map<int, double> conditional_sums;
  for (const auto& c : candidates) {
    const int src = c.source_centerline.value_or(0);
    if (src < 0 || static_cast<std::size_t>(src) >= priors.size()) {
      throw NormalizationError("candidate refers to centerline " + std::to_string(src) + " without a prior");
    }
    conditional_sums[src] += c.probability;
  }
  for (const auto& [src, sum] : conditional_sums) {
    if (std::abs(sum - 1.0) > kNormTol) {
      throw NormalizationError("conditionals of centerline " + std::to_string(src) + " sum to " +
                               std::to_string(sum));
    }
  }
  std::vector<Trajectory> out = candidates;
  for (auto& c : out) c.probability *= priors[static_cast<std::size_t>(c.source_centerline.value_or(0))];
  return out;
}

std::vector<double> uniform_prior(std::size_t n) {
  if (n == 0) return {};
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

std::vector<double> privileged_prior(const Scene& scene, const std::vector<CenterlineSequence>& seqs) {
  const int gt = assign_gt_centerline(scene, seqs);
  std::vector<double> prior(seqs.size(), 0.0);
  prior[static_cast<std::size_t>(gt)] = 1.0;
  return prior;
}

std::vector<Trajectory> greedy_select(const std::vector<Trajectory>& candidates, int k_hat, double nms_radius) {
  if (candidates.empty()) throw ValidationError("greedy selection needs at least one candidate");
  if (!(nms_radius > 0.0)) throw ConfigError("nms radius must be > 0");
  const std::size_t k = resolve_k(k_hat, candidates.size());
  const auto order = order_by_probability(candidates);

  std::vector<bool> removed(candidates.size(), false);
  std::vector<std::size_t> selected;
  std::vector<std::size_t> suppressed;
  for (std::size_t idx : order) {
    if (selected.size() == k) break;
    if (removed[idx]) continue;
    selected.push_back(idx);
    removed[idx] = true;
    const Vec2 e = candidates[idx].endpoint();
    for (std::size_t other : order) {
      if (removed[other]) continue;
      if (distance(candidates[other].endpoint(), e) <= nms_radius) {
        removed[other] = true;
        suppressed.push_back(other);
      }
    }
  }

  std::vector<Trajectory> out;
  out.reserve(k);
  for (std::size_t idx : selected) {
    out.push_back(candidates[idx]);
    out.back().refilled = false;
  }
  if (out.size() < k) {
    std::stable_sort(suppressed.begin(), suppressed.end(), [&](std::size_t a, std::size_t b) {
      return candidates[a].probability > candidates[b].probability;
    });
    for (std::size_t idx : suppressed) {
      if (out.size() == k) break;
      out.push_back(candidates[idx]);
      out.back().refilled = true;
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Trajectory& a, const Trajectory& b) { return a.probability > b.probability; });
  renormalize(out);
  return out;
}

std::vector<Trajectory> top_k_select(const std::vector<Trajectory>& candidates, int k_hat) {
  if (candidates.empty()) throw ValidationError("selection needs at least one candidate");
  const std::size_t k = resolve_k(k_hat, candidates.size());
  const auto order = order_by_probability(candidates);
  std::vector<Trajectory> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(candidates[order[i]]);
  renormalize(out);
  return out;
}

double harmonic_number(int n) {
  double h = 0.0;
  for (int i = 1; i <= n; ++i) h += 1.0 / i;
  return h;
}

PredictionSet aggregate(const Scene& scene, const CandidateSet& candidates, const AggregationConfig& config) {
  const std::size_t n = candidates.sequences.size();
  if (n == 0 || candidates.candidates.empty()) {
    throw ValidationError("scene '" + scene.scene_id + "' has no candidates to aggregate");
  }

  PriorSource source = config.prior_source;
  if (config.strategy == AggregationStrategy::kUniform) source = PriorSource::kUniform;
  if (config.strategy == AggregationStrategy::kPrivileged) source = PriorSource::kPrivileged;

  std::vector<double> priors;
  switch (source) {
    case PriorSource::kUniform:
      priors = uniform_prior(n);
      break;
    case PriorSource::kPrivileged:
      priors = privileged_prior(scene, candidates.sequences);
      break;
    case PriorSource::kScorer:
      if (config.scorer == nullptr) throw ConfigError("scorer prior requested without a scorer model");
      priors = score_centerlines(*config.scorer, scene, candidates.sequences);
      break;
  }

  const auto marginal = marginalize(candidates.candidates, priors);
  PredictionSet out;
  out.scene_id = scene.scene_id;
  switch (config.strategy) {
    case AggregationStrategy::kGreedySampling:
      out.trajectories = greedy_select(marginal, config.k_hat, config.nms_radius);
      break;
    case AggregationStrategy::kKmeans:
      out.trajectories = kmeans_select(marginal, config.k_hat, config.seed);
      break;
    case AggregationStrategy::kAll:
      out.trajectories = top_k_select(marginal, 0);
      break;
    case AggregationStrategy::kLaneScoring:
    case AggregationStrategy::kUniform:
    case AggregationStrategy::kPrivileged:
      out.trajectories = top_k_select(marginal, config.k_hat);
      break;
  }
  return out;
}

}  // namespace lanewrap
