#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "lanewrap/aggregation.hpp"
#include "lanewrap/error.hpp"

namespace lanewrap {

namespace {

constexpr int kMaxIterations = 100;
constexpr double kTolerance = 1e-6;

double sq(Vec2 a, Vec2 b) {
  const Vec2 d = a - b;
  return dot(d, d);
}

std::vector<Vec2> seed_centroids(const std::vector<Vec2>& pts, std::size_t k, std::mt19937_64& rng) {
  std::vector<Vec2> centroids;
  std::vector<bool> used(pts.size(), false);
  std::uniform_int_distribution<std::size_t> first(0, pts.size() - 1);
  std::size_t idx = first(rng);
  centroids.push_back(pts[idx]);
  used[idx] = true;

  std::vector<double> d2(pts.size());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centroids) best = std::min(best, sq(pts[i], c));
      d2[i] = best;
      total += best;
    }
    if (total <= 0.0) {
      // Every point coincides with a centroid already: take the next unused one.
      idx = static_cast<std::size_t>(std::find(used.begin(), used.end(), false) - used.begin());
    } else {
      const double target = unit(rng) * total;
      double acc = 0.0;
      idx = pts.size() - 1;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0.0) {
          idx = i;
          break;
        }
      }
    }
    centroids.push_back(pts[idx]);
    used[idx] = true;
  }
  return centroids;
}

std::size_t nearest(Vec2 p, const std::vector<Vec2>& centroids) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = sq(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

}  // namespace

std::vector<Trajectory> kmeans_select(const std::vector<Trajectory>& candidates, int k_hat, std::uint64_t seed) {
  if (candidates.empty()) throw ValidationError("k-means selection needs at least one candidate");
  if (k_hat <= 0) k_hat = static_cast<int>(candidates.size());
  const auto k = static_cast<std::size_t>(k_hat);

  if (candidates.size() < k) {
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return candidates[a].probability > candidates[b].probability;
    });
    const double h = harmonic_number(static_cast<int>(order.size()));
    std::vector<Trajectory> out;
    for (std::size_t r = 0; r < order.size(); ++r) {
      out.push_back(candidates[order[r]]);
      out.back().probability = 1.0 / (static_cast<double>(r + 1) * h);
    }
    return out;
  }

  std::vector<Vec2> pts;
  pts.reserve(candidates.size());
  for (const auto& c : candidates) pts.push_back(c.endpoint());

  std::mt19937_64 rng(seed);
  std::vector<Vec2> centroids = seed_centroids(pts, k, rng);
  std::vector<std::size_t> label(pts.size(), 0);

  for (int iter = 0; iter < kMaxIterations; ++iter) {
    for (std::size_t i = 0; i < pts.size(); ++i) label[i] = nearest(pts[i], centroids);

    std::vector<Vec2> sum(k);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      sum[label[i]] = sum[label[i]] + pts[i];
      ++count[label[i]];
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      Vec2 next = centroids[c];
      if (count[c] > 0) {
        next = (1.0 / static_cast<double>(count[c])) * sum[c];
      } else {
        // Re-seed an empty cluster on the point farthest from its centroid.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
          const double d = sq(pts[i], centroids[label[i]]);
          if (d > far_d && count[label[i]] > 1) {
            far_d = d;
            far = i;
          }
        }
        if (far_d >= 0.0) {
          --count[label[far]];
          label[far] = c;
          count[c] = 1;
          next = pts[far];
        }
      }
      shift = std::max(shift, distance(next, centroids[c]));
      centroids[c] = next;
    }
    if (shift < kTolerance) break;
  }
  for (std::size_t i = 0; i < pts.size(); ++i) label[i] = nearest(pts[i], centroids);

  struct Cluster {
    std::size_t members = 0;
    double mass = 0.0;
    std::size_t rep = 0;
    double rep_d = std::numeric_limits<double>::infinity();
    std::size_t id = 0;
  };
  std::vector<Cluster> clusters(k);
  for (std::size_t c = 0; c < k; ++c) clusters[c].id = c;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Cluster& cl = clusters[label[i]];
    ++cl.members;
    cl.mass += candidates[i].probability;
    const double d = sq(pts[i], centroids[label[i]]);
    if (d < cl.rep_d) {
      cl.rep_d = d;
      cl.rep = i;
    }
  }
  // Clusters left empty by coincident endpoints borrow unused candidates so
  // the output always has k_hat members.
  std::vector<bool> taken(pts.size(), false);
  for (const auto& cl : clusters) {
    if (cl.members > 0) taken[cl.rep] = true;
  }
  for (auto& cl : clusters) {
    if (cl.members > 0) continue;
    const auto free = static_cast<std::size_t>(std::find(taken.begin(), taken.end(), false) - taken.begin());
    cl.rep = free;
    taken[free] = true;
  }

  std::stable_sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    if (a.members != b.members) return a.members > b.members;
    if (a.mass != b.mass) return a.mass > b.mass;
    return a.id < b.id;
  });
  const double h = harmonic_number(k_hat);
  std::vector<Trajectory> out;
  out.reserve(k);
  for (std::size_t r = 0; r < k; ++r) {
    out.push_back(candidates[clusters[r].rep]);
    out.back().probability = 1.0 / (static_cast<double>(r + 1) * h);
    out.back().refilled = false;
  }
  return out;
}

}  // namespace lanewrap
