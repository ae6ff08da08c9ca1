#include <gtest/gtest.h>

#include <random>

#include "lanewrap/aggregation.hpp"
#include "lanewrap/error.hpp"
#include "support.hpp"

namespace lanewrap {
namespace {

Trajectory ending_at(Vec2 end, double prob, std::optional<int> source = std::nullopt) {
  Trajectory t;
  for (int i = 1; i <= 30; ++i) t.waypoints.push_back((i / 30.0) * end);
  t.probability = prob;
  t.source_centerline = source;
  return t;
}

double total(const std::vector<Trajectory>& ts) {
  double s = 0.0;
  for (const auto& t : ts) s += t.probability;
  return s;
}

TEST(Aggregation, MarginalizeProduct) {
  std::vector<Trajectory> c{ending_at({1, 0}, 0.5, 0), ending_at({2, 0}, 0.5, 0), ending_at({3, 0}, 1.0, 1)};
  const std::vector<double> priors{0.4, 0.6};
  const auto m = marginalize(c, priors);
  EXPECT_DOUBLE_EQ(m[0].probability, 0.2);
  EXPECT_DOUBLE_EQ(m[2].probability, 0.6);
  EXPECT_NEAR(total(m), 1.0, 1e-12);
}

TEST(Aggregation, MarginalizeUniform) {
  std::vector<Trajectory> c;
  for (int n = 0; n < 3; ++n) {
    for (int k = 0; k < 6; ++k) c.push_back(ending_at({double(k), double(n)}, 1.0 / 6.0, n));
  }
  const auto m = marginalize(c, uniform_prior(3));
  for (const auto& t : m) EXPECT_NEAR(t.probability, 1.0 / 18.0, 1e-15);
}

TEST(Aggregation, MarginalizeSingleCenterlineIsIdentity) {
  std::vector<Trajectory> c{ending_at({1, 0}, 0.25, 0), ending_at({2, 0}, 0.75, 0)};
  const auto m = marginalize(c, uniform_prior(1));
  EXPECT_EQ(m[0].probability, 0.25);
  EXPECT_EQ(m[1].probability, 0.75);
}

TEST(Aggregation, MarginalizeRejectsUnnormalized) {
  std::vector<Trajectory> c{ending_at({1, 0}, 0.5, 0), ending_at({2, 0}, 0.4, 0)};
  EXPECT_THROW(marginalize(c, uniform_prior(1)), NormalizationError);
  std::vector<Trajectory> ok{ending_at({1, 0}, 1.0, 0), ending_at({2, 0}, 1.0, 1)};
  const std::vector<double> bad_prior{0.5, 0.6};
  EXPECT_THROW(marginalize(ok, bad_prior), NormalizationError);
}

TEST(Aggregation, GreedyHandTrace) {
  std::vector<Trajectory> c{ending_at({0, 0}, 0.5), ending_at({0.5, 0}, 0.3), ending_at({10, 0}, 0.2)};
  const auto out = greedy_select(c, 2, 1.0);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].endpoint(), (Vec2{0, 0}));
  EXPECT_EQ(out[1].endpoint(), (Vec2{10, 0}));
  EXPECT_NEAR(out[0].probability, 0.5 / 0.7, 1e-12);
  EXPECT_NEAR(out[1].probability, 0.2 / 0.7, 1e-12);
  EXPECT_NEAR(out[0].probability, 0.714, 1e-3);
  EXPECT_NEAR(out[1].probability, 0.286, 1e-3);
}

TEST(Aggregation, GreedyRefillsWhenExhausted) {
  std::vector<Trajectory> c{ending_at({0, 0}, 0.5), ending_at({0.5, 0}, 0.3), ending_at({10, 0}, 0.2)};
  const auto out = greedy_select(c, 6, 1.0);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(std::count_if(out.begin(), out.end(), [](const Trajectory& t) { return t.refilled; }), 1);
  EXPECT_NEAR(total(out), 1.0, 1e-12);
}

TEST(Aggregation, GreedyAllSeparatedIsTopK) {
  std::vector<Trajectory> c;
  double sum = 0.0;
  for (int i = 0; i < 12; ++i) sum += i + 1;
  for (int i = 0; i < 12; ++i) c.push_back(ending_at({5.0 * i, 0}, (i + 1) / sum));
  const auto out = greedy_select(c, 6, 1.0);
  ASSERT_EQ(out.size(), 6u);
  for (int r = 0; r < 6; ++r) EXPECT_EQ(out[static_cast<std::size_t>(r)].endpoint().x, 5.0 * (11 - r));
}

TEST(Aggregation, GreedyIdenticalEndpoints) {
  std::vector<Trajectory> c;
  for (int i = 0; i < 12; ++i) c.push_back(ending_at({3, 3}, 1.0 / 12.0));
  const auto out = greedy_select(c, 6, 1.0);
  ASSERT_EQ(out.size(), 6u);
  EXPECT_FALSE(out[0].refilled);
  for (std::size_t i = 1; i < out.size(); ++i) EXPECT_TRUE(out[i].refilled);
  EXPECT_NEAR(total(out), 1.0, 1e-12);
}

TEST(Aggregation, GreedyEmptyThrows) { EXPECT_THROW(greedy_select({}, 6, 1.0), ValidationError); }

TEST(Aggregation, GreedyPropertiesOnRandomSets) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 200; ++n) {
    std::vector<Trajectory> c;
    const int count = 1 + static_cast<int>(u(rng) * 24);
    double sum = 0.0;
    for (int i = 0; i < count; ++i) {
      c.push_back(ending_at({u(rng) * 6.0, u(rng) * 6.0}, u(rng) + 1e-3));
      sum += c.back().probability;
    }
    for (auto& t : c) t.probability /= sum;
    const auto out = greedy_select(c, 6, 1.0);
    EXPECT_EQ(out.size(), std::min<std::size_t>(6, c.size()));
    EXPECT_NEAR(total(out), 1.0, 1e-9);
    for (std::size_t i = 1; i < out.size(); ++i) EXPECT_LE(out[i].probability, out[i - 1].probability);
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t j = i + 1; j < out.size(); ++j) {
        if (out[i].refilled || out[j].refilled) continue;
        EXPECT_GT(distance(out[i].endpoint(), out[j].endpoint()), 1.0);
      }
    }
    // Scaling the priors before normalization selects the same members.
    auto scaled = c;
    for (auto& t : scaled) t.probability *= 3.0;
    const auto again = greedy_select(scaled, 6, 1.0);
    ASSERT_EQ(again.size(), out.size());
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(again[i].endpoint(), out[i].endpoint());
  }
}

TEST(Aggregation, HarmonicNumber) {
  EXPECT_NEAR(harmonic_number(6), 2.45, 1e-12);
  EXPECT_NEAR(1.0 / harmonic_number(6), 0.4082, 1e-4);
}

std::vector<Trajectory> six_groups(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 0.2);
  std::vector<Trajectory> c;
  for (int g = 0; g < 6; ++g) {
    for (int m = 0; m < 4; ++m) c.push_back(ending_at({20.0 * g + n(rng), 7.0 * (g % 2) + n(rng)}, 1.0 / 24.0));
  }
  return c;
}

TEST(Aggregation, KmeansTopRankProbability) {
  const auto out = kmeans_select(six_groups(1), 6, 42);
  ASSERT_EQ(out.size(), 6u);
  EXPECT_NEAR(out[0].probability, 1.0 / 2.45, 1e-12);
  EXPECT_NEAR(total(out), 1.0, 1e-12);
}

TEST(Aggregation, KmeansOneRepresentativePerGroup) {
  const auto out = kmeans_select(six_groups(2), 6, 7);
  std::vector<int> seen(6, 0);
  for (const auto& t : out) {
    const int g = static_cast<int>(std::lround(t.endpoint().x / 20.0));
    ASSERT_GE(g, 0);
    ASSERT_LT(g, 6);
    ++seen[static_cast<std::size_t>(g)];
  }
  for (int s : seen) EXPECT_EQ(s, 1);
}

TEST(Aggregation, KmeansDeterministic) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  std::vector<Trajectory> c;
  for (int i = 0; i < 18; ++i) c.push_back(ending_at({u(rng), u(rng)}, 1.0 / 18.0));
  const auto a = kmeans_select(c, 6, 99);
  const auto b = kmeans_select(c, 6, 99);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].endpoint(), b[i].endpoint());
    EXPECT_EQ(a[i].probability, b[i].probability);
  }
}

TEST(Aggregation, KmeansFewCandidatesFallsBack) {
  std::vector<Trajectory> c{ending_at({0, 0}, 0.2), ending_at({5, 0}, 0.5), ending_at({9, 0}, 0.3)};
  const auto out = kmeans_select(c, 6, 1);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_NEAR(total(out), 1.0, 1e-12);
  EXPECT_EQ(out[0].endpoint(), (Vec2{5, 0}));
}

TEST(Aggregation, PrivilegedPrior) {
  for (bool left : {true, false}) {
    const Scene s = testing::fork_scene(left);
    const auto seqs = enumerate_sequences(s);
    const auto p = privileged_prior(s, seqs);
    const int star = assign_gt_centerline(s, seqs);
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(p[i], static_cast<int>(i) == star ? 1.0 : 0.0);
  }
  const Scene s = testing::straight_scene();
  EXPECT_EQ(privileged_prior(s, enumerate_sequences(s)), std::vector<double>{1.0});
  Scene no_gt = s;
  no_gt.gt_future.reset();
  EXPECT_THROW(privileged_prior(no_gt, enumerate_sequences(s)), ValidationError);
}

TEST(Aggregation, StraightGreedyGivesSixDistinct) {
  const Scene s = testing::straight_scene(0.0, 10.0);
  ConstantAccelerationPredictor ca;
  // a_t equals one of the fixed accelerations here; use a non-zero one.
  Scene moving = s;
  for (auto& st : moving.agents[0].states) st.accel = 1.0;
  const auto out = aggregate(moving, wrap_frenet(moving, ca, 6), AggregationConfig{});
  ASSERT_EQ(out.trajectories.size(), 6u);
  EXPECT_NEAR(total(out.trajectories), 1.0, 1e-9);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i + 1; j < 6; ++j) {
      EXPECT_GT(distance(out.trajectories[i].endpoint(), out.trajectories[j].endpoint()), 1.0);
    }
  }
}

TEST(Aggregation, ForkAllKeepsTwelve) {
  const Scene s = testing::fork_scene();
  ConstantAccelerationPredictor ca;
  AggregationConfig cfg;
  cfg.strategy = AggregationStrategy::kAll;
  const auto out = aggregate(s, wrap_frenet(s, ca, 6), cfg);
  EXPECT_EQ(out.trajectories.size(), 12u);
  EXPECT_NEAR(total(out.trajectories), 1.0, 1e-9);
}

TEST(Aggregation, ForkGreedyWithScorerKeepsBothBranches) {
  const Scene s = testing::fork_scene();
  ConstantAccelerationPredictor ca;
  const auto params = ScorerParams::initialize(5);
  AggregationConfig cfg;
  cfg.prior_source = PriorSource::kScorer;
  cfg.scorer = &params;
  const auto out = aggregate(s, wrap_frenet(s, ca, 6), cfg);
  ASSERT_EQ(out.trajectories.size(), 6u);
  bool left = false, right = false;
  for (const auto& t : out.trajectories) {
    if (t.endpoint().y > 1.0) left = true;
    if (t.endpoint().y < -1.0) right = true;
  }
  EXPECT_TRUE(left);
  EXPECT_TRUE(right);
}

TEST(Aggregation, ScorerPriorNeedsModel) {
  const Scene s = testing::fork_scene();
  ConstantAccelerationPredictor ca;
  AggregationConfig cfg;
  cfg.prior_source = PriorSource::kScorer;
  EXPECT_THROW(aggregate(s, wrap_frenet(s, ca, 6), cfg), ConfigError);
}

TEST(Aggregation, PrivilegedStrategyUsesGtBranch) {
  const Scene s = testing::fork_scene(false);
  ConstantAccelerationPredictor ca;
  const auto cands = wrap_frenet(s, ca, 6);
  AggregationConfig cfg;
  cfg.strategy = AggregationStrategy::kPrivileged;
  const auto out = aggregate(s, cands, cfg);
  const int star = assign_gt_centerline(s, cands.sequences);
  ASSERT_EQ(out.trajectories.size(), 6u);
  for (const auto& t : out.trajectories) EXPECT_EQ(t.source_centerline, star);
}

TEST(Aggregation, NamesRoundTrip) {
  for (auto st : {AggregationStrategy::kGreedySampling, AggregationStrategy::kLaneScoring, AggregationStrategy::kKmeans,
                  AggregationStrategy::kUniform, AggregationStrategy::kPrivileged, AggregationStrategy::kAll}) {
    EXPECT_EQ(parse_strategy(strategy_name(st)), st);
  }
  EXPECT_EQ(parse_strategy("greedy"), AggregationStrategy::kGreedySampling);
  EXPECT_THROW(parse_strategy("best"), ConfigError);
  for (auto p : {PriorSource::kUniform, PriorSource::kScorer, PriorSource::kPrivileged}) {
    EXPECT_EQ(parse_prior(prior_name(p)), p);
  }
}

}  // namespace
}  // namespace lanewrap
