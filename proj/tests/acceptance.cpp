// Acceptance gate: runs each criterion and prints one PASS/FAIL line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "lanewrap/aggregation.hpp"
#include "lanewrap/centerlines.hpp"
#include "lanewrap/error.hpp"
#include "lanewrap/external_predictor.hpp"
#include "lanewrap/geometry.hpp"
#include "lanewrap/lane_scorer.hpp"
#include "lanewrap/metrics.hpp"
#include "lanewrap/predictors.hpp"
#include "lanewrap/scene_attack.hpp"
#include "lanewrap/synthgen.hpp"
#include "oracle.hpp"
#include "support.hpp"

namespace lanewrap {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += " [failed: " + what + "]";
    }
  }
  void note(const char* fmt, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, a, b, c, d);
    detail += buf;
  }
};

// ---------------------------------------------------------------- geometry

Outcome geometry_oracle() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_s = 0.0, worst_d = 0.0, worst_rt = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const double radius = 10.0 + 490.0 * u(rng);
    const double arc = 20.0 + 60.0 * u(rng);
    const double sweep = (u(rng) < 0.5 ? -1.0 : 1.0) * std::min(arc / radius, 1.5 * kPi);
    const int segs = static_cast<int>(std::ceil(std::abs(sweep) * radius / 0.1));
    const auto v = testing::arc_vertices({100.0 * u(rng), -50.0 * u(rng)}, radius, 2.0 * kPi * u(rng), sweep, segs);
    const auto pl = build_polyline(v);
    const double s = pl.length() * (0.05 + 0.9 * u(rng));
    const double d = (2.0 * u(rng) - 1.0) * 0.5 * kDefaultLaneWidth;
    const Vec2 p = to_cartesian(pl, {s, d}).position;
    const auto proj = project(pl, p);
    const auto ref = testing::dense_projection(v, p);
    worst_s = std::max(worst_s, std::abs(proj.point.s - ref.s));
    worst_d = std::max(worst_d, std::abs(proj.point.d - ref.d));
    worst_rt = std::max(worst_rt, distance(to_cartesian(pl, proj.point).position, p));
  }
  const double secs = seconds_since(t0);
  o.note(" max|ds| %.4f m, max|dd| %.5f m, round trip %.2e m, %.1f s", worst_s, worst_d, worst_rt, secs);
  o.require(worst_s <= 0.01 && worst_d <= 0.01, "oracle within 1 cm");
  o.require(worst_rt <= 1e-6, "round trip within 1e-6");
  o.require(secs < 10.0, "runtime under 10 s");
  return o;
}

Outcome curvature() {
  Outcome o;
  double worst = 0.0;
  for (double r : {5.0, 20.0, 100.0}) {
    for (double sign : {1.0, -1.0}) {
      const int segs = static_cast<int>(std::ceil(1.8 * kPi * r / 0.5));
      const auto v = testing::arc_vertices({3.0, -7.0}, r, 0.4, sign * 1.8 * kPi, segs);
      const auto pl = build_polyline(v);
      for (double s = 0.0; s <= pl.length(); s += 0.37) {
        worst = std::max(worst, std::abs(pl.curvature_at(s) - sign / r));
      }
    }
  }
  double straight = 0.0;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 50; ++n) {
    const double a = 2.0 * kPi * u(rng);
    const Vec2 dir{std::cos(a), std::sin(a)};
    std::vector<Vec2> v;
    double t = 0.0;
    for (int k = 0; k < 40; ++k) {
      v.push_back(Vec2{10.0, 20.0} + t * dir);
      t += 0.5 + 2.0 * u(rng);
    }
    const auto pl = build_polyline(v);
    for (double s = 0.0; s <= pl.length(); s += 0.7) straight = std::max(straight, std::abs(pl.curvature_at(s)));
  }
  o.note(" circle max error %.2e, straight max |kappa| %.2e", worst, straight);
  o.require(worst <= 1e-3, "circles within 1e-3");
  o.require(straight <= 1e-9, "straight within 1e-9");
  return o;
}

// ------------------------------------------------------- prediction suite

std::vector<double> metric_vector(const MetricRow& r) {
  return {r.min_ade, r.min_fde, r.orp, static_cast<double>(r.mr1), r.mied};
}
const bool kHigherIsWorse[] = {true, true, true, true, false, true, true, true, true, false};

PredictionSet run_ca(const Scene& s, Predictor& ca) {
  PredictionSet p;
  p.scene_id = s.scene_id;
  p.trajectories = predict_cartesian(s, ca, kCaModes);
  return p;
}

PredictionSet run_ca_sd(const Scene& s, Predictor& ca) {
  AggregationConfig cfg;
  return aggregate(s, wrap_frenet(s, ca, kCaModes), cfg);
}

struct Means {
  double ca_orp = 0.0, ca_ade = 0.0, sd_orp = 0.0, sd_ade = 0.0;
};

struct SuiteResults {
  Means unperturbed;
  std::map<std::string, Means> attacked;
  double attack_seconds = 0.0;
  std::size_t perturbed = 0;
  std::size_t infeasible = 0;
  std::size_t onset_failures = 0;
  std::size_t onset_checked = 0;
  double worst_accel = 0.0;
};

SuiteResults run_suite() {
  SuiteResults r;
  CorpusSpec spec;
  spec.mixture = parse_mixture("curve=0.5,fork=0.5");
  spec.count = 500;
  spec.seed = 7;
  const auto corpus = generate_corpus(spec);
  ConstantAccelerationPredictor ca;
  const double a_lat = 0.7 * kGravity;

  for (const auto& g : corpus) {
    const auto a = evaluate_scene(g.scene, run_ca(g.scene, ca));
    const auto b = evaluate_scene(g.scene, run_ca_sd(g.scene, ca));
    r.unperturbed.ca_orp += a.orp;
    r.unperturbed.ca_ade += a.min_ade;
    r.unperturbed.sd_orp += b.orp;
    r.unperturbed.sd_ade += b.min_ade;
  }
  const double n = static_cast<double>(corpus.size());
  r.unperturbed = {r.unperturbed.ca_orp / n, r.unperturbed.ca_ade / n, r.unperturbed.sd_orp / n,
                   r.unperturbed.sd_ade / n};

  const auto t0 = Clock::now();
  for (auto family : {AttackFamily::kSmooth, AttackFamily::kDouble, AttackFamily::kRipple}) {
    AttackSpec attack;
    attack.family = family;
    Means m;
    for (const auto& g : corpus) {
      const AttackEvaluator eval = [&](const PerturbedScene& p) {
        ++r.perturbed;
        const double accel = p.max_lateral_accel();
        r.worst_accel = std::max(r.worst_accel, accel);
        if (accel > a_lat + 1e-6) ++r.infeasible;
        const auto check = check_onset_invariance(g.scene, p);
        r.onset_checked += check.checked;
        if (check.violations > 0) ++r.onset_failures;
        auto v = metric_vector(evaluate_scene(p.scene, run_ca(p.scene, ca)));
        const auto w = metric_vector(evaluate_scene(p.scene, run_ca_sd(p.scene, ca)));
        v.insert(v.end(), w.begin(), w.end());
        return v;
      };
      const auto res = worst_of_directions(g.scene, attack, eval, kHigherIsWorse);
      m.ca_ade += res.worst[0];
      m.ca_orp += res.worst[2];
      m.sd_ade += res.worst[5];
      m.sd_orp += res.worst[7];
    }
    r.attacked[family_name(family)] = {m.ca_orp / n, m.ca_ade / n, m.sd_orp / n, m.sd_ade / n};
  }
  r.attack_seconds = seconds_since(t0);
  return r;
}

Outcome attacked_contrast(const SuiteResults& r) {
  Outcome o;
  for (const auto& [name, m] : r.attacked) {
    o.detail += " " + name + ":";
    o.note(" CA ORP %.1f%% minADE %.3f / CA-SD ORP %.1f%% minADE %.3f;", 100.0 * m.ca_orp, m.ca_ade,
           100.0 * m.sd_orp, m.sd_ade);
    o.require(m.ca_orp > 0.30, name + " CA ORP > 30%");
    o.require(m.sd_orp < 0.02, name + " CA-SD ORP < 2%");
    o.require(m.ca_orp >= 15.0 * m.sd_orp, name + " ORP ratio >= 15x");
    o.require(m.sd_ade < m.ca_ade, name + " CA-SD minADE < CA minADE");
  }
  o.note(" %.1f s", r.attack_seconds);
  o.require(r.attack_seconds < 120.0, "runtime under 2 min");
  return o;
}

Outcome unperturbed_contrast(const SuiteResults& r) {
  Outcome o;
  const auto& m = r.unperturbed;
  o.note(" CA ORP %.1f%% minADE %.3f / CA-SD ORP %.1f%% minADE %.3f", 100.0 * m.ca_orp, m.ca_ade, 100.0 * m.sd_orp,
         m.sd_ade);
  o.require(m.sd_orp < 0.01, "CA-SD ORP < 1%");
  o.require(m.sd_ade < m.ca_ade, "CA-SD minADE < CA minADE");
  return o;
}

Outcome feasibility(const SuiteResults& r) {
  Outcome o;
  o.note(" %.0f perturbed scenes, max v^2 kappa %.4f m/s^2, %.0f infeasible, %.0f onset failures",
         static_cast<double>(r.perturbed), r.worst_accel, static_cast<double>(r.infeasible),
         static_cast<double>(r.onset_failures));
  o.require(r.perturbed == 3000, "3000 perturbed scenes");
  o.require(r.infeasible == 0, "lateral acceleration bound");
  o.require(r.onset_failures == 0 && r.onset_checked > 0, "onset invariance on every scene");
  return o;
}

// ------------------------------------------------------------- aggregation

Outcome aggregation_properties() {
  Outcome o;
  CorpusSpec spec;
  spec.mixture = parse_mixture("fork=0.7,curve=0.3");
  spec.count = 200;
  spec.seed = 11;
  ConstantAccelerationPredictor ca;
  double min_gap = std::numeric_limits<double>::infinity();
  double worst_sum = 0.0, worst_top = 0.0;
  std::size_t privileged_bad = 0, kmeans_full = 0;
  const double h6 = 1.0 / harmonic_number(6);
  for (const auto& g : generate_corpus(spec)) {
    const auto cands = wrap_frenet(g.scene, ca, kCaModes);
    AggregationConfig cfg;
    for (auto strat : {AggregationStrategy::kGreedySampling, AggregationStrategy::kKmeans}) {
      cfg.strategy = strat;
      const auto out = aggregate(g.scene, cands, cfg);
      double sum = 0.0;
      for (const auto& t : out.trajectories) sum += t.probability;
      worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
      if (strat == AggregationStrategy::kGreedySampling) {
        const auto& ts = out.trajectories;
        for (std::size_t i = 0; i < ts.size(); ++i) {
          for (std::size_t j = i + 1; j < ts.size(); ++j) {
            if (ts[i].refilled || ts[j].refilled) continue;
            min_gap = std::min(min_gap, distance(ts[i].endpoint(), ts[j].endpoint()));
          }
        }
      } else if (out.trajectories.size() == 6) {
        ++kmeans_full;
        worst_top = std::max(worst_top, std::abs(out.trajectories.front().probability - h6));
      }
    }
    const auto prior = privileged_prior(g.scene, cands.sequences);
    const auto gt = static_cast<std::size_t>(assign_gt_centerline(g.scene, cands.sequences));
    if (prior[gt] != 1.0) ++privileged_bad;
  }
  o.note(" min greedy gap %.3f m, max |sum-1| %.1e, 1/H6 %.4f, max top-rank error %.1e", min_gap, worst_sum, h6,
         worst_top);
  o.require(min_gap > 1.0, "greedy endpoints > 1 m apart");
  o.require(worst_sum <= 1e-6, "probabilities sum to 1");
  o.require(kmeans_full > 0 && worst_top <= 1e-12 && std::abs(h6 - 0.4082) < 1e-4, "k-means top rank 1/H6");
  o.require(privileged_bad == 0, "privileged prior one-hot on gt");
  return o;
}

Outcome diversity() {
  Outcome o;
  CorpusSpec spec;
  spec.mixture = parse_mixture("fork=1");
  spec.count = 300;
  spec.seed = 5;
  ConstantAccelerationPredictor ca;
  double all = 0.0, single = 0.0;
  const auto corpus = generate_corpus(spec);
  for (const auto& g : corpus) {
    const auto cands = wrap_frenet(g.scene, ca, kCaModes);
    AggregationConfig cfg;
    cfg.strategy = AggregationStrategy::kAll;
    cfg.k_hat = 0;
    all += mied(aggregate(g.scene, cands, cfg));
    cfg.strategy = AggregationStrategy::kPrivileged;
    cfg.k_hat = kCaModes;
    single += mied(aggregate(g.scene, cands, cfg));
  }
  const double n = static_cast<double>(corpus.size());
  const double ratio = all / single;
  o.note(" MIED all-candidates %.3f m vs single-centerline %.3f m (+%.1f%%)", all / n, single / n,
         100.0 * (ratio - 1.0));
  o.require(ratio >= 1.10, "MIED increase >= 10%");
  return o;
}

// ------------------------------------------------------------- lane scorer

std::vector<ScorerSample> fork_samples(const CorpusSpec& spec) {
  std::vector<ScorerSample> out;
  for (const auto& g : generate_corpus(spec)) {
    const auto seqs = enumerate_sequences(g.scene);
    if (seqs.size() < 2) continue;
    out.push_back(make_scorer_sample(g.scene, seqs, assign_gt_centerline(g.scene, seqs)));
  }
  return out;
}

double gradient_error(const std::vector<ScorerSample>& samples) {
  std::vector<const ScorerSample*> batch;
  for (std::size_t i = 0; i < 8 && i < samples.size(); ++i) batch.push_back(&samples[i]);
  ScorerParams params = ScorerParams::initialize(2);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd(0.0, 0.1);
  for (auto* blk : params.blocks()) {
    if (blk->cols() == 1) {
      for (Eigen::Index i = 0; i < blk->size(); ++i) blk->data()[i] = nd(rng);
    }
  }
  ScorerParams grad = params.zeros_like();
  scorer_loss(params, batch, &grad);
  const auto gblocks = std::as_const(grad).blocks();
  auto blocks = params.blocks();
  double worst = 0.0;
  for (std::size_t b = 0; b < ScorerParams::kBlocks; ++b) {
    Eigen::MatrixXd& m = *blocks[b];
    std::uniform_int_distribution<Eigen::Index> pick(0, m.size() - 1);
    double diff2 = 0.0, ref2 = 0.0;
    for (int k = 0; k < 25; ++k) {
      const Eigen::Index i = pick(rng);
      const double orig = m.data()[i];
      m.data()[i] = orig + 1e-5;
      const double up = scorer_loss(params, batch);
      m.data()[i] = orig - 1e-5;
      const double down = scorer_loss(params, batch);
      m.data()[i] = orig;
      const double numeric = (up - down) / 2e-5;
      const double analytic = gblocks[b]->data()[i];
      diff2 += (numeric - analytic) * (numeric - analytic);
      ref2 += std::max(numeric * numeric, analytic * analytic);
    }
    // A zero true gradient (the output bias) only admits an absolute check.
    worst = std::max(worst, ref2 < 1e-16 ? (std::sqrt(diff2) < 1e-8 ? 0.0 : 1.0) : std::sqrt(diff2 / ref2));
  }
  return worst;
}

Outcome lane_scorer() {
  Outcome o;
  const auto t0 = Clock::now();
  CorpusSpec spec;
  spec.mixture = parse_mixture("fork=1");
  spec.count = 5000;
  spec.seed = 3;
  const auto samples = fork_samples(spec);

  const double grad_err = gradient_error(samples);

  ScorerTrainConfig mem;
  mem.epochs = 200;
  mem.batch_size = 1;
  mem.max_steps = 200;
  mem.learning_rate = 1e-3;
  mem.optimizer = ScorerOptimizer::kAdam;
  mem.seed = 3;
  const std::vector<ScorerSample> one{samples.front()};
  const ScorerSample* one_ptr = &one.front();
  const double mem_loss =
      scorer_loss(train_scorer(one, mem), std::span<const ScorerSample* const>(&one_ptr, 1));

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(spec.seed);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_hold = samples.size() / 10;
  std::vector<ScorerSample> train;
  std::vector<const ScorerSample*> hold;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k < n_hold) {
      hold.push_back(&samples[order[k]]);
    } else {
      train.push_back(samples[order[k]]);
    }
  }
  ScorerTrainConfig cfg;
  cfg.epochs = 10;
  cfg.learning_rate = 1e-4;
  cfg.batch_size = 128;
  cfg.optimizer = ScorerOptimizer::kAdam;
  cfg.seed = spec.seed;
  const auto params = train_scorer(train, cfg);
  std::size_t hits = 0;
  for (const auto* s : hold) {
    Eigen::Index best = 0;
    scorer_logits(params, s->rows).maxCoeff(&best);
    if (best == s->label) ++hits;
  }
  const double acc = static_cast<double>(hits) / static_cast<double>(hold.size());
  const double secs = seconds_since(t0);
  o.note(" gradient rel. error %.1e, memorization CE %.4f, holdout accuracy %.1f%%, %.0f s", grad_err, mem_loss,
         100.0 * acc, secs);
  o.require(grad_err < 1e-4, "gradient check");
  o.require(mem_loss < 0.01, "memorization in 200 steps");
  o.require(acc > 0.90, "holdout accuracy > 90%");
  o.require(secs < 300.0, "runtime under 5 min");
  return o;
}

// ----------------------------------------------------------------- metrics

Trajectory point_traj(Vec2 p, double prob) {
  Trajectory t;
  t.waypoints = {p};
  t.probability = prob;
  return t;
}

Outcome metric_units() {
  Outcome o;
  const std::vector<Lane> lanes{testing::straight_lane("lane_0", {0.0, 0.0}, {100.0, 0.0})};
  std::vector<Vec2> gt;
  for (int i = 1; i <= 30; ++i) gt.push_back({10.0 + i, 0.0});
  auto shifted = [&](double dy, double prob) { return testing::constant_trajectory(gt, {0.0, dy}, prob); };
  int checks = 0;
  auto expect = [&](bool ok, const std::string& what) {
    ++checks;
    o.require(ok, what);
  };
  Trajectory past;
  for (int i = 1; i <= 30; ++i) past.waypoints.push_back({75.0 + i, 0.0});
  expect(!off_road(point_traj({50.0, 0.0}, 1.0), lanes), "centred on-road");
  expect(off_road(point_traj({50.0, 2.0}, 1.0), lanes), "d = 2 off-road");
  expect(off_road(past, lanes), "past the map end off-road");
  expect(orp({"s", {shifted(0.0, 0.5), shifted(1.0, 0.5)}}, lanes) == 0.0, "ORP 0");
  expect(std::abs(orp({"s", {shifted(0.0, 0.7), shifted(5.0, 0.3)}}, lanes) - 0.3) <= 1e-9, "ORP 0.3");
  expect(std::abs(orp({"s", {shifted(5.0, 0.5), shifted(-5.0, 0.5)}}, lanes) - 1.0) <= 1e-9, "ORP 1");
  bool threw = false;
  try {
    orp({"s", {shifted(0.0, 0.5), shifted(0.0, 0.4)}}, lanes);
  } catch (const NormalizationError&) {
    threw = true;
  }
  expect(threw, "unnormalized ORP rejected");
  const PredictionSet exact{"s", {shifted(0.0, 1.0)}};
  expect(min_ade(exact, gt) == 0.0 && min_fde(exact, gt) == 0.0, "ADE/FDE 0");
  const PredictionSet one{"s", {shifted(1.0, 1.0)}};
  expect(std::abs(min_ade(one, gt) - 1.0) <= 1e-9 && std::abs(min_fde(one, gt) - 1.0) <= 1e-9, "ADE/FDE 1");
  const PredictionSet two{"s", {shifted(3.0, 0.5), shifted(1.0, 0.5)}};
  expect(std::abs(min_ade(two, gt) - 1.0) <= 1e-9, "min rule");
  expect(mr1({"s", {shifted(2.5, 1.0)}}, gt) == 1, "MR1 2.5 m");
  expect(mr1({"s", {shifted(10.0, 0.4), shifted(1.9, 0.6)}}, gt) == 0, "MR1 top only");
  expect(mr1({"s", {shifted(2.0, 1.0)}}, gt) == 0, "MR1 strict boundary");
  expect(std::abs(mied({"s", {point_traj({0.0, 0.0}, 0.5), point_traj({2.0, 0.0}, 0.5)}}) - 1.0) <= 1e-9,
         "MIED 1");
  expect(mied({"s", {point_traj({4.0, 1.0}, 1.0)}}) == 0.0, "MIED single");
  const double tri = mied({"s",
                           {point_traj({0.0, 0.0}, 0.3), point_traj({2.0, 0.0}, 0.3),
                            point_traj({1.0, std::sqrt(3.0)}, 0.4)}});
  expect(std::abs(tri - 2.0 / std::sqrt(3.0)) <= 1e-9, "MIED triangle");
  o.note(" %.0f fixtures, triangle MIED %.10f", checks, tri);
  return o;
}

// ---------------------------------------------------------------- protocol

std::string echo_command(const std::string& fault = "none") {
  return std::string("\"") + LANEWRAP_ECHO_PREDICTOR + "\" --fault " + fault;
}

bool throws_protocol(const std::function<void()>& fn, const std::string& needle) {
  try {
    fn();
  } catch (const ProtocolError& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  }
  return false;
}

Outcome protocol() {
  Outcome o;
  CorpusSpec spec;
  spec.mixture = parse_mixture("fork=0.4,curve=0.3,s_curve=0.1,straight=0.1,crossing=0.1");
  spec.count = 20;
  spec.seed = 13;
  ExternalPredictor ext(echo_command());
  ConstantAccelerationPredictor ca;
  double worst = 0.0;
  for (const auto& g : generate_corpus(spec)) {
    const auto a = wrap_frenet(g.scene, ext, kCaModes);
    const auto b = wrap_frenet(g.scene, ca, kCaModes);
    if (a.candidates.size() != b.candidates.size()) {
      worst = std::numeric_limits<double>::infinity();
      break;
    }
    for (std::size_t m = 0; m < a.candidates.size(); ++m) {
      worst = std::max(worst, std::abs(a.candidates[m].probability - b.candidates[m].probability));
      for (std::size_t i = 0; i < a.candidates[m].waypoints.size(); ++i) {
        worst = std::max(worst, distance(a.candidates[m].waypoints[i], b.candidates[m].waypoints[i]));
      }
    }
    const auto c = predict_cartesian(g.scene, ext, kCaModes);
    const auto d = predict_cartesian(g.scene, ca, kCaModes);
    for (std::size_t m = 0; m < c.size(); ++m) {
      for (std::size_t i = 0; i < c[m].waypoints.size(); ++i) {
        worst = std::max(worst, distance(c[m].waypoints[i], d[m].waypoints[i]));
      }
    }
  }
  o.note(" loopback max deviation %.1e", worst);
  o.require(worst <= 1e-9, "loopback within 1e-9");

  const Scene s = testing::fork_scene();
  const bool shape = throws_protocol(
      [&] {
        ExternalPredictor p(echo_command("short"));
        wrap_frenet(s, p, kCaModes);
      },
      "shape");
  const bool norm = throws_protocol(
      [&] {
        ExternalPredictor p(echo_command("badprob"));
        wrap_frenet(s, p, kCaModes);
      },
      "frame_index 0");
  const bool garbage = throws_protocol(
      [&] {
        ExternalPredictor p(echo_command("garbage"));
        wrap_frenet(s, p, kCaModes);
      },
      "");
  const bool handshake = throws_protocol([&] { ExternalPredictor p(echo_command("nohandshake")); }, "handshake");
  const bool closed = throws_protocol(
      [&] {
        ExternalPredictor p(echo_command("exit"));
        wrap_frenet(s, p, kCaModes);
      },
      "");
  o.require(shape, "short response -> shape error");
  o.require(norm, "bad probabilities -> normalization error naming the frame");
  o.require(garbage, "malformed line -> protocol error");
  o.require(handshake, "missing handshake -> protocol error");
  o.require(closed, "early exit -> protocol error");
  o.note(", %.0f/5 fault cases rejected", static_cast<double>(shape + norm + garbage + handshake + closed));
  return o;
}

}  // namespace
}  // namespace lanewrap

int main() {
  using namespace lanewrap;
  bool all = true;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string(" exception: ") + e.what();
    }
    all = all && o.pass;
    std::printf("criterion %2d %-28s %s:%s\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "(geometry oracle)", geometry_oracle);
  report(2, "(curvature)", curvature);
  SuiteResults suite;
  bool suite_ok = true;
  std::string suite_error;
  try {
    suite = run_suite();
  } catch (const std::exception& e) {
    suite_ok = false;
    suite_error = e.what();
  }
  auto from_suite = [&](Outcome (*fn)(const SuiteResults&)) {
    return [&, fn] {
      if (!suite_ok) throw std::runtime_error(suite_error);
      return fn(suite);
    };
  };
  report(3, "(attacked CA vs CA-SD)", from_suite(attacked_contrast));
  report(4, "(unperturbed CA vs CA-SD)", from_suite(unperturbed_contrast));
  report(5, "(feasibility and onset)", from_suite(feasibility));
  report(6, "(aggregation)", aggregation_properties);
  report(7, "(diversity)", diversity);
  report(8, "(lane scorer)", lane_scorer);
  report(9, "(metric units)", metric_units);
  report(10, "(protocol conformance)", protocol);
  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return all ? 0 : 1;
}
