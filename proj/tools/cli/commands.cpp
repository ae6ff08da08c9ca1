#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lanewrap/aggregation.hpp"
#include "lanewrap/centerlines.hpp"
#include "lanewrap/error.hpp"
#include "lanewrap/external_predictor.hpp"
#include "lanewrap/frenet_scene.hpp"
#include "lanewrap/lane_scorer.hpp"
#include "lanewrap/metrics.hpp"
#include "lanewrap/predictors.hpp"
#include "lanewrap/scene_attack.hpp"
#include "lanewrap/scene_io.hpp"
#include "lanewrap/svg.hpp"
#include "lanewrap/synthgen.hpp"
#include "parallel.hpp"

namespace lanewrap::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Common {
  std::uint64_t seed = 0;
  int jobs = 1;
};

std::vector<fs::path> list_json(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".json") continue;
    if (e.path().filename() == "manifest.json") continue;
    out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<fs::path> scene_inputs(const fs::path& p) {
  if (fs::is_regular_file(p)) return {p};
  return list_json(p);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw IoError("write failed for '" + path.string() + "'");
}

ordered_json read_json(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read '" + path.string() + "'");
  try {
    return ordered_json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

ordered_json manifest_header(const std::string& command, const CLI::App& root, const Common& common) {
  ordered_json m;
  m["tool"] = "lanewrap";
  m["version"] = kVersion;
  m["command"] = command;
  m["seed"] = common.seed;
  m["jobs"] = common.jobs;
  m["config"] = root.config_to_str(true, false);
  return m;
}

void write_manifest(const fs::path& dir, const ordered_json& m) { write_text(dir / "manifest.json", m.dump(2) + "\n"); }

// Collects per-scene failures from worker threads.
class Failures {
 public:
  void add(const std::string& id, const std::string& what) {
    std::lock_guard<std::mutex> lock(mu_);
    items_.emplace_back(id, what);
  }
  bool empty() const { return items_.empty(); }
  int report(std::ostream& err) {
    std::sort(items_.begin(), items_.end());
    for (const auto& [id, what] : items_) err << "error: " << id << ": " << what << "\n";
    if (!items_.empty()) err << items_.size() << " scene(s) failed\n";
    return items_.empty() ? 0 : 1;
  }
  std::size_t size() const { return items_.size(); }

 private:
  std::mutex mu_;
  std::vector<std::pair<std::string, std::string>> items_;
};

// ---------------------------------------------------------------- generate

struct GenerateOpts {
  std::string mix = "fork=0.4,curve=0.3,s_curve=0.1,straight=0.1,crossing=0.1";
  int n = 100;
  std::string out;
  double noise = 0.05;
  std::optional<double> speed;
  std::optional<double> radius;
  std::optional<double> fork_angle;
  std::optional<std::string> curve_variant;
};

int cmd_generate(const GenerateOpts& o, const Common& c, const CLI::App& root, std::ostream& out,
                 std::ostream& err) {
  CorpusSpec spec;
  spec.mixture = parse_mixture(o.mix);
  spec.count = o.n;
  spec.seed = c.seed;
  spec.params.noise = o.noise;
  spec.params.speed = o.speed;
  spec.params.radius = o.radius;
  spec.params.fork_angle_deg = o.fork_angle;
  spec.params.curve_variant = o.curve_variant;
  spec.params.validate();

  const auto topologies = corpus_topologies(spec);
  std::vector<GeneratedScene> scenes(topologies.size());
  Failures failures;
  parallel_for(topologies.size(), c.jobs, [&](std::size_t i, std::size_t) {
    try {
      scenes[i] = generate(topologies[i], derive_seed(spec.seed, i), spec.params);
      char idx[16];
      std::snprintf(idx, sizeof(idx), "%05zu", i);
      scenes[i].scene.scene_id = topology_name(topologies[i]) + "_" + idx;
    } catch (const Error& e) {
      failures.add("#" + std::to_string(i), e.what());
    }
  });
  if (!failures.empty()) return failures.report(err);

  const fs::path dir(o.out);
  write_corpus(spec, scenes, dir);
  auto manifest = read_json(dir / "manifest.json");
  ordered_json m = manifest_header("generate", root, c);
  for (auto it = manifest.begin(); it != manifest.end(); ++it) m[it.key()] = it.value();
  write_manifest(dir, m);
  out << "wrote " << scenes.size() << " scenes to " << dir.string() << "\n";
  return 0;
}

// ----------------------------------------------------------------- perturb

struct PerturbOpts {
  std::string attack;
  std::string direction = "both";
  double b = 15.0;
  std::optional<double> amplitude;
  std::optional<double> wavelength;
  std::optional<double> u_sat;
  int self_check = 10;
  std::string in;
  std::string out;
};

ordered_json spec_json(const AttackSpec& s) {
  ordered_json j;
  j["family"] = family_name(s.family);
  j["b"] = s.b;
  switch (s.family) {
    case AttackFamily::kSmooth:
      j["c"] = s.smooth_c;
      j["u_sat"] = s.smooth_u_sat;
      break;
    case AttackFamily::kDouble:
      j["amplitude"] = s.double_amplitude;
      j["wavelength"] = s.double_wavelength;
      break;
    case AttackFamily::kRipple:
      j["amplitude"] = s.ripple_amplitude;
      j["wavelength"] = s.ripple_wavelength;
      break;
  }
  j["g"] = s.g;
  j["a_lat_max_fraction"] = s.a_lat_max_fraction;
  return j;
}

int cmd_perturb(const PerturbOpts& o, const Common& c, const CLI::App& root, std::ostream& out, std::ostream& err) {
  AttackSpec base;
  base.family = parse_family(o.attack);
  base.b = o.b;
  if (o.amplitude) base.set_amplitude(*o.amplitude);
  if (o.wavelength) {
    base.double_wavelength = *o.wavelength;
    base.ripple_wavelength = *o.wavelength;
  }
  if (o.u_sat) base.smooth_u_sat = *o.u_sat;
  base.validate();

  std::vector<AttackDirection> dirs;
  if (o.direction == "both") {
    dirs = {AttackDirection::kLeft, AttackDirection::kRight};
  } else {
    dirs = {parse_direction(o.direction)};
  }

  const auto files = list_json(o.in);
  const fs::path dir(o.out);
  ensure_dir(dir);

  struct Item {
    std::string source;
    std::string id;
    std::string direction;
    double speed_scale = 1.0;
    double kappa_max = 0.0;
    double max_lat = 0.0;
  };
  std::vector<std::vector<Item>> items(files.size());
  std::vector<Scene> originals(files.size());
  Failures failures;
  parallel_for(files.size(), c.jobs, [&](std::size_t i, std::size_t) {
    try {
      originals[i] = load_scene(files[i]);
      for (auto d : dirs) {
        AttackSpec spec = base;
        spec.direction = d;
        PerturbedScene p = apply_attack(originals[i], spec);
        Item it;
        it.source = originals[i].scene_id;
        it.direction = direction_name(d);
        it.id = originals[i].scene_id + "__" + family_name(spec.family) + "_" + it.direction;
        it.speed_scale = p.speed_scale;
        it.kappa_max = p.kappa_max;
        it.max_lat = p.max_lateral_accel();
        p.scene.scene_id = it.id;
        save_scene(p.scene, dir / (it.id + ".json"));
        items[i].push_back(std::move(it));
      }
    } catch (const Error& e) {
      failures.add(files[i].filename().string(), e.what());
    }
  });
  if (!failures.empty()) return failures.report(err);

  // Re-run a seeded sample of scenes and confirm the onset region is untouched.
  std::vector<std::size_t> sample(files.size());
  std::iota(sample.begin(), sample.end(), 0);
  std::mt19937_64 rng(c.seed);
  std::shuffle(sample.begin(), sample.end(), rng);
  sample.resize(std::min<std::size_t>(sample.size(), static_cast<std::size_t>(std::max(0, o.self_check))));
  std::size_t checked = 0;
  for (std::size_t i : sample) {
    for (auto d : dirs) {
      AttackSpec spec = base;
      spec.direction = d;
      const Scene reloaded = load_scene(dir / (originals[i].scene_id + "__" + family_name(spec.family) + "_" +
                                               direction_name(d) + ".json"));
      PerturbedScene p = apply_attack(originals[i], spec);
      p.scene = reloaded;
      p.scene.scene_id = originals[i].scene_id;
      const auto check = check_onset_invariance(originals[i], p);
      if (check.violations > 0) {
        err << "error: onset invariance violated in " << reloaded.scene_id << " (" << check.violations
            << " points)\n";
        return 1;
      }
      ++checked;
    }
  }

  ordered_json m = manifest_header("perturb", root, c);
  m["kind"] = "perturb";
  m["attack"] = spec_json(base);
  m["source"] = fs::path(o.in).string();
  m["onset_self_check_files"] = checked;
  auto entries = ordered_json::array();
  for (const auto& group : items) {
    for (const auto& it : group) {
      ordered_json e;
      e["scene_id"] = it.id;
      e["file"] = it.id + ".json";
      e["source_scene_id"] = it.source;
      e["attack"] = o.attack;
      e["direction"] = it.direction;
      e["speed_scale"] = it.speed_scale;
      e["kappa_max"] = it.kappa_max;
      e["max_lateral_accel"] = it.max_lat;
      entries.push_back(std::move(e));
    }
  }
  m["scenes"] = std::move(entries);
  write_manifest(dir, m);
  out << "wrote " << files.size() * dirs.size() << " perturbed scenes to " << dir.string() << "\n";
  return 0;
}

// ----------------------------------------------------------------- predict

struct PredictOpts {
  std::string model = "ca-sd";
  std::string agg = "greedy_sampling";
  std::string khat = "6";
  double nms_radius = 1.0;
  std::string prior = "uniform";
  std::string scorer;
  int k = 6;
  std::string frame = "frenet";
  double timeout = 30.0;
  std::string in;
  std::string out;
};

int cmd_predict(const PredictOpts& o, const Common& c, const CLI::App& root, std::ostream& out, std::ostream& err) {
  const bool external = o.model.rfind("external:", 0) == 0;
  if (!external && o.model != "ca" && o.model != "ca-sd") throw ConfigError("unknown model '" + o.model + "'");
  const std::string command = external ? o.model.substr(9) : "";
  if (external && command.empty()) throw ConfigError("external model needs a command after 'external:'");
  if (o.frame != "frenet" && o.frame != "cartesian") throw ConfigError("--frame must be frenet or cartesian");
  const bool cartesian = o.model == "ca" || (external && o.frame == "cartesian");

  AggregationConfig agg;
  agg.strategy = parse_strategy(o.agg);
  agg.prior_source = parse_prior(o.prior);
  agg.nms_radius = o.nms_radius;
  agg.seed = c.seed;
  if (o.khat == "all") {
    agg.k_hat = 0;
  } else {
    try {
      agg.k_hat = std::stoi(o.khat);
    } catch (const std::exception&) {
      throw ConfigError("--khat must be an integer or 'all'");
    }
    if (agg.k_hat < 1) throw ConfigError("--khat must be >= 1");
  }
  ScorerParams scorer;
  if (agg.prior_source == PriorSource::kScorer) {
    if (o.scorer.empty()) throw ConfigError("--prior scorer needs --scorer <model file>");
    scorer = load_scorer(o.scorer);
    agg.scorer = &scorer;
  } else if (!o.scorer.empty()) {
    scorer = load_scorer(o.scorer);
    agg.scorer = &scorer;
    agg.prior_source = PriorSource::kScorer;
  }

  const auto files = list_json(o.in);
  const fs::path dir(o.out);
  ensure_dir(dir);

  const auto workers = static_cast<std::size_t>(resolve_jobs(c.jobs));
  std::vector<std::unique_ptr<Predictor>> predictors(workers);
  const auto timeout = std::chrono::milliseconds(static_cast<long long>(o.timeout * 1000.0));
  std::vector<std::string> ids(files.size());
  Failures failures;
  parallel_for(files.size(), c.jobs, [&](std::size_t i, std::size_t w) {
    try {
      const Scene scene = load_scene(files[i]);
      ids[i] = scene.scene_id;
      if (!predictors[w]) {
        if (external) {
          predictors[w] = std::make_unique<ExternalPredictor>(command, timeout);
        } else {
          predictors[w] = std::make_unique<ConstantAccelerationPredictor>();
        }
      }
      PredictionSet ps;
      ps.scene_id = scene.scene_id;
      if (cartesian) {
        ps.trajectories = predict_cartesian(scene, *predictors[w], o.k);
      } else {
        const CandidateSet cands = wrap_frenet(scene, *predictors[w], o.k);
        ps = aggregate(scene, cands, agg);
      }
      save_predictions(ps, dir / (scene.scene_id + ".json"));
    } catch (const ProtocolError& e) {
      std::string msg = e.what();
      if (!e.child_stderr().empty()) msg += "\n--- predictor stderr ---\n" + e.child_stderr();
      failures.add(files[i].filename().string(), msg);
      predictors[w].reset();
    } catch (const Error& e) {
      failures.add(files[i].filename().string(), e.what());
    }
  });

  ordered_json m = manifest_header("predict", root, c);
  m["model"] = o.model;
  m["frame"] = cartesian ? "cartesian" : "frenet";
  m["k"] = o.k;
  if (!cartesian) {
    m["aggregation"] = {{"strategy", strategy_name(agg.strategy)},
                        {"k_hat", o.khat},
                        {"nms_radius", agg.nms_radius},
                        {"prior", prior_name(agg.prior_source)},
                        {"scorer", o.scorer}};
  }
  m["scenes"] = static_cast<std::uint64_t>(files.size() - failures.size());
  write_manifest(dir, m);
  if (!failures.empty()) return failures.report(err);
  out << "wrote predictions for " << files.size() << " scenes to " << dir.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOpts {
  std::string scenes;
  std::string preds;
  std::string out;
};

int cmd_evaluate(const EvaluateOpts& o, const Common& c, const CLI::App& root, std::ostream& out,
                 std::ostream& err) {
  const auto scene_files = list_json(o.scenes);
  const auto pred_files = list_json(o.preds);
  std::map<std::string, fs::path> pred_by_id;
  for (const auto& p : pred_files) pred_by_id[p.stem().string()] = p;

  std::vector<Scene> scenes(scene_files.size());
  std::vector<MetricRow> rows(scene_files.size());
  Failures failures;
  std::vector<std::string> missing;
  std::mutex mu;
  parallel_for(scene_files.size(), c.jobs, [&](std::size_t i, std::size_t) {
    try {
      scenes[i] = load_scene(scene_files[i]);
      const auto it = pred_by_id.find(scenes[i].scene_id);
      if (it == pred_by_id.end()) {
        std::lock_guard<std::mutex> lock(mu);
        missing.push_back(scenes[i].scene_id);
        return;
      }
      const PredictionSet ps = load_predictions(it->second);
      rows[i] = evaluate_scene(scenes[i], ps);
    } catch (const Error& e) {
      failures.add(scene_files[i].filename().string(), e.what());
    }
  });
  std::set<std::string> scene_ids;
  for (const auto& s : scenes) scene_ids.insert(s.scene_id);
  for (const auto& [id, path] : pred_by_id) {
    if (!scene_ids.count(id)) failures.add(id, "prediction has no matching scene");
  }
  std::sort(missing.begin(), missing.end());
  for (const auto& id : missing) failures.add(id, "scene has no matching prediction");
  if (!failures.empty()) {
    err << "error: join between scenes and predictions failed\n";
    return failures.report(err);
  }

  MetricReport report;
  std::vector<MetricRow> direction_rows;
  const fs::path manifest_path = fs::path(o.scenes) / "manifest.json";
  std::optional<ordered_json> perturb;
  if (fs::exists(manifest_path)) {
    auto m = read_json(manifest_path);
    if (m.value("kind", "") == "perturb") perturb = std::move(m);
  }
  if (perturb) {
    std::map<std::string, const ordered_json*> entry_by_id;
    for (const auto& e : (*perturb)["scenes"]) entry_by_id[e["scene_id"].get<std::string>()] = &e;
    std::map<std::pair<std::string, std::string>, std::vector<MetricRow>> groups;
    for (auto row : rows) {
      const auto it = entry_by_id.find(row.scene_id);
      if (it == entry_by_id.end()) throw ValidationError("scene '" + row.scene_id + "' is not in the perturb manifest");
      const auto& e = *it->second;
      row.attack = e["attack"].get<std::string>();
      row.direction = e["direction"].get<std::string>();
      row.speed_scale = e["speed_scale"].get<double>();
      direction_rows.push_back(row);
      groups[{e["source_scene_id"].get<std::string>(), *row.attack}].push_back(row);
    }
    for (const auto& [key, members] : groups) {
      MetricRow w = members.front();
      for (std::size_t k = 1; k < members.size(); ++k) w = worse_row(w, members[k]);
      w.scene_id = key.first;
      w.direction = members.size() > 1 ? std::optional<std::string>("worst") : members.front().direction;
      report.rows.push_back(w);
    }
  } else {
    report.rows = rows;
  }
  report.aggregate = aggregate_rows(report.rows);

  const fs::path dir(o.out);
  ensure_dir(dir);
  save_report(report, dir / "report.json");
  if (perturb) {
    MetricReport per_dir;
    per_dir.rows = direction_rows;
    per_dir.aggregate = aggregate_rows(direction_rows);
    save_report(per_dir, dir / "report_directions.json");
  }
  ordered_json m = manifest_header("evaluate", root, c);
  m["scenes"] = fs::path(o.scenes).string();
  m["predictions"] = fs::path(o.preds).string();
  m["worst_of_directions"] = perturb.has_value();
  write_manifest(dir, m);

  const auto& a = report.aggregate;
  out << "scenes " << a.scenes << "  minADE " << a.min_ade << "  minFDE " << a.min_fde << "  ORP% " << 100.0 * a.orp
      << "  MR1% " << 100.0 * a.mr1 << "  MIED " << a.mied << "\n";
  return 0;
}

// ------------------------------------------------------------ train-scorer

struct TrainOpts {
  std::vector<std::string> corpora;
  std::string out;
  int epochs = 10;
  double lr = 1e-4;
  int batch = 128;
  std::string optimizer = "sgd_momentum";
  double momentum = 0.9;
  double holdout = 0.1;
  int max_steps = 0;
};

double accuracy(const ScorerParams& params, const std::vector<const ScorerSample*>& samples) {
  if (samples.empty()) return 0.0;
  std::size_t hit = 0;
  for (const auto* s : samples) {
    const Eigen::VectorXd logits = scorer_logits(params, s->rows);
    Eigen::Index best = 0;
    logits.maxCoeff(&best);
    if (best == s->label) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(samples.size());
}

int cmd_train(const TrainOpts& o, const Common& c, const CLI::App& root, std::ostream& out, std::ostream& err) {
  if (!(o.holdout >= 0.0 && o.holdout < 1.0)) throw ConfigError("--holdout must be within [0, 1)");
  std::vector<fs::path> files;
  for (const auto& d : o.corpora) {
    const auto f = list_json(d);
    files.insert(files.end(), f.begin(), f.end());
  }
  std::vector<std::optional<ScorerSample>> built(files.size());
  Failures failures;
  parallel_for(files.size(), c.jobs, [&](std::size_t i, std::size_t) {
    try {
      const Scene scene = load_scene(files[i]);
      if (!scene.gt_future) return;
      const auto seqs = enumerate_sequences(scene);
      built[i] = make_scorer_sample(scene, seqs, assign_gt_centerline(scene, seqs));
    } catch (const Error& e) {
      failures.add(files[i].filename().string(), e.what());
    }
  });
  if (!failures.empty()) return failures.report(err);

  std::vector<ScorerSample> samples;
  std::size_t single = 0;
  for (auto& s : built) {
    if (!s) continue;
    if (s->rows.size() < 2) {
      ++single;
      continue;
    }
    samples.push_back(std::move(*s));
  }
  if (samples.empty()) {
    err << "warning: no scene has more than one centerline; training is degenerate\n";
    for (auto& s : built) {
      if (s) samples.push_back(std::move(*s));
    }
  }
  if (samples.empty()) throw ConfigError("no training samples with ground truth");

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(c.seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_hold = static_cast<std::size_t>(o.holdout * static_cast<double>(samples.size()));
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
  cfg.epochs = o.epochs;
  cfg.learning_rate = o.lr;
  cfg.batch_size = o.batch;
  cfg.seed = c.seed;
  cfg.optimizer = parse_optimizer(o.optimizer);
  cfg.momentum = o.momentum;
  cfg.max_steps = o.max_steps;
  ScorerTrainReport rep;
  const ScorerParams params = train_scorer(train, cfg, &rep);
  save_scorer(params, o.out);

  std::vector<const ScorerSample*> train_ptrs;
  for (const auto& s : train) train_ptrs.push_back(&s);
  const double train_acc = accuracy(params, train_ptrs);
  const double hold_acc = accuracy(params, hold);

  ordered_json m = manifest_header("train-scorer", root, c);
  m["model"] = fs::path(o.out).filename().string();
  m["samples"] = {{"train", train.size()}, {"holdout", hold.size()}, {"single_centerline_skipped", single}};
  m["optimizer"] = optimizer_name(cfg.optimizer);
  m["initial_loss"] = rep.initial_loss;
  m["epoch_loss"] = rep.epoch_loss;
  m["steps"] = rep.steps;
  m["train_accuracy"] = train_acc;
  m["holdout_accuracy"] = hold_acc;
  fs::path side = o.out;
  side += ".manifest.json";
  write_text(side, m.dump(2) + "\n");
  out << "trained on " << train.size() << " samples, " << rep.steps << " steps; loss " << rep.initial_loss << " -> "
      << (rep.epoch_loss.empty() ? rep.initial_loss : rep.epoch_loss.back()) << "; holdout accuracy " << hold_acc
      << "\n";
  return 0;
}

// ----------------------------------------------------------- export-frenet

struct ExportOpts {
  std::string in;
  std::string out;
};

int cmd_export(const ExportOpts& o, const Common& c, const CLI::App& root, std::ostream& out, std::ostream& err) {
  const auto files = list_json(o.in);
  const fs::path dir(o.out);
  ensure_dir(dir);
  struct Entry {
    bool exported = false;
    std::string id;
    int index = 0;
    std::vector<std::string> lane_ids;
    double origin_s = 0.0;
    std::size_t unreliable = 0;
  };
  std::vector<Entry> entries(files.size());
  Failures failures;
  parallel_for(files.size(), c.jobs, [&](std::size_t i, std::size_t) {
    try {
      const Scene scene = load_scene(files[i]);
      entries[i].id = scene.scene_id;
      if (!scene.gt_future) return;
      const auto seqs = enumerate_sequences(scene);
      const int star = assign_gt_centerline(scene, seqs);
      const FrenetScene f = scene_to_frenet(scene, seqs[static_cast<std::size_t>(star)]);
      save_scene(f.scene, dir / (scene.scene_id + ".json"));
      entries[i] = {true, scene.scene_id, star, seqs[static_cast<std::size_t>(star)].lane_ids, f.origin_s,
                    f.unreliable_points};
    } catch (const Error& e) {
      failures.add(files[i].filename().string(), e.what());
    }
  });

  ordered_json m = manifest_header("export-frenet", root, c);
  m["source"] = fs::path(o.in).string();
  auto list = ordered_json::array();
  std::size_t skipped = 0;
  for (const auto& e : entries) {
    if (!e.exported) {
      if (!e.id.empty()) ++skipped;
      continue;
    }
    list.push_back({{"scene_id", e.id},
                    {"file", e.id + ".json"},
                    {"centerline_index", e.index},
                    {"lane_ids", e.lane_ids},
                    {"origin_s", e.origin_s},
                    {"unreliable_points", e.unreliable}});
  }
  m["exported"] = list.size();
  m["skipped_without_gt"] = skipped;
  m["scenes"] = std::move(list);
  write_manifest(dir, m);
  out << "exported " << m["exported"].get<std::size_t>() << " scenes, skipped " << skipped << " without gt\n";
  return failures.report(err);
}

// -------------------------------------------------------------------- plot

struct PlotOpts {
  std::string in;
  std::string out;
  std::string preds;
  bool no_sequences = false;
  double scale = 4.0;
};

int cmd_plot(const PlotOpts& o, const Common& c, const CLI::App& root, std::ostream& out, std::ostream& err) {
  const auto files = scene_inputs(o.in);
  const fs::path dir(o.out);
  ensure_dir(dir);
  Failures failures;
  PlotOptions opts;
  opts.pixels_per_metre = o.scale;
  parallel_for(files.size(), c.jobs, [&](std::size_t i, std::size_t) {
    try {
      const Scene scene = load_scene(files[i]);
      std::optional<std::vector<CenterlineSequence>> seqs;
      if (!o.no_sequences) {
        try {
          seqs = enumerate_sequences(scene);
        } catch (const LaneAssignmentError&) {
        }
      }
      std::optional<PredictionSet> preds;
      if (!o.preds.empty()) {
        const fs::path p = fs::path(o.preds) / (scene.scene_id + ".json");
        if (fs::exists(p)) preds = load_predictions(p);
      }
      write_text(dir / (scene.scene_id + ".svg"),
                 render_svg(scene, seqs ? &*seqs : nullptr, preds ? &*preds : nullptr, opts));
    } catch (const Error& e) {
      failures.add(files[i].filename().string(), e.what());
    }
  });
  ordered_json m = manifest_header("plot", root, c);
  m["source"] = fs::path(o.in).string();
  m["plots"] = files.size() - failures.size();
  write_manifest(dir, m);
  out << "wrote " << files.size() - failures.size() << " plots to " << dir.string() << "\n";
  return failures.report(err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"lanewrap: Frenet-frame wrapping of trajectory predictors, scene attacks and evaluation"};
  app.name("lanewrap");
  app.require_subcommand(1);
  // Common flags may follow the subcommand.
  app.fallthrough();
  app.set_config("--config", "", "Key-value config file (TOML/INI); flags override it");
  Common common;
  app.add_option("--seed", common.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--jobs", common.jobs, "Worker threads (0 = all cores)")->capture_default_str();

  GenerateOpts gen;
  auto* g = app.add_subcommand("generate", "Generate a synthetic scene corpus");
  g->add_option("--mix", gen.mix, "Topology weights, e.g. fork=0.5,curve=0.5")->capture_default_str();
  g->add_option("--n", gen.n, "Number of scenes")->capture_default_str();
  g->add_option("--out", gen.out, "Output directory")->required();
  g->add_option("--noise", gen.noise, "Lateral wander std (m)")->capture_default_str();
  g->add_option("--speed", gen.speed, "Requested TV speed (m/s)");
  g->add_option("--radius", gen.radius, "Curve radius (m)");
  g->add_option("--fork-angle", gen.fork_angle, "Fork angle (deg)");
  g->add_option("--curve-variant", gen.curve_variant, "mid or pre");

  PerturbOpts per;
  auto* p = app.add_subcommand("perturb", "Apply a scene attack in both directions");
  p->add_option("--attack", per.attack, "smooth, double or ripple")->required();
  p->add_option("--direction", per.direction, "left, right or both")->capture_default_str();
  p->add_option("--b", per.b, "Onset distance ahead of the TV (m)")->capture_default_str();
  p->add_option("--amplitude", per.amplitude, "c for smooth, A otherwise");
  p->add_option("--wavelength", per.wavelength, "lambda for double and ripple (m)");
  p->add_option("--u-sat", per.u_sat, "Saturation length for smooth (m)");
  p->add_option("--self-check", per.self_check, "Scenes re-checked for onset invariance")->capture_default_str();
  p->add_option("input", per.in, "Scene directory")->required();
  p->add_option("output", per.out, "Output directory")->required();

  PredictOpts pred;
  auto* pr = app.add_subcommand("predict", "Predict trajectories for every scene");
  pr->add_option("--model", pred.model, "ca, ca-sd or external:<command>")->capture_default_str();
  pr->add_option("--agg", pred.agg, "greedy_sampling, lane_scoring, kmeans, uniform, privileged or all")
      ->capture_default_str();
  pr->add_option("--khat", pred.khat, "Output count or 'all'")->capture_default_str();
  pr->add_option("--nms-radius", pred.nms_radius, "Endpoint suppression radius (m)")->capture_default_str();
  pr->add_option("--prior", pred.prior, "uniform, scorer or privileged")->capture_default_str();
  pr->add_option("--scorer", pred.scorer, "Lane scorer model file");
  pr->add_option("--k", pred.k, "Modes per centerline")->capture_default_str();
  pr->add_option("--frame", pred.frame, "Frame for external predictors: frenet or cartesian")->capture_default_str();
  pr->add_option("--timeout", pred.timeout, "External predictor timeout (s)")->capture_default_str();
  pr->add_option("input", pred.in, "Scene directory")->required();
  pr->add_option("output", pred.out, "Prediction directory")->required();

  EvaluateOpts ev;
  auto* e = app.add_subcommand("evaluate", "Compute metrics for predictions");
  e->add_option("scenes", ev.scenes, "Scene directory")->required();
  e->add_option("predictions", ev.preds, "Prediction directory")->required();
  e->add_option("--out", ev.out, "Report directory")->required();

  TrainOpts tr;
  auto* t = app.add_subcommand("train-scorer", "Train the lane scoring model");
  t->add_option("corpus", tr.corpora, "Scene directories")->required();
  t->add_option("--out", tr.out, "Model file")->required();
  t->add_option("--epochs", tr.epochs)->capture_default_str();
  t->add_option("--lr", tr.lr)->capture_default_str();
  t->add_option("--batch", tr.batch)->capture_default_str();
  t->add_option("--optimizer", tr.optimizer, "sgd_momentum or adam")->capture_default_str();
  t->add_option("--momentum", tr.momentum)->capture_default_str();
  t->add_option("--holdout", tr.holdout, "Fraction held out for accuracy")->capture_default_str();
  t->add_option("--max-steps", tr.max_steps, "Stop after this many updates (0 = no limit)")->capture_default_str();

  ExportOpts ex;
  auto* x = app.add_subcommand("export-frenet", "Export scenes in the frame of their ground-truth centerline");
  x->add_option("input", ex.in, "Scene directory")->required();
  x->add_option("output", ex.out, "Output directory")->required();

  PlotOpts pl;
  auto* v = app.add_subcommand("plot", "Render scenes as SVG");
  v->add_option("input", pl.in, "Scene file or directory")->required();
  v->add_option("output", pl.out, "Output directory")->required();
  v->add_option("--preds", pl.preds, "Prediction directory");
  v->add_flag("--no-sequences", pl.no_sequences, "Skip centerline sequences");
  v->add_option("--scale", pl.scale, "Pixels per metre")->capture_default_str();

  std::vector<std::string> storage{"lanewrap"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (g->parsed()) return cmd_generate(gen, common, app, out, err);
    if (p->parsed()) return cmd_perturb(per, common, app, out, err);
    if (pr->parsed()) return cmd_predict(pred, common, app, out, err);
    if (e->parsed()) return cmd_evaluate(ev, common, app, out, err);
    if (t->parsed()) return cmd_train(tr, common, app, out, err);
    if (x->parsed()) return cmd_export(ex, common, app, out, err);
    if (v->parsed()) return cmd_plot(pl, common, app, out, err);
  } catch (const ProtocolError& pe) {
    err << "error: " << pe.what() << "\n";
    if (!pe.child_stderr().empty()) err << "--- predictor stderr ---\n" << pe.child_stderr();
    return 1;
  } catch (const Error& ex_) {
    err << "error: " << ex_.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& fe) {
    err << "error: " << fe.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace lanewrap::cli
