#include "lanewrap/lane_scorer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "json_internal.hpp"
#include "lanewrap/error.hpp"

namespace lanewrap {

namespace {

constexpr double kPositionScale = 0.1;
constexpr double kSpeedScale = 0.1;

Vec2 to_tv_frame(Vec2 p, Vec2 origin, double heading) {
  const Vec2 r = p - origin;
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  return {c * r.x + s * r.y, -s * r.x + c * r.y};
}

Eigen::MatrixXd glorot(int rows, int cols, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Eigen::MatrixXd m(rows, cols);
  // Row-major fill order keeps the draw sequence independent of Eigen's layout.
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = dist(rng);
  }
  return m;
}

struct Activations {
  Eigen::MatrixXd xh, xc, z, a1, a2;
  Eigen::RowVectorXd logits;
};

void stack_inputs(std::span<const ScorerInput* const> rows, Eigen::MatrixXd& xh, Eigen::MatrixXd& xc) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  xh.resize(kScorerHistoryDim, n);
  xc.resize(kScorerCenterlineDim, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    xh.col(i) = rows[static_cast<std::size_t>(i)]->history;
    xc.col(i) = rows[static_cast<std::size_t>(i)]->centerline;
  }
}

void forward(const ScorerParams& p, std::span<const ScorerInput* const> rows, Activations& act) {
  stack_inputs(rows, act.xh, act.xc);
  const auto n = act.xh.cols();
  act.z.resize(2 * kScorerEmbedding, n);
  act.z.topRows(kScorerEmbedding).noalias() = p.w_hist * act.xh;
  act.z.topRows(kScorerEmbedding).colwise() += p.b_hist.col(0);
  act.z.bottomRows(kScorerEmbedding).noalias() = p.w_cl * act.xc;
  act.z.bottomRows(kScorerEmbedding).colwise() += p.b_cl.col(0);
  act.a1.noalias() = p.w1 * act.z;
  act.a1.colwise() += p.b1.col(0);
  act.a1 = act.a1.cwiseMax(0.0);
  act.a2.noalias() = p.w2 * act.a1;
  act.a2.colwise() += p.b2.col(0);
  act.a2 = act.a2.cwiseMax(0.0);
  act.logits.noalias() = p.w3 * act.a2;
  act.logits.array() += p.b3(0, 0);
}

}  // namespace

std::array<Eigen::MatrixXd*, ScorerParams::kBlocks> ScorerParams::blocks() {
  return {&w_hist, &b_hist, &w_cl, &b_cl, &w1, &b1, &w2, &b2, &w3, &b3};
}

std::array<const Eigen::MatrixXd*, ScorerParams::kBlocks> ScorerParams::blocks() const {
  return {&w_hist, &b_hist, &w_cl, &b_cl, &w1, &b1, &w2, &b2, &w3, &b3};
}

const std::array<const char*, ScorerParams::kBlocks>& ScorerParams::block_names() {
  static const std::array<const char*, kBlocks> names{"history_encoder.weight", "history_encoder.bias",
                                                      "centerline_encoder.weight", "centerline_encoder.bias",
                                                      "trunk.0.weight", "trunk.0.bias",
                                                      "trunk.1.weight", "trunk.1.bias",
                                                      "trunk.2.weight", "trunk.2.bias"};
  return names;
}

ScorerParams ScorerParams::initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ScorerParams p;
  p.init_seed = seed;
  p.w_hist = glorot(kScorerEmbedding, kScorerHistoryDim, rng);
  p.b_hist = Eigen::MatrixXd::Zero(kScorerEmbedding, 1);
  p.w_cl = glorot(kScorerEmbedding, kScorerCenterlineDim, rng);
  p.b_cl = Eigen::MatrixXd::Zero(kScorerEmbedding, 1);
  p.w1 = glorot(kScorerHidden, 2 * kScorerEmbedding, rng);
  p.b1 = Eigen::MatrixXd::Zero(kScorerHidden, 1);
  p.w2 = glorot(kScorerHidden, kScorerHidden, rng);
  p.b2 = Eigen::MatrixXd::Zero(kScorerHidden, 1);
  p.w3 = glorot(1, kScorerHidden, rng);
  p.b3 = Eigen::MatrixXd::Zero(1, 1);
  return p;
}

ScorerParams ScorerParams::zeros_like() const {
  ScorerParams z = *this;
  for (auto* b : z.blocks()) b->setZero();
  return z;
}

ScorerInput encode_scorer_input(const Scene& scene, const CenterlineSequence& seq) {
  const AgentHistory& tv = scene.tv();
  const AgentState& cur = tv.current();
  const Vec2 origin = cur.position();
  const double h0 = cur.heading;

  ScorerInput in;
  in.history.setZero();
  // Most recent kScorerHistoryStates states; shorter histories are
  // left-padded with the oldest state.
  const auto n = static_cast<int>(tv.states.size());
  for (int k = 0; k < kScorerHistoryStates; ++k) {
    const int src = std::max(0, n - kScorerHistoryStates + k);
    const AgentState& st = tv.states[static_cast<std::size_t>(src)];
    const Vec2 p = to_tv_frame(st.position(), origin, h0);
    in.history(4 * k + 0) = p.x * kPositionScale;
    in.history(4 * k + 1) = p.y * kPositionScale;
    in.history(4 * k + 2) = normalize_angle(st.heading - h0);
    in.history(4 * k + 3) = st.speed * kSpeedScale;
  }
  for (int k = 0; k < kScorerCenterlinePoints; ++k) {
    const double s = seq.start_s_tv + kScorerCenterlineSpan * (k + 1) / kScorerCenterlinePoints;
    const Vec2 p = to_tv_frame(seq.polyline.point_at(s), origin, h0);
    in.centerline(2 * k + 0) = p.x * kPositionScale;
    in.centerline(2 * k + 1) = p.y * kPositionScale;
  }
  return in;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    sum += out[i];
  }
  for (auto& v : out) v /= sum;
  return out;
}

Eigen::VectorXd scorer_logits(const ScorerParams& params, std::span<const ScorerInput> rows) {
  std::vector<const ScorerInput*> ptrs;
  ptrs.reserve(rows.size());
  for (const auto& r : rows) ptrs.push_back(&r);
  Activations act;
  forward(params, ptrs, act);
  return act.logits.transpose();
}

std::vector<double> score_centerlines(const ScorerParams& params, const Scene& scene,
                                      const std::vector<CenterlineSequence>& seqs) {
  if (seqs.empty()) return {};
  std::vector<ScorerInput> rows;
  rows.reserve(seqs.size());
  for (const auto& s : seqs) rows.push_back(encode_scorer_input(scene, s));
  const Eigen::VectorXd logits = scorer_logits(params, rows);
  return softmax(std::span<const double>(logits.data(), static_cast<std::size_t>(logits.size())));
}

ScorerSample make_scorer_sample(const Scene& scene, const std::vector<CenterlineSequence>& seqs, int label) {
  if (label < 0 || label >= static_cast<int>(seqs.size())) throw ConfigError("scorer label out of range");
  ScorerSample s;
  s.label = label;
  for (const auto& seq : seqs) s.rows.push_back(encode_scorer_input(scene, seq));
  return s;
}

double scorer_loss(const ScorerParams& params, std::span<const ScorerSample* const> samples, ScorerParams* grad) {
  if (samples.empty()) return 0.0;
  std::vector<const ScorerInput*> rows;
  std::vector<std::size_t> offsets;
  for (const auto* s : samples) {
    offsets.push_back(rows.size());
    for (const auto& r : s->rows) rows.push_back(&r);
  }
  offsets.push_back(rows.size());

  Activations act;
  forward(params, rows, act);

  const double inv_b = 1.0 / static_cast<double>(samples.size());
  double loss = 0.0;
  Eigen::RowVectorXd dlogits(act.logits.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto begin = static_cast<Eigen::Index>(offsets[i]);
    const auto count = static_cast<Eigen::Index>(offsets[i + 1] - offsets[i]);
    const double m = act.logits.segment(begin, count).maxCoeff();
    const Eigen::RowVectorXd e = (act.logits.segment(begin, count).array() - m).exp();
    const double z = e.sum();
    const auto label = static_cast<Eigen::Index>(samples[i]->label);
    loss -= (act.logits(begin + label) - m) - std::log(z);
    dlogits.segment(begin, count) = e / z * inv_b;
    dlogits(begin + label) -= inv_b;
  }
  loss *= inv_b;

  if (grad != nullptr) {
    grad->w3.noalias() = dlogits * act.a2.transpose();
    grad->b3(0, 0) = dlogits.sum();
    Eigen::MatrixXd d2 = params.w3.transpose() * dlogits;
    d2 = d2.cwiseProduct((act.a2.array() > 0.0).cast<double>().matrix());
    grad->w2.noalias() = d2 * act.a1.transpose();
    grad->b2 = d2.rowwise().sum();
    Eigen::MatrixXd d1 = params.w2.transpose() * d2;
    d1 = d1.cwiseProduct((act.a1.array() > 0.0).cast<double>().matrix());
    grad->w1.noalias() = d1 * act.z.transpose();
    grad->b1 = d1.rowwise().sum();
    const Eigen::MatrixXd dz = params.w1.transpose() * d1;
    grad->w_hist.noalias() = dz.topRows(kScorerEmbedding) * act.xh.transpose();
    grad->b_hist = dz.topRows(kScorerEmbedding).rowwise().sum();
    grad->w_cl.noalias() = dz.bottomRows(kScorerEmbedding) * act.xc.transpose();
    grad->b_cl = dz.bottomRows(kScorerEmbedding).rowwise().sum();
  }
  return loss;
}

std::string optimizer_name(ScorerOptimizer opt) {
  return opt == ScorerOptimizer::kAdam ? "adam" : "sgd_momentum";
}

ScorerOptimizer parse_optimizer(const std::string& name) {
  if (name == "adam") return ScorerOptimizer::kAdam;
  if (name == "sgd_momentum" || name == "sgd") return ScorerOptimizer::kSgdMomentum;
  throw ConfigError("unknown optimizer '" + name + "'");
}

ScorerParams train_scorer(std::span<const ScorerSample> dataset, const ScorerTrainConfig& config,
                          ScorerTrainReport* report) {
  if (dataset.empty()) throw ConfigError("cannot train the lane scorer on an empty dataset");
  if (config.batch_size < 1 || config.epochs < 1 || !(config.learning_rate > 0.0)) {
    throw ConfigError("invalid scorer training configuration");
  }
  for (const auto& s : dataset) {
    if (s.label < 0 || s.label >= static_cast<int>(s.rows.size())) throw ConfigError("sample label out of range");
  }

  ScorerParams params = ScorerParams::initialize(config.seed);
  ScorerParams grad = params.zeros_like();
  ScorerParams m1 = params.zeros_like();
  ScorerParams m2 = params.zeros_like();
  // Shuffling draws from its own stream so it does not depend on the init.
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);

  std::vector<const ScorerSample*> all;
  all.reserve(dataset.size());
  for (const auto& s : dataset) all.push_back(&s);

  auto full_loss = [&] {
    double total = 0.0;
    const std::size_t chunk = 512;
    for (std::size_t i = 0; i < all.size(); i += chunk) {
      const std::size_t n = std::min(chunk, all.size() - i);
      total += scorer_loss(params, std::span(all).subspan(i, n)) * static_cast<double>(n);
    }
    return total / static_cast<double>(all.size());
  };

  ScorerTrainReport local;
  local.initial_loss = full_loss();

  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<const ScorerSample*> batch;
  int step = 0;
  bool stop = false;
  for (int epoch = 0; epoch < config.epochs && !stop; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < order.size(); i += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t n = std::min(static_cast<std::size_t>(config.batch_size), order.size() - i);
      batch.clear();
      for (std::size_t j = 0; j < n; ++j) batch.push_back(all[order[i + j]]);
      scorer_loss(params, batch, &grad);
      ++step;

      auto pb = params.blocks();
      auto gb = grad.blocks();
      auto v1 = m1.blocks();
      auto v2 = m2.blocks();
      if (config.optimizer == ScorerOptimizer::kSgdMomentum) {
        for (std::size_t b = 0; b < ScorerParams::kBlocks; ++b) {
          *v1[b] = config.momentum * *v1[b] + *gb[b];
          *pb[b] -= config.learning_rate * *v1[b];
        }
      } else {
        const double c1 = 1.0 - std::pow(config.adam_beta1, step);
        const double c2 = 1.0 - std::pow(config.adam_beta2, step);
        for (std::size_t b = 0; b < ScorerParams::kBlocks; ++b) {
          *v1[b] = config.adam_beta1 * *v1[b] + (1.0 - config.adam_beta1) * *gb[b];
          *v2[b] = config.adam_beta2 * *v2[b] + (1.0 - config.adam_beta2) * gb[b]->cwiseAbs2();
          pb[b]->array() -= config.learning_rate * (v1[b]->array() / c1) /
                            ((v2[b]->array() / c2).sqrt() + config.adam_eps);
        }
      }
      if (config.max_steps > 0 && step >= config.max_steps) {
        stop = true;
        break;
      }
    }
    local.epoch_loss.push_back(full_loss());
  }
  local.steps = step;
  if (report != nullptr) *report = std::move(local);
  return params;
}

void save_scorer(const ScorerParams& params, const std::filesystem::path& path) {
  nlohmann::json j;
  j["version"] = kScorerModelVersion;
  j["e"] = kScorerEmbedding;
  j["p"] = kScorerCenterlinePoints;
  j["init"] = {{"scheme", "glorot_uniform"}, {"seed", params.init_seed}};
  nlohmann::json tensors = nlohmann::json::object();
  const auto blocks = params.blocks();
  for (std::size_t b = 0; b < ScorerParams::kBlocks; ++b) {
    const Eigen::MatrixXd& m = *blocks[b];
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    }
    tensors[ScorerParams::block_names()[b]] = nlohmann::json::array({{m.rows(), m.cols()}, data});
  }
  j["tensors"] = std::move(tensors);
  detail::write_text_file(path, j.dump() + "\n");
}

ScorerParams load_scorer(const std::filesystem::path& path) {
  const auto j = detail::read_json_file(path);
  try {
    const int version = j.at("version").get<int>();
    if (version != kScorerModelVersion) {
      throw ParseError(path.string() + ": unsupported scorer model version " + std::to_string(version));
    }
    if (j.at("e").get<int>() != kScorerEmbedding || j.at("p").get<int>() != kScorerCenterlinePoints) {
      throw ParseError(path.string() + ": scorer dimensions do not match this build");
    }
    ScorerParams p = ScorerParams::initialize(0);
    if (auto it = j.find("init"); it != j.end()) p.init_seed = it->value("seed", std::uint64_t{0});
    auto blocks = p.blocks();
    const auto& tensors = j.at("tensors");
    for (std::size_t b = 0; b < ScorerParams::kBlocks; ++b) {
      const auto& t = tensors.at(ScorerParams::block_names()[b]);
      const auto shape = t.at(0).get<std::vector<Eigen::Index>>();
      const auto data = t.at(1).get<std::vector<double>>();
      Eigen::MatrixXd& m = *blocks[b];
      if (shape.size() != 2 || shape[0] != m.rows() || shape[1] != m.cols() ||
          static_cast<Eigen::Index>(data.size()) != m.size()) {
        throw ParseError(path.string() + ": tensor '" + ScorerParams::block_names()[b] + "' has the wrong shape");
      }
      std::size_t k = 0;
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = data[k++];
      }
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace lanewrap
