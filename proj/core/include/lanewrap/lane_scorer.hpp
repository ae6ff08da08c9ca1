#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lanewrap/centerlines.hpp"
#include "lanewrap/types.hpp"

namespace lanewrap {

inline constexpr int kScorerHistoryStates = 21;
inline constexpr int kScorerHistoryFeatures = 4;  // x, y, heading, speed
inline constexpr int kScorerCenterlinePoints = 10;
inline constexpr int kScorerEmbedding = 64;
inline constexpr int kScorerHidden = 512;
inline constexpr double kScorerCenterlineSpan = 110.0;
inline constexpr int kScorerModelVersion = 1;

inline constexpr int kScorerHistoryDim = kScorerHistoryStates * kScorerHistoryFeatures;
inline constexpr int kScorerCenterlineDim = kScorerCenterlinePoints * 2;

/// Features of one (scene, centerline) pair, expressed relative to the TV's
/// current pose (TV at the origin, heading along +x). Positions are scaled
/// by 1/10 m and speeds by 1/(10 m/s).
struct ScorerInput {
  Eigen::Matrix<double, kScorerHistoryDim, 1> history;
  Eigen::Matrix<double, kScorerCenterlineDim, 1> centerline;
};

ScorerInput encode_scorer_input(const Scene& scene, const CenterlineSequence& seq);

/// Two single-layer encoders (history and centerline) feeding a
/// 2E -> 512 -> 512 -> 1 ReLU MLP that outputs one logit per centerline.
struct ScorerParams {
  Eigen::MatrixXd w_hist, b_hist;
  Eigen::MatrixXd w_cl, b_cl;
  Eigen::MatrixXd w1, b1;
  Eigen::MatrixXd w2, b2;
  Eigen::MatrixXd w3, b3;
  std::uint64_t init_seed = 0;

  static constexpr std::size_t kBlocks = 10;
  std::array<Eigen::MatrixXd*, kBlocks> blocks();
  std::array<const Eigen::MatrixXd*, kBlocks> blocks() const;
  static const std::array<const char*, kBlocks>& block_names();

  /// Glorot-uniform weights, zero biases.
  static ScorerParams initialize(std::uint64_t seed);
  /// Same shapes, all zeros.
  ScorerParams zeros_like() const;
};

/// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

Eigen::VectorXd scorer_logits(const ScorerParams& params, std::span<const ScorerInput> rows);

/// p(C_i) over the scene's centerline sequences.
std::vector<double> score_centerlines(const ScorerParams& params, const Scene& scene,
                                      const std::vector<CenterlineSequence>& seqs);

/// One training example: the encoded centerlines of a scene and the index of
/// the ground-truth centerline.
struct ScorerSample {
  std::vector<ScorerInput> rows;
  int label = 0;
};

ScorerSample make_scorer_sample(const Scene& scene, const std::vector<CenterlineSequence>& seqs, int label);

/// Mean cross-entropy over `samples`; when `grad` is given it receives the
/// gradient (shapes must match `params`).
double scorer_loss(const ScorerParams& params, std::span<const ScorerSample* const> samples,
                   ScorerParams* grad = nullptr);

enum class ScorerOptimizer { kSgdMomentum, kAdam };

struct ScorerTrainConfig {
  int epochs = 10;
  double learning_rate = 1e-4;
  int batch_size = 128;
  std::uint64_t seed = 0;
  ScorerOptimizer optimizer = ScorerOptimizer::kSgdMomentum;
  double momentum = 0.9;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  // 0 means "full epochs"; otherwise stop after this many updates.
  int max_steps = 0;
};

struct ScorerTrainReport {
  double initial_loss = 0.0;
  std::vector<double> epoch_loss;  // mean training loss after each epoch
  int steps = 0;
};

/// Mini-batch training from a seeded Glorot initialization. Deterministic for
/// a fixed seed. Throws ConfigError on an empty dataset.
ScorerParams train_scorer(std::span<const ScorerSample> dataset, const ScorerTrainConfig& config,
                          ScorerTrainReport* report = nullptr);

std::string optimizer_name(ScorerOptimizer opt);
ScorerOptimizer parse_optimizer(const std::string& name);

/// JSON tensor dump: {"version":1,"e":64,"p":10,"tensors":{name:[shape,data]}}.
void save_scorer(const ScorerParams& params, const std::filesystem::path& path);
ScorerParams load_scorer(const std::filesystem::path& path);

}  // namespace lanewrap
