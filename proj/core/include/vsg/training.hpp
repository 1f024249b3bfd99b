#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vsg/dataset.hpp"
#include "vsg/embedding.hpp"
#include "vsg/model.hpp"
#include "vsg/nn.hpp"

namespace vsg {

struct LossConfig {
  double gamma = 0.5;
  // class_weights[v] = {w_negative, w_positive} for variability v.
  std::array<std::array<double, 2>, 3> class_weights{{{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}}};
  // Replace class_weights by inverse label frequencies of the train split.
  bool auto_class_weights = true;
  double max_class_weight = 20.0;

  // Throws ConfigError when gamma < 0 or a weight is not positive.
  void validate() const;
};

// w_pos = min(cap, 1 / r), w_neg = min(cap, 1 / (1 - r)) per variability,
// r being its positive rate.
std::array<std::array<double, 2>, 3> inverse_frequency_weights(const LabelStats& stats,
                                                               double cap);

struct FocalLossResult {
  double loss = 0.0;
  nn::Matrix gradient;  // dLoss/dProbabilities
  std::size_t unmasked = 0;
  bool all_masked = false;
};

inline constexpr double kProbabilityClamp = 1e-7;

// Mean over unmasked elements of -w_c (1 - p_t)^gamma log p_t, where p_t is
// the probability of the true class. Probabilities are clamped to
// [1e-7, 1 - 1e-7]; the gradient is zero wherever clamping was active.
FocalLossResult focal_loss(const nn::Matrix& probabilities, const nn::Matrix& labels,
                           const nn::Matrix& masks, const LossConfig& config);

struct LabelMatrices {
  nn::Matrix labels;  // N x 3
  nn::Matrix masks;   // N x 3, 1 = counted
};
LabelMatrices label_matrices(const Sample& sample);

struct ModelConfig {
  std::string architecture = "delta_vsg";
  std::size_t hidden_dim = 64;
  std::size_t pca_dim = 120;  // clamped to the encoding width with a warning
  std::string tau = "p75";    // see TauSetting::parse
  bool include_semantic_edges = true;
  GateMode gate = GateMode::kElementwise;
};

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 8;
  double learning_rate = 1e-3;
  double dropout_rate = 0.2;
  std::uint64_t seed = 0;
  std::size_t patience = 20;        // 0 disables early stopping
  std::size_t samples_per_epoch = 0;  // 0 = size of the train split
  bool importance_sampling = true;
  SplitFractions split_fractions;

  void validate() const;
};

struct BinaryMetrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t support() const { return tp + fp + tn + fn; }
  double accuracy() const;
  double precision() const;
  double recall() const;
  double f1() const;  // 0 when precision + recall = 0
  // Accuracy of always predicting the more frequent label.
  double majority_accuracy() const;

  BinaryMetrics& operator+=(const BinaryMetrics& other);
  friend bool operator==(const BinaryMetrics&, const BinaryMetrics&) = default;
};

struct ThresholdPoint {
  double threshold = 0.5;
  BinaryMetrics pooled;
};

// Metrics are fractions in [0, 1]. "pooled" counts every unmasked element of
// the three variability types together.
struct EvaluationReport {
  std::array<BinaryMetrics, 3> per_variability;
  BinaryMetrics pooled;
  std::vector<ThresholdPoint> sweep;
  double threshold = 0.5;
};

// Throws EvaluationError when `samples` is empty or sizes disagree.
EvaluationReport evaluate_probabilities(std::span<const nn::Matrix> probabilities,
                                        std::span<const Sample> samples,
                                        double threshold = 0.5);
EvaluationReport evaluate(const VsgModel& model, std::span<const Sample> samples,
                          double threshold = 0.5);

// Columns: variability, accuracy, precision, recall, f1, support.
std::string format_evaluation_csv(const EvaluationReport& report);
std::string format_threshold_sweep_csv(const EvaluationReport& report);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  std::optional<double> val_loss;
  std::optional<std::array<double, 3>> val_f1;
  std::optional<double> val_pooled_f1;
  std::size_t all_masked_graphs = 0;
};

struct TrainingReport {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  bool stopped_early = false;
  bool diverged = false;
  std::string divergence_message;
  std::size_t train_samples = 0;
  std::size_t val_samples = 0;
  std::size_t pca_dim = 0;
  double retained_variance = 0.0;
  double tau = 0.0;
  LabelStats train_label_stats;
  std::array<std::array<double, 2>, 3> class_weights{};
};

std::string format_training_report(const TrainingReport& report);

struct TrainResult {
  VsgModel model;
  TrainingReport report;
};

// Fits the PCA on the unique train-split scans, resolves tau on the same
// scans, and optimises with Adam. Keeps the parameters with the best
// validation pooled F1 (the final ones when there is no validation split).
// Throws TrainingError on an empty train split.
TrainResult train(const Dataset& dataset, const ModelConfig& model_config,
                  const TrainConfig& train_config, const LossConfig& loss_config,
                  const LabelConfig& label_config = {});

// Lower level entry point on pre-built samples with a fixed embedding.
TrainResult train_on_samples(std::span<const Sample> train_samples,
                             std::span<const Sample> val_samples, const Taxonomy& taxonomy,
                             const PcaModel& pca, const EdgeConfig& edges,
                             const ModelConfig& model_config, const TrainConfig& train_config,
                             const LossConfig& loss_config);

}  // namespace vsg
