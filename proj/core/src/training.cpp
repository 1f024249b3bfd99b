#include "vsg/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vsg/error.hpp"
#include "vsg/log.hpp"

namespace vsg {
namespace {

using Json = nlohmann::ordered_json;

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

struct PreparedSample {
  EmbeddedGraph graph;
  LabelMatrices targets;
};

std::vector<PreparedSample> prepare(std::span<const Sample> samples, const VsgModel& model) {
  std::vector<PreparedSample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back({model.embed(s.input), label_matrices(s)});
  return out;
}

double mean_loss(const VariabilityNetwork& network, const std::vector<PreparedSample>& data,
                 const LossConfig& loss, std::vector<nn::Matrix>* probabilities) {
  nn::Rng unused(0);
  double total = 0.0;
  for (const auto& d : data) {
    auto pass = network.forward(d.graph, nn::Mode::kEval, unused);
    total += focal_loss(pass.probabilities, d.targets.labels, d.targets.masks, loss).loss;
    if (probabilities) probabilities->push_back(std::move(pass.probabilities));
  }
  return data.empty() ? 0.0 : total / static_cast<double>(data.size());
}

std::string csv_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

void LossConfig::validate() const {
  if (!(gamma >= 0.0)) throw ConfigError("focal gamma must be >= 0");
  for (const auto& pair : class_weights) {
    for (double w : pair) {
      if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("class weights must be positive");
    }
  }
  if (!(max_class_weight > 0.0)) throw ConfigError("max_class_weight must be positive");
}

std::array<std::array<double, 2>, 3> inverse_frequency_weights(const LabelStats& stats,
                                                               double cap) {
  std::array<std::array<double, 2>, 3> w{};
  for (std::size_t v = 0; v < 3; ++v) {
    const double r = stats.positive_rate(v);
    w[v][1] = r > 0.0 ? std::min(cap, 1.0 / r) : cap;
    w[v][0] = r < 1.0 ? std::min(cap, 1.0 / (1.0 - r)) : cap;
  }
  return w;
}

FocalLossResult focal_loss(const nn::Matrix& probabilities, const nn::Matrix& labels,
                           const nn::Matrix& masks, const LossConfig& config) {
  if (labels.rows() != probabilities.rows() || labels.cols() != probabilities.cols() ||
      masks.rows() != probabilities.rows() || masks.cols() != probabilities.cols()) {
    throw DimensionError("focal_loss: probabilities, labels and masks must share a shape");
  }
  if (probabilities.cols() != kNumVariabilities) {
    throw DimensionError("focal_loss: expected 3 columns");
  }
  const double g = config.gamma;
  FocalLossResult out;
  out.gradient = nn::Matrix::Zero(probabilities.rows(), probabilities.cols());
  double total = 0.0;
  for (Eigen::Index c = 0; c < probabilities.cols(); ++c) {
    for (Eigen::Index r = 0; r < probabilities.rows(); ++r) {
      if (masks(r, c) == 0.0) continue;
      ++out.unmasked;
      const double raw = probabilities(r, c);
      const double p = std::clamp(raw, kProbabilityClamp, 1.0 - kProbabilityClamp);
      const bool clamped = p != raw;
      const bool positive = labels(r, c) != 0.0;
      const double w = config.class_weights[static_cast<std::size_t>(c)][positive ? 1 : 0];
      // pt: probability of the true class; q = 1 - pt.
      const double pt = positive ? p : 1.0 - p;
      const double q = 1.0 - pt;
      const double log_pt = std::log(pt);
      total += -w * std::pow(q, g) * log_pt;
      if (clamped) continue;
      // d/dpt of -w q^g log pt, with dq/dpt = -1.
      const double dq_term = g == 0.0 ? 0.0 : g * std::pow(q, g - 1.0) * log_pt;
      const double dpt = -w * (std::pow(q, g) / pt - dq_term);
      out.gradient(r, c) = positive ? dpt : -dpt;
    }
  }
  if (out.unmasked == 0) {
    out.all_masked = true;
    return out;
  }
  const double n = static_cast<double>(out.unmasked);
  out.loss = total / n;
  out.gradient /= n;
  return out;
}

LabelMatrices label_matrices(const Sample& sample) {
  const auto n = static_cast<Eigen::Index>(sample.labels.size());
  LabelMatrices m{nn::Matrix::Zero(n, 3), nn::Matrix::Zero(n, 3)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& l = sample.labels[static_cast<std::size_t>(i)];
    m.labels(i, kPosition) = l.position ? 1.0 : 0.0;
    m.labels(i, kState) = l.state ? 1.0 : 0.0;
    m.labels(i, kInstance) = l.instance ? 1.0 : 0.0;
    m.masks(i, kPosition) = l.position_valid ? 1.0 : 0.0;
    m.masks(i, kState) = l.state_valid ? 1.0 : 0.0;
    m.masks(i, kInstance) = 1.0;
  }
  return m;
}

void TrainConfig::validate() const {
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ConfigError("dropout_rate must lie in [0, 1)");
  }
  const double sum = split_fractions.train + split_fractions.val + split_fractions.test;
  if (split_fractions.train <= 0 || split_fractions.val < 0 || split_fractions.test < 0 ||
      std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("split fractions must be non-negative and sum to 1");
  }
}

double BinaryMetrics::accuracy() const { return ratio(tp + tn, support()); }
double BinaryMetrics::precision() const { return ratio(tp, tp + fp); }
double BinaryMetrics::recall() const { return ratio(tp, tp + fn); }

double BinaryMetrics::f1() const {
  const double p = precision();
  const double r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

double BinaryMetrics::majority_accuracy() const {
  return ratio(std::max(tp + fn, tn + fp), support());
}

BinaryMetrics& BinaryMetrics::operator+=(const BinaryMetrics& other) {
  tp += other.tp;
  fp += other.fp;
  tn += other.tn;
  fn += other.fn;
  return *this;
}

EvaluationReport evaluate_probabilities(std::span<const nn::Matrix> probabilities,
                                        std::span<const Sample> samples, double threshold) {
  if (samples.empty()) throw EvaluationError("cannot evaluate an empty sample set");
  if (probabilities.size() != samples.size()) {
    throw EvaluationError("evaluate: one probability matrix per sample is required");
  }
  EvaluationReport report;
  report.threshold = threshold;
  std::vector<double> thresholds;
  for (int k = 1; k <= 19; ++k) thresholds.push_back(0.05 * k);
  report.sweep.resize(thresholds.size());
  for (std::size_t t = 0; t < thresholds.size(); ++t) report.sweep[t].threshold = thresholds[t];

  auto count = [](BinaryMetrics& m, bool predicted, bool actual) {
    if (predicted) {
      ++(actual ? m.tp : m.fp);
    } else {
      ++(actual ? m.fn : m.tn);
    }
  };
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto targets = label_matrices(samples[s]);
    const auto& p = probabilities[s];
    if (p.rows() != targets.labels.rows() || p.cols() != 3) {
      throw EvaluationError("evaluate: probability shape does not match sample " +
                            samples[s].pair_id.first + "->" + samples[s].pair_id.second);
    }
    for (Eigen::Index c = 0; c < 3; ++c) {
      for (Eigen::Index r = 0; r < p.rows(); ++r) {
        if (targets.masks(r, c) == 0.0) continue;
        const bool actual = targets.labels(r, c) != 0.0;
        count(report.per_variability[static_cast<std::size_t>(c)], p(r, c) >= threshold, actual);
        for (auto& point : report.sweep) count(point.pooled, p(r, c) >= point.threshold, actual);
      }
    }
  }
  for (const auto& m : report.per_variability) report.pooled += m;
  return report;
}

EvaluationReport evaluate(const VsgModel& model, std::span<const Sample> samples,
                          double threshold) {
  std::vector<nn::Matrix> probabilities;
  probabilities.reserve(samples.size());
  for (const auto& s : samples) probabilities.push_back(model.predict(s.input).probabilities);
  return evaluate_probabilities(probabilities, samples, threshold);
}

std::string format_evaluation_csv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "variability,accuracy,precision,recall,f1,support\n";
  auto row = [&](const std::string& name, const BinaryMetrics& m) {
    out << name << ',' << csv_double(m.accuracy()) << ',' << csv_double(m.precision()) << ','
        << csv_double(m.recall()) << ',' << csv_double(m.f1()) << ',' << m.support() << '\n';
  };
  for (Eigen::Index v = 0; v < 3; ++v) {
    row(variability_name(v), report.per_variability[static_cast<std::size_t>(v)]);
  }
  row("pooled", report.pooled);
  return out.str();
}

std::string format_threshold_sweep_csv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "threshold,precision,recall,f1\n";
  for (const auto& p : report.sweep) {
    out << csv_double(p.threshold) << ',' << csv_double(p.pooled.precision()) << ','
        << csv_double(p.pooled.recall()) << ',' << csv_double(p.pooled.f1()) << '\n';
  }
  return out.str();
}

std::string format_training_report(const TrainingReport& report) {
  Json epochs = Json::array();
  for (const auto& e : report.epochs) {
    Json je{{"epoch", e.epoch}, {"train_loss", e.train_loss}};
    if (e.val_loss) je["val_loss"] = *e.val_loss;
    if (e.val_f1) je["val_f1"] = *e.val_f1;
    if (e.val_pooled_f1) je["val_pooled_f1"] = *e.val_pooled_f1;
    if (e.all_masked_graphs > 0) je["all_masked_graphs"] = e.all_masked_graphs;
    epochs.push_back(std::move(je));
  }
  Json stats = Json::array();
  for (std::size_t v = 0; v < 3; ++v) {
    stats.push_back({{"variability", variability_name(static_cast<Eigen::Index>(v))},
                     {"positives", report.train_label_stats.positives[v]},
                     {"support", report.train_label_stats.support[v]},
                     {"positive_rate", report.train_label_stats.positive_rate(v)}});
  }
  Json j{{"train_samples", report.train_samples},
         {"val_samples", report.val_samples},
         {"pca_dim", report.pca_dim},
         {"retained_variance", report.retained_variance},
         {"tau", std::isfinite(report.tau) ? Json(report.tau) : Json("inf")},
         {"train_label_stats", std::move(stats)},
         {"class_weights", report.class_weights},
         {"best_epoch", report.best_epoch},
         {"stopped_early", report.stopped_early},
         {"diverged", report.diverged}};
  if (report.diverged) j["divergence_message"] = report.divergence_message;
  j["epochs"] = std::move(epochs);
  return j.dump(2) + "\n";
}

TrainResult train_on_samples(std::span<const Sample> train_samples,
                             std::span<const Sample> val_samples, const Taxonomy& taxonomy,
                             const PcaModel& pca, const EdgeConfig& edges,
                             const ModelConfig& model_config, const TrainConfig& train_config,
                             const LossConfig& loss_config) {
  train_config.validate();
  if (train_samples.empty()) throw TrainingError("the train split has no samples");

  TrainingReport report;
  report.train_samples = train_samples.size();
  report.val_samples = val_samples.size();
  report.pca_dim = pca.output_dim();
  report.retained_variance = pca.retained_variance();
  report.tau = edges.tau;
  report.train_label_stats = label_statistics(train_samples);

  LossConfig loss = loss_config;
  if (loss.auto_class_weights) {
    loss.class_weights = inverse_frequency_weights(report.train_label_stats, loss.max_class_weight);
  }
  loss.validate();
  report.class_weights = loss.class_weights;

  NetworkConfig net;
  net.architecture = model_config.architecture;
  net.input_dim = pca.output_dim();
  net.hidden_dim = model_config.hidden_dim;
  net.num_relations = taxonomy.num_relationships();
  net.dropout_rate = train_config.dropout_rate;
  net.gate = model_config.gate;

  nn::Rng rng(train_config.seed);
  VsgModel model(make_network(net, &rng), taxonomy, pca, edges);
  const auto train_data = prepare(train_samples, model);
  const auto val_data = prepare(val_samples, model);

  auto store = model.network().parameters(train_config.seed);
  nn::Adam adam({train_config.learning_rate});

  const auto weights = train_config.importance_sampling
                           ? importance_sample(train_samples, report.train_label_stats)
                           : std::vector<double>(train_samples.size(), 1.0);
  const std::size_t per_epoch = train_config.samples_per_epoch > 0
                                    ? train_config.samples_per_epoch
                                    : train_samples.size();

  VsgModel best = model;
  double best_score = -1.0;
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= train_config.epochs; ++epoch) {
    std::vector<std::size_t> order;
    if (train_config.importance_sampling) {
      order = draw_epoch(weights, per_epoch, rng);
    } else {
      order.resize(train_samples.size());
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      order.resize(std::min(order.size(), per_epoch));
    }

    EpochRecord record;
    record.epoch = epoch;
    double epoch_loss = 0.0;
    bool diverged = false;
    for (std::size_t start = 0; start < order.size() && !diverged;
         start += train_config.batch_size) {
      const std::size_t end = std::min(order.size(), start + train_config.batch_size);
      const double scale = 1.0 / static_cast<double>(end - start);
      store.zero_grads();
      for (std::size_t k = start; k < end; ++k) {
        const auto& d = train_data[order[k]];
        auto pass = model.network().forward(d.graph, nn::Mode::kTrain, rng);
        auto fl = focal_loss(pass.probabilities, d.targets.labels, d.targets.masks, loss);
        if (fl.all_masked) ++record.all_masked_graphs;
        if (!std::isfinite(fl.loss)) {
          diverged = true;
          report.divergence_message =
              "non-finite loss at epoch " + std::to_string(epoch) + " on sample " +
              train_samples[order[k]].pair_id.first + "->" + train_samples[order[k]].pair_id.second;
          break;
        }
        epoch_loss += fl.loss;
        model.network().backward(*pass.cache, fl.gradient * scale);
      }
      if (diverged) break;
      try {
        adam.step(store);
      } catch (const TrainingError& e) {
        diverged = true;
        report.divergence_message = "epoch " + std::to_string(epoch) + ": " + e.what();
      }
    }
    if (diverged) {
      report.diverged = true;
      warn("training diverged (" + report.divergence_message +
           "); returning the last good parameters");
      break;
    }
    record.train_loss = epoch_loss / static_cast<double>(order.size());

    if (!val_data.empty()) {
      std::vector<nn::Matrix> probabilities;
      record.val_loss = mean_loss(model.network(), val_data, loss, &probabilities);
      const auto metrics = evaluate_probabilities(probabilities, val_samples);
      record.val_f1 = std::array<double, 3>{metrics.per_variability[0].f1(),
                                            metrics.per_variability[1].f1(),
                                            metrics.per_variability[2].f1()};
      record.val_pooled_f1 = metrics.pooled.f1();
      if (*record.val_pooled_f1 > best_score) {
        best_score = *record.val_pooled_f1;
        best = model;
        report.best_epoch = epoch;
        since_best = 0;
      } else {
        ++since_best;
      }
    } else {
      best = model;
      report.best_epoch = epoch;
    }
    report.epochs.push_back(record);
    if (train_config.patience > 0 && since_best >= train_config.patience) {
      report.stopped_early = true;
      break;
    }
  }
  return {std::move(best), std::move(report)};
}

TrainResult train(const Dataset& dataset, const ModelConfig& model_config,
                  const TrainConfig& train_config, const LossConfig& loss_config,
                  const LabelConfig& label_config) {
  train_config.validate();
  const auto train_samples = samples_for(dataset, Split::kTrain, label_config);
  if (train_samples.empty()) throw TrainingError("the train split has no samples");
  const auto val_samples = samples_for(dataset, Split::kVal, label_config);

  const auto train_scans = scans_for(dataset, Split::kTrain);
  const auto encoded = encode_nodes(train_scans, dataset.taxonomy);
  std::size_t dim = model_config.pca_dim;
  const auto limit = static_cast<std::size_t>(std::min(encoded.rows(), encoded.cols()));
  if (dim > limit) {
    warn("pca_dim " + std::to_string(dim) + " exceeds what the train data supports; using " +
         std::to_string(limit));
    dim = limit;
  }
  const auto pca = fit_pca(encoded, dim);
  const EdgeConfig edges{resolve_tau(TauSetting::parse(model_config.tau), train_scans),
                         model_config.include_semantic_edges};
  return train_on_samples(train_samples, val_samples, dataset.taxonomy, pca, edges, model_config,
                          train_config, loss_config);
}

}  // namespace vsg
