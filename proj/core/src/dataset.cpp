#include "vsg/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "vsg/error.hpp"
#include "vsg/log.hpp"

namespace vsg {
namespace {

std::vector<std::size_t> state_attributes(const ObjectNode& node, const Taxonomy& taxonomy) {
  std::vector<std::size_t> out;
  for (auto a : node.attribute_indices) {
    if (taxonomy.is_state_attribute(a)) out.push_back(a);
  }
  return out;
}

}  // namespace

LabelMap compute_labels(const SceneGraph& current, const SceneGraph& future,
                        const Taxonomy& taxonomy, const LabelConfig& config) {
  if (!(config.epsilon > 0.0)) throw ConfigError("label epsilon must be > 0");
  if (current.environment_id() != future.environment_id()) {
    throw PairingError("cannot pair scans of environments '" + current.environment_id() +
                       "' and '" + future.environment_id() + "'");
  }
  if (current.taxonomy_name() != future.taxonomy_name() ||
      current.taxonomy_name() != taxonomy.name()) {
    throw PairingError("scans '" + current.scan_id() + "' and '" + future.scan_id() +
                       "' do not share taxonomy '" + taxonomy.name() + "'");
  }

  LabelMap labels;
  for (const auto& node : current.nodes()) {
    VariabilityLabel label;
    const auto match = future.find(node.id);
    if (!match) {
      label.instance = true;
      label.position_valid = false;
      label.state_valid = false;
      labels.emplace(node.id, label);
      continue;
    }
    const auto& other = future.nodes()[*match];
    label.position = (other.position - node.position).norm() >= config.epsilon;
    const auto before = state_attributes(node, taxonomy);
    label.state = before != state_attributes(other, taxonomy);
    label.state_valid = !config.require_state_attributes || !before.empty();
    labels.emplace(node.id, label);
  }
  return labels;
}

std::vector<ScanPair> augment_pairs(std::size_t num_scans) {
  std::vector<ScanPair> pairs;
  if (num_scans < 2) {
    warn("need at least 2 scans to form training pairs, got " + std::to_string(num_scans));
    return pairs;
  }
  pairs.reserve(num_scans * (num_scans - 1));
  for (std::size_t i = 0; i < num_scans; ++i) {
    for (std::size_t j = 0; j < num_scans; ++j) {
      if (i != j) pairs.push_back({i, j});
    }
  }
  return pairs;
}

std::vector<ScanPair> augment_pairs(std::span<const SceneGraph> scans) {
  for (const auto& s : scans) {
    if (s.environment_id() != scans.front().environment_id()) {
      throw PairingError("augment_pairs: scans from different environments ('" +
                         scans.front().environment_id() + "', '" + s.environment_id() + "')");
    }
  }
  return augment_pairs(scans.size());
}

std::vector<Sample> build_samples(std::span<const SceneGraph> scans, const Taxonomy& taxonomy,
                                  const LabelConfig& config) {
  std::vector<Sample> samples;
  for (const auto& pair : augment_pairs(scans)) {
    const auto& current = scans[pair.current];
    const auto& future = scans[pair.future];
    const auto labels = compute_labels(current, future, taxonomy, config);
    Sample s{current, {}, {current.scan_id(), future.scan_id()}};
    s.labels.reserve(current.num_nodes());
    for (const auto& node : current.nodes()) s.labels.push_back(labels.at(node.id));
    samples.push_back(std::move(s));
  }
  return samples;
}

std::string to_string(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "train";
}

Split split_from_string(const std::string& text) {
  if (text == "train") return Split::kTrain;
  if (text == "val") return Split::kVal;
  if (text == "test") return Split::kTest;
  throw ParseError("unknown split '" + text + "' (expected train|val|test)");
}

std::vector<Split> assign_splits(std::size_t num_environments, const SplitFractions& fractions,
                                 std::uint64_t seed) {
  const double sum = fractions.train + fractions.val + fractions.test;
  if (fractions.train < 0 || fractions.val < 0 || fractions.test < 0 ||
      std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("split fractions must be non-negative and sum to 1");
  }
  const auto n = num_environments;
  const auto n_val = static_cast<std::size_t>(std::llround(fractions.val * static_cast<double>(n)));
  const auto n_test =
      static_cast<std::size_t>(std::llround(fractions.test * static_cast<double>(n)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  nn::Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Split> out(n, Split::kTrain);
  for (std::size_t k = 0; k < n; ++k) {
    if (k < n_val) {
      out[order[k]] = Split::kVal;
    } else if (k < n_val + n_test) {
      out[order[k]] = Split::kTest;
    }
  }
  return out;
}

std::vector<Sample> samples_for(const Dataset& dataset, Split split, const LabelConfig& config) {
  std::vector<Sample> out;
  for (const auto& env : dataset.environments) {
    if (env.split != split) continue;
    auto samples = build_samples(env.scans, dataset.taxonomy, config);
    std::move(samples.begin(), samples.end(), std::back_inserter(out));
  }
  return out;
}

std::vector<SceneGraph> scans_for(const Dataset& dataset, Split split) {
  std::vector<SceneGraph> out;
  for (const auto& env : dataset.environments) {
    if (env.split != split) continue;
    out.insert(out.end(), env.scans.begin(), env.scans.end());
  }
  return out;
}

LabelStats label_statistics(std::span<const Sample> samples) {
  LabelStats stats;
  for (const auto& s : samples) {
    for (const auto& l : s.labels) {
      if (l.position_valid) {
        ++stats.support[0];
        stats.positives[0] += l.position ? 1 : 0;
      }
      if (l.state_valid) {
        ++stats.support[1];
        stats.positives[1] += l.state ? 1 : 0;
      }
      ++stats.support[2];
      stats.positives[2] += l.instance ? 1 : 0;
    }
  }
  return stats;
}

std::vector<double> importance_sample(std::span<const Sample> samples, const LabelStats& stats) {
  std::vector<double> weights(samples.size(), 1.0);
  if (samples.empty()) return weights;
  if (stats.total_positives() == 0) {
    warn("importance sampling: dataset has no positive labels; using uniform weights");
  } else {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      std::array<bool, 3> present{};
      for (const auto& l : samples[i].labels) {
        present[0] = present[0] || (l.position_valid && l.position);
        present[1] = present[1] || (l.state_valid && l.state);
        present[2] = present[2] || l.instance;
      }
      for (std::size_t v = 0; v < 3; ++v) {
        const double rate = stats.positive_rate(v);
        if (present[v] && rate > 0.0) weights[i] = std::max(weights[i], 1.0 / rate);
      }
    }
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (auto& w : weights) w /= total;
  return weights;
}

std::vector<std::size_t> draw_epoch(std::span<const double> weights, std::size_t count,
                                    nn::Rng& rng) {
  if (weights.empty()) return {};
  std::vector<double> cumulative(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cumulative.begin());
  const double total = cumulative.back();
  std::uniform_real_distribution<double> uniform(0.0, total);
  std::vector<std::size_t> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), uniform(rng));
    out.push_back(std::min(static_cast<std::size_t>(it - cumulative.begin()),
                           weights.size() - 1));
  }
  return out;
}

}  // namespace vsg
