#include "vsg/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "vsg/error.hpp"
#include "vsg/log.hpp"

namespace vsg {

Eigen::VectorXd encode_binary(const ObjectNode& node, const Taxonomy& taxonomy) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(taxonomy.encoding_dim()));
  u[static_cast<Eigen::Index>(node.class_index)] = 1.0;
  const auto offset = static_cast<Eigen::Index>(taxonomy.num_classes());
  for (auto a : node.attribute_indices) u[offset + static_cast<Eigen::Index>(a)] = 1.0;
  return u;
}

Eigen::MatrixXd encode_nodes(std::span<const SceneGraph> graphs, const Taxonomy& taxonomy) {
  Eigen::Index rows = 0;
  for (const auto& g : graphs) rows += static_cast<Eigen::Index>(g.num_nodes());
  Eigen::MatrixXd out(rows, static_cast<Eigen::Index>(taxonomy.encoding_dim()));
  Eigen::Index r = 0;
  for (const auto& g : graphs) {
    for (const auto& n : g.nodes()) out.row(r++) = encode_binary(n, taxonomy).transpose();
  }
  return out;
}

PcaModel fit_pca(const Eigen::MatrixXd& vectors, std::size_t dim) {
  const auto n = static_cast<std::size_t>(vectors.rows());
  const auto d = static_cast<std::size_t>(vectors.cols());
  if (dim == 0) throw DimensionError("PCA target dimension must be positive");
  if (dim > d) {
    throw DimensionError("PCA target dimension " + std::to_string(dim) +
                         " exceeds input dimension " + std::to_string(d));
  }
  if (n < dim) {
    throw DimensionError("PCA needs at least " + std::to_string(dim) + " vectors, got " +
                         std::to_string(n));
  }

  PcaModel model;
  model.mean = vectors.colwise().mean().transpose();
  const Eigen::MatrixXd centred = vectors.rowwise() - model.mean.transpose();
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  const Eigen::MatrixXd covariance = (centred.transpose() * centred) / denom;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance);
  if (solver.info() != Eigen::Success) {
    throw DimensionError("eigendecomposition of the covariance failed");
  }
  // Eigen returns ascending eigenvalues.
  const Eigen::VectorXd values = solver.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd& vecs = solver.eigenvectors();
  const double total = values.sum();
  const double max_value = values.size() > 0 ? values.maxCoeff() : 0.0;
  const double tolerance =
      max_value * static_cast<double>(d) * std::numeric_limits<double>::epsilon() * 16.0;

  const auto out_dim = static_cast<Eigen::Index>(dim);
  model.components = Eigen::MatrixXd::Zero(out_dim, static_cast<Eigen::Index>(d));
  model.explained_variance_ratio = Eigen::VectorXd::Zero(out_dim);
  for (Eigen::Index k = 0; k < out_dim; ++k) {
    const Eigen::Index src = static_cast<Eigen::Index>(d) - 1 - k;
    const double lambda = values[src];
    if (total <= 0.0 || lambda <= tolerance) break;
    Eigen::VectorXd component = vecs.col(src);
    Eigen::Index pivot = 0;
    component.cwiseAbs().maxCoeff(&pivot);
    if (component[pivot] < 0.0) component = -component;
    model.components.row(k) = component.transpose();
    model.explained_variance_ratio[k] = lambda / total;
    ++model.rank;
  }
  model.rank_deficient = model.rank < dim;
  if (model.rank_deficient) {
    warn("PCA input has rank " + std::to_string(model.rank) + " < requested dimension " +
         std::to_string(dim) + "; trailing components are zero");
  }
  return model;
}

Eigen::VectorXd transform_pca(const PcaModel& model, const Eigen::VectorXd& v) {
  if (static_cast<std::size_t>(v.size()) != model.input_dim()) {
    throw DimensionError("PCA input has length " + std::to_string(v.size()) + ", expected " +
                         std::to_string(model.input_dim()));
  }
  return model.components * (v - model.mean);
}

Eigen::VectorXd inverse_transform_pca(const PcaModel& model, const Eigen::VectorXd& z) {
  if (static_cast<std::size_t>(z.size()) != model.output_dim()) {
    throw DimensionError("PCA code has length " + std::to_string(z.size()) + ", expected " +
                         std::to_string(model.output_dim()));
  }
  return model.mean + model.components.transpose() * z;
}

TauSetting TauSetting::parse(const std::string& text) {
  TauSetting s;
  auto parse_number = [&](std::string_view digits) {
    double value = 0.0;
    const auto* end = digits.data() + digits.size();
    auto [ptr, ec] = std::from_chars(digits.data(), end, value);
    if (ec != std::errc() || ptr != end) {
      throw ConfigError("invalid tau setting '" + text + "'");
    }
    return value;
  };
  if (text == "inf") {
    s.metres = std::numeric_limits<double>::infinity();
  } else if (!text.empty() && (text[0] == 'p' || text[0] == 'P')) {
    s.percentile = parse_number(std::string_view(text).substr(1));
    if (*s.percentile < 0.0 || *s.percentile > 100.0) {
      throw ConfigError("tau percentile must be within [0, 100]: '" + text + "'");
    }
  } else {
    s.metres = parse_number(text);
    if (*s.metres < 0.0) throw ConfigError("tau must be >= 0: '" + text + "'");
  }
  return s;
}

std::string TauSetting::to_string() const {
  std::ostringstream out;
  if (percentile) {
    out << 'p' << *percentile;
  } else if (metres && std::isinf(*metres)) {
    out << "inf";
  } else {
    out << metres.value_or(0.0);
  }
  return out.str();
}

double pairwise_distance_percentile(std::span<const SceneGraph> graphs, double percentile) {
  std::vector<double> distances;
  for (const auto& g : graphs) {
    const auto& nodes = g.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (std::size_t j = i + 1; j < nodes.size(); ++j) {
        distances.push_back((nodes[j].position - nodes[i].position).norm());
      }
    }
  }
  if (distances.empty()) {
    throw ConfigError("cannot compute a distance percentile: no object pairs");
  }
  std::sort(distances.begin(), distances.end());
  // Linear interpolation between closest ranks.
  const double pos = percentile / 100.0 * static_cast<double>(distances.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, distances.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return distances[lo] + (distances[hi] - distances[lo]) * frac;
}

double resolve_tau(const TauSetting& setting, std::span<const SceneGraph> reference) {
  if (setting.metres) return *setting.metres;
  if (setting.percentile) return pairwise_distance_percentile(reference, *setting.percentile);
  throw ConfigError("empty tau setting");
}

EdgeSet build_edges(const SceneGraph& graph, const Taxonomy& taxonomy,
                    const EdgeConfig& config) {
  if (config.tau < 0.0) throw ConfigError("tau must be >= 0");
  const auto& nodes = graph.nodes();
  const auto num_rel = static_cast<Eigen::Index>(taxonomy.num_relationships());

  // Ordered so that row order is (source, target) lexicographic; merging
  // duplicate pairs keeps one row with the union of relation bits.
  std::map<std::pair<std::size_t, std::size_t>, Eigen::VectorXd> pairs;
  auto slot = [&](std::size_t s, std::size_t t) -> Eigen::VectorXd& {
    auto [it, inserted] = pairs.try_emplace({s, t});
    if (inserted) it->second = Eigen::VectorXd::Zero(num_rel);
    return it->second;
  };

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      if (i == j) continue;
      if ((nodes[j].position - nodes[i].position).norm() < config.tau) slot(i, j);
    }
  }
  if (config.include_semantic_edges) {
    for (const auto& e : graph.semantic_edges()) {
      const auto s = *graph.find(e.source);
      const auto t = *graph.find(e.target);
      slot(s, t)[static_cast<Eigen::Index>(e.relation_index)] = 1.0;
    }
  }

  EdgeSet out;
  out.index.reserve(pairs.size());
  out.features.resize(static_cast<Eigen::Index>(pairs.size()), num_rel + 3);
  Eigen::Index row = 0;
  for (const auto& [key, bits] : pairs) {
    const auto [s, t] = key;
    out.index.push_back({s, t});
    out.features.row(row).head(num_rel) = bits.transpose();
    out.features.row(row).tail(3) = (nodes[t].position - nodes[s].position).transpose();
    ++row;
  }
  return out;
}

EmbeddedGraph embed(const SceneGraph& graph, const Taxonomy& taxonomy,
                    const PcaModel& pca, const EdgeConfig& config) {
  if (pca.input_dim() != taxonomy.encoding_dim()) {
    throw DimensionError("PCA model expects encodings of length " +
                         std::to_string(pca.input_dim()) + ", taxonomy '" +
                         taxonomy.name() + "' produces " +
                         std::to_string(taxonomy.encoding_dim()));
  }
  EmbeddedGraph eg;
  const auto n = static_cast<Eigen::Index>(graph.num_nodes());
  eg.node_features.resize(n, static_cast<Eigen::Index>(pca.output_dim()));
  eg.node_ids.reserve(graph.num_nodes());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& node = graph.nodes()[static_cast<std::size_t>(i)];
    eg.node_features.row(i) = transform_pca(pca, encode_binary(node, taxonomy)).transpose();
    eg.node_ids.push_back(node.id);
  }
  auto edges = build_edges(graph, taxonomy, config);
  eg.edge_index = std::move(edges.index);
  eg.edge_features = std::move(edges.features);
  return eg;
}

}  // namespace vsg
