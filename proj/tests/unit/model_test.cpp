#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "gradcheck_scenarios.hpp"
#include "model_support.hpp"
#include "oracles.hpp"
#include "test_support.hpp"
#include "vsg/error.hpp"
#include "vsg/model.hpp"

namespace vsg {
namespace {

TEST(MpConv, MatchesScalarLoopOracle) {
  nn::Rng rng(31);
  for (auto gate : {GateMode::kElementwise, GateMode::kScalar}) {
    for (int trial = 0; trial < 20; ++trial) {
      MpConv conv("c", 5, 6, 7, gate, &rng);
      const auto g = testing::random_embedded(rng, 1 + static_cast<std::size_t>(trial % 8), 5, 3);
      const auto fast = conv.forward(g.node_features, g.edge_index, g.edge_features);
      const auto slow = oracle::mp_conv_forward(conv, oracle::to_rows(g.node_features), g.edge_index,
                                                oracle::to_rows(g.edge_features));
      for (Eigen::Index r = 0; r < fast.rows(); ++r) {
        for (Eigen::Index c = 0; c < fast.cols(); ++c) {
          EXPECT_NEAR(fast(r, c), slow[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)],
                      1e-12);
        }
      }
    }
  }
}

TEST(MpConv, IsolatedNodeOnlySeesItself) {
  nn::Rng rng(32);
  MpConv conv("c", 3, 5, 4, GateMode::kElementwise, &rng);
  nn::ParamStore store;
  conv.register_parameters(store);
  testing::randomize_biases(store, rng);
  const nn::Matrix z = testing::random_matrix(3, 3, rng);
  const std::vector<Edge> edges{{0, 1}};
  const nn::Matrix q = testing::random_matrix(1, 5, rng);
  const auto out = conv.forward(z, edges, q);
  const auto self = conv.self_net().forward(z);
  EXPECT_EQ(out.row(0), self.row(0));
  EXPECT_EQ(out.row(2), self.row(2));
  EXPECT_NE(out.row(1), self.row(1));
}

TEST(MpConv, RejectsBadShapes) {
  nn::Rng rng(33);
  MpConv conv("c", 3, 5, 4, GateMode::kElementwise, &rng);
  const nn::Matrix z = testing::random_matrix(2, 3, rng);
  const nn::Matrix q = testing::random_matrix(1, 5, rng);
  EXPECT_THROW(conv.forward(z, std::vector<Edge>{{0, 2}}, q), GraphError);
  EXPECT_THROW(conv.forward(testing::random_matrix(2, 4, rng), std::vector<Edge>{}, q),
               DimensionError);
  EXPECT_THROW(conv.forward(z, std::vector<Edge>{{0, 1}, {1, 0}}, q), DimensionError);
  EXPECT_THROW(MpConv(nn::Mlp::zeros("s", {3, 4}), nn::Mlp::zeros("e", {5, 3}),
                      GateMode::kElementwise),
               DimensionError);
  EXPECT_THROW(MpConv(nn::Mlp::zeros("s", {3, 3}), nn::Mlp::zeros("e", {5, 3}), GateMode::kScalar),
               DimensionError);
}

TEST(GradCheck, MpConvBothGates) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (auto gate : {GateMode::kElementwise, GateMode::kScalar}) {
      const auto r = testing::check_mp_conv(seed, gate);
      EXPECT_TRUE(r.passed(1e-4)) << r.worst_entry << " " << r.max_relative_error;
    }
  }
}

TEST(GradCheck, FullNetworks) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    for (const char* arch : {"delta_vsg", "mlp"}) {
      const auto r = testing::check_network(seed, arch);
      EXPECT_TRUE(r.passed(1e-4)) << arch << " " << r.worst_entry << " " << r.max_relative_error;
    }
    const auto scalar = testing::check_network(seed, "delta_vsg", GateMode::kScalar);
    EXPECT_TRUE(scalar.passed(1e-4)) << scalar.worst_entry << " " << scalar.max_relative_error;
  }
}

TEST(Network, EvalForwardIgnoresRng) {
  auto model = testing::small_model(34);
  nn::Rng rng(35);
  const auto g = testing::random_graph(model.taxonomy(), rng, 8);
  const auto eg = model.embed(g);
  nn::Rng a(1), b(2);
  const auto pa = model.network().forward(eg, nn::Mode::kEval, a).probabilities;
  const auto pb = model.network().forward(eg, nn::Mode::kEval, b).probabilities;
  EXPECT_EQ(pa, pb);
  EXPECT_EQ(model.predict(g).probabilities, pa);
  EXPECT_TRUE((pa.array() > 0.0).all() && (pa.array() < 1.0).all());
}

TEST(Network, BackwardNeedsTrainCache) {
  auto model = testing::small_model(36);
  nn::Rng rng(37);
  const auto eg = model.embed(testing::random_graph(model.taxonomy(), rng, 5));
  const auto pass = model.network().forward(eg, nn::Mode::kEval, rng);
  EXPECT_THROW(model.network().backward(*pass.cache, pass.probabilities), UsageError);
  auto other = testing::small_model(36, "mlp");
  const auto train_pass = model.network().forward(eg, nn::Mode::kTrain, rng);
  EXPECT_THROW(other.network().backward(*train_pass.cache, train_pass.probabilities),
               UsageError);
}

TEST(Network, PermutationEquivariant) {
  auto model = testing::small_model(38);
  nn::Rng rng(39);
  for (int trial = 0; trial < 10; ++trial) {
    const auto eg = model.embed(testing::random_graph(model.taxonomy(), rng, 8));
    const auto n = eg.num_nodes();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    EmbeddedGraph shuffled = eg;
    for (std::size_t i = 0; i < n; ++i) {
      shuffled.node_features.row(static_cast<Eigen::Index>(perm[i])) =
          eg.node_features.row(static_cast<Eigen::Index>(i));
      shuffled.node_ids[perm[i]] = eg.node_ids[i];
    }
    for (auto& e : shuffled.edge_index) e = {perm[e.source], perm[e.target]};
    const auto p = model.predict(eg).probabilities;
    const auto q = model.predict(shuffled).probabilities;
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_LT((p.row(static_cast<Eigen::Index>(i)) - q.row(static_cast<Eigen::Index>(perm[i])))
                    .cwiseAbs()
                    .maxCoeff(),
                1e-12);
    }
  }
}

TEST(Network, PredictionsAreTranslationInvariant) {
  auto model = testing::small_model(40);
  nn::Rng rng(41);
  const auto g = testing::random_graph(model.taxonomy(), rng, 8);
  std::vector<ObjectNode> moved = g.nodes();
  for (auto& n : moved) n.position += Vec3(-2.0, 11.0, 0.5);
  const auto h = testing::make_graph(model.taxonomy(), moved, g.semantic_edges());
  EXPECT_LT((model.predict(g).probabilities - model.predict(h).probabilities).cwiseAbs().maxCoeff(),
            1e-9);
}

TEST(Network, ConfigValidation) {
  NetworkConfig config;
  config.input_dim = 4;
  config.num_relations = 2;
  config.architecture = "transformer";
  EXPECT_THROW(make_network(config, nullptr), ConfigError);
  config.architecture = "delta_vsg";
  config.dropout_rate = 1.0;
  EXPECT_THROW(make_network(config, nullptr), ConfigError);
  config.dropout_rate = 0.2;
  config.input_dim = 0;
  EXPECT_THROW(make_network(config, nullptr), ConfigError);
  EXPECT_EQ(gate_mode_from_string("scalar"), GateMode::kScalar);
  EXPECT_THROW(gate_mode_from_string("bogus"), ConfigError);
}

TEST(VsgModel, TaxonomyMismatchIsCheckpointError) {
  auto model = testing::small_model(42);
  const Taxonomy other("other", {"x"}, {{"on", AttributeKind::kState}}, {"r"});
  const auto g = testing::make_graph(other, {testing::make_node(1, 0, {}, {0, 0, 0})});
  EXPECT_THROW(model.predict(g), CheckpointError);
}

TEST(VsgModel, CopyIsDeep) {
  auto model = testing::small_model(43);
  VsgModel copy = model;
  auto store = copy.network().parameters();
  store.entries()[0]->value.setZero();
  nn::Rng rng(44);
  const auto g = testing::random_graph(model.taxonomy(), rng, 6);
  EXPECT_NE(model.predict(g).probabilities, copy.predict(g).probabilities);
}

}  // namespace
}  // namespace vsg
