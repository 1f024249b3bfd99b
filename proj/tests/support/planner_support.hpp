#pragma once

#include <random>
#include <vector>

#include "test_support.hpp"
#include "vsg/planner.hpp"

namespace vsg::testing {

// A decoy cluster of 2(n + 3) unchanged objects on one side of the start and
// n + 3 removed objects farther away on the other side. Coverage must clear
// the decoys first; a planner that knows the changes goes straight across.
inline Episode separable_episode(const Taxonomy& taxonomy, nn::Rng& rng, std::size_t n) {
  std::uniform_real_distribution<double> jitter(-0.4, 0.4);
  std::uniform_real_distribution<double> arm(6.0, 12.0);
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
  const double theta = angle(rng);
  const Vec3 axis(std::cos(theta), std::sin(theta), 0.0);
  const double far = arm(rng);
  const std::size_t k = n + 3;

  std::vector<ObjectNode> previous;
  std::vector<ObjectNode> realized;
  std::uint64_t id = 1;
  for (std::size_t i = 0; i < 2 * k; ++i) {
    const Vec3 p = -far * axis + Vec3(jitter(rng), jitter(rng), 0.0);
    previous.push_back(make_node(id, 0, {}, p));
    realized.push_back(make_node(id, 0, {}, p));
    ++id;
  }
  for (std::size_t i = 0; i < k; ++i) {
    previous.push_back(make_node(id++, 2, {}, far * axis + Vec3(jitter(rng), jitter(rng), 0.0)));
  }
  return make_episode(make_graph(taxonomy, previous, {}, "before"),
                      make_graph(taxonomy, realized, {}, "after"), n);
}

}  // namespace vsg::testing
