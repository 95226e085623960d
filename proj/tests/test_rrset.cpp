#include <doctest.h>

#include <cmath>

#include "aim/diffusion.hpp"
#include "aim/rrset.hpp"
#include "aim/verify.hpp"

using namespace aim;

namespace {

constexpr double kProbs[] = {0.3, 0.5, 1.0};
const Horizon kInf = Horizon::unbounded();

std::vector<RRSet> draw(const Graph& g, const NodeSet& s, const Realization& phi, Horizon t, std::size_t count,
                        std::uint64_t seed) {
  RRSampler sampler(g, s, phi, t);
  std::vector<RRSet> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, i));
    out.push_back(sampler.sample(rng));
  }
  return out;
}

}  // namespace

TEST_CASE("isolated root") {
  const Graph g(1, {}, {});
  Rng rng(1);
  const auto r = sample_rrset(g, NodeSet(1), Realization(0), kInf, rng);
  CHECK(r.nodes == std::vector<NodeId>{0});
  CHECK(r.root == 0);
  CHECK_FALSE(r.empty_reason.has_value());
}

TEST_CASE("reaching S empties the set") {
  const Graph g(2, {{0, 1}}, {1.0});
  Rng rng(1);
  const auto r = sample_rrset(g, make_node_set(2, {0}), Realization(1), kInf, rng);
  CHECK(r.root == 1);
  CHECK(r.nodes.empty());
  CHECK(r.empty_reason == EmptyReason::RootCoveredByS);
}

TEST_CASE("observed edges are never resampled") {
  const Graph g(3, {{0, 2}, {1, 2}}, {1.0, 1.0});
  Realization phi(2);
  phi.set_dead(0);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto r = sample_rrset(g, NodeSet(3), phi, kInf, rng);
    const bool excluded = std::find(r.nodes.begin(), r.nodes.end(), 0) == r.nodes.end() || r.root == 0;
    CHECK(excluded);
  }
  Realization forced(2);
  forced.set_live(1);
  const Graph weak(3, {{0, 2}, {1, 2}}, {0.01, 0.01});
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto r = sample_rrset(weak, NodeSet(3), forced, kInf, rng);
    if (r.root == 2) CHECK(std::find(r.nodes.begin(), r.nodes.end(), 1) != r.nodes.end());
  }
}

TEST_CASE("roots come from outside S and the hop limit is respected") {
  const Graph g(4, {{0, 1}, {1, 2}, {2, 3}}, {1.0, 1.0, 1.0});
  const auto s = make_node_set(4, {3});
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto r = sample_rrset(g, s, Realization(3), Horizon::finite(1), rng);
    CHECK(r.root != 3);
    CHECK(r.nodes.size() == (r.root == 0 ? 1u : 2u));
  }
  CHECK_THROWS_AS(RRSampler(g, make_node_set(4, {0, 1, 2, 3}), Realization(3), kInf), std::invalid_argument);
}

TEST_CASE("estimate_marginal examples") {
  const Graph g(2, {{0, 1}}, {0.3});
  const auto sets = draw(g, NodeSet(2), Realization(1), kInf, 100'000, 3);
  CHECK(estimate_marginal(g, NodeSet(2), sets, NodeSet(2)) == 0.0);
  CHECK(std::abs(estimate_marginal(g, NodeSet(2), sets, make_node_set(2, {0})) - 1.3) <= 0.03);

  const Graph path(3, {{0, 1}, {1, 2}}, {1.0, 1.0});
  for (std::size_t count : {1u, 7u, 100u})
    CHECK(estimate_marginal(path, NodeSet(3), draw(path, NodeSet(3), Realization(2), kInf, count, 4),
                            make_node_set(3, {0})) == 3.0);
  CHECK_THROWS_AS(estimate_marginal(g, NodeSet(2), std::span<const RRSet>{}, NodeSet(2)), std::invalid_argument);
}

TEST_CASE("conditioning on observed edges matches the exact value") {
  // 0 -> 1 -> 2 and 0 -> 2; blocking or forcing single edges changes the gain of 0.
  const Graph g(3, {{0, 1}, {1, 2}, {0, 2}}, {0.5, 0.5, 0.5});
  for (int mask = 0; mask < 27; ++mask) {
    Realization phi(3);
    for (EdgeId e = 0, m = mask; e < 3; ++e, m /= 3) {
      if (m % 3 == 1) phi.set_live(e);
      if (m % 3 == 2) phi.set_dead(e);
    }
    const auto v = make_node_set(3, {0});
    const double exact = expected_marginal_exact(g, NodeSet(3), v, phi, kInf);
    const double est = estimate_marginal(g, NodeSet(3), draw(g, NodeSet(3), phi, kInf, 100'000, mask), v);
    CHECK(std::abs(est - exact) <= 0.05);
  }
}

TEST_CASE("batch means are unbiased within three standard errors") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = random_tiny_graph(rng, 5, 10, kProbs);
    const Status u = random_reachable_status(g, rng);
    const auto inactive = members(~u.active);
    if (inactive.empty()) continue;
    const auto v = make_node_set(g.node_count(), {inactive[rng.below(inactive.size())]});
    const double exact = expected_marginal_exact(g, u.active, v, u.observed, kInf);
    std::vector<double> batches;
    for (std::uint64_t b = 0; b < 40; ++b)
      batches.push_back(estimate_marginal(g, u.active, draw(g, u.active, u.observed, kInf, 2000, rng()), v));
    double mean = 0, var = 0;
    for (double x : batches) mean += x;
    mean /= static_cast<double>(batches.size());
    for (double x : batches) var += (x - mean) * (x - mean);
    const double se = std::sqrt(var / static_cast<double>(batches.size() - 1) / static_cast<double>(batches.size()));
    CHECK(std::abs(mean - exact) <= 3 * se + 1e-12);
  }
}

TEST_CASE("greedy_select examples") {
  // star: 0 -> 1, 2, 3
  const Graph star(4, {{0, 1}, {0, 2}, {0, 3}}, {1.0, 1.0, 1.0});
  CHECK(greedy_select(star, Status::empty(star), kInf, 1000, 1) == 0);

  Status after = Status::empty(star);
  after.active = make_node_set(4, {0, 1, 2, 3});
  for (EdgeId e = 0; e < 3; ++e) after.observed.set_live(e);
  CHECK_THROWS_AS(greedy_select(star, after, kInf, 1000, 1), Error);

  // center and one leaf active, the other two edges observed dead: both
  // remaining leaves gain exactly 1, so the smaller id wins
  Status partial = Status::empty(star);
  partial.active = make_node_set(4, {0, 1});
  partial.observed.set_live(0);
  partial.observed.set_dead(1);
  partial.observed.set_dead(2);
  CHECK(greedy_select(Graph(4, {{0, 1}, {0, 2}, {0, 3}}, {1.0, 0.5, 0.5}), partial, kInf, 1000, 1) == 2);

  const Graph pair(2, {{0, 1}}, {0.5});
  Status u = Status::empty(pair);
  u.active.set(0);
  u.observed.set_dead(0);
  CHECK(greedy_select(pair, u, kInf, 1000, 1) == 1);
}

TEST_CASE("greedy_select does not depend on the worker count") {
  const auto g = random_graph(60, 300, 0.1, 9);
  Status u = Status::empty(g);
  u.active.set(5);
  const auto one = rr_coverage(g, u.active, u.observed, kInf, 20'000, 17, 1);
  CHECK(rr_coverage(g, u.active, u.observed, kInf, 20'000, 17, 3) == one);
  CHECK(greedy_select(g, u, kInf, 20'000, 17, 1) == greedy_select(g, u, kInf, 20'000, 17, 4));
}

TEST_CASE("greedy_select agrees with the exact argmax") {
  Rng rng(32);
  int agree = 0;
  const int trials = 100;
  for (int trial = 0; trial < trials; ++trial) {
    const Graph g = random_tiny_graph(rng, 5, 10, kProbs);
    const Status u = random_reachable_status(g, rng);
    if (u.active.count() == g.node_count()) {
      ++agree;
      continue;
    }
    const auto gains = expected_marginals_exact(g, u.active, u.observed, kInf);
    double best = 0;
    for (NodeId v = 0; v < g.node_count(); ++v)
      if (!u.active.test(v)) best = std::max(best, gains[v]);
    const NodeId pick = greedy_select(g, u, kInf, 100'000, rng());
    if (gains[pick] >= best - 1e-9) ++agree;  // ties count as agreement
  }
  CHECK(agree >= 95);
}
