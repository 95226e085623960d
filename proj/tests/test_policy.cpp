#include <doctest.h>

#include "aim/policy.hpp"
#include "aim/verify.hpp"
#include "oracles.hpp"

using namespace aim;

namespace {

constexpr double kProbs[] = {0.3, 0.5, 1.0};

const Graph& star() {
  static const Graph g(4, {{0, 1}, {0, 2}, {0, 3}}, {0.5, 0.5, 0.5});
  return g;
}

}  // namespace

TEST_CASE("policy names") {
  CHECK(std::holds_alternative<Greedy>(parse_policy_kind("greedy")));
  CHECK(std::get<Greedy>(parse_policy_kind("greedy", 77)).n_samples == 77);
  CHECK(std::holds_alternative<HighDegree>(parse_policy_kind("degree")));
  CHECK(std::holds_alternative<RandomPolicy>(parse_policy_kind("random")));
  CHECK_THROWS_AS(parse_policy_kind("best"), std::invalid_argument);
  CHECK_THROWS_AS(parse_policy_kind("greedy", 0), std::invalid_argument);
  for (const char* name : {"greedy", "degree", "random"}) CHECK(policy_name(parse_policy_kind(name)) == name);
}

TEST_CASE("examples on small graphs") {
  Rng rng(1);
  CHECK(decide(HighDegree{}, star(), Status::empty(star()), rng) == 0);
  const Graph path(3, {{0, 1}, {1, 2}}, {1.0, 1.0});
  CHECK(decide(Greedy{10'000}, path, Status::empty(path), rng) == 0);
  CHECK(exact_greedy_rule()(path, Status::empty(path)) == 0);
  CHECK(high_degree_rule()(star(), Status::empty(star())) == 0);
}

TEST_CASE("no policy picks an active node or works on a saturated status") {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const Graph g = random_tiny_graph(rng, 5, 10, kProbs);
    const Status u = random_reachable_status(g, rng);
    const bool saturated = u.active.count() == g.node_count();
    const PolicyKind kinds[] = {Greedy{2000}, HighDegree{}, RandomPolicy{}};
    for (const auto& kind : kinds) {
      if (saturated) {
        CHECK_THROWS_AS(decide(kind, g, u, rng), Error);
      } else {
        CHECK_FALSE(u.active.test(decide(kind, g, u, rng)));
      }
    }
    if (!saturated) {
      CHECK_FALSE(u.active.test(exact_greedy_rule()(g, u)));
      CHECK_FALSE(u.active.test(worst_greedy_rule()(g, u)));
      CHECK_FALSE(u.active.test(high_degree_rule()(g, u)));
      CHECK_FALSE(u.active.test(hashed_random_rule(9)(g, u)));
    }
  }
}

TEST_CASE("high degree ignores observations and breaks ties by id") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Graph g = random_tiny_graph(rng, 6, 15, kProbs);
    Status u = random_reachable_status(g, rng);
    if (u.active.count() == g.node_count()) continue;
    const NodeId pick = decide(HighDegree{}, g, u, rng);
    NodeId want = kNoNode;
    for (NodeId v = 0; v < g.node_count(); ++v)
      if (!u.active.test(v) && (want == kNoNode || g.out_degree(v) > g.out_degree(want))) want = v;
    CHECK(pick == want);
    Status other{u.active, Realization(g.edge_count())};
    CHECK(decide(HighDegree{}, g, other, rng) == pick);
  }
}

TEST_CASE("random policy covers every inactive node") {
  Rng rng(4);
  Status u = Status::empty(star());
  u.active.set(2);
  std::vector<int> hits(4, 0);
  for (int i = 0; i < 4000; ++i) ++hits[decide(RandomPolicy{}, star(), u, rng)];
  CHECK(hits[2] == 0);
  for (NodeId v : {0u, 1u, 3u}) CHECK(hits[v] > 1100);
}

TEST_CASE("exact greedy matches the brute-force argmax") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Graph g = random_tiny_graph(rng, 5, 10, kProbs);
    const Status u = random_reachable_status(g, rng);
    if (u.active.count() == g.node_count()) continue;
    CHECK(exact_greedy_rule()(g, u) == oracle::greedy_rule(g)(u));
  }
}

TEST_CASE("hashed random rule is a fixed function of the status") {
  const auto rule = hashed_random_rule(11);
  Status u = Status::empty(star());
  const NodeId first = rule(star(), u);
  for (int i = 0; i < 5; ++i) CHECK(rule(star(), u) == first);
  std::vector<bool> seen(4);
  for (std::uint64_t seed = 0; seed < 64; ++seed) seen[hashed_random_rule(seed)(star(), u)] = true;
  CHECK(std::count(seen.begin(), seen.end(), true) == 4);
}
