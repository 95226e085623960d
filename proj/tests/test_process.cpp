#include <doctest.h>

#include <cmath>

#include "aim/process.hpp"
#include "aim/verify.hpp"

using namespace aim;

namespace {

constexpr double kProbs[] = {0.3, 0.5, 1.0};

std::vector<FeedbackSchedule> all_schedules() {
  return {FeedbackSchedule::non_adaptive(), FeedbackSchedule::finite(1), FeedbackSchedule::finite(3),
          FeedbackSchedule::full_adoption()};
}

std::vector<PolicyKind> all_kinds() { return {Greedy{500}, HighDegree{}, RandomPolicy{}}; }

}  // namespace

TEST_CASE("schedule parsing") {
  CHECK(FeedbackSchedule::parse("0") == FeedbackSchedule::non_adaptive());
  CHECK(FeedbackSchedule::parse("inf") == FeedbackSchedule::full_adoption());
  CHECK(FeedbackSchedule::parse("4") == FeedbackSchedule::finite(4));
  CHECK(FeedbackSchedule::parse("4").horizon() == Horizon::finite(4));
  CHECK(FeedbackSchedule::full_adoption().horizon() == Horizon::unbounded());
  CHECK(FeedbackSchedule::non_adaptive().horizon() == Horizon::finite(0));
  for (const char* bad : {"", "-1", "x", "2.5", "infinity"}) CHECK_THROWS_AS(FeedbackSchedule::parse(bad), std::invalid_argument);
  CHECK_THROWS_AS(FeedbackSchedule::finite(0), std::invalid_argument);
  for (const auto& s : all_schedules()) CHECK(FeedbackSchedule::parse(s.to_string()) == s);
}

TEST_CASE("greedy on a certain path seeds its head") {
  const Graph g(3, {{0, 1}, {1, 2}}, {1.0, 1.0});
  for (const auto& s : all_schedules()) {
    const auto tr = run_process(g, Greedy{1000}, 1, s, 3);
    CHECK(tr.seeds_in_order == std::vector<NodeId>{0});
    CHECK(tr.final_active == 3);
  }
}

TEST_CASE("greedy with full adoption seeds the star and then the isolated node") {
  // a = 0 isolated, b = 1 -> c = 2 certain
  const Graph g(3, {{1, 2}}, {1.0});
  const auto tr = run_process(g, Greedy{1000}, 2, FeedbackSchedule::full_adoption(), 5);
  CHECK(tr.seeds_in_order == std::vector<NodeId>{1, 0});
  CHECK(tr.final_active == 3);
}

TEST_CASE("finite feedback waits when nothing is diffusing") {
  const Graph g(3, {}, {});
  const auto tr = run_process(g, HighDegree{}, 2, FeedbackSchedule::finite(3), 1);
  CHECK(tr.active_per_round == std::vector<std::size_t>{1, 1, 1, 2, 2, 2, 2});
  CHECK(tr.rounds_elapsed == 7);
  CHECK(tr.final_active == 2);
}

TEST_CASE("saturated graphs skip the remaining seeds") {
  const Graph g(2, {{0, 1}}, {1.0});
  const auto tr = run_process(g, HighDegree{}, 2, FeedbackSchedule::full_adoption(), 1);
  CHECK(tr.seeds_in_order == std::vector<NodeId>{0});
  CHECK(tr.final_active == 2);
  CHECK_THROWS_AS(run_process(g, HighDegree{}, 3, FeedbackSchedule::finite(1), 1), std::invalid_argument);
}

TEST_CASE("traces are non-decreasing and end at the final count") {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const Graph g = random_tiny_graph(rng, 8, 20, kProbs);
    const std::size_t k = 1 + rng.below(g.node_count());
    for (const auto& kind : all_kinds())
      for (const auto& s : all_schedules()) {
        const auto tr = run_process(g, kind, k, s, rng());
        REQUIRE_FALSE(tr.active_per_round.empty());
        CHECK(std::is_sorted(tr.active_per_round.begin(), tr.active_per_round.end()));
        CHECK(tr.active_per_round.back() == tr.final_active);
        CHECK(tr.rounds_elapsed == tr.active_per_round.size());
        CHECK(tr.seeds_in_order.size() <= k);
      }
  }
}

TEST_CASE("the lazy process reaches the same final count under common random numbers") {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const Graph g = random_tiny_graph(rng, 8, 20, kProbs);
    const std::size_t k = 1 + rng.below(g.node_count());
    const auto seed = rng();
    ProcessOptions opts;
    opts.policy_seed = 99;
    for (const auto& kind : all_kinds())
      for (const auto& s : {FeedbackSchedule::finite(1), FeedbackSchedule::finite(2), FeedbackSchedule::full_adoption()})
        CHECK(run_process(g, kind, k, s, seed, opts).final_active == run_lazy_process(g, kind, k, s, seed, opts).final_active);
  }
  const Graph g(2, {{0, 1}}, {0.5});
  CHECK_THROWS_AS(run_lazy_process(g, HighDegree{}, 1, FeedbackSchedule::non_adaptive(), 1), std::invalid_argument);
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    CHECK(run_lazy_process(g, HighDegree{}, 1, FeedbackSchedule::finite(1), seed).final_active ==
          run_process(g, HighDegree{}, 1, FeedbackSchedule::finite(1), seed).final_active);
}

TEST_CASE("runs sharing a seed see the same edge states") {
  // One seed diffuses to the end under either schedule, so the counts agree
  // only if both runs draw identical edge states.
  const Graph g(3, {{0, 1}, {1, 2}}, {0.5, 0.5});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = run_process(g, HighDegree{}, 1, FeedbackSchedule::finite(1), seed);
    const auto b = run_process(g, HighDegree{}, 1, FeedbackSchedule::full_adoption(), seed);
    CHECK(a.final_active == b.final_active);
  }
}

TEST_CASE("estimate_F") {
  const Graph certain(3, {{0, 1}, {1, 2}}, {1.0, 1.0});
  const auto est = estimate_F(certain, HighDegree{}, 1, FeedbackSchedule::finite(1), 20, 1);
  CHECK(est.mean == 3.0);
  CHECK(est.std_error == 0.0);
  for (double se : est.round_std_error) CHECK(se == 0.0);
  CHECK(est.traces.size() == 20);
  CHECK_THROWS_AS(estimate_F(certain, HighDegree{}, 1, FeedbackSchedule::finite(1), 0, 1), std::invalid_argument);

  const Graph g(2, {{0, 1}}, {0.3});
  const auto coin = estimate_F(g, HighDegree{}, 1, FeedbackSchedule::full_adoption(), 20'000, 4);
  CHECK(std::abs(coin.mean - 1.3) <= 3 * coin.std_error + 1e-12);
  CHECK(coin.std_error == doctest::Approx(std::sqrt(0.21 / 20'000)).epsilon(0.05));
}

TEST_CASE("estimates do not depend on the worker count or on sweeping") {
  const auto g = random_graph(30, 90, 0.2, 8);
  const auto schedules = all_schedules();
  for (const auto& kind : all_kinds()) {
    const auto swept = estimate_F_sweep(g, kind, 3, schedules, 12, 5, 1);
    const auto parallel = estimate_F_sweep(g, kind, 3, schedules, 12, 5, 3);
    for (std::size_t i = 0; i < schedules.size(); ++i) {
      const auto alone = estimate_F(g, kind, 3, schedules[i], 12, 5, 2);
      CHECK(alone.mean == swept[i].mean);
      CHECK(alone.std_error == swept[i].std_error);
      CHECK(parallel[i].round_mean == swept[i].round_mean);
      for (std::size_t r = 0; r < 12; ++r) {
        CHECK(alone.traces[r].seeds_in_order == swept[i].traces[r].seeds_in_order);
        CHECK(alone.traces[r].active_per_round == parallel[i].traces[r].active_per_round);
      }
    }
  }
}

TEST_CASE("aggregates pad shorter traces with their final value") {
  const Graph g(2, {{0, 1}}, {0.5});
  const auto est = estimate_F(g, HighDegree{}, 1, FeedbackSchedule::finite(1), 50, 3);
  std::size_t longest = 0;
  for (const auto& tr : est.traces) longest = std::max(longest, tr.active_per_round.size());
  REQUIRE(est.round_mean.size() == longest);
  CHECK(est.round_mean.back() == doctest::Approx(est.mean));
  const auto one = estimate_F(g, HighDegree{}, 1, FeedbackSchedule::finite(1), 1, 3);
  REQUIRE(one.round_mean.size() == one.traces[0].active_per_round.size());
  for (std::size_t i = 0; i < one.round_mean.size(); ++i)
    CHECK(one.round_mean[i] == static_cast<double>(one.traces[0].active_per_round[i]));
}

TEST_CASE("mean_and_stderr") {
  CHECK(mean_and_stderr(std::vector<double>{}) == std::pair<double, double>{0.0, 0.0});
  CHECK(mean_and_stderr(std::vector<double>{4.0}) == std::pair<double, double>{4.0, 0.0});
  const auto [m, se] = mean_and_stderr(std::vector<double>{1, 2, 3, 4});
  CHECK(m == 2.5);
  CHECK(se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  std::vector<double> many(1000, 0.1);
  CHECK(mean_and_stderr(many).first == doctest::Approx(0.1).epsilon(1e-15));
}
