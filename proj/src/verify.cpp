#include "aim/verify.hpp"

#include <cmath>

#include <fmt/format.h>

#include "aim/diffusion.hpp"

namespace aim {

Graph random_tiny_graph(Rng& rng, std::size_t max_nodes, std::size_t max_edges, std::span<const double> probs) {
  if (max_nodes == 0 || probs.empty()) throw std::invalid_argument("random_tiny_graph needs nodes and probabilities");
  const std::size_t n = 1 + rng.below(max_nodes);
  std::vector<Edge> edges;
  std::vector<double> p;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = 0; v < n; ++v)
      if (u != v && edges.size() < max_edges && rng.bernoulli(0.5)) {
        edges.push_back({u, v});
        p.push_back(probs[rng.below(probs.size())]);
      }
  return Graph(n, std::move(edges), std::move(p));
}

namespace {

std::vector<NodeId> sampled_round(const Graph& g, Status& u, Rng& rng) {
  const auto frontier = pending_frontier(g, u);
  return advance_round(g, u, frontier, [&](EdgeId e) { return rng.bernoulli(g.prob(e)); });
}

}  // namespace

Status random_reachable_status(const Graph& g, Rng& rng, std::size_t max_seeds) {
  Status u = Status::empty(g);
  const std::size_t seeds = rng.below(max_seeds + 1);
  for (std::size_t i = 0; i < seeds && u.active.count() < g.node_count(); ++i) {
    const auto inactive = members(~u.active);
    u.active.set(inactive[rng.below(inactive.size())]);
    const std::size_t rounds = rng.below(3);
    for (std::size_t r = 0; r < rounds; ++r) sampled_round(g, u, rng);
  }
  return u;
}

Status run_to_final(const Graph& g, Status u, Rng& rng) {
  while (!pending_frontier(g, u).empty()) sampled_round(g, u, rng);
  return u;
}

std::string describe_graph(const Graph& g) {
  std::string out = fmt::format("n={}", g.node_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    out += fmt::format(" {}>{}:{}", g.edge(e).source, g.edge(e).target, g.prob(e));
  return out;
}

namespace {

constexpr double kTol = 1e-9;
constexpr double kProbs[] = {0.3, 0.5, 1.0};

FeedbackSchedule random_schedule(Rng& rng) {
  switch (rng.below(3)) {
    case 0: return FeedbackSchedule::finite(1);
    case 1: return FeedbackSchedule::finite(2);
    default: return FeedbackSchedule::full_adoption();
  }
}

class Battery {
 public:
  explicit Battery(const VerifyOptions& opts) : opts_(opts) {}

  template <class Body>
  void run(const std::string& name, std::uint64_t stream, Body&& body) {
    CheckResult r{name, 0, 0, {}};
    for (std::size_t i = 0; i < opts_.instances; ++i) {
      Rng rng(derive_seed(derive_seed(opts_.seed, stream), i));
      ++r.trials;
      std::string why;
      try {
        why = body(rng);
      } catch (const std::exception& ex) {
        why = fmt::format("exception: {}", ex.what());
      }
      if (!why.empty()) {
        if (r.failures++ == 0) r.first_failure = fmt::format("trial {}: {}", i, why);
      }
    }
    results_.push_back(std::move(r));
  }

  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  const VerifyOptions& opts_;
  std::vector<CheckResult> results_;
};

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& opts) {
  const DecisionRule greedy = opts.faulty_greedy ? worst_greedy_rule() : exact_greedy_rule();
  Battery b(opts);

  b.run("greedy-oracle", 1, [&](Rng& rng) -> std::string {
    const Graph g = random_tiny_graph(rng, 5, 10, kProbs);
    const Status u = random_reachable_status(g, rng);
    if (u.active.count() == g.node_count()) return {};
    const NodeId pick = greedy(g, u);
    double best = 0.0, chosen = 0.0;
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (u.active.test(v)) continue;
      const double gain = expected_marginal_exact(g, u.active, make_node_set(g.node_count(), {v}), u.observed,
                                                  Horizon::unbounded());
      best = std::max(best, gain);
      if (v == pick) chosen = gain;
    }
    if (chosen + kTol < best)
      return fmt::format("picked {} with gain {} but the best gain is {}; {} | {}", pick, chosen, best,
                         describe_graph(g), to_string(u));
    return {};
  });

  b.run("approximation-bound", 2, [&](Rng& rng) -> std::string {
    const Graph g = random_tiny_graph(rng, 4, 12, kProbs);
    const std::size_t k = std::min<std::size_t>(1 + rng.below(2), g.node_count());
    const auto sched = random_schedule(rng);
    const auto rep = check_approximation(g, k, sched, kTol, greedy);
    if (!rep.satisfied)
      return fmt::format("F_greedy={} < bound={} (F_opt={}, alpha={}), k={} d={}; {}", rep.f_greedy, rep.bound,
                         rep.f_opt, rep.alpha, k, sched.to_string(), describe_graph(g));
    return {};
  });

  b.run("increment-bound", 3, [&](Rng& rng) -> std::string {
    const Graph g = random_tiny_graph(rng, 3, 6, kProbs);
    const std::size_t k = std::min<std::size_t>(2, g.node_count());
    const auto sched = random_schedule(rng);
    const auto rep = check_increment_bound(g, k, sched, hashed_random_rule(rng()));
    if (rep.violations)
      return fmt::format("{} of {} inequalities fail (worst slack {}), k={} d={}; {}", rep.violations, rep.checked,
                         rep.worst_slack, k, sched.to_string(), describe_graph(g));
    return {};
  });

  b.run("lazy-equivalence", 4, [&](Rng& rng) -> std::string {
    const Graph g = random_tiny_graph(rng, 4, 8, kProbs);
    const std::size_t k = std::min<std::size_t>(1 + rng.below(2), g.node_count());
    const auto sched = random_schedule(rng);
    const double plain = tree_profit(g, build_policy_tree(g, greedy, k, sched, false));
    const double lazy = tree_profit(g, build_policy_tree(g, greedy, k, sched, true));
    if (std::abs(plain - lazy) > kTol)
      return fmt::format("plain tree {} vs lazy tree {}, k={} d={}; {}", plain, lazy, k, sched.to_string(),
                         describe_graph(g));
    const PolicyKind kind = RandomPolicy{};
    for (std::uint64_t r = 0; r < 50; ++r) {
      const auto seed = derive_seed(rng(), r);
      const auto a = run_process(g, kind, k, sched, seed).final_active;
      const auto c = run_lazy_process(g, kind, k, sched, seed).final_active;
      if (a != c) return fmt::format("replicate {}: process {} vs lazy {}; {}", r, a, c, describe_graph(g));
    }
    return {};
  });

  b.run("concatenation", 5, [&](Rng& rng) -> std::string {
    const Graph g = random_tiny_graph(rng, 4, 6, kProbs);
    const std::size_t k1 = rng.below(std::min<std::size_t>(2, g.node_count()) + 1);
    const std::size_t k2 = rng.below(std::min<std::size_t>(2, g.node_count()) + 1);
    const auto t1 = build_policy_tree(g, hashed_random_rule(rng()), k1, random_schedule(rng), false);
    const auto t2 = build_policy_tree(g, greedy, k2, random_schedule(rng), false);
    const auto joined = concat_trees(t1, t2);
    if (const double err = branch_sum_error(g, joined); err > 1e-12)
      return fmt::format("out-edge probabilities off by {}; {}", err, describe_graph(g));
    const double f12 = tree_profit(g, joined), f2 = tree_profit(g, t2);
    if (f12 + kTol < f2) return fmt::format("F(T1+T2)={} < F(T2)={}; {}", f12, f2, describe_graph(g));
    return {};
  });

  b.run("regret-ratio", 6, [&](Rng& rng) -> std::string {
    const Graph g = random_tiny_graph(rng, 4, 8, kProbs);
    const Status u = random_reachable_status(g, rng);
    if (u.active.count() == g.node_count()) return {};
    const Horizon inf = Horizon::unbounded();
    double prev = 0.0;
    for (const Horizon d : {Horizon::finite(0), Horizon::finite(1), Horizon::finite(2), inf}) {
      const double a = regret_ratio(g, u, inf, d);
      const double ub = regret_upper_bound(g, u, inf, d);
      if (a < 1.0 - kTol) return fmt::format("alpha_d={} is {} < 1; {} | {}", d.to_string(), a, describe_graph(g), to_string(u));
      if (ub + kTol < a) return fmt::format("bound {} < ratio {} at d={}; {} | {}", ub, a, d.to_string(), describe_graph(g), to_string(u));
      if (a + kTol < prev) return fmt::format("alpha decreases to {} at d={}; {} | {}", a, d.to_string(), describe_graph(g), to_string(u));
      prev = a;
    }
    const Status f = run_to_final(g, u, rng);
    if (f.active.count() < g.node_count()) {
      const double a = regret_ratio(g, f, inf, Horizon::finite(1));
      if (std::abs(a - 1.0) > kTol) return fmt::format("final status has alpha {}; {} | {}", a, describe_graph(g), to_string(f));
    }
    return {};
  });

  b.run("status-submodularity", 7, [&](Rng& rng) -> std::string {
    const Graph g = random_tiny_graph(rng, 4, 8, kProbs);
    const Status u1 = run_to_final(g, random_reachable_status(g, rng), rng);
    Status u2 = u1;
    if (u2.active.count() < g.node_count()) {
      const auto inactive = members(~u2.active);
      u2.active.set(inactive[rng.below(inactive.size())]);
      const std::size_t rounds = rng.below(3);
      for (std::size_t r = 0; r < rounds; ++r) {
        const auto frontier = pending_frontier(g, u2);
        advance_round(g, u2, frontier, [&](EdgeId e) { return rng.bernoulli(g.prob(e)); });
      }
    }
    const Horizon inf = Horizon::unbounded();
    for (NodeId v = 0; v < g.node_count(); ++v) {
      const auto vs = make_node_set(g.node_count(), {v});
      const double g1 = expected_marginal_exact(g, u1.active, vs, u1.observed, inf);
      const double g2 = expected_marginal_exact(g, u2.active, vs, u2.observed, inf);
      if (g1 + kTol < g2)
        return fmt::format("node {}: {} < {}; {} | {} | {}", v, g1, g2, describe_graph(g), to_string(u1), to_string(u2));
    }
    return {};
  });

  return b.take();
}

}  // namespace aim
