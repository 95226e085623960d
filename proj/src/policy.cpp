#include "aim/policy.hpp"

#include <fmt/format.h>

#include "aim/diffusion.hpp"
#include "aim/rrset.hpp"

namespace aim {

PolicyKind parse_policy_kind(std::string_view name, std::size_t n_samples) {
  if (name == "greedy") {
    if (n_samples == 0) throw std::invalid_argument("greedy needs at least one RR-set sample");
    return Greedy{n_samples};
  }
  if (name == "degree") return HighDegree{};
  if (name == "random") return RandomPolicy{};
  throw std::invalid_argument(fmt::format("unknown policy '{}' (expected greedy, degree or random)", name));
}

std::string policy_name(const PolicyKind& kind) {
  if (std::holds_alternative<Greedy>(kind)) return "greedy";
  if (std::holds_alternative<HighDegree>(kind)) return "degree";
  return "random";
}

namespace {

void require_inactive(const Graph& g, const Status& u) {
  if (u.active.size() != g.node_count()) throw std::invalid_argument("status does not match graph");
  if (u.active.count() == g.node_count()) throw Error("no inactive node left to seed");
}

NodeId max_out_degree(const Graph& g, const NodeSet& active) {
  NodeId best = kNoNode;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (active.test(v)) continue;
    if (best == kNoNode || g.out_degree(v) > g.out_degree(best)) best = v;
  }
  return best;
}

template <class Better>
DecisionRule exact_rule(Better better) {
  return [better](const Graph& g, const Status& u) {
    require_inactive(g, u);
    const auto gains = expected_marginals_exact(g, u.active, u.observed, Horizon::unbounded());
    NodeId best = kNoNode;
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (u.active.test(v)) continue;
      if (best == kNoNode || better(gains[v], gains[best])) best = v;
    }
    return best;
  };
}

}  // namespace

NodeId decide(const PolicyKind& kind, const Graph& g, const Status& u, Rng& rng, unsigned workers) {
  require_inactive(g, u);
  if (const auto* greedy = std::get_if<Greedy>(&kind))
    return greedy_select(g, u, Horizon::unbounded(), greedy->n_samples, rng(), workers);
  if (std::holds_alternative<HighDegree>(kind)) return max_out_degree(g, u.active);
  const auto inactive = members(~u.active);
  return inactive[rng.below(inactive.size())];
}

DecisionRule exact_greedy_rule() {
  return exact_rule([](double a, double b) { return a > b + 1e-12; });
}

DecisionRule worst_greedy_rule() {
  return exact_rule([](double a, double b) { return a < b - 1e-12; });
}

DecisionRule high_degree_rule() {
  return [](const Graph& g, const Status& u) {
    require_inactive(g, u);
    return max_out_degree(g, u.active);
  };
}

DecisionRule hashed_random_rule(std::uint64_t seed) {
  return [seed](const Graph& g, const Status& u) {
    require_inactive(g, u);
    const auto inactive = members(~u.active);
    Rng rng(derive_seed(seed, StatusHash{}(u)));
    return static_cast<NodeId>(inactive[rng.below(inactive.size())]);
  };
}

}  // namespace aim
