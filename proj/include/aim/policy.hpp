#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <variant>

#include "aim/realization.hpp"
#include "aim/rng.hpp"

namespace aim {

/// Seeds the node with the largest RR-set coverage under the current status.
struct Greedy {
  std::size_t n_samples = 100'000;
};
/// Seeds the inactive node of largest out-degree.
struct HighDegree {};
/// Seeds a uniformly random inactive node.
struct RandomPolicy {};

using PolicyKind = std::variant<Greedy, HighDegree, RandomPolicy>;

/// "greedy", "degree" or "random".
PolicyKind parse_policy_kind(std::string_view name, std::size_t n_samples = 100'000);
std::string policy_name(const PolicyKind& kind);

/// Next seed for status u; never an active node. Greedy optimizes the
/// unbounded horizon and draws its RR-set stream seed from `rng`.
/// Throws Error when every node is active.
NodeId decide(const PolicyKind& kind, const Graph& g, const Status& u, Rng& rng, unsigned workers = 1);

// --- deterministic rules for exact tree construction ------------------------

/// A policy as a plain function of the status.
using DecisionRule = std::function<NodeId(const Graph&, const Status&)>;

/// Greedy with exact expectations: argmax of Δf_∞ over inactive nodes. Gains
/// within 1e-12 of the best count as ties, resolved to the smallest id.
DecisionRule exact_greedy_rule();

/// Same tie rule but picks the smallest gain; used for mutation testing.
DecisionRule worst_greedy_rule();

DecisionRule high_degree_rule();

/// A fixed pseudo-random inactive node per status, seeded by `seed`.
DecisionRule hashed_random_rule(std::uint64_t seed);

}  // namespace aim
