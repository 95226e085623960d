#pragma once

#include <span>
#include <string>
#include <vector>

#include "aim/tree.hpp"

namespace aim {

/// Random graph on 1..max_nodes nodes with each ordered pair present with
/// probability 1/2 (capped at max_edges) and probabilities drawn from `probs`.
Graph random_tiny_graph(Rng& rng, std::size_t max_nodes, std::size_t max_edges, std::span<const double> probs);

/// A status the process can actually reach: up to `max_seeds` random seeds,
/// each followed by 0..2 sampled diffusion rounds.
Status random_reachable_status(const Graph& g, Rng& rng, std::size_t max_seeds = 2);

/// Runs sampled rounds from u until nothing is pending.
Status run_to_final(const Graph& g, Status u, Rng& rng);

/// One-line description of a graph for failure reports: "n=3 0>1:0.5 1>2:1".
std::string describe_graph(const Graph& g);

struct CheckResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::string first_failure;
  bool passed() const { return failures == 0; }
};

struct VerifyOptions {
  std::size_t instances = 20;
  std::uint64_t seed = 1;
  /// Swap exact greedy for a rule that picks the smallest gain.
  bool faulty_greedy = false;
};

/// The enumerable-instance battery behind `aim verify`.
std::vector<CheckResult> run_verification(const VerifyOptions& opts);

}  // namespace aim
