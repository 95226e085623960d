#pragma once

#include <optional>
#include <span>
#include <vector>

#include "aim/realization.hpp"
#include "aim/rng.hpp"

namespace aim {

enum class EmptyReason { RootCoveredByS };

/// One generalized reverse-reachable set. `nodes` is empty exactly when the
/// reverse traversal from `root` touched a node of S.
struct RRSet {
  std::vector<NodeId> nodes;  // root first, then in discovery order
  NodeId root = 0;
  std::optional<EmptyReason> empty_reason;
};

/// Draws RR-sets conditioned on (S, φ, t). Edge states from φ are fixed; every
/// other edge is sampled the first time the reverse traversal reaches it, and
/// since each node is expanded once per set, each edge is sampled at most once.
/// Holds scratch buffers, so one sampler per thread.
class RRSampler {
 public:
  /// Throws std::invalid_argument when S = V.
  RRSampler(const Graph& g, const NodeSet& s, const Realization& phi, Horizon t);

  RRSet sample(Rng& rng);

  /// Allocation-free form: fills `nodes` (cleared first) and returns the root.
  /// `nodes` stays empty when the set is empty.
  NodeId sample_into(Rng& rng, std::vector<NodeId>& nodes);

  std::size_t candidate_count() const { return candidates_.size(); }

 private:
  // In-edges that can be live, grouped by target: an edge is live when a
  // fresh 64-bit draw is <= its threshold (the maximum for observed-live edges).
  struct InArc {
    NodeId source;
    std::uint64_t threshold;
  };
  std::vector<std::size_t> offset_;
  std::vector<InArc> arcs_;
  std::vector<NodeId> candidates_;     // V \ S
  std::vector<char> in_s_;             // membership in S
  std::vector<std::uint32_t> stamp_;   // visited marks, valid when == epoch_
  std::uint32_t epoch_ = 0;
  std::size_t hop_limit_;
};

/// Convenience wrapper around RRSampler for a single draw.
RRSet sample_rrset(const Graph& g, const NodeSet& s, const Realization& phi, Horizon t, Rng& rng);

/// (|V| - |S|) times the fraction of `rrsets` that intersect vstar.
/// Throws std::invalid_argument on an empty list.
double estimate_marginal(const Graph& g, const NodeSet& s, std::span<const RRSet> rrsets, const NodeSet& vstar);

/// Number of RR-sets containing each node, over `n_samples` sets whose random
/// streams are derive_seed(rng_seed, i) for sample i. The result does not
/// depend on `workers`.
std::vector<std::uint64_t> rr_coverage(const Graph& g, const NodeSet& s, const Realization& phi, Horizon t,
                                       std::size_t n_samples, std::uint64_t rng_seed, unsigned workers = 1);

/// The node outside Ṡ(U) covered by the most RR-sets; ties go to the smallest
/// id. Throws Error when every node is active.
NodeId greedy_select(const Graph& g, const Status& u, Horizon t, std::size_t n_samples, std::uint64_t rng_seed,
                     unsigned workers = 1);

}  // namespace aim
