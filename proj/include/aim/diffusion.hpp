#pragma once

#include <algorithm>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "aim/realization.hpp"
#include "aim/rng.hpp"

namespace aim {

struct RoundOutcome {
  Status next_status;
  std::vector<NodeId> newly_active;                          // sorted
  std::vector<std::pair<EdgeId, EdgeState>> newly_observed;  // by edge id
};

/// One IC round applied in place. Every unobserved edge (v,w) with v in
/// `frontier` and w inactive at the start of the round is resolved by
/// `is_live(e)` in increasing edge-id order; live edges activate w.
/// Returns the nodes activated in this round, sorted.
template <class EdgeOracle>
std::vector<NodeId> advance_round(const Graph& g, Status& u, std::span<const NodeId> frontier, EdgeOracle&& is_live,
                                  std::vector<std::pair<EdgeId, EdgeState>>* observed = nullptr) {
  std::vector<EdgeId> attempts;
  for (NodeId v : frontier) {
    if (!u.active.test(v)) throw std::invalid_argument("frontier node " + std::to_string(v) + " is not active");
    for (EdgeId e : g.out_edges(v))
      if (!u.active.test(g.edge(e).target) && !u.observed.is_observed(e)) attempts.push_back(e);
  }
  std::sort(attempts.begin(), attempts.end());
  attempts.erase(std::unique(attempts.begin(), attempts.end()), attempts.end());

  std::vector<NodeId> activated;
  for (EdgeId e : attempts) {
    const bool live = is_live(e);
    u.observed.set(e, live ? EdgeState::Live : EdgeState::Dead);
    if (observed) observed->emplace_back(e, live ? EdgeState::Live : EdgeState::Dead);
    if (live) activated.push_back(g.edge(e).target);
  }
  std::sort(activated.begin(), activated.end());
  activated.erase(std::unique(activated.begin(), activated.end()), activated.end());
  for (NodeId w : activated) u.active.set(w);
  return activated;
}

/// Pure form of advance_round drawing edge states from `rng`. An empty
/// frontier is a legal waiting round. Throws when frontier ⊄ active.
RoundOutcome simulate_round(const Graph& g, const Status& u, std::span<const NodeId> frontier, Rng& rng);

/// Active nodes with an unobserved edge to an inactive node. On statuses
/// produced by diffusion these are exactly the nodes whose activation attempts
/// are still pending, so the status alone determines how diffusion continues.
std::vector<NodeId> pending_frontier(const Graph& g, const Status& u);

// --- counting on full realizations -------------------------------------------

/// |A_t(seeds, psi)|: nodes within t live hops of a seed, seeds included.
/// Throws when psi is not full.
std::size_t count_active(const Graph& g, const NodeSet& seeds, const Realization& psi, Horizon t);

/// |A_t(s ∪ vstar, psi)| - |A_t(s, psi)|.
std::size_t marginal_delta(const Graph& g, const NodeSet& s, const NodeSet& vstar, const Realization& psi, Horizon t);

// --- expectations over extensions of a partial realization -------------------

inline constexpr std::size_t kDefaultEnumerationCap = 20;

/// Calls fn(psi, Pr[psi | phi]) for every full realization psi extending phi.
/// Throws CapExceeded when phi leaves more than `cap` edges unobserved.
void for_each_completion(const Graph& g, const Realization& phi, std::size_t cap,
                         const std::function<void(const Realization&, double)>& fn);

/// Δf_t(s, vstar, phi) by exhaustive enumeration.
double expected_marginal_exact(const Graph& g, const NodeSet& s, const NodeSet& vstar, const Realization& phi,
                               Horizon t, std::size_t cap = kDefaultEnumerationCap);

/// Δf_t(s, {v}, phi) for every node v in one enumeration pass (0 for v ∈ s).
std::vector<double> expected_marginals_exact(const Graph& g, const NodeSet& s, const Realization& phi, Horizon t,
                                             std::size_t cap = kDefaultEnumerationCap);

/// E[|A_t(s, psi)| | phi] by exhaustive enumeration.
double expected_spread_exact(const Graph& g, const NodeSet& s, const Realization& phi, Horizon t,
                             std::size_t cap = kDefaultEnumerationCap);

/// Sample mean of Δ_t over `samples` full realizations, each drawing the
/// unobserved edges independently on first touch. Deterministic in rng_seed.
double expected_marginal_mc(const Graph& g, const NodeSet& s, const NodeSet& vstar, const Realization& phi, Horizon t,
                            std::size_t samples, std::uint64_t rng_seed);

}  // namespace aim
