#pragma once

#include <span>
#include <string>
#include <string_view>

#include "aim/graph.hpp"
#include "aim/types.hpp"

namespace aim {

enum class EdgeState : std::uint8_t { Unknown, Live, Dead };

/// Observed edge states: a live set and a disjoint dead set over the edges of
/// one graph. Edges in neither set are unobserved.
class Realization {
 public:
  Realization() = default;
  explicit Realization(std::size_t edge_count) : live_(edge_count), dead_(edge_count) {}
  /// Throws ConflictError when an edge appears in both lists.
  Realization(std::size_t edge_count, std::span<const EdgeId> live, std::span<const EdgeId> dead);

  std::size_t edge_count() const { return live_.size(); }
  EdgeState state(EdgeId e) const {
    return live_.test(e) ? EdgeState::Live : dead_.test(e) ? EdgeState::Dead : EdgeState::Unknown;
  }
  bool is_live(EdgeId e) const { return live_.test(e); }
  bool is_dead(EdgeId e) const { return dead_.test(e); }
  bool is_observed(EdgeId e) const { return live_.test(e) || dead_.test(e); }

  /// Records an observation; re-recording the same state is a no-op and the
  /// opposite state throws ConflictError.
  void set(EdgeId e, EdgeState s);
  void set_live(EdgeId e) { set(e, EdgeState::Live); }
  void set_dead(EdgeId e) { set(e, EdgeState::Dead); }

  const EdgeSet& live() const { return live_; }
  const EdgeSet& dead() const { return dead_; }
  EdgeSet observed() const { return live_ | dead_; }
  std::size_t observed_count() const { return live_.count() + dead_.count(); }
  bool is_full() const { return observed_count() == edge_count(); }

  friend bool operator==(const Realization&, const Realization&) = default;

 private:
  EdgeSet live_, dead_;
};

/// Active nodes together with the realization observed so far.
struct Status {
  NodeSet active;
  Realization observed;

  /// No active node and nothing observed.
  static Status empty(const Graph& g) { return {NodeSet(g.node_count()), Realization(g.edge_count())}; }

  friend bool operator==(const Status&, const Status&) = default;
};

struct StatusHash {
  std::size_t operator()(const Status& u) const {
    return hash_bits(u.observed.dead(), hash_bits(u.observed.live(), hash_bits(u.active)));
  }
};

/// "ACTIVE: 0,2 LIVE: 1 DEAD: 3,4" (empty lists print nothing after the colon).
std::string to_string(const Status& u);
/// Inverse of to_string; throws ParseError on malformed text or out-of-range ids.
Status parse_status(const Graph& g, std::string_view text);

// --- realization algebra ----------------------------------------------------

/// Product of p_e over live edges and (1 - p_e) over dead edges.
double realization_prob(const Graph& g, const Realization& phi);

/// Pr[sup | sub]; throws Error when `sub` is not a sub-realization of `sup`.
double conditional_prob(const Graph& g, const Realization& sup, const Realization& sub);

/// sub ≺ sup: live and dead sets are both contained.
bool is_sub(const Realization& sub, const Realization& sup);

/// No edge is live in one and dead in the other.
bool is_compatible(const Realization& a, const Realization& b);

/// Component-wise union; throws ConflictError naming the lowest offending edge.
Realization concat(std::span<const Realization> parts);
Realization concat(const Realization& a, const Realization& b);

/// Union of actives and concatenation of realizations; throws ConflictError
/// when the realizations are incompatible.
Status status_union(const Status& a, const Status& b);

/// Nodes reachable from `sources` through at most t live edges of phi,
/// including the sources themselves.
NodeSet t_live_reachable(const Graph& g, const Realization& phi, const NodeSet& sources, Horizon t);

/// True iff no full realization extending the observations has a live path
/// from an active node to an inactive one. Computed as reachability over
/// edges that are live or unobserved.
bool is_final(const Graph& g, const Status& u);

/// Every observed edge leaves an active node and every live edge also enters
/// one. Statuses produced by diffusion from seeds always satisfy this.
bool is_process_consistent(const Graph& g, const Status& u);

}  // namespace aim
