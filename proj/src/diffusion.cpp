#include "aim/diffusion.hpp"

#include <fmt/format.h>

namespace aim {

namespace {

void require_full(const Realization& psi) {
  if (!psi.is_full()) throw std::invalid_argument("realization must be full");
}

void require_graph(const Graph& g, const Realization& phi) {
  if (phi.edge_count() != g.edge_count()) throw std::invalid_argument("realization does not match graph");
}

void require_nodes(const Graph& g, const NodeSet& s) {
  if (s.size() != g.node_count()) throw std::invalid_argument("node set does not match graph");
}

/// Multi-source BFS bounded by a hop limit. `seen` must be all zero on entry
/// and is all zero again on return; the reached nodes are left in `reached`.
template <class Live>
void bounded_reach(const Graph& g, std::span<const NodeId> sources, std::size_t hop_limit, Live&& is_live,
                   std::vector<char>& seen, std::vector<NodeId>& reached) {
  reached.clear();
  for (NodeId v : sources) {
    if (!seen[v]) {
      seen[v] = 1;
      reached.push_back(v);
    }
  }
  std::size_t begin = 0;
  for (std::size_t hop = 0; hop < hop_limit && begin < reached.size(); ++hop) {
    const std::size_t end = reached.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (EdgeId e : g.out_edges(reached[i])) {
        const NodeId w = g.edge(e).target;
        if (seen[w] || !is_live(e)) continue;
        seen[w] = 1;
        reached.push_back(w);
      }
    }
    begin = end;
  }
  for (NodeId v : reached) seen[v] = 0;
}

/// Number of nodes in `reached` not flagged in `covered`.
std::size_t count_outside(std::span<const NodeId> reached, const std::vector<char>& covered) {
  std::size_t c = 0;
  for (NodeId v : reached) c += covered[v] ? 0 : 1;
  return c;
}

}  // namespace

RoundOutcome simulate_round(const Graph& g, const Status& u, std::span<const NodeId> frontier, Rng& rng) {
  require_graph(g, u.observed);
  RoundOutcome out{u, {}, {}};
  out.newly_active = advance_round(
      g, out.next_status, frontier, [&](EdgeId e) { return rng.bernoulli(g.prob(e)); }, &out.newly_observed);
  return out;
}

std::vector<NodeId> pending_frontier(const Graph& g, const Status& u) {
  require_graph(g, u.observed);
  std::vector<NodeId> out;
  for (auto v : members(u.active)) {
    for (EdgeId e : g.out_edges(v)) {
      if (!u.active.test(g.edge(e).target) && !u.observed.is_observed(e)) {
        out.push_back(v);
        break;
      }
    }
  }
  return out;
}

std::size_t count_active(const Graph& g, const NodeSet& seeds, const Realization& psi, Horizon t) {
  require_graph(g, psi);
  require_full(psi);
  require_nodes(g, seeds);
  return t_live_reachable(g, psi, seeds, t).count();
}

std::size_t marginal_delta(const Graph& g, const NodeSet& s, const NodeSet& vstar, const Realization& psi, Horizon t) {
  return count_active(g, s | vstar, psi, t) - count_active(g, s, psi, t);
}

void for_each_completion(const Graph& g, const Realization& phi, std::size_t cap,
                         const std::function<void(const Realization&, double)>& fn) {
  require_graph(g, phi);
  std::vector<EdgeId> open;
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    if (!phi.is_observed(e)) open.push_back(e);
  if (open.size() > cap || open.size() >= 63)
    throw CapExceeded(fmt::format("{} unobserved edges exceed the enumeration cap of {}", open.size(), cap));

  const std::uint64_t total = std::uint64_t{1} << open.size();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    Realization psi = phi;
    double p = 1.0;
    for (std::size_t i = 0; i < open.size(); ++i) {
      const EdgeId e = open[i];
      if (mask >> i & 1) {
        psi.set_live(e);
        p *= g.prob(e);
      } else {
        psi.set_dead(e);
        p *= 1.0 - g.prob(e);
      }
    }
    if (p > 0.0) fn(psi, p);
  }
}

double expected_marginal_exact(const Graph& g, const NodeSet& s, const NodeSet& vstar, const Realization& phi,
                               Horizon t, std::size_t cap) {
  require_nodes(g, s);
  require_nodes(g, vstar);
  if (vstar.is_subset_of(s)) return 0.0;
  double total = 0.0;
  for_each_completion(g, phi, cap, [&](const Realization& psi, double p) {
    total += p * static_cast<double>(marginal_delta(g, s, vstar, psi, t));
  });
  return total;
}

std::vector<double> expected_marginals_exact(const Graph& g, const NodeSet& s, const Realization& phi, Horizon t,
                                             std::size_t cap) {
  require_nodes(g, s);
  const std::size_t n = g.node_count();
  const std::size_t limit = t.hop_limit(n);
  const auto base = members(s);
  std::vector<double> gains(n, 0.0);
  std::vector<char> covered(n), seen(n);
  std::vector<NodeId> base_reach, reached;
  for_each_completion(g, phi, cap, [&](const Realization& psi, double p) {
    auto live = [&](EdgeId e) { return psi.is_live(e); };
    bounded_reach(g, base, limit, live, seen, base_reach);
    for (NodeId v : base_reach) covered[v] = 1;
    // A_t(S ∪ {v}) = A_t(S) ∪ A_t({v}), so the gain is what v reaches outside A_t(S).
    for (NodeId v = 0; v < n; ++v) {
      if (s.test(v)) continue;
      const NodeId src[1] = {v};
      bounded_reach(g, src, limit, live, seen, reached);
      gains[v] += p * static_cast<double>(count_outside(reached, covered));
    }
    for (NodeId v : base_reach) covered[v] = 0;
  });
  return gains;
}

double expected_spread_exact(const Graph& g, const NodeSet& s, const Realization& phi, Horizon t, std::size_t cap) {
  require_nodes(g, s);
  double total = 0.0;
  for_each_completion(g, phi, cap, [&](const Realization& psi, double p) {
    total += p * static_cast<double>(count_active(g, s, psi, t));
  });
  return total;
}

double expected_marginal_mc(const Graph& g, const NodeSet& s, const NodeSet& vstar, const Realization& phi, Horizon t,
                            std::size_t samples, std::uint64_t rng_seed) {
  require_graph(g, phi);
  require_nodes(g, s);
  require_nodes(g, vstar);
  if (samples == 0) throw std::invalid_argument("expected_marginal_mc needs at least one sample");
  if (vstar.is_subset_of(s)) return 0.0;

  const std::size_t n = g.node_count();
  const std::size_t limit = t.hop_limit(n);
  const auto base = members(s);
  const auto extra = members(vstar - s);
  std::vector<char> covered(n), seen(n);
  std::vector<NodeId> base_reach, reached;
  double total = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    // Keyed draws give both traversals the same full realization without
    // materializing it.
    const std::uint64_t key = derive_seed(rng_seed, i);
    auto live = [&](EdgeId e) {
      const auto st = phi.state(e);
      if (st != EdgeState::Unknown) return st == EdgeState::Live;
      return keyed_live(key, e, g.prob(e));
    };
    bounded_reach(g, base, limit, live, seen, base_reach);
    for (NodeId v : base_reach) covered[v] = 1;
    bounded_reach(g, extra, limit, live, seen, reached);
    total += static_cast<double>(count_outside(reached, covered));
    for (NodeId v : base_reach) covered[v] = 0;
  }
  return total / static_cast<double>(samples);
}

}  // namespace aim
