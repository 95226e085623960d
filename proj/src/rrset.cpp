#include "aim/rrset.hpp"

#include <algorithm>
#include <limits>
#include <thread>

namespace aim {

namespace {

/// Largest x with P(draw <= x) closest to p for a uniform 64-bit draw.
std::uint64_t live_threshold(double p) {
  if (p >= 1.0) return std::numeric_limits<std::uint64_t>::max();
  const long double scaled = static_cast<long double>(p) * 18446744073709551616.0L;
  return scaled < 1.0L ? 0 : static_cast<std::uint64_t>(scaled) - 1;
}

}  // namespace

RRSampler::RRSampler(const Graph& g, const NodeSet& s, const Realization& phi, Horizon t)
    : offset_(g.node_count() + 1, 0), in_s_(g.node_count()), stamp_(g.node_count(), 0),
      hop_limit_(t.hop_limit(g.node_count())) {
  if (s.size() != g.node_count() || phi.edge_count() != g.edge_count())
    throw std::invalid_argument("status does not match graph");
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (s.test(v)) in_s_[v] = 1;
    else candidates_.push_back(v);
  }
  if (candidates_.empty()) throw std::invalid_argument("every node is in S; no RR-set root exists");
  arcs_.reserve(g.edge_count());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    for (EdgeId e : g.in_edges(v)) {
      const EdgeState st = phi.state(e);
      if (st == EdgeState::Dead) continue;
      arcs_.push_back({g.edge(e).source, st == EdgeState::Live ? std::numeric_limits<std::uint64_t>::max()
                                                               : live_threshold(g.prob(e))});
    }
    offset_[v + 1] = arcs_.size();
  }
}

NodeId RRSampler::sample_into(Rng& rng, std::vector<NodeId>& nodes) {
  nodes.clear();
  const NodeId root = candidates_[rng.below(candidates_.size())];
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  stamp_[root] = epoch_;
  nodes.push_back(root);
  std::size_t begin = 0;
  for (std::size_t hop = 0; hop < hop_limit_ && begin < nodes.size(); ++hop) {
    const std::size_t end = nodes.size();
    for (std::size_t i = begin; i < end; ++i) {
      const NodeId w = nodes[i];
      for (std::size_t a = offset_[w]; a < offset_[w + 1]; ++a) {
        const InArc arc = arcs_[a];
        if (stamp_[arc.source] == epoch_) continue;
        // Every arc is examined at most once per set, so drawing here samples
        // each unobserved edge at most once.
        if (rng() > arc.threshold) continue;
        if (in_s_[arc.source]) {
          nodes.clear();
          return root;
        }
        stamp_[arc.source] = epoch_;
        nodes.push_back(arc.source);
      }
    }
    begin = end;
  }
  return root;
}

RRSet RRSampler::sample(Rng& rng) {
  RRSet out;
  out.root = sample_into(rng, out.nodes);
  if (out.nodes.empty()) out.empty_reason = EmptyReason::RootCoveredByS;
  return out;
}

RRSet sample_rrset(const Graph& g, const NodeSet& s, const Realization& phi, Horizon t, Rng& rng) {
  RRSampler sampler(g, s, phi, t);
  return sampler.sample(rng);
}

double estimate_marginal(const Graph& g, const NodeSet& s, std::span<const RRSet> rrsets, const NodeSet& vstar) {
  if (rrsets.empty()) throw std::invalid_argument("estimate_marginal needs at least one RR-set");
  if (vstar.size() != g.node_count() || s.size() != g.node_count())
    throw std::invalid_argument("node set does not match graph");
  std::size_t hits = 0;
  for (const auto& r : rrsets)
    hits += std::any_of(r.nodes.begin(), r.nodes.end(), [&](NodeId v) { return vstar.test(v); }) ? 1 : 0;
  const double free_nodes = static_cast<double>(g.node_count() - s.count());
  return free_nodes * static_cast<double>(hits) / static_cast<double>(rrsets.size());
}

std::vector<std::uint64_t> rr_coverage(const Graph& g, const NodeSet& s, const Realization& phi, Horizon t,
                                       std::size_t n_samples, std::uint64_t rng_seed, unsigned workers) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, n_samples / 1024))));
  std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(g.node_count(), 0));
  auto run = [&](unsigned w) {
    RRSampler sampler(g, s, phi, t);
    std::vector<NodeId> nodes;
    auto& count = partial[w];
    for (std::size_t i = w; i < n_samples; i += workers) {
      Rng rng(derive_seed(rng_seed, i));
      sampler.sample_into(rng, nodes);
      for (NodeId v : nodes) ++count[v];
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  for (unsigned w = 1; w < workers; ++w)
    for (std::size_t v = 0; v < g.node_count(); ++v) partial[0][v] += partial[w][v];
  return std::move(partial[0]);
}

NodeId greedy_select(const Graph& g, const Status& u, Horizon t, std::size_t n_samples, std::uint64_t rng_seed,
                     unsigned workers) {
  if (u.active.count() == g.node_count()) throw Error("greedy_select: every node is already active");
  if (n_samples == 0) throw std::invalid_argument("greedy_select needs at least one sample");
  const auto coverage = rr_coverage(g, u.active, u.observed, t, n_samples, rng_seed, workers);
  NodeId best = kNoNode;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (u.active.test(v)) continue;
    if (best == kNoNode || coverage[v] > coverage[best]) best = v;
  }
  return best;
}

}  // namespace aim
