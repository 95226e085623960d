#include "aim/realization.hpp"

#include <charconv>
#include <deque>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace aim {

Realization::Realization(std::size_t edge_count, std::span<const EdgeId> live, std::span<const EdgeId> dead)
    : live_(edge_count), dead_(edge_count) {
  for (EdgeId e : live) set_live(e);
  for (EdgeId e : dead) set_dead(e);
}

void Realization::set(EdgeId e, EdgeState s) {
  if (e >= edge_count()) throw std::out_of_range(fmt::format("edge {} out of range", e));
  switch (s) {
    case EdgeState::Live:
      if (dead_.test(e)) throw ConflictError(e);
      live_.set(e);
      break;
    case EdgeState::Dead:
      if (live_.test(e)) throw ConflictError(e);
      dead_.set(e);
      break;
    case EdgeState::Unknown:
      throw std::invalid_argument("cannot record an unknown state");
  }
}

std::string to_string(const Status& u) {
  return fmt::format("ACTIVE: {} LIVE: {} DEAD: {}", fmt::join(members(u.active), ","),
                     fmt::join(members(u.observed.live()), ","), fmt::join(members(u.observed.dead()), ","));
}

namespace {

std::vector<std::uint32_t> parse_id_list(std::string_view text, std::size_t bound, std::string_view what) {
  std::vector<std::uint32_t> ids;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    const auto token = text.substr(start, end - start);
    std::uint32_t id = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), id);
    if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size())
      throw ParseError(fmt::format("bad {} id '{}'", what, token), 0);
    if (id >= bound) throw ParseError(fmt::format("{} id {} out of range", what, id), 0);
    ids.push_back(id);
    start = end + 1;
  }
  return ids;
}

}  // namespace

Status parse_status(const Graph& g, std::string_view text) {
  // Tokens come in (keyword, optional list) pairs separated by whitespace.
  std::vector<std::string_view> tokens;
  for (std::size_t i = 0; i < text.size();) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) tokens.push_back(text.substr(i, j - i));
    i = j;
  }
  std::string_view lists[3];
  const std::string_view keys[3] = {"ACTIVE:", "LIVE:", "DEAD:"};
  std::size_t pos = 0;
  for (int k = 0; k < 3; ++k) {
    if (pos >= tokens.size() || tokens[pos] != keys[k]) throw ParseError(fmt::format("expected '{}'", keys[k]), 0);
    ++pos;
    if (pos < tokens.size() && tokens[pos].back() != ':') lists[k] = tokens[pos++];
  }
  if (pos != tokens.size()) throw ParseError("trailing text after status", 0);

  Status u = Status::empty(g);
  for (auto v : parse_id_list(lists[0], g.node_count(), "node")) u.active.set(v);
  for (auto e : parse_id_list(lists[1], g.edge_count(), "edge")) u.observed.set_live(e);
  for (auto e : parse_id_list(lists[2], g.edge_count(), "edge")) u.observed.set_dead(e);
  return u;
}

// --- algebra ----------------------------------------------------------------

namespace {

void require_same_size(const Realization& a, const Realization& b) {
  if (a.edge_count() != b.edge_count()) throw std::invalid_argument("realizations belong to different graphs");
}

void require_graph(const Graph& g, const Realization& phi) {
  if (phi.edge_count() != g.edge_count()) throw std::invalid_argument("realization does not match graph");
}

}  // namespace

double realization_prob(const Graph& g, const Realization& phi) {
  require_graph(g, phi);
  double p = 1.0;
  for (auto e : members(phi.live())) p *= g.prob(e);
  for (auto e : members(phi.dead())) p *= 1.0 - g.prob(e);
  return p;
}

double conditional_prob(const Graph& g, const Realization& sup, const Realization& sub) {
  require_graph(g, sup);
  if (!is_sub(sub, sup)) throw Error("conditional_prob: the condition is not a sub-realization");
  double p = 1.0;
  for (auto e : members(sup.live() - sub.live())) p *= g.prob(e);
  for (auto e : members(sup.dead() - sub.dead())) p *= 1.0 - g.prob(e);
  return p;
}

bool is_sub(const Realization& sub, const Realization& sup) {
  require_same_size(sub, sup);
  return sub.live().is_subset_of(sup.live()) && sub.dead().is_subset_of(sup.dead());
}

bool is_compatible(const Realization& a, const Realization& b) {
  require_same_size(a, b);
  return !a.live().intersects(b.dead()) && !a.dead().intersects(b.live());
}

Realization concat(std::span<const Realization> parts) {
  if (parts.empty()) throw std::invalid_argument("concat needs at least one realization");
  EdgeSet live = parts.front().live(), dead = parts.front().dead();
  for (const auto& phi : parts.subspan(1)) {
    require_same_size(parts.front(), phi);
    live |= phi.live();
    dead |= phi.dead();
  }
  const EdgeSet clash = live & dead;
  if (const auto e = clash.find_first(); e != EdgeSet::npos) throw ConflictError(static_cast<EdgeId>(e));
  Realization out(live.size());
  for (auto e : members(live)) out.set_live(e);
  for (auto e : members(dead)) out.set_dead(e);
  return out;
}

Realization concat(const Realization& a, const Realization& b) {
  const Realization parts[2] = {a, b};
  return concat(parts);
}

Status status_union(const Status& a, const Status& b) {
  if (a.active.size() != b.active.size()) throw std::invalid_argument("statuses belong to different graphs");
  return {a.active | b.active, concat(a.observed, b.observed)};
}

NodeSet t_live_reachable(const Graph& g, const Realization& phi, const NodeSet& sources, Horizon t) {
  require_graph(g, phi);
  NodeSet reached = sources;
  std::vector<NodeId> frontier = members(sources);
  const std::size_t limit = t.hop_limit(g.node_count());
  std::vector<NodeId> next;
  for (std::size_t hop = 0; hop < limit && !frontier.empty(); ++hop) {
    next.clear();
    for (NodeId v : frontier) {
      for (EdgeId e : g.out_edges(v)) {
        const NodeId w = g.edge(e).target;
        if (!reached.test(w) && phi.is_live(e)) {
          reached.set(w);
          next.push_back(w);
        }
      }
    }
    frontier.swap(next);
  }
  return reached;
}

bool is_final(const Graph& g, const Status& u) {
  require_graph(g, u.observed);
  // Any live or unobserved edge leaving the active set can carry activation
  // outward in some extension (every p_e > 0); nothing else can.
  for (auto v : members(u.active)) {
    for (EdgeId e : g.out_edges(v)) {
      if (!u.active.test(g.edge(e).target) && !u.observed.is_dead(e)) return false;
    }
  }
  return true;
}

bool is_process_consistent(const Graph& g, const Status& u) {
  require_graph(g, u.observed);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (!u.observed.is_observed(e)) continue;
    const auto& [s, t] = g.edge(e);
    if (!u.active.test(s)) return false;
    if (u.observed.is_live(e) && !u.active.test(t)) return false;
  }
  return true;
}

}  // namespace aim
