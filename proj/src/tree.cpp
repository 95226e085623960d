#include "aim/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <unordered_map>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "aim/diffusion.hpp"

namespace aim {

namespace {

constexpr std::size_t kMaxBranchEdges = 20;

bool saturated(const Graph& g, const Status& u) { return u.active.count() == g.node_count(); }

/// Unobserved edges from pending frontier nodes into inactive nodes, by id.
std::vector<EdgeId> pending_edges(const Graph& g, const Status& u) {
  std::vector<EdgeId> out;
  for (NodeId v : pending_frontier(g, u))
    for (EdgeId e : g.out_edges(v))
      if (!u.active.test(g.edge(e).target) && !u.observed.is_observed(e)) out.push_back(e);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<Branch> d_round_statuses(const Graph& g, const Status& u, Horizon d, std::size_t cap) {
  using Table = std::unordered_map<Status, double, StatusHash>;
  Table current{{u, 1.0}};
  const std::size_t rounds = d.is_unbounded() ? std::numeric_limits<std::size_t>::max() : d.rounds();
  for (std::size_t r = 0; r < rounds; ++r) {
    Table next;
    bool moved = false;
    for (const auto& [s, q] : current) {
      const auto open = pending_edges(g, s);
      if (open.empty()) {
        next[s] += q;
        continue;
      }
      moved = true;
      if (open.size() > kMaxBranchEdges)
        throw CapExceeded(fmt::format("a diffusion round would branch over {} edges", open.size()));
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << open.size()); ++mask) {
        Status w = s;
        double p = q;
        for (std::size_t i = 0; i < open.size(); ++i) {
          const EdgeId e = open[i];
          if (mask >> i & 1) {
            w.observed.set_live(e);
            p *= g.prob(e);
          } else {
            w.observed.set_dead(e);
            p *= 1.0 - g.prob(e);
          }
        }
        if (p == 0.0) continue;
        for (std::size_t i = 0; i < open.size(); ++i)
          if (mask >> i & 1) w.active.set(g.edge(open[i]).target);
        next[std::move(w)] += p;
        if (next.size() > cap) throw CapExceeded(fmt::format("more than {} statuses after {} rounds", cap, r + 1));
      }
    }
    current = std::move(next);
    if (!moved) break;
  }
  std::vector<std::pair<std::string, Branch>> keyed;
  keyed.reserve(current.size());
  for (auto& [s, q] : current) keyed.push_back({to_string(s), Branch{s, q}});
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Branch> out;
  out.reserve(keyed.size());
  for (auto& kv : keyed) out.push_back(std::move(kv.second));
  return out;
}

// --- tree structure -----------------------------------------------------------

DecisionTree DecisionTree::trivial(const Graph& g) {
  DecisionTree t;
  const auto e = t.add_edge({Status::empty(g), kNpos, kNpos});
  const auto n = t.add_node({{}, false, 1, e, {}});
  t.mutable_edge(e).child = n;
  return t;
}

std::size_t DecisionTree::add_node(Node n) {
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

std::size_t DecisionTree::add_edge(Edge e) {
  edges_.push_back(std::move(e));
  return edges_.size() - 1;
}

std::vector<std::size_t> DecisionTree::leaf_edges() const {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < edges_.size(); ++e)
    if (edges_[e].child != kNpos && nodes_[edges_[e].child].is_leaf()) out.push_back(e);
  return out;
}

std::vector<Status> DecisionTree::level_statuses(std::size_t level) const {
  std::vector<Status> out;
  for (const auto& e : edges_)
    if (e.child != kNpos && nodes_[e.child].level == level) out.push_back(e.status);
  return out;
}

std::size_t DecisionTree::depth() const {
  std::size_t d = 0;
  for (const auto& n : nodes_) d = std::max(d, n.level);
  return d;
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const Graph& g, const DecisionRule& rule, std::size_t k, FeedbackSchedule sched, bool lazy,
              std::size_t cap)
      : g_(g), rule_(rule), k_(k), sched_(sched), lazy_(lazy), cap_(cap) {}

  DecisionTree build() {
    const auto root = add_edge({Status::empty(g_), kNpos, kNpos});
    expand(root, 1);
    return std::move(t_);
  }

 private:
  std::size_t add_edge(DecisionTree::Edge e) {
    if (t_.edges().size() >= cap_) throw CapExceeded(fmt::format("decision tree exceeds {} tree-edges", cap_));
    return t_.add_edge(std::move(e));
  }

  std::size_t attach(std::size_t in_edge, DecisionTree::Node n) {
    n.in_edge = in_edge;
    const auto id = t_.add_node(std::move(n));
    t_.mutable_edge(in_edge).child = id;
    if (const auto parent = t_.edge(in_edge).parent; parent != kNpos) t_.mutable_node(parent).out_edges.push_back(in_edge);
    return id;
  }

  void expand(std::size_t in_edge, std::size_t level) {
    const Status u = t_.edge(in_edge).status;
    const NodeId v = saturated(g_, u) ? kNoNode : rule_(g_, u);
    if (v != kNoNode && u.active.test(v)) throw Error("decision rule returned an active node");

    if (lazy_ && level == k_) {
      const auto eps = attach(in_edge, {{}, true, level, 0, {}});
      for (auto& b : d_round_statuses(g_, u, Horizon::unbounded(), cap_)) {
        const auto e = add_edge({std::move(b.status), eps, kNpos});
        DecisionTree::Node leaf{{}, false, level + 1, 0, {}};
        if (v != kNoNode) leaf.seeds = {v};
        attach(e, std::move(leaf));
      }
      return;
    }

    DecisionTree::Node n{{}, false, level, 0, {}};
    if (v != kNoNode) n.seeds = {v};
    const auto id = attach(in_edge, std::move(n));
    if (level == k_) return;
    Status next = u;
    if (v != kNoNode) next.active.set(v);
    for (auto& b : d_round_statuses(g_, next, sched_.horizon(), cap_)) {
      const auto e = add_edge({std::move(b.status), id, kNpos});
      expand(e, level + 1);
    }
  }

  const Graph& g_;
  const DecisionRule& rule_;
  std::size_t k_;
  FeedbackSchedule sched_;
  bool lazy_;
  std::size_t cap_;
  DecisionTree t_;
};

}  // namespace

DecisionTree build_policy_tree(const Graph& g, const DecisionRule& rule, std::size_t k, FeedbackSchedule sched,
                               bool lazy, std::size_t cap) {
  if (lazy && sched.kind() == FeedbackSchedule::Kind::NonAdaptive)
    throw std::invalid_argument("a lazy tree needs a finite or full-adoption schedule");
  if (k > g.node_count()) throw std::invalid_argument("budget exceeds the node count");
  if (k == 0) return DecisionTree::trivial(g);
  return TreeBuilder(g, rule, k, sched, lazy, cap).build();
}

double tree_profit(const Graph& g, const DecisionTree& t) {
  double total = 0.0;
  for (auto e : t.leaf_edges()) {
    const auto& w = t.edge(e).status;
    const double p = realization_prob(g, w.observed);
    if (p == 0.0) continue;
    NodeSet seeds = w.active;
    for (NodeId v : t.node(t.edge(e).child).seeds) seeds.set(v);
    total += p * expected_spread_exact(g, seeds, w.observed, Horizon::unbounded());
  }
  return total;
}

double branch_sum_error(const Graph& g, const DecisionTree& t) {
  double worst = 0.0;
  for (const auto& n : t.nodes()) {
    if (n.is_leaf()) continue;
    const auto& parent = t.edge(n.in_edge).status.observed;
    double sum = 0.0;
    for (auto e : n.out_edges) sum += conditional_prob(g, t.edge(e).status.observed, parent);
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

namespace {

/// Copies the subtree hanging below `src_edge` of `src` under tree-node
/// `parent` of `dst` (kNpos for a root edge), keeping only edges compatible
/// with `u` and uniting their statuses with it. Returns the new edge id or
/// kNpos when the edge was pruned.
std::size_t copy_conditioned(const DecisionTree& src, std::size_t src_edge, DecisionTree& dst, std::size_t parent,
                             const Status& u, std::ptrdiff_t level_shift, std::size_t cap) {
  const auto& e = src.edge(src_edge);
  if (!is_compatible(e.status.observed, u.observed)) return kNpos;
  if (dst.edges().size() >= cap) throw CapExceeded(fmt::format("decision tree exceeds {} tree-edges", cap));
  const auto ne = dst.add_edge({status_union(e.status, u), parent, kNpos});
  if (parent != kNpos) dst.mutable_node(parent).out_edges.push_back(ne);
  if (e.child == kNpos) return ne;
  const auto& n = src.node(e.child);
  const auto nn = dst.add_node({n.seeds, n.epsilon, static_cast<std::size_t>(static_cast<std::ptrdiff_t>(n.level) + level_shift), ne, {}});
  dst.mutable_edge(ne).child = nn;
  for (auto child : n.out_edges) copy_conditioned(src, child, dst, nn, u, level_shift, cap);
  return ne;
}

}  // namespace

DecisionTree condition_tree(const DecisionTree& t, const Status& u) {
  DecisionTree out;
  if (!t.edges().empty()) copy_conditioned(t, 0, out, kNpos, u, 0, std::numeric_limits<std::size_t>::max());
  return out;
}

namespace {

void graft(const DecisionTree& t1, std::size_t src_edge, const DecisionTree& t2, DecisionTree& dst, std::size_t parent,
           std::size_t cap) {
  if (dst.edges().size() >= cap) throw CapExceeded(fmt::format("decision tree exceeds {} tree-edges", cap));
  const auto& e = t1.edge(src_edge);
  const auto& n = t1.node(e.child);
  if (!n.is_leaf()) {
    const auto ne = dst.add_edge({e.status, parent, kNpos});
    if (parent != kNpos) dst.mutable_node(parent).out_edges.push_back(ne);
    const auto nn = dst.add_node({n.seeds, n.epsilon, n.level, ne, {}});
    dst.mutable_edge(ne).child = nn;
    for (auto child : n.out_edges) graft(t1, child, t2, dst, nn, cap);
    return;
  }
  Status plus = e.status;
  for (NodeId v : n.seeds) plus.active.set(v);
  const auto ne = copy_conditioned(t2, 0, dst, parent, plus, static_cast<std::ptrdiff_t>(n.level) - 1, cap);
  if (ne == kNpos) throw Error("second tree has a root status incompatible with a leaf of the first");
}

}  // namespace

DecisionTree concat_trees(const DecisionTree& t1, const DecisionTree& t2, std::size_t cap) {
  if (t1.edges().empty() || t2.edges().empty()) throw std::invalid_argument("cannot concatenate an empty tree");
  DecisionTree out;
  graft(t1, 0, t2, out, kNpos, cap);
  return out;
}

void dump_tree(std::ostream& out, const Graph& g, const DecisionTree& t) {
  auto walk = [&](auto&& self, std::size_t e, std::size_t depth) -> void {
    const auto& edge = t.edge(e);
    const std::string pad(2 * depth, ' ');
    const double p = edge.parent == kNpos
                         ? 1.0
                         : conditional_prob(g, edge.status.observed, t.edge(t.node(edge.parent).in_edge).status.observed);
    out << fmt::format("{}U p={:.6g} {}\n", pad, p, to_string(edge.status));
    if (edge.child == kNpos) return;
    const auto& n = t.node(edge.child);
    out << fmt::format("{}  S level={} {}\n", pad, n.level, n.epsilon ? "eps" : fmt::format("{{{}}}", fmt::join(n.seeds, ",")));
    for (auto c : n.out_edges) self(self, c, depth + 2);
  };
  if (!t.edges().empty()) walk(walk, 0, 0);
}

// --- regret ratio ---------------------------------------------------------------

double best_marginal(const Graph& g, const Status& u, Horizon t) {
  if (saturated(g, u)) return 0.0;
  const auto gains = expected_marginals_exact(g, u.active, u.observed, t);
  double best = 0.0;
  for (NodeId v = 0; v < g.node_count(); ++v)
    if (!u.active.test(v)) best = std::max(best, gains[v]);
  return best;
}

namespace {

/// Shared by the ratio and its bound. A zero denominator means every inactive
/// node is reached in every completion; the numerator then vanishes as well
/// and waiting neither gains nor loses, so the ratio is taken as 1.
double ratio(double num, double den) {
  if (den > 0.0) return num / den;
  if (num > 0.0) throw std::logic_error("regret ratio has a positive numerator over a zero denominator");
  return 1.0;
}

void require_inactive(const Graph& g, const Status& u) {
  if (saturated(g, u)) throw Error("regret ratio is undefined when every node is active");
}

}  // namespace

double regret_ratio(const Graph& g, const Status& u, Horizon t, Horizon d) {
  require_inactive(g, u);
  const double den = best_marginal(g, u, t);
  const Horizon rest = t - d;
  double num = 0.0;
  for (const auto& b : d_round_statuses(g, u, d)) num += b.prob * best_marginal(g, b.status, rest);
  return ratio(num, den);
}

Status pessimistic_final(const Graph& g, const Status& u) {
  Status f = u;
  for (auto v : members(u.active))
    for (EdgeId e : g.out_edges(v))
      if (!f.observed.is_observed(e)) f.observed.set_dead(e);
  return f;
}

double regret_upper_bound(const Graph& g, const Status& u, Horizon t, Horizon d) {
  require_inactive(g, u);
  const double num = best_marginal(g, pessimistic_final(g, u), t - d);
  const double den = best_marginal(g, u, t);
  // U_f can free nodes that every completion of U reaches; the bound is then void.
  if (den == 0.0 && num > 0.0) return std::numeric_limits<double>::infinity();
  return ratio(num, den);
}

double regret_ratio_tree(const Graph& g, const DecisionTree& t) {
  double alpha = 1.0;
  bool any = false;
  for (const auto& e : t.edges()) {
    if (saturated(g, e.status)) continue;
    const double a = regret_ratio(g, e.status, Horizon::unbounded(), Horizon::unbounded());
    alpha = any ? std::max(alpha, a) : a;
    any = true;
  }
  return alpha;
}

// --- approximation checks ---------------------------------------------------------

namespace {

class OptimalDp {
 public:
  OptimalDp(const Graph& g, FeedbackSchedule sched, std::size_t cap) : g_(g), sched_(sched), cap_(cap) {}

  double value(const Status& u, std::size_t r) {
    if (r == 0 || saturated(g_, u)) return expected_spread_exact(g_, u.active, u.observed, Horizon::unbounded());
    auto& memo = memo_[r];
    if (const auto it = memo.find(u); it != memo.end()) return it->second;
    double best = -std::numeric_limits<double>::infinity();
    for (NodeId v = 0; v < g_.node_count(); ++v) {
      if (u.active.test(v)) continue;
      Status next = u;
      next.active.set(v);
      double val = 0.0;
      if (r == 1) {
        val = expected_spread_exact(g_, next.active, next.observed, Horizon::unbounded());
      } else {
        for (const auto& b : d_round_statuses(g_, next, sched_.horizon(), cap_)) val += b.prob * value(b.status, r - 1);
      }
      best = std::max(best, val);
    }
    memo.emplace(u, best);
    return best;
  }

 private:
  const Graph& g_;
  FeedbackSchedule sched_;
  std::size_t cap_;
  std::map<std::size_t, std::unordered_map<Status, double, StatusHash>> memo_;
};

DecisionTree greedy_tree(const Graph& g, std::size_t k, FeedbackSchedule sched,
                         const DecisionRule& rule = exact_greedy_rule()) {
  const bool lazy = sched.kind() != FeedbackSchedule::Kind::NonAdaptive;
  return build_policy_tree(g, rule, k, sched, lazy);
}

}  // namespace

double optimal_profit(const Graph& g, std::size_t k, FeedbackSchedule sched, std::size_t cap) {
  if (k > g.node_count()) throw std::invalid_argument("budget exceeds the node count");
  OptimalDp dp(g, sched, cap);
  return dp.value(Status::empty(g), k);
}

ApproximationReport check_approximation(const Graph& g, std::size_t k, FeedbackSchedule sched, double tol,
                                        const DecisionRule& greedy) {
  ApproximationReport r;
  const auto tg = greedy_tree(g, k, sched, greedy);
  r.f_greedy = tree_profit(g, tg);
  r.f_opt = optimal_profit(g, k, sched);
  r.alpha = regret_ratio_tree(g, tg);
  r.bound = (1.0 - std::exp(-1.0 / r.alpha)) * r.f_opt;
  r.satisfied = r.f_greedy >= r.bound - tol;
  return r;
}

IncrementReport check_increment_bound(const Graph& g, std::size_t k, FeedbackSchedule sched, const DecisionRule& other,
                                      bool compare_other_increment, double tol) {
  std::vector<DecisionTree> tg, ts;
  for (std::size_t i = 0; i <= k; ++i) {
    tg.push_back(greedy_tree(g, i, sched));
    ts.push_back(build_policy_tree(g, other, i, sched, false));
  }
  IncrementReport rep;
  rep.alpha = regret_ratio_tree(g, tg[k]);

  std::map<std::pair<std::size_t, std::size_t>, double> memo;
  auto f = [&](std::size_t i, std::size_t j) {
    if (i == 0 && j == 0) return 0.0;
    const auto key = std::make_pair(i, j);
    if (const auto it = memo.find(key); it != memo.end()) return it->second;
    const double v = tree_profit(g, concat_trees(tg[i], ts[j]));
    memo.emplace(key, v);
    return v;
  };

  rep.worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i <= k; ++i) {
    const double gain = compare_other_increment ? f(0, i) - f(0, i - 1) : f(i, 0) - f(i - 1, 0);
    for (std::size_t l = 1; l <= k; ++l) {
      const double lhs = f(i - 1, l) - f(i - 1, l - 1);
      const double slack = rep.alpha * gain - lhs;
      rep.worst_slack = std::min(rep.worst_slack, slack);
      ++rep.checked;
      if (slack < -tol) ++rep.violations;
    }
  }
  if (rep.checked == 0) rep.worst_slack = 0;
  return rep;
}

}  // namespace aim
