#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "aim/policy.hpp"
#include "aim/process.hpp"

namespace aim {

/// A status reachable from another, with its probability conditioned on the
/// starting status's realization.
struct Branch {
  Status status;
  double prob;
};

inline constexpr std::size_t kDefaultTreeCap = 1'000'000;

/// 𝒰_d(U): every distinct status after d more diffusion rounds from U (until
/// nothing can change when d is unbounded). Each round resolves the unobserved
/// edges from pending_frontier(U) into nodes inactive at the round's start.
/// Identical statuses reached along different paths are merged. Branches of
/// probability zero are dropped. Output is sorted by status text.
/// Throws CapExceeded when one round would branch over more than 20 edges or
/// more than `cap` statuses arise.
std::vector<Branch> d_round_statuses(const Graph& g, const Status& u, Horizon d, std::size_t cap = kDefaultTreeCap);

/// Arborescence whose nodes are seeding steps and whose edges are statuses.
/// Edge 0 is the root edge; it has no parent and carries the starting status.
class DecisionTree {
 public:
  struct Node {
    std::vector<NodeId> seeds;  // empty for ε and for a step with nothing left to seed
    bool epsilon = false;       // decided but withheld seed step of a lazy tree
    std::size_t level = 1;
    std::size_t in_edge = 0;
    std::vector<std::size_t> out_edges;
    bool is_leaf() const { return out_edges.empty(); }
  };
  struct Edge {
    Status status;
    std::size_t parent = kNpos;  // tree-node id, kNpos for the root edge
    std::size_t child = kNpos;
  };

  /// Root edge U∅ into a single leaf with no seeds.
  static DecisionTree trivial(const Graph& g);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Node& node(std::size_t i) const { return nodes_[i]; }
  const Edge& edge(std::size_t i) const { return edges_[i]; }

  /// Ids of the edges that end in a leaf.
  std::vector<std::size_t> leaf_edges() const;
  /// Statuses of the edges entering level `level` (level 1 is the root edge).
  std::vector<Status> level_statuses(std::size_t level) const;
  std::size_t depth() const;

  // Construction primitives; callers keep the structure an arborescence.
  std::size_t add_node(Node n);
  std::size_t add_edge(Edge e);
  Node& mutable_node(std::size_t i) { return nodes_[i]; }
  Edge& mutable_edge(std::size_t i) { return edges_[i]; }

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
};

/// Exhaustive tree of the (π,k,d)-process or, when `lazy`, of its lazy
/// variant (the k-th step becomes ε, followed by full diffusion and a leaf
/// holding the withheld seed). Throws CapExceeded past `cap` tree-edges.
DecisionTree build_policy_tree(const Graph& g, const DecisionRule& rule, std::size_t k, FeedbackSchedule sched,
                               bool lazy, std::size_t cap = kDefaultTreeCap);

/// F(T): Σ over leaf edges W of Pr[φ̇(W)] · E[|A_∞(Ṡ(W) ∪ leaf seeds)| | φ̇(W)].
double tree_profit(const Graph& g, const DecisionTree& t);

/// Largest |Σ_children Pr[child | parent] - 1| over internal tree-nodes.
double branch_sum_error(const Graph& g, const DecisionTree& t);

/// T|U: drops every edge (with its subtree) incompatible with φ̇(U) and
/// replaces each remaining status W by W ∪ U. Tree-nodes are unchanged.
DecisionTree condition_tree(const DecisionTree& t, const Status& u);

/// T1 ⊕ T2. Each leaf edge U of T1 with leaf seeds S_L becomes
/// U⁺ = (Ṡ(U) ∪ S_L, φ̇(U)) and leads into T2|U⁺, so the seeds of T1 stay
/// active in the continuation.
DecisionTree concat_trees(const DecisionTree& t1, const DecisionTree& t2, std::size_t cap = kDefaultTreeCap);

/// Human-readable dump, one indented line per tree-node and tree-edge.
void dump_tree(std::ostream& out, const Graph& g, const DecisionTree& t);

// --- regret ratio ------------------------------------------------------------

/// max over inactive v of Δf_t(Ṡ(U), v, φ̇(U)); 0 when every node is active.
double best_marginal(const Graph& g, const Status& u, Horizon t);

/// α_{t,d}(U). Throws Error when every node of U is active. When no inactive
/// node can gain anything (all are reached in every completion) the ratio is 1.
double regret_ratio(const Graph& g, const Status& u, Horizon t, Horizon d);

/// U_f: unobserved out-edges of active nodes marked dead.
Status pessimistic_final(const Graph& g, const Status& u);

/// max_v Δf_{t-d}(U_f) divided by the denominator of α_{t,d}(U); +∞ when
/// that denominator is zero but U_f still leaves something to gain.
double regret_upper_bound(const Graph& g, const Status& u, Horizon t, Horizon d);

/// α(T): the largest α_{∞,∞} over tree-edge statuses that still have an
/// inactive node; 1 when there is none.
double regret_ratio_tree(const Graph& g, const DecisionTree& t);

// --- approximation checks ----------------------------------------------------

/// Best expected spread over all adaptive policies with the same schedule,
/// by dynamic programming over (status, remaining budget).
double optimal_profit(const Graph& g, std::size_t k, FeedbackSchedule sched, std::size_t cap = kDefaultTreeCap);

struct ApproximationReport {
  double f_greedy = 0;
  double f_opt = 0;
  double alpha = 1;
  double bound = 0;  // (1 - e^{-1/alpha}) · f_opt
  bool satisfied = false;
};

/// Compares greedy against the optimum: f_greedy ≥ (1 - e^{-1/α}) f_opt within
/// `tol`. Greedy uses its lazy tree (plain tree when non-adaptive); `greedy`
/// replaces the exact greedy rule, e.g. with a faulty one.
ApproximationReport check_approximation(const Graph& g, std::size_t k, FeedbackSchedule sched, double tol = 1e-9,
                                        const DecisionRule& greedy = exact_greedy_rule());

struct IncrementReport {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst_slack = 0;  // min over checks of rhs - lhs
  double alpha = 1;
};

/// With T_{i,j} = T_g^i ⊕ T_*^j (T_g^i the lazy greedy tree with budget i,
/// T_*^j the plain tree of `other` with budget j), checks for all i,l in 1..k
///   F(T_{i-1,l}) - F(T_{i-1,l-1}) ≤ α(T_g^k) · (F(T_{i,0}) - F(T_{i-1,0})).
/// With `compare_other_increment` the right-hand side uses the other policy's
/// increment F(T_{0,i}) - F(T_{0,i-1}) instead; that form does not hold in
/// general and exists to demonstrate it.
IncrementReport check_increment_bound(const Graph& g, std::size_t k, FeedbackSchedule sched, const DecisionRule& other,
                                      bool compare_other_increment = false, double tol = 1e-9);

}  // namespace aim
