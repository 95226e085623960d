#pragma once

#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "aim/policy.hpp"

namespace aim {

/// How many diffusion rounds are observed between consecutive seeds.
class FeedbackSchedule {
 public:
  enum class Kind { Finite, FullAdoption, NonAdaptive };

  /// d >= 1 observed rounds per seed.
  static FeedbackSchedule finite(std::uint32_t d);
  /// Wait until the diffusion stops before seeding again.
  static FeedbackSchedule full_adoption() { return FeedbackSchedule(Kind::FullAdoption, 0); }
  /// All k seeds placed before anything is observed.
  static FeedbackSchedule non_adaptive() { return FeedbackSchedule(Kind::NonAdaptive, 0); }

  /// "0" is non-adaptive, "inf" full adoption, a positive integer is finite.
  static FeedbackSchedule parse(std::string_view text);

  Kind kind() const { return kind_; }
  std::uint32_t rounds() const { return d_; }
  /// 0, d or unbounded.
  Horizon horizon() const;
  std::string to_string() const;

  friend bool operator==(const FeedbackSchedule&, const FeedbackSchedule&) = default;

 private:
  FeedbackSchedule(Kind kind, std::uint32_t d) : kind_(kind), d_(d) {}
  Kind kind_;
  std::uint32_t d_;
};

struct DiffusionTrace {
  std::vector<std::size_t> active_per_round;  // active count after each diffusion round
  std::vector<NodeId> seeds_in_order;
  std::size_t final_active = 0;
  std::size_t rounds_elapsed = 0;
};

/// Memo of Greedy decisions by status. Reuse is exact because Greedy draws
/// its randomness from (policy seed, status).
class DecisionCache {
 public:
  std::optional<NodeId> find(const Status& u) const;
  void store(const Status& u, NodeId v);
  void clear();

 private:
  mutable std::mutex mutex_;
  std::unordered_map<Status, NodeId, StatusHash> table_;
};

struct ProcessOptions {
  /// Seed of the Greedy RR-set streams. Greedy draws its stream from
  /// (policy_seed, status), which makes it a fixed map from statuses to
  /// nodes; unset means derived from the run's own seed.
  std::optional<std::uint64_t> policy_seed;
  /// Holds statuses with nothing observed. Those recur across replicates
  /// (every first decision and every non-adaptive one).
  DecisionCache* shared_cache = nullptr;
  /// Holds every other status; meant for one replicate run under several
  /// schedules, which often pass through identical statuses.
  DecisionCache* local_cache = nullptr;
  unsigned workers = 1;
};

/// One run of the (π,k,d)-process. Edge states come from a stream keyed by
/// (rng_seed, edge id), so any two runs sharing rng_seed see the same full
/// realization. When every node is already active the remaining seeding steps
/// are skipped, so seeds_in_order may hold fewer than k nodes.
/// Throws std::invalid_argument when k exceeds the node count.
DiffusionTrace run_process(const Graph& g, const PolicyKind& kind, std::size_t k, FeedbackSchedule sched,
                           std::uint64_t rng_seed, const ProcessOptions& opts = {});

/// The lazy variant: k-1 ordinary steps, then the last seed is chosen but
/// held back until the diffusion stops, then activated and diffused.
/// Rejects the non-adaptive schedule.
DiffusionTrace run_lazy_process(const Graph& g, const PolicyKind& kind, std::size_t k, FeedbackSchedule sched,
                                std::uint64_t rng_seed, const ProcessOptions& opts = {});

struct FEstimate {
  double mean = 0;
  double std_error = 0;
  std::vector<double> round_mean;    // traces padded with their final value
  std::vector<double> round_std_error;
  std::vector<DiffusionTrace> traces;  // in replicate order
};

/// Mean and standard error of final_active over `replicates` runs; replicate
/// r uses seed derive_seed(rng_seed, r). Output is independent of `workers`.
FEstimate estimate_F(const Graph& g, const PolicyKind& kind, std::size_t k, FeedbackSchedule sched,
                     std::size_t replicates, std::uint64_t rng_seed, unsigned workers = 1, bool lazy = false);

/// estimate_F for several schedules at once, with results equal to separate
/// calls. Each replicate runs every schedule on the same edge states, and
/// Greedy decisions are shared between them.
std::vector<FEstimate> estimate_F_sweep(const Graph& g, const PolicyKind& kind, std::size_t k,
                                        std::span<const FeedbackSchedule> schedules, std::size_t replicates,
                                        std::uint64_t rng_seed, unsigned workers = 1, bool lazy = false);

/// Mean and standard error of arbitrary samples (stderr 0 for fewer than two).
std::pair<double, double> mean_and_stderr(std::span<const double> xs);

}  // namespace aim
