#include "aim/process.hpp"

#include <charconv>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "aim/diffusion.hpp"

namespace aim {

FeedbackSchedule FeedbackSchedule::finite(std::uint32_t d) {
  if (d == 0) throw std::invalid_argument("a finite feedback schedule needs d >= 1");
  return FeedbackSchedule(Kind::Finite, d);
}

FeedbackSchedule FeedbackSchedule::parse(std::string_view text) {
  if (text == "inf") return full_adoption();
  std::uint32_t d = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), d);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
    throw std::invalid_argument(fmt::format("invalid feedback schedule '{}' (expected 0, inf or a positive integer)", text));
  return d == 0 ? non_adaptive() : finite(d);
}

Horizon FeedbackSchedule::horizon() const {
  switch (kind_) {
    case Kind::Finite: return Horizon::finite(d_);
    case Kind::FullAdoption: return Horizon::unbounded();
    case Kind::NonAdaptive: break;
  }
  return Horizon::finite(0);
}

std::string FeedbackSchedule::to_string() const {
  switch (kind_) {
    case Kind::Finite: return std::to_string(d_);
    case Kind::FullAdoption: return "inf";
    case Kind::NonAdaptive: break;
  }
  return "0";
}

std::optional<NodeId> DecisionCache::find(const Status& u) const {
  std::lock_guard lock(mutex_);
  const auto it = table_.find(u);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

void DecisionCache::store(const Status& u, NodeId v) {
  std::lock_guard lock(mutex_);
  table_.emplace(u, v);
}

void DecisionCache::clear() {
  std::lock_guard lock(mutex_);
  table_.clear();
}

namespace {

/// Neumaier's compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0, comp_ = 0;
};

class Runner {
 public:
  Runner(const Graph& g, const PolicyKind& kind, std::size_t k, std::uint64_t rng_seed, const ProcessOptions& opts)
      : g_(g), kind_(kind), opts_(opts), edge_key_(derive_seed(rng_seed, 0)), policy_rng_(derive_seed(rng_seed, 1)),
        greedy_seed_(opts.policy_seed.value_or(derive_seed(rng_seed, 2))), u_(Status::empty(g)) {
    if (k > g.node_count())
      throw std::invalid_argument(fmt::format("budget {} exceeds the {} nodes of the graph", k, g.node_count()));
  }

  bool saturated() const { return u_.active.count() == g_.node_count(); }

  NodeId choose() {
    if (!std::holds_alternative<Greedy>(kind_)) return decide(kind_, g_, u_, policy_rng_, opts_.workers);
    DecisionCache* cache = u_.observed.observed_count() == 0 ? opts_.shared_cache : opts_.local_cache;
    if (cache)
      if (auto hit = cache->find(u_)) return *hit;
    Rng rng(derive_seed(greedy_seed_, StatusHash{}(u_)));
    const NodeId v = decide(kind_, g_, u_, rng, opts_.workers);
    if (cache) cache->store(u_, v);
    return v;
  }

  void place(NodeId v) {
    trace_.seeds_in_order.push_back(v);
    if (u_.active.test(v)) return;
    u_.active.set(v);
    frontier_.push_back(v);
  }

  void round() {
    frontier_ = advance_round(g_, u_, frontier_, [&](EdgeId e) { return keyed_live(edge_key_, e, g_.prob(e)); });
    trace_.active_per_round.push_back(u_.active.count());
    ++trace_.rounds_elapsed;
  }

  void observe(FeedbackSchedule sched) {
    switch (sched.kind()) {
      case FeedbackSchedule::Kind::NonAdaptive: break;
      case FeedbackSchedule::Kind::Finite:
        for (std::uint32_t r = 0; r < sched.rounds(); ++r) round();
        break;
      case FeedbackSchedule::Kind::FullAdoption: quiesce(); break;
    }
  }

  void quiesce() {
    while (!frontier_.empty()) round();
  }

  /// Runs to termination; at least one round so the trace is never empty.
  DiffusionTrace finish() {
    do round();
    while (!frontier_.empty());
    trace_.final_active = u_.active.count();
    return std::move(trace_);
  }

 private:
  const Graph& g_;
  const PolicyKind& kind_;
  const ProcessOptions& opts_;
  std::uint64_t edge_key_;
  Rng policy_rng_;
  std::uint64_t greedy_seed_;
  Status u_;
  std::vector<NodeId> frontier_;
  DiffusionTrace trace_;
};

}  // namespace

DiffusionTrace run_process(const Graph& g, const PolicyKind& kind, std::size_t k, FeedbackSchedule sched,
                           std::uint64_t rng_seed, const ProcessOptions& opts) {
  Runner run(g, kind, k, rng_seed, opts);
  for (std::size_t i = 0; i < k && !run.saturated(); ++i) {
    run.place(run.choose());
    run.observe(sched);
  }
  return run.finish();
}

DiffusionTrace run_lazy_process(const Graph& g, const PolicyKind& kind, std::size_t k, FeedbackSchedule sched,
                                std::uint64_t rng_seed, const ProcessOptions& opts) {
  if (sched.kind() == FeedbackSchedule::Kind::NonAdaptive)
    throw std::invalid_argument("the lazy process needs a finite or full-adoption schedule");
  Runner run(g, kind, k, rng_seed, opts);
  for (std::size_t i = 0; i + 1 < k && !run.saturated(); ++i) {
    run.place(run.choose());
    run.observe(sched);
  }
  if (k > 0 && !run.saturated()) {
    const NodeId last = run.choose();
    run.quiesce();
    run.place(last);
  }
  return run.finish();
}

std::pair<double, double> mean_and_stderr(std::span<const double> xs) {
  if (xs.empty()) return {0.0, 0.0};
  CompensatedSum sum;
  for (double x : xs) sum.add(x);
  const double n = static_cast<double>(xs.size());
  const double mean = sum.value() / n;
  if (xs.size() < 2) return {mean, 0.0};
  CompensatedSum sq;
  for (double x : xs) sq.add((x - mean) * (x - mean));
  return {mean, std::sqrt(sq.value() / (n - 1.0) / n)};
}

namespace {

FEstimate summarize(std::vector<DiffusionTrace> traces) {
  FEstimate out;
  out.traces = std::move(traces);
  const std::size_t replicates = out.traces.size();
  std::vector<double> values(replicates);
  std::size_t rounds = 0;
  for (std::size_t r = 0; r < replicates; ++r) {
    values[r] = static_cast<double>(out.traces[r].final_active);
    rounds = std::max(rounds, out.traces[r].active_per_round.size());
  }
  std::tie(out.mean, out.std_error) = mean_and_stderr(values);
  out.round_mean.resize(rounds);
  out.round_std_error.resize(rounds);
  for (std::size_t i = 0; i < rounds; ++i) {
    for (std::size_t r = 0; r < replicates; ++r) {
      const auto& a = out.traces[r].active_per_round;
      values[r] = static_cast<double>(i < a.size() ? a[i] : a.back());
    }
    std::tie(out.round_mean[i], out.round_std_error[i]) = mean_and_stderr(values);
  }
  return out;
}

}  // namespace

std::vector<FEstimate> estimate_F_sweep(const Graph& g, const PolicyKind& kind, std::size_t k,
                                        std::span<const FeedbackSchedule> schedules, std::size_t replicates,
                                        std::uint64_t rng_seed, unsigned workers, bool lazy) {
  if (replicates == 0) throw std::invalid_argument("estimate_F needs at least one replicate");
  DecisionCache shared;
  const auto policy_seed = derive_seed(mix64(rng_seed ^ 0x706f6c696379ULL), 0);

  std::vector<std::vector<DiffusionTrace>> traces(schedules.size(), std::vector<DiffusionTrace>(replicates));
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(replicates)));
  auto work = [&](unsigned w) {
    DecisionCache local;
    ProcessOptions opts;
    opts.policy_seed = policy_seed;
    opts.shared_cache = &shared;
    opts.local_cache = &local;
    for (std::size_t r = w; r < replicates; r += workers) {
      const auto seed = derive_seed(rng_seed, r);
      for (std::size_t i = 0; i < schedules.size(); ++i)
        traces[i][r] = lazy ? run_lazy_process(g, kind, k, schedules[i], seed, opts)
                            : run_process(g, kind, k, schedules[i], seed, opts);
      local.clear();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  std::vector<FEstimate> out;
  out.reserve(schedules.size());
  for (auto& t : traces) out.push_back(summarize(std::move(t)));
  return out;
}

FEstimate estimate_F(const Graph& g, const PolicyKind& kind, std::size_t k, FeedbackSchedule sched,
                     std::size_t replicates, std::uint64_t rng_seed, unsigned workers, bool lazy) {
  const FeedbackSchedule one[1] = {sched};
  return std::move(estimate_F_sweep(g, kind, k, one, replicates, rng_seed, workers, lazy).front());
}

}  // namespace aim
