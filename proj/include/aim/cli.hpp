#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "aim/process.hpp"

namespace aim {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitVerifyFailed = 2, kExitIo = 3 };

struct ExperimentConfig {
  std::string graph_path;
  ProbabilityModel prob = Uniform{0.1};
  std::vector<PolicyKind> policies{Greedy{}};
  std::size_t k = 5;
  std::vector<FeedbackSchedule> schedules;
  std::size_t replicates = 500;
  std::size_t rr_samples = 100'000;
  std::uint64_t seed = 1;
  std::string out = "-";  // "-" is stdout
  unsigned workers = 1;
  // verify only
  std::size_t instances = 20;
  bool faulty_greedy = false;
};

/// Columns: row,policy,d,replicate,round,active_count,mean_active,stderr.
/// "replicate" rows hold one trace entry each; "aggregate" rows hold the
/// per-round mean and standard error with shorter traces padded by their
/// final value. Rounds count from 1.
void cmd_trace(const Graph& g, const ExperimentConfig& cfg, std::ostream& out);

/// Columns: policy,d,mean_final,stderr,replicates.
void cmd_sweep(const Graph& g, const ExperimentConfig& cfg, std::ostream& out);

/// Writes one line per check and returns kExitOk or kExitVerifyFailed.
int cmd_verify(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

/// Entry point of the `aim` tool.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace aim
