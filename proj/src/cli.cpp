#include "aim/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "aim/verify.hpp"

namespace aim {

namespace {

PolicyKind with_samples(PolicyKind kind, std::size_t rr_samples) {
  if (auto* g = std::get_if<Greedy>(&kind)) g->n_samples = rr_samples;
  return kind;
}

}  // namespace

void cmd_trace(const Graph& g, const ExperimentConfig& cfg, std::ostream& out) {
  out << "row,policy,d,replicate,round,active_count,mean_active,stderr\n";
  for (const auto& base : cfg.policies) {
    const auto kind = with_samples(base, cfg.rr_samples);
    const auto name = policy_name(kind);
    const auto all = estimate_F_sweep(g, kind, cfg.k, cfg.schedules, cfg.replicates, cfg.seed, cfg.workers);
    for (std::size_t s = 0; s < cfg.schedules.size(); ++s) {
      const auto& est = all[s];
      const auto d = cfg.schedules[s].to_string();
      for (std::size_t r = 0; r < est.traces.size(); ++r) {
        const auto& a = est.traces[r].active_per_round;
        for (std::size_t i = 0; i < a.size(); ++i) out << fmt::format("replicate,{},{},{},{},{},,\n", name, d, r, i + 1, a[i]);
      }
      for (std::size_t i = 0; i < est.round_mean.size(); ++i)
        out << fmt::format("aggregate,{},{},,{},,{},{}\n", name, d, i + 1, est.round_mean[i], est.round_std_error[i]);
    }
  }
}

void cmd_sweep(const Graph& g, const ExperimentConfig& cfg, std::ostream& out) {
  out << "policy,d,mean_final,stderr,replicates\n";
  for (const auto& base : cfg.policies) {
    const auto kind = with_samples(base, cfg.rr_samples);
    const auto all = estimate_F_sweep(g, kind, cfg.k, cfg.schedules, cfg.replicates, cfg.seed, cfg.workers);
    for (std::size_t s = 0; s < cfg.schedules.size(); ++s)
      out << fmt::format("{},{},{},{},{}\n", policy_name(kind), cfg.schedules[s].to_string(), all[s].mean,
                         all[s].std_error, cfg.replicates);
  }
}

int cmd_verify(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.instances == 0) {
    err << "warning: --instances 0, nothing to verify\n";
    return kExitOk;
  }
  VerifyOptions opts;
  opts.instances = cfg.instances;
  opts.seed = cfg.seed;
  opts.faulty_greedy = cfg.faulty_greedy;
  bool ok = true;
  for (const auto& r : run_verification(opts)) {
    if (r.passed()) {
      out << fmt::format("PASS {} ({} trials)\n", r.name, r.trials);
    } else {
      ok = false;
      out << fmt::format("FAIL {} ({} of {} trials): {}\n", r.name, r.failures, r.trials, r.first_failure);
    }
  }
  return ok ? kExitOk : kExitVerifyFailed;
}

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive influence maximization experiments"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  cfg.workers = std::max(1u, std::thread::hardware_concurrency());
  std::string prob = "uniform:0.1", policies = "greedy", ds;

  auto add_run_flags = [&](CLI::App* sub, const char* default_d) {
    sub->add_option("--graph", cfg.graph_path, "edge list file")->required();
    sub->add_option("--prob", prob, "uniform:<p>, wc or file")->capture_default_str();
    sub->add_option("--policy", policies, "comma list of greedy, degree, random")->capture_default_str();
    sub->add_option("--k", cfg.k, "seed budget")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--d", ds, "comma list of 0 (non-adaptive), inf (full adoption) or a round count")
        ->default_str(default_d);
    sub->add_option("--reps", cfg.replicates, "replicates per setting")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--rr-samples", cfg.rr_samples, "RR-sets per greedy decision")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    sub->add_option("--out", cfg.out, "output CSV path, - for stdout")->capture_default_str();
    sub->add_option("--workers", cfg.workers, "worker threads")->check(CLI::PositiveNumber);
  };
  auto* trace = app.add_subcommand("trace", "per-round active counts");
  add_run_flags(trace, "0,1,8,inf");
  auto* sweep = app.add_subcommand("sweep", "final influence per feedback schedule");
  add_run_flags(sweep, "0,1,2,4,8,inf");
  auto* verify = app.add_subcommand("verify", "exact checks on small random instances");
  verify->add_option("--instances", cfg.instances, "instances per check")->capture_default_str();
  verify->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  verify->add_flag("--faulty-greedy", cfg.faulty_greedy, "replace greedy by a worst-choice rule");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (verify->parsed()) return cmd_verify(cfg, out, err);

  try {
    cfg.prob = parse_probability_model(prob);
    cfg.policies.clear();
    for (const auto& p : split_list(policies)) cfg.policies.push_back(parse_policy_kind(p, cfg.rr_samples));
    if (cfg.policies.empty()) throw std::invalid_argument("no policy given");
    const std::string d_list = ds.empty() ? (trace->parsed() ? "0,1,8,inf" : "0,1,2,4,8,inf") : ds;
    for (const auto& d : split_list(d_list)) cfg.schedules.push_back(FeedbackSchedule::parse(d));
    if (cfg.schedules.empty()) throw std::invalid_argument("no feedback schedule given");
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  std::vector<std::string> warnings;
  Graph g;
  try {
    g = load_graph(cfg.graph_path, cfg.prob, &warnings);
  } catch (const ParseError& e) {
    err << "error: " << cfg.graph_path << ": " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  if (cfg.k > g.node_count()) {
    err << fmt::format("error: budget {} exceeds the {} nodes of the graph\n", cfg.k, g.node_count());
    return kExitUsage;
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (cfg.out != "-") {
    file.open(cfg.out);
    if (!file) {
      err << "error: cannot write " << cfg.out << '\n';
      return kExitIo;
    }
    sink = &file;
  }
  if (trace->parsed()) cmd_trace(g, cfg, *sink);
  else cmd_sweep(g, cfg, *sink);
  sink->flush();
  if (!*sink) {
    err << "error: writing output failed\n";
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace aim
