#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "aim/types.hpp"

namespace aim {

struct Edge {
  NodeId source;
  NodeId target;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Immutable directed graph with an activation probability in (0,1] per edge.
/// Edge ids are positions in the edge list; adjacency is stored in CSR form.
class Graph {
 public:
  Graph() = default;
  /// Throws std::invalid_argument on out-of-range endpoints, self-loops,
  /// duplicate edges or probabilities outside (0,1].
  Graph(std::size_t node_count, std::vector<Edge> edges, std::vector<double> probs,
        std::vector<std::string> labels = {});

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  double prob(EdgeId e) const { return probs_[e]; }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const double> probs() const { return probs_; }

  std::span<const EdgeId> out_edges(NodeId v) const {
    return {out_ids_.data() + out_offset_[v], out_ids_.data() + out_offset_[v + 1]};
  }
  std::span<const EdgeId> in_edges(NodeId v) const {
    return {in_ids_.data() + in_offset_[v], in_ids_.data() + in_offset_[v + 1]};
  }
  std::size_t out_degree(NodeId v) const { return out_offset_[v + 1] - out_offset_[v]; }
  std::size_t in_degree(NodeId v) const { return in_offset_[v + 1] - in_offset_[v]; }

  std::optional<EdgeId> find_edge(NodeId u, NodeId v) const;

  /// Original identifier of a node (as read from file); defaults to the dense id.
  const std::string& label(NodeId v) const { return labels_[v]; }
  std::span<const std::string> labels() const { return labels_; }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.node_count_ == b.node_count_ && a.edges_ == b.edges_ && a.probs_ == b.probs_ && a.labels_ == b.labels_;
  }

 private:
  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> probs_;
  std::vector<std::string> labels_;
  std::vector<std::size_t> out_offset_{0}, in_offset_{0};
  std::vector<EdgeId> out_ids_, in_ids_;
};

// --- probability models -----------------------------------------------------

struct Uniform {
  double p;
};
/// p(u,v) = 1 / indegree(v).
struct WeightedCascade {};
/// Third column of the edge list.
struct FromFile {};

using ProbabilityModel = std::variant<Uniform, WeightedCascade, FromFile>;

/// Parses "uniform:<p>", "wc" or "file".
ProbabilityModel parse_probability_model(std::string_view text);
std::string to_string(const ProbabilityModel& model);

// --- ingestion --------------------------------------------------------------

/// Reads an edge list: one edge per line as "u v" or "u v p", fields separated
/// by whitespace or a single comma, '#' comments. A line holding a single id
/// declares an isolated node. Ids are remapped to dense ids in order of first
/// appearance. Duplicate edges keep the first occurrence and self-loops are
/// dropped; both produce a message in `warnings` when it is non-null.
Graph parse_edge_list(std::istream& in, const ProbabilityModel& model,
                      std::vector<std::string>* warnings = nullptr);

/// Opens `path` and parses it; throws Error when the file cannot be read.
Graph load_graph(const std::filesystem::path& path, const ProbabilityModel& model,
                 std::vector<std::string>* warnings = nullptr);

/// Writes every node label on its own line followed by "label label prob"
/// lines, so that parse_edge_list(..., FromFile{}) reproduces the graph exactly.
void write_edge_list(std::ostream& out, const Graph& g);

/// m distinct directed edges drawn uniformly without replacement, all with
/// probability p. Deterministic in rng_seed.
Graph random_graph(std::size_t n, std::size_t m, double p, std::uint64_t rng_seed);

}  // namespace aim
