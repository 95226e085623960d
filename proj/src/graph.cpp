#include "aim/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "aim/rng.hpp"

namespace aim {

namespace {

bool valid_probability(double p) { return std::isfinite(p) && p > 0.0 && p <= 1.0; }

void build_csr(std::size_t n, std::span<const Edge> edges, bool outgoing, std::vector<std::size_t>& offset,
               std::vector<EdgeId>& ids) {
  offset.assign(n + 1, 0);
  for (const auto& e : edges) ++offset[(outgoing ? e.source : e.target) + 1];
  std::partial_sum(offset.begin(), offset.end(), offset.begin());
  ids.resize(edges.size());
  std::vector<std::size_t> cursor(offset.begin(), offset.end() - 1);
  for (EdgeId e = 0; e < edges.size(); ++e) {
    const NodeId key = outgoing ? edges[e].source : edges[e].target;
    ids[cursor[key]++] = e;
  }
}

std::uint64_t pair_key(NodeId u, NodeId v) { return (static_cast<std::uint64_t>(u) << 32) | v; }

}  // namespace

Graph::Graph(std::size_t node_count, std::vector<Edge> edges, std::vector<double> probs,
             std::vector<std::string> labels)
    : node_count_(node_count), edges_(std::move(edges)), probs_(std::move(probs)), labels_(std::move(labels)) {
  if (probs_.size() != edges_.size()) throw std::invalid_argument("one probability per edge is required");
  if (labels_.empty()) {
    labels_.reserve(node_count_);
    for (std::size_t v = 0; v < node_count_; ++v) labels_.push_back(std::to_string(v));
  } else if (labels_.size() != node_count_) {
    throw std::invalid_argument("one label per node is required");
  }
  if (edges_.size() >= std::numeric_limits<EdgeId>::max()) throw std::invalid_argument("too many edges");

  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto [u, v] = edges_[e];
    if (u >= node_count_ || v >= node_count_) throw std::invalid_argument(fmt::format("edge {} has an out-of-range endpoint", e));
    if (u == v) throw std::invalid_argument(fmt::format("edge {} is a self-loop", e));
    if (!seen.insert(pair_key(u, v)).second) throw std::invalid_argument(fmt::format("edge {} duplicates ({},{})", e, u, v));
    if (!valid_probability(probs_[e])) throw std::invalid_argument(fmt::format("edge {} has probability {} outside (0,1]", e, probs_[e]));
  }
  build_csr(node_count_, edges_, true, out_offset_, out_ids_);
  build_csr(node_count_, edges_, false, in_offset_, in_ids_);
}

std::optional<EdgeId> Graph::find_edge(NodeId u, NodeId v) const {
  if (u >= node_count_ || v >= node_count_) return std::nullopt;
  for (EdgeId e : out_edges(u))
    if (edges_[e].target == v) return e;
  return std::nullopt;
}

// --- probability models -----------------------------------------------------

ProbabilityModel parse_probability_model(std::string_view text) {
  if (text == "wc") return WeightedCascade{};
  if (text == "file") return FromFile{};
  if (text.starts_with("uniform:")) {
    const auto value = text.substr(8);
    double p = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), p);
    if (ec != std::errc{} || ptr != value.data() + value.size() || !valid_probability(p))
      throw std::invalid_argument(fmt::format("invalid uniform probability '{}'", value));
    return Uniform{p};
  }
  throw std::invalid_argument(fmt::format("unknown probability model '{}' (expected uniform:<p>, wc or file)", text));
}

std::string to_string(const ProbabilityModel& model) {
  if (const auto* u = std::get_if<Uniform>(&model)) return fmt::format("uniform:{}", u->p);
  if (std::holds_alternative<WeightedCascade>(model)) return "wc";
  return "file";
}

// --- ingestion --------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line, std::size_t line_no) {
  std::vector<std::string_view> fields;
  if (line.find(',') != std::string_view::npos) {
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(',', start);
      const auto field = trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
      if (field.empty()) throw ParseError("empty field", line_no);
      fields.push_back(field);
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    return fields;
  }
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

double parse_probability(std::string_view text, std::size_t line_no) {
  double p = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), p);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ParseError(fmt::format("cannot parse probability '{}'", text), line_no);
  if (!valid_probability(p)) throw ParseError(fmt::format("probability {} outside (0,1]", text), line_no);
  return p;
}

}  // namespace

Graph parse_edge_list(std::istream& in, const ProbabilityModel& model, std::vector<std::string>* warnings) {
  std::unordered_map<std::string, NodeId> ids;
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  std::vector<double> probs;
  std::unordered_set<std::uint64_t> seen;

  auto intern = [&](std::string_view name) {
    auto [it, inserted] = ids.try_emplace(std::string(name), static_cast<NodeId>(labels.size()));
    if (inserted) labels.emplace_back(name);
    return it->second;
  };
  auto warn = [&](std::string msg) {
    if (warnings) warnings->push_back(std::move(msg));
  };

  const bool from_file = std::holds_alternative<FromFile>(model);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split_fields(body, line_no);
    if (fields.size() == 1) {
      intern(fields[0]);
      continue;
    }
    if (fields.size() > 3) throw ParseError(fmt::format("expected 2 or 3 fields, found {}", fields.size()), line_no);
    double p = 1.0;
    if (fields.size() == 3) {
      p = parse_probability(fields[2], line_no);
    } else if (from_file) {
      throw ParseError("missing probability column", line_no);
    }
    const NodeId u = intern(fields[0]);
    const NodeId v = intern(fields[1]);
    if (u == v) {
      warn(fmt::format("line {}: self-loop on '{}' dropped", line_no, fields[0]));
      continue;
    }
    if (!seen.insert(pair_key(u, v)).second) {
      warn(fmt::format("line {}: duplicate edge ({},{}) ignored", line_no, fields[0], fields[1]));
      continue;
    }
    edges.push_back({u, v});
    probs.push_back(p);
  }
  if (labels.empty()) throw ParseError("edge list is empty", 0);

  const std::size_t n = labels.size();
  if (const auto* uni = std::get_if<Uniform>(&model)) {
    if (!valid_probability(uni->p)) throw std::invalid_argument("uniform probability outside (0,1]");
    std::fill(probs.begin(), probs.end(), uni->p);
  } else if (std::holds_alternative<WeightedCascade>(model)) {
    std::vector<std::size_t> indegree(n, 0);
    for (const auto& e : edges) ++indegree[e.target];
    for (std::size_t e = 0; e < edges.size(); ++e) probs[e] = 1.0 / static_cast<double>(indegree[edges[e].target]);
  }
  return Graph(n, std::move(edges), std::move(probs), std::move(labels));
}

Graph load_graph(const std::filesystem::path& path, const ProbabilityModel& model, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open graph file '{}'", path.string()));
  return parse_edge_list(in, model, warnings);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  // Declaring every node first pins the dense id order on reload.
  for (NodeId v = 0; v < g.node_count(); ++v) out << g.label(v) << '\n';
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto& [u, v] = g.edge(e);
    out << fmt::format("{} {} {:.17g}\n", g.label(u), g.label(v), g.prob(e));
  }
}

Graph random_graph(std::size_t n, std::size_t m, double p, std::uint64_t rng_seed) {
  if (n < 1) throw std::invalid_argument("random_graph needs at least one node");
  const std::size_t max_edges = n * (n - 1);
  if (m > max_edges) throw std::invalid_argument(fmt::format("{} edges exceed the {} possible on {} nodes", m, max_edges, n));
  if (!valid_probability(p)) throw std::invalid_argument("probability outside (0,1]");

  // Floyd's algorithm over the n(n-1) ordered pairs without self-loops.
  Rng rng(rng_seed);
  std::unordered_set<std::uint64_t> chosen;
  std::vector<std::uint64_t> order;
  for (std::size_t j = max_edges - m; j < max_edges; ++j) {
    const std::uint64_t t = rng.below(j + 1);
    const std::uint64_t pick = chosen.insert(t).second ? t : j;
    if (pick == j) chosen.insert(j);
    order.push_back(pick);
  }
  std::sort(order.begin(), order.end());
  std::vector<Edge> edges;
  edges.reserve(m);
  for (auto idx : order) {
    const auto u = static_cast<NodeId>(idx / (n - 1));
    auto v = static_cast<NodeId>(idx % (n - 1));
    if (v >= u) ++v;
    edges.push_back({u, v});
  }
  return Graph(n, std::move(edges), std::vector<double>(m, p));
}

}  // namespace aim
