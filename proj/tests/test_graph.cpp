#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "aim/graph.hpp"
#include "aim/rng.hpp"

using namespace aim;

namespace {

Graph parse(const std::string& text, const ProbabilityModel& model, std::vector<std::string>* warnings = nullptr) {
  std::istringstream in(text);
  return parse_edge_list(in, model, warnings);
}

}  // namespace

TEST_CASE("uniform model assigns the same probability to every edge") {
  const auto g = parse("0 1\n1 2", Uniform{0.1});
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 2);
  for (double p : g.probs()) CHECK(p == 0.1);
}

TEST_CASE("weighted cascade uses the inverse in-degree") {
  const auto g = parse("0 1\n2 1", WeightedCascade{});
  REQUIRE(g.edge_count() == 2);
  CHECK(g.prob(0) == 0.5);
  CHECK(g.prob(1) == 0.5);
}

TEST_CASE("weighted cascade gives every in-edge 1/indegree on random graphs") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto base = random_graph(8, 20, 0.5, seed);
    std::ostringstream text;
    for (const auto& e : base.edges()) text << e.source << ' ' << e.target << '\n';
    const auto g = parse(text.str(), WeightedCascade{});
    for (NodeId v = 0; v < g.node_count(); ++v)
      for (EdgeId e : g.in_edges(v)) CHECK(g.prob(e) == 1.0 / static_cast<double>(g.in_degree(v)));
  }
}

TEST_CASE("probabilities can come from the third column") {
  const auto g = parse("0 1 0.25", FromFile{});
  REQUIRE(g.edge_count() == 1);
  CHECK(g.prob(0) == 0.25);
  CHECK_THROWS_AS(parse("0 1", FromFile{}), ParseError);
}

TEST_CASE("labels are remapped in order of first appearance") {
  const auto g = parse("# comment\n17 5\n5,9\n\n42\n", Uniform{1.0});
  REQUIRE(g.node_count() == 4);
  CHECK(g.label(0) == "17");
  CHECK(g.label(1) == "5");
  CHECK(g.label(2) == "9");
  CHECK(g.label(3) == "42");
  CHECK(g.out_degree(3) == 0);
  CHECK(g.in_degree(3) == 0);
  CHECK(g.edge(1) == Edge{1, 2});
}

TEST_CASE("duplicate edges and self-loops are dropped with warnings") {
  std::vector<std::string> warnings;
  const auto g = parse("0 1 0.3\n0 1 0.9\n1 1 0.5\n", FromFile{}, &warnings);
  CHECK(g.edge_count() == 1);
  CHECK(g.prob(0) == 0.3);
  CHECK(warnings.size() == 2);
}

TEST_CASE("malformed input raises ParseError with the line number") {
  try {
    parse("0 1\n0 1 2 3\n", Uniform{0.5});
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
  CHECK_THROWS_AS(parse("0 1 1.5", FromFile{}), ParseError);
  CHECK_THROWS_AS(parse("0 1 0", FromFile{}), ParseError);
  CHECK_THROWS_AS(parse("0 1 abc", FromFile{}), ParseError);
  CHECK_THROWS_AS(parse("0,,1", Uniform{0.5}), ParseError);
  CHECK_THROWS_AS(parse("# nothing\n", Uniform{0.5}), ParseError);
}

TEST_CASE("missing files raise Error") {
  CHECK_THROWS_AS(load_graph("/nonexistent/graph.txt", Uniform{0.5}), Error);
}

TEST_CASE("probability model names") {
  CHECK(std::holds_alternative<WeightedCascade>(parse_probability_model("wc")));
  CHECK(std::holds_alternative<FromFile>(parse_probability_model("file")));
  CHECK(std::get<Uniform>(parse_probability_model("uniform:0.25")).p == 0.25);
  CHECK_THROWS_AS(parse_probability_model("uniform:2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_probability_model("uniform:"), std::invalid_argument);
  CHECK_THROWS_AS(parse_probability_model("lt"), std::invalid_argument);
  CHECK(to_string(parse_probability_model("uniform:0.25")) == "uniform:0.25");
}

TEST_CASE("constructor rejects invalid graphs") {
  CHECK_THROWS_AS(Graph(2, {{0, 2}}, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(2, {{0, 0}}, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(2, {{0, 1}, {0, 1}}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(2, {{0, 1}}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(2, {{0, 1}}, {}), std::invalid_argument);
}

TEST_CASE("adjacency lists agree with the edge list") {
  const auto g = random_graph(10, 40, 0.3, 5);
  std::size_t out_total = 0, in_total = 0;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    for (EdgeId e : g.out_edges(v)) CHECK(g.edge(e).source == v);
    for (EdgeId e : g.in_edges(v)) CHECK(g.edge(e).target == v);
    out_total += g.out_degree(v);
    in_total += g.in_degree(v);
  }
  CHECK(out_total == g.edge_count());
  CHECK(in_total == g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) CHECK(g.find_edge(g.edge(e).source, g.edge(e).target) == e);
}

TEST_CASE("random_graph edge cases") {
  const auto single = random_graph(1, 0, 0.5, 9);
  CHECK(single.node_count() == 1);
  CHECK(single.edge_count() == 0);

  const auto complete = random_graph(3, 6, 0.5, 9);
  CHECK(complete.edge_count() == 6);
  for (NodeId u = 0; u < 3; ++u)
    for (NodeId v = 0; v < 3; ++v)
      if (u != v) CHECK(complete.find_edge(u, v).has_value());

  CHECK(random_graph(6, 12, 0.2, 77) == random_graph(6, 12, 0.2, 77));
  CHECK_THROWS_AS(random_graph(3, 7, 0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(random_graph(0, 0, 0.5, 1), std::invalid_argument);
}

TEST_CASE("writing and reloading a graph reproduces it") {
  Rng rng(3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 2 + rng.below(8);
    const auto base = random_graph(n, rng.below(n * (n - 1) + 1), 0.5, seed);
    std::vector<double> probs;
    for (std::size_t e = 0; e < base.edge_count(); ++e) probs.push_back(1.0 - rng.uniform());
    const Graph g(n, {base.edges().begin(), base.edges().end()}, probs);
    std::stringstream buf;
    write_edge_list(buf, g);
    CHECK(parse_edge_list(buf, FromFile{}) == g);
  }
}

TEST_CASE("load_graph reads files") {
  const auto path = std::filesystem::temp_directory_path() / "aim_test_graph.txt";
  {
    std::ofstream out(path);
    out << "a b\nb c\n";
  }
  const auto g = load_graph(path, Uniform{0.2});
  CHECK(g.node_count() == 3);
  CHECK(g.label(2) == "c");
  std::filesystem::remove(path);
}
