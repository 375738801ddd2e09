#include <doctest.h>

#include <algorithm>
#include <map>
#include <queue>

#include "amrgen/amr.hpp"
#include "amrgen/corpus.hpp"
#include "amrgen/errors.hpp"
#include "support.hpp"

using namespace amrgen;

namespace {

NodeId var(const AmrGraph& g, const char* v) { return g.find_variable(v).value(); }

std::vector<std::string> labels(const AmrGraph& g, const std::vector<NodeId>& ids) {
  std::vector<std::string> out;
  for (NodeId id : ids) out.push_back(g.node(id).label);
  return out;
}

ParseErrorKind parse_error_kind(const std::string& text) {
  try {
    parse_penman(text);
  } catch (const ParseError& e) {
    return e.kind();
  }
  FAIL("no parse error for " << text);
  return ParseErrorKind::EmptyInput;
}

std::multiset<std::string> node_multiset(const AmrGraph& g) {
  std::multiset<std::string> s;
  for (const auto& n : g.nodes()) s.insert(n.label);
  return s;
}

std::multiset<std::string> edge_multiset(const AmrGraph& g) {
  std::multiset<std::string> s;
  for (const auto& e : g.edges()) s.insert(g.node(e.source).label + " " + e.relation + " " + g.node(e.target).label);
  return s;
}

// Plain Floyd-Warshall over the undirected view.
std::vector<std::size_t> floyd(const AmrGraph& g) {
  const std::size_t n = g.size(), big = 1u << 20;
  std::vector<std::size_t> d(n * n, big);
  for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0;
  for (const auto& e : g.edges()) {
    d[e.source.index * n + e.target.index] = std::min<std::size_t>(d[e.source.index * n + e.target.index], 1);
    d[e.target.index * n + e.source.index] = std::min<std::size_t>(d[e.target.index * n + e.source.index], 1);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::min(d[i * n + j], d[i * n + k] + d[k * n + j]);
  return d;
}

}  // namespace

TEST_CASE("boy-wants graph parses with a re-entrant boy") {
  const AmrGraph g = parse_penman(testing::kBoyWants);
  CHECK(g.size() == 3);
  CHECK(g.edges().size() == 3);
  CHECK(g.node(g.root()).label == "want-01");
  const NodeId w = var(g, "w"), b = var(g, "b"), go = var(g, "g");
  CHECK(g.has_edge(w, "ARG0", b));
  CHECK(g.has_edge(go, "ARG0", b));
  CHECK(g.has_edge(w, "ARG1", go));
  CHECK(g.in_edges(b).size() == 2);
}

TEST_CASE("single node graph") {
  const AmrGraph g = parse_penman("  (b / boy)  ");
  CHECK(g.size() == 1);
  CHECK(g.edges().empty());
  CHECK(g.node(g.root()).variable == "b");
}

TEST_CASE("parse errors are distinguished") {
  CHECK(parse_error_kind("(w / want-01 :ARG0 (b / boy)") == ParseErrorKind::UnbalancedParen);
  CHECK(parse_error_kind("(b / boy))") == ParseErrorKind::UnbalancedParen);
  CHECK(parse_error_kind("") == ParseErrorKind::EmptyInput);
  CHECK(parse_error_kind("  # just a comment\n") == ParseErrorKind::EmptyInput);
  CHECK(parse_error_kind("(w / want-01 :ARG0 (w / boy))") == ParseErrorKind::ConceptConflict);
  CHECK(parse_error_kind("(w / want-01 :ARG0 x)") == ParseErrorKind::UndefinedVariable);
  CHECK(parse_error_kind("(w / want-01 :ARG0)") == ParseErrorKind::UnexpectedToken);

  try {
    parse_penman("(w / want-01 :ARG0 (b / boy)");
  } catch (const ParseError& e) {
    CHECK(e.offset() > 0);
  }
}

TEST_CASE("forward references and constants") {
  const AmrGraph g = parse_penman(
      "(p / possible-01 :polarity - :ARG1 (g / go-01 :ARG0 b :quant 5 :name \"New York\") :ARG2 (b / boy))");
  CHECK(g.size() == 6);
  const NodeId b = var(g, "b");
  CHECK(g.in_edges(b).size() == 2);
  std::size_t constants = 0;
  for (const auto& n : g.nodes()) {
    if (!n.is_constant) continue;
    ++constants;
    CHECK(g.out_edges(n.id).empty());
  }
  CHECK(constants == 3);
}

TEST_CASE("shorthand leaf definitions") {
  const AmrGraph g = parse_penman("(w/want-01 :ARG1 g/go-01)");
  CHECK(g.size() == 2);
  CHECK(labels(g, bfs_order(g, g.root())) == std::vector<std::string>{"want-01", "go-01"});
}

TEST_CASE("bfs order follows textual role order") {
  const AmrGraph g = parse_penman(testing::kBoyWants);
  CHECK(bfs_order(g, g.root()) == std::vector<NodeId>{var(g, "w"), var(g, "b"), var(g, "g")});
  CHECK(bfs_order(g, var(g, "g")) == std::vector<NodeId>{var(g, "g"), var(g, "b")});
  CHECK_THROWS_AS(bfs_order(g, NodeId{7}), std::out_of_range);

  const AmrGraph single = parse_penman("(b / boy)");
  CHECK(bfs_order(single, single.root()).size() == 1);
}

TEST_CASE("undirected distances") {
  const AmrGraph g = parse_penman(testing::kBoyWants);
  CHECK(undirected_distance(g, var(g, "w"), var(g, "g")) == 1);
  CHECK(undirected_distance(g, var(g, "b"), var(g, "b")) == 0);

  const AmrGraph t = parse_penman(testing::kBoyGirlBelieve);
  CHECK(undirected_distance(t, var(t, "w"), var(t, "g")) == 2);
}

TEST_CASE("distances agree with Floyd-Warshall, are symmetric and obey the triangle inequality") {
  for (const char* text : {testing::kBoyWants, testing::kBoyGirlBelieve,
                           "(a / a :r (b / b :r (c / c :r (d / d :r a))) :s (e / e :t (f / f :u d)))"}) {
    const AmrGraph g = parse_penman(text);
    const auto d = undirected_distances(g);
    const auto oracle = floyd(g);
    const std::size_t n = g.size();
    CHECK(d == oracle);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(d[i * n + j] == d[j * n + i]);
        for (std::size_t k = 0; k < n; ++k) CHECK(d[i * n + j] <= d[i * n + k] + d[k * n + j]);
      }
  }
}

TEST_CASE("serialize then parse is stable") {
  for (const char* text : {testing::kBoyWants, testing::kBoyGirlBelieve, "(b / boy)",
                           "(s / say-01 :ARG0 (p / person :name (n / name :op1 \"Jo\")) :polarity - :ARG1 p)"}) {
    const AmrGraph a = parse_penman(text);
    const AmrGraph b = parse_penman(to_penman(a));
    const AmrGraph c = parse_penman(to_penman(b));
    CHECK(node_multiset(a) == node_multiset(b));
    CHECK(edge_multiset(a) == edge_multiset(b));
    CHECK(to_penman(b) == to_penman(c));
    CHECK(bfs_order(a, a.root()).size() == a.size());
  }
  CHECK(canonical_penman(parse_penman("(x / want-01 :ARG1 (y / go-01))")) ==
        canonical_penman(parse_penman("(w / want-01 :ARG1 (g / go-01))")));
}

TEST_CASE("builder rejects unreachable nodes and childful constants") {
  AmrGraphBuilder b;
  const NodeId r = b.add_node("a", "alpha");
  b.add_node("b", "beta");
  CHECK_THROWS_AS(std::move(b).build(r), std::invalid_argument);

  AmrGraphBuilder c;
  const NodeId k = c.add_node("", "5", true);
  const NodeId x = c.add_node("x", "thing");
  c.add_edge(k, "mod", x);
  CHECK_THROWS_AS(std::move(c).build(k), std::invalid_argument);
}

TEST_CASE("AMR bank blocks") {
  std::istringstream in(
      "# AMR release\n\n"
      "# ::id a.1\n# ::snt The boy wants to go\n(w / want-01\n  :ARG0 (b / boy))\n\n\n"
      "# ::id a.2\n(b / boy)\n");
  const auto blocks = read_amr_bank(in);
  REQUIRE(blocks.size() == 2);
  CHECK(blocks[0].id == "a.1");
  CHECK(blocks[0].sentence == "The boy wants to go");
  CHECK(blocks[0].first_line == 3);
  CHECK(parse_penman(blocks[0].penman).size() == 2);
  CHECK_FALSE(blocks[1].sentence.has_value());
  CHECK_THROWS_AS(read_amr_bank_file("/nonexistent/amr.txt"), std::ios_base::failure);
}
