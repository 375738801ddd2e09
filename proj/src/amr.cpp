#include "amrgen/amr.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <limits>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "amrgen/errors.hpp"

namespace amrgen {

const char* to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::EmptyInput: return "empty input";
    case ParseErrorKind::UnbalancedParen: return "unbalanced parenthesis";
    case ParseErrorKind::ConceptConflict: return "variable redefined with a different concept";
    case ParseErrorKind::UndefinedVariable: return "reference to undefined variable";
    case ParseErrorKind::UnexpectedToken: return "unexpected token";
  }
  return "parse error";
}

ParseError::ParseError(ParseErrorKind kind, std::size_t offset, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + " at offset " + std::to_string(offset) +
                         (what.empty() ? "" : ": " + what)),
      kind_(kind),
      offset_(offset) {}

// ---------------------------------------------------------------------------
// AmrGraph

std::span<const std::size_t> AmrGraph::out_edges(NodeId id) const { return out_.at(id.index); }

std::span<const std::size_t> AmrGraph::in_edges(NodeId id) const { return in_.at(id.index); }

std::optional<NodeId> AmrGraph::find_variable(std::string_view variable) const {
  for (const auto& n : nodes_) {
    if (!n.is_constant && n.variable == variable) return n.id;
  }
  return std::nullopt;
}

bool AmrGraph::has_edge(NodeId source, std::string_view relation, NodeId target) const {
  for (std::size_t e : out_edges(source)) {
    if (edges_[e].target == target && edges_[e].relation == relation) return true;
  }
  return false;
}

NodeId AmrGraphBuilder::add_node(std::string variable, std::string name, bool is_constant) {
  NodeId id{static_cast<std::uint32_t>(nodes_.size())};
  nodes_.push_back(ConceptNode{id, std::move(variable), std::move(name), is_constant});
  return id;
}

void AmrGraphBuilder::set_label(NodeId id, std::string name) { nodes_.at(id.index).label = std::move(name); }

void AmrGraphBuilder::add_edge(NodeId source, std::string relation, NodeId target) {
  if (source.index >= nodes_.size() || target.index >= nodes_.size()) {
    throw std::invalid_argument("edge endpoint out of range");
  }
  edges_.push_back(Edge{source, std::move(relation), target});
}

AmrGraph AmrGraphBuilder::build(NodeId root) && {
  if (nodes_.empty()) throw std::invalid_argument("graph has no nodes");
  if (root.index >= nodes_.size()) throw std::invalid_argument("root out of range");

  std::set<std::string> seen_vars;
  for (const auto& n : nodes_) {
    if (n.label.empty()) throw std::invalid_argument("node without concept");
    if (n.is_constant) continue;
    if (n.variable.empty()) throw std::invalid_argument("concept node without variable");
    if (!seen_vars.insert(n.variable).second) throw std::invalid_argument("duplicate variable " + n.variable);
  }

  AmrGraph g;
  g.nodes_ = std::move(nodes_);
  g.edges_ = std::move(edges_);
  g.root_ = root;
  g.out_.assign(g.nodes_.size(), {});
  g.in_.assign(g.nodes_.size(), {});
  for (std::size_t e = 0; e < g.edges_.size(); ++e) {
    const auto& edge = g.edges_[e];
    if (g.nodes_[edge.source.index].is_constant) {
      throw std::invalid_argument("constant " + g.nodes_[edge.source.index].label + " has outgoing edges");
    }
    g.out_[edge.source.index].push_back(e);
    g.in_[edge.target.index].push_back(e);
  }
  if (bfs_order(g, root).size() != g.nodes_.size()) {
    throw std::invalid_argument("graph has nodes unreachable from the root");
  }
  return g;
}

// ---------------------------------------------------------------------------
// Penman tokenizer

namespace {

enum class Tok { LParen, RParen, Slash, Role, String, Symbol, End };

struct Token {
  Tok type;
  std::string text;
  std::size_t offset;
};

bool is_delimiter(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '/' || c == '"';
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '#') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (c == '(') {
      out.push_back({Tok::LParen, "(", i++});
    } else if (c == ')') {
      out.push_back({Tok::RParen, ")", i++});
    } else if (c == '/') {
      out.push_back({Tok::Slash, "/", i++});
    } else if (c == '"') {
      const std::size_t start = i++;
      while (i < s.size() && s[i] != '"') {
        if (s[i] == '\\' && i + 1 < s.size()) ++i;
        ++i;
      }
      if (i >= s.size()) throw ParseError(ParseErrorKind::UnexpectedToken, start, "unterminated string");
      ++i;
      out.push_back({Tok::String, std::string(s.substr(start, i - start)), start});
    } else {
      const std::size_t start = i;
      while (i < s.size() && !is_delimiter(s[i])) ++i;
      std::string text(s.substr(start, i - start));
      if (text.front() == ':') {
        if (text.size() == 1) throw ParseError(ParseErrorKind::UnexpectedToken, start, "empty role");
        out.push_back({Tok::Role, text.substr(1), start});
      } else {
        out.push_back({Tok::Symbol, std::move(text), start});
      }
    }
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

// A bare symbol is read as a variable reference when it has the usual AMR
// variable shape (one letter, optional digits); otherwise it is a constant.
bool looks_like_variable(std::string_view s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin() + 1, s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

class PenmanParser {
 public:
  explicit PenmanParser(std::string_view text) : tokens_(tokenize(text)) {
    for (std::size_t i = 0; i + 1 < tokens_.size(); ++i) {
      if (tokens_[i].type == Tok::Symbol && tokens_[i + 1].type == Tok::Slash) defined_.insert(tokens_[i].text);
    }
  }

  AmrGraph parse() {
    if (peek().type == Tok::End) throw ParseError(ParseErrorKind::EmptyInput, peek().offset, "");
    if (peek().type == Tok::RParen) throw ParseError(ParseErrorKind::UnbalancedParen, peek().offset, "unexpected ')'");
    if (peek().type != Tok::LParen) throw ParseError(ParseErrorKind::UnexpectedToken, peek().offset, "expected '('");
    const NodeId root = parse_node();
    if (peek().type == Tok::RParen) throw ParseError(ParseErrorKind::UnbalancedParen, peek().offset, "unexpected ')'");
    if (peek().type != Tok::End) {
      throw ParseError(ParseErrorKind::UnexpectedToken, peek().offset, "trailing '" + peek().text + "'");
    }
    try {
      return std::move(builder_).build(root);
    } catch (const std::invalid_argument& e) {
      throw ParseError(ParseErrorKind::UnexpectedToken, 0, e.what());
    }
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  const Token& expect(Tok type, const char* what) {
    const Token& t = peek();
    if (t.type == Tok::End) throw ParseError(ParseErrorKind::UnbalancedParen, t.offset, std::string("expected ") + what);
    if (t.type != type) throw ParseError(ParseErrorKind::UnexpectedToken, t.offset, std::string("expected ") + what);
    return next();
  }

  NodeId variable_node(const std::string& var) {
    auto it = vars_.find(var);
    if (it != vars_.end()) return it->second;
    const NodeId id = builder_.add_node(var, "");
    vars_.emplace(var, id);
    return id;
  }

  NodeId define(const Token& var, const Token& name) {
    const NodeId id = variable_node(var.text);
    const std::string& existing = builder_.node(id).label;
    if (existing.empty()) {
      builder_.set_label(id, name.text);
    } else if (existing != name.text) {
      throw ParseError(ParseErrorKind::ConceptConflict, var.offset,
                       var.text + " is " + existing + ", redefined as " + name.text);
    }
    return id;
  }

  NodeId parse_node() {
    expect(Tok::LParen, "'('");
    const Token& var = expect(Tok::Symbol, "variable");
    expect(Tok::Slash, "'/'");
    const Token& name = peek().type == Tok::String ? next() : expect(Tok::Symbol, "concept");
    const NodeId id = define(var, name);
    while (peek().type == Tok::Role) {
      std::string role = next().text;
      const NodeId child = parse_value();
      builder_.add_edge(id, std::move(role), child);
    }
    const Token& close = peek();
    if (close.type == Tok::End) throw ParseError(ParseErrorKind::UnbalancedParen, close.offset, "missing ')'");
    if (close.type != Tok::RParen) {
      throw ParseError(ParseErrorKind::UnexpectedToken, close.offset, "expected role or ')', got '" + close.text + "'");
    }
    next();
    return id;
  }

  NodeId parse_value() {
    const Token& t = peek();
    switch (t.type) {
      case Tok::LParen:
        return parse_node();
      case Tok::String:
        next();
        return builder_.add_node("", t.text, true);
      case Tok::Symbol: {
        const Token& sym = next();
        if (peek().type == Tok::Slash) {
          next();
          const Token& name = peek().type == Tok::String ? next() : expect(Tok::Symbol, "concept");
          return define(sym, name);
        }
        if (defined_.count(sym.text)) return variable_node(sym.text);
        if (looks_like_variable(sym.text)) {
          throw ParseError(ParseErrorKind::UndefinedVariable, sym.offset, sym.text);
        }
        return builder_.add_node("", sym.text, true);
      }
      case Tok::End:
        throw ParseError(ParseErrorKind::UnbalancedParen, t.offset, "missing role value");
      default:
        throw ParseError(ParseErrorKind::UnexpectedToken, t.offset, "bad role value '" + t.text + "'");
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::set<std::string> defined_;
  std::unordered_map<std::string, NodeId> vars_;
  AmrGraphBuilder builder_;
};

void write_penman(const AmrGraph& g, NodeId id, std::vector<bool>& visited, const std::vector<std::string>& names,
                  std::string& out) {
  const auto& n = g.node(id);
  if (n.is_constant) {
    out += n.label;
    return;
  }
  if (visited[id.index]) {
    out += names[id.index];
    return;
  }
  visited[id.index] = true;
  out += '(';
  out += names[id.index];
  out += " / ";
  out += n.label;
  for (std::size_t e : g.out_edges(id)) {
    const auto& edge = g.edges()[e];
    out += " :";
    out += edge.relation;
    out += ' ';
    write_penman(g, edge.target, visited, names, out);
  }
  out += ')';
}

void number_variables(const AmrGraph& g, NodeId id, std::vector<bool>& visited, std::vector<std::string>& names,
                      std::size_t& counter) {
  if (g.node(id).is_constant || visited[id.index]) return;
  visited[id.index] = true;
  names[id.index] = "v" + std::to_string(counter++);
  for (std::size_t e : g.out_edges(id)) number_variables(g, g.edges()[e].target, visited, names, counter);
}

}  // namespace

AmrGraph parse_penman(std::string_view text) { return PenmanParser(text).parse(); }

std::string to_penman(const AmrGraph& graph) {
  std::vector<std::string> names;
  names.reserve(graph.size());
  for (const auto& n : graph.nodes()) names.push_back(n.variable);
  std::vector<bool> visited(graph.size(), false);
  std::string out;
  write_penman(graph, graph.root(), visited, names, out);
  return out;
}

std::string canonical_penman(const AmrGraph& graph) {
  std::vector<std::string> names(graph.size());
  std::vector<bool> visited(graph.size(), false);
  std::size_t counter = 0;
  number_variables(graph, graph.root(), visited, names, counter);
  visited.assign(graph.size(), false);
  std::string out;
  write_penman(graph, graph.root(), visited, names, out);
  return out;
}

std::vector<NodeId> bfs_order(const AmrGraph& graph, NodeId start) {
  if (!graph.contains(start)) throw std::out_of_range("bfs_order: start node not in graph");
  std::vector<NodeId> order;
  std::vector<bool> seen(graph.size(), false);
  std::deque<NodeId> queue{start};
  seen[start.index] = true;
  while (!queue.empty()) {
    const NodeId cur = queue.front();
    queue.pop_front();
    order.push_back(cur);
    for (std::size_t e : graph.out_edges(cur)) {
      const NodeId t = graph.edges()[e].target;
      if (!seen[t.index]) {
        seen[t.index] = true;
        queue.push_back(t);
      }
    }
  }
  return order;
}

namespace {

std::vector<std::size_t> distances_from(const AmrGraph& graph, NodeId source) {
  constexpr auto unreached = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(graph.size(), unreached);
  std::deque<NodeId> queue{source};
  dist[source.index] = 0;
  while (!queue.empty()) {
    const NodeId cur = queue.front();
    queue.pop_front();
    auto relax = [&](NodeId t) {
      if (dist[t.index] == unreached) {
        dist[t.index] = dist[cur.index] + 1;
        queue.push_back(t);
      }
    };
    for (std::size_t e : graph.out_edges(cur)) relax(graph.edges()[e].target);
    for (std::size_t e : graph.in_edges(cur)) relax(graph.edges()[e].source);
  }
  return dist;
}

}  // namespace

std::size_t undirected_distance(const AmrGraph& graph, NodeId a, NodeId b) {
  if (!graph.contains(a) || !graph.contains(b)) throw std::out_of_range("undirected_distance: node not in graph");
  return distances_from(graph, a)[b.index];
}

std::vector<std::size_t> undirected_distances(const AmrGraph& graph) {
  std::vector<std::size_t> table;
  table.reserve(graph.size() * graph.size());
  for (const auto& n : graph.nodes()) {
    auto row = distances_from(graph, n.id);
    table.insert(table.end(), row.begin(), row.end());
  }
  return table;
}

}  // namespace amrgen
