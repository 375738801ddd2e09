#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace amrgen {

/// Index of a node inside one AmrGraph.
struct NodeId {
  std::uint32_t index = 0;

  friend auto operator<=>(NodeId, NodeId) = default;
};

struct ConceptNode {
  NodeId id;
  std::string variable;  // empty for constants
  std::string label;     // "want-01", or the literal text of a constant ("-", "5", "\"Obama\"")
  bool is_constant = false;
};

struct Edge {
  NodeId source;
  std::string relation;  // without the leading ':'
  NodeId target;
};

/// Rooted, connected, directed labeled graph. Immutable once built.
///
/// Re-entrance is expressed by several edges sharing a target. Edge order
/// is the textual order of roles in the penman source, which fixes the
/// child order used by bfs_order().
class AmrGraph {
 public:
  std::size_t size() const { return nodes_.size(); }
  NodeId root() const { return root_; }
  const std::vector<ConceptNode>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const ConceptNode& node(NodeId id) const { return nodes_.at(id.index); }
  bool contains(NodeId id) const { return id.index < nodes_.size(); }

  /// Indices into edges() of the edges leaving `id`, in textual order.
  std::span<const std::size_t> out_edges(NodeId id) const;
  /// Indices into edges() of the edges entering `id`.
  std::span<const std::size_t> in_edges(NodeId id) const;

  std::optional<NodeId> find_variable(std::string_view variable) const;
  bool has_edge(NodeId source, std::string_view relation, NodeId target) const;

 private:
  friend class AmrGraphBuilder;

  std::vector<ConceptNode> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
  NodeId root_;
};

/// Incremental construction of an AmrGraph; build() checks the invariants.
class AmrGraphBuilder {
 public:
  NodeId add_node(std::string variable, std::string label, bool is_constant = false);
  void set_label(NodeId id, std::string label);
  void add_edge(NodeId source, std::string relation, NodeId target);
  std::size_t size() const { return nodes_.size(); }
  const ConceptNode& node(NodeId id) const { return nodes_.at(id.index); }

  /// Throws std::invalid_argument if the graph is not rooted at `root`,
  /// has unreachable nodes, duplicate variables, or constants with children.
  AmrGraph build(NodeId root) &&;

 private:
  std::vector<ConceptNode> nodes_;
  std::vector<Edge> edges_;
};

/// Parses a single penman expression. Leading and trailing whitespace and
/// '#' comment lines are ignored. Throws ParseError.
///
/// Besides the standard "(v / concept :role ...)" layout, an unparenthesized
/// "v/concept" role value is accepted as a leaf node definition.
AmrGraph parse_penman(std::string_view text);

/// Single-line penman rendering; re-entrant nodes print as their variable.
std::string to_penman(const AmrGraph& graph);

/// Penman rendering with variables renamed v0, v1, ... in visit order, so
/// that fragments differing only in variable names compare equal.
std::string canonical_penman(const AmrGraph& graph);

/// Breadth-first order over directed edges, children in stored edge order.
/// Throws std::out_of_range if `start` is not in the graph.
std::vector<NodeId> bfs_order(const AmrGraph& graph, NodeId start);

/// Shortest path length over the undirected view of the graph.
std::size_t undirected_distance(const AmrGraph& graph, NodeId a, NodeId b);

/// All-pairs undirected distances, row-major |V| x |V|.
std::vector<std::size_t> undirected_distances(const AmrGraph& graph);

}  // namespace amrgen

template <>
struct std::hash<amrgen::NodeId> {
  std::size_t operator()(amrgen::NodeId id) const noexcept { return std::hash<std::uint32_t>{}(id.index); }
};
