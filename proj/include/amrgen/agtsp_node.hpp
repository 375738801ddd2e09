#pragma once

#include <cstddef>

#include "amrgen/amr.hpp"
#include "amrgen/rulebank.hpp"

namespace amrgen {

/// (concept, matched rule) pair, or one of the two tour terminals.
struct AgtspNode {
  enum class Kind { Start, End, Ordinary };

  Kind kind = Kind::Ordinary;
  NodeId vertex;           // ordinary nodes only
  MatchedRulePtr rule;     // ordinary nodes only
  std::size_t position = 0;  // index of `vertex` in rule->order

  static AgtspNode start() { return AgtspNode{Kind::Start, {}, nullptr, 0}; }
  static AgtspNode end() { return AgtspNode{Kind::End, {}, nullptr, 0}; }
  static AgtspNode at(MatchedRulePtr rule, std::size_t position) {
    const NodeId c = rule->order.at(position);
    return AgtspNode{Kind::Ordinary, c, std::move(rule), position};
  }

  bool is_start() const { return kind == Kind::Start; }
  bool is_end() const { return kind == Kind::End; }
  bool is_ordinary() const { return kind == Kind::Ordinary; }
  /// First / last concept of the rule's fragment in BFS order.
  bool is_first() const { return is_ordinary() && position == 0; }
  bool is_last() const { return is_ordinary() && position + 1 == rule->order.size(); }
};

}  // namespace amrgen
