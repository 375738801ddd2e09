#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "amrgen/amr.hpp"

namespace amrgen {

enum class RuleOrigin { Induced, Concept, Verbalization };

const char* to_string(RuleOrigin origin);

/// Graph-to-string rule: a rooted connected fragment and its translation.
struct Rule {
  AmrGraph fragment;
  std::vector<std::string> translation;
  std::uint64_t count = 0;
  RuleOrigin origin = RuleOrigin::Induced;
  std::vector<NodeId> fragment_order;  // bfs_order(fragment, fragment.root())
};

using RulePtr = std::shared_ptr<const Rule>;

RulePtr make_rule(AmrGraph fragment, std::vector<std::string> translation, std::uint64_t count, RuleOrigin origin);

/// A rule anchored in an input graph.
struct MatchedRule {
  RulePtr rule;
  std::vector<NodeId> mapping;  // fragment node index -> input node
  std::vector<NodeId> covered;  // sorted image of mapping
  std::vector<NodeId> order;    // input nodes in the fragment's BFS order

  NodeId root() const { return order.front(); }
  NodeId first() const { return order.front(); }
  NodeId last() const { return order.back(); }
  const std::vector<std::string>& translation() const { return rule->translation; }
  /// Index of `node` in `order`, if covered.
  std::optional<std::size_t> position(NodeId node) const;
  bool overlaps(const MatchedRule& other) const;
};

using MatchedRulePtr = std::shared_ptr<const MatchedRule>;

/// Induced rules keyed by the concept at the fragment root, keeping at most
/// top_n translations per distinct fragment.
class RuleBank {
 public:
  explicit RuleBank(std::size_t top_n = 10);

  std::size_t top_n() const { return top_n_; }
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  /// Rules whose fragment root has this concept; empty span if none.
  std::span<const RulePtr> rules_for_root(const std::string& name) const;
  const std::map<std::string, std::vector<RulePtr>>& by_root() const { return by_root_; }

  /// Adds rules, merging identical (fragment, translation) pairs and
  /// re-applying the top-N cut per fragment.
  void add(std::vector<RulePtr> rules);

  /// Writes the bank in rule-file format.
  void write(std::ostream& out) const;

 private:
  std::size_t top_n_;
  std::map<std::string, std::vector<RulePtr>> by_root_;
};

/// Rule file: one "FRAGMENT ||| translation ||| COUNT" per line. Blank lines
/// and lines starting with '#' are ignored. Throws FormatError naming the line.
RuleBank load_rules(std::istream& in, std::size_t top_n);
RuleBank load_rules_file(const std::string& path, std::size_t top_n);

struct Verbalization {
  std::vector<std::string> tokens;
  AmrGraph fragment;
};

struct VerbalizationList {
  std::vector<Verbalization> entries;
  std::size_t skipped_lines = 0;
};

/// Reads "VERBALIZE <token> TO <concept> [:ROLE <concept> ...]" lines; any
/// other non-comment line is skipped and counted.
VerbalizationList parse_verbalizations(std::istream& in);
VerbalizationList load_verbalizations_file(const std::string& path);

using SkipList = std::set<std::string>;

SkipList default_skip_list();

/// Concept rules for every distinct concept of `graph` plus verbalization
/// rules whose fragment occurs in `graph`. Skip-list concepts get a single
/// rule with an empty translation.
std::vector<RulePtr> generate_concept_rules(const AmrGraph& graph, const SkipList& skip_list,
                                            const VerbalizationList& verbalizations);

/// All injective maps fragment -> graph preserving labels and fragment
/// edges, sorted lexicographically by image. Each mapping is indexed by
/// fragment node index.
std::vector<std::vector<NodeId>> match_fragment(const AmrGraph& graph, const AmrGraph& fragment);

std::vector<MatchedRulePtr> match_rule(const AmrGraph& graph, const RulePtr& rule);

struct RuleSources {
  bool induced = true;
  bool concepts = true;
};

/// Matched induced rules followed by matched concept and verbalization rules.
std::vector<MatchedRulePtr> candidates(const AmrGraph& graph, const RuleBank& bank, const SkipList& skip_list,
                                       const VerbalizationList& verbalizations, RuleSources sources = {});

/// Input nodes not covered by any candidate.
std::vector<NodeId> uncovered_nodes(const AmrGraph& graph, std::span<const MatchedRulePtr> candidates);

}  // namespace amrgen
