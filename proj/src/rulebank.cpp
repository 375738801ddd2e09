#include "amrgen/rulebank.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "amrgen/corpus.hpp"
#include "amrgen/errors.hpp"
#include "amrgen/morphology.hpp"

namespace amrgen {

const char* to_string(RuleOrigin origin) {
  switch (origin) {
    case RuleOrigin::Induced: return "induced";
    case RuleOrigin::Concept: return "concept";
    case RuleOrigin::Verbalization: return "verbalization";
  }
  return "?";
}

RulePtr make_rule(AmrGraph fragment, std::vector<std::string> translation, std::uint64_t count, RuleOrigin origin) {
  auto order = bfs_order(fragment, fragment.root());
  return std::make_shared<const Rule>(
      Rule{std::move(fragment), std::move(translation), count, origin, std::move(order)});
}

std::optional<std::size_t> MatchedRule::position(NodeId node) const {
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] == node) return i;
  }
  return std::nullopt;
}

bool MatchedRule::overlaps(const MatchedRule& other) const {
  // both sorted
  auto a = covered.begin();
  auto b = other.covered.begin();
  while (a != covered.end() && b != other.covered.end()) {
    if (*a == *b) return true;
    if (*a < *b) ++a; else ++b;
  }
  return false;
}

// ---------------------------------------------------------------------------
// RuleBank

RuleBank::RuleBank(std::size_t top_n) : top_n_(top_n) {
  if (top_n == 0) throw std::invalid_argument("top_n must be positive");
}

std::size_t RuleBank::size() const {
  std::size_t n = 0;
  for (const auto& [root, rules] : by_root_) n += rules.size();
  return n;
}

std::span<const RulePtr> RuleBank::rules_for_root(const std::string& name) const {
  auto it = by_root_.find(name);
  if (it == by_root_.end()) return {};
  return it->second;
}

void RuleBank::add(std::vector<RulePtr> rules) {
  // regroup everything by canonical fragment, merging duplicate translations
  std::map<std::string, std::map<std::vector<std::string>, RulePtr>> by_fragment;
  auto insert = [&](const RulePtr& r) {
    auto& slot = by_fragment[canonical_penman(r->fragment)][r->translation];
    if (!slot) {
      slot = r;
    } else {
      slot = std::make_shared<const Rule>(
          Rule{slot->fragment, slot->translation, slot->count + r->count, slot->origin, slot->fragment_order});
    }
  };
  for (const auto& [root, existing] : by_root_) {
    for (const auto& r : existing) insert(r);
  }
  for (const auto& r : rules) insert(r);

  by_root_.clear();
  for (auto& [key, translations] : by_fragment) {
    std::vector<RulePtr> ranked;
    for (auto& [tr, r] : translations) ranked.push_back(r);
    std::stable_sort(ranked.begin(), ranked.end(), [](const RulePtr& a, const RulePtr& b) {
      if (a->count != b->count) return a->count > b->count;
      return join_tokens(a->translation) < join_tokens(b->translation);
    });
    if (ranked.size() > top_n_) ranked.resize(top_n_);
    const auto& root = ranked.front()->fragment.node(ranked.front()->fragment.root()).label;
    auto& bucket = by_root_[root];
    bucket.insert(bucket.end(), ranked.begin(), ranked.end());
  }
}

void RuleBank::write(std::ostream& out) const {
  for (const auto& [root, rules] : by_root_) {
    for (const auto& r : rules) {
      out << to_penman(r->fragment) << " ||| " << join_tokens(r->translation) << " ||| " << r->count << '\n';
    }
  }
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find("|||", start);
    fields.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 3;
  }
  return fields;
}

}  // namespace

RuleBank load_rules(std::istream& in, std::size_t top_n) {
  RuleBank bank(top_n);
  std::vector<RulePtr> rules;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const std::string where = "rule file line " + std::to_string(lineno) + ": ";

    const auto fields = split_fields(t);
    if (fields.size() != 3) {
      throw FormatError(where + "expected 3 '|||'-separated fields, got " + std::to_string(fields.size()));
    }
    AmrGraph fragment = [&] {
      try {
        return parse_penman(fields[0]);
      } catch (const ParseError& e) {
        throw FormatError(where + "bad fragment: " + e.what());
      }
    }();
    auto translation = split_tokens(fields[1]);
    if (translation.empty()) throw FormatError(where + "empty translation");

    long long count = 0;
    const auto& c = fields[2];
    const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), count);
    if (ec != std::errc() || ptr != c.data() + c.size()) throw FormatError(where + "bad count '" + c + "'");
    if (count < 0) throw FormatError(where + "negative count " + c);

    rules.push_back(make_rule(std::move(fragment), std::move(translation), static_cast<std::uint64_t>(count),
                              RuleOrigin::Induced));
  }
  bank.add(std::move(rules));
  return bank;
}

RuleBank load_rules_file(const std::string& path, std::size_t top_n) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open rule file " + path);
  return load_rules(in, top_n);
}

// ---------------------------------------------------------------------------
// Verbalizations

namespace {

bool is_constant_literal(const std::string& s) {
  if (s == "-" || s == "+") return true;
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return true;
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) || c == '.'; });
}

std::optional<Verbalization> parse_verbalization_line(const std::vector<std::string>& toks) {
  if (toks.size() < 4 || toks[0] != "VERBALIZE") return std::nullopt;
  const auto to = std::find(toks.begin() + 1, toks.end(), "TO");
  if (to == toks.begin() + 1 || to == toks.end() || to + 1 == toks.end()) return std::nullopt;

  Verbalization v;
  v.tokens.assign(toks.begin() + 1, to);
  AmrGraphBuilder builder;
  const NodeId root = builder.add_node("v0", *(to + 1));
  std::size_t next_var = 1;
  for (auto it = to + 2; it != toks.end(); it += 2) {
    if (it + 1 == toks.end() || it->size() < 2 || it->front() != ':') return std::nullopt;
    const std::string& name = *(it + 1);
    const NodeId child = is_constant_literal(name) ? builder.add_node("", name, true)
                                                      : builder.add_node("v" + std::to_string(next_var++), name);
    builder.add_edge(root, it->substr(1), child);
  }
  try {
    v.fragment = std::move(builder).build(root);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
  return v;
}

}  // namespace

VerbalizationList parse_verbalizations(std::istream& in) {
  VerbalizationList list;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (auto v = parse_verbalization_line(split_tokens(t))) {
      list.entries.push_back(std::move(*v));
    } else {
      ++list.skipped_lines;
    }
  }
  return list;
}

VerbalizationList load_verbalizations_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open verbalization list " + path);
  return parse_verbalizations(in);
}

SkipList default_skip_list() { return {"have-rel-role-91", "have-org-role-91", "multi-sentence", "amr-unknown"}; }

// ---------------------------------------------------------------------------
// Concept rules

std::vector<RulePtr> generate_concept_rules(const AmrGraph& graph, const SkipList& skip_list,
                                            const VerbalizationList& verbalizations) {
  std::vector<RulePtr> rules;
  std::set<std::pair<bool, std::string>> done;
  for (const auto& n : graph.nodes()) {
    if (!done.insert({n.is_constant, n.label}).second) continue;
    auto single = [&] {
      AmrGraphBuilder b;
      const NodeId id = n.is_constant ? b.add_node("", n.label, true) : b.add_node("x", n.label);
      return std::move(b).build(id);
    };
    if (!n.is_constant && skip_list.count(n.label)) {
      rules.push_back(make_rule(single(), {}, 0, RuleOrigin::Concept));
      continue;
    }
    if (n.is_constant) {
      auto tokens = split_tokens(constant_surface(n.label));
      if (tokens.empty()) tokens.push_back(n.label);
      rules.push_back(make_rule(single(), std::move(tokens), 0, RuleOrigin::Concept));
      continue;
    }
    for (auto& form : morphological_variants(n.label)) {
      rules.push_back(make_rule(single(), split_tokens(form), 0, RuleOrigin::Concept));
    }
  }

  std::set<std::pair<std::string, std::vector<std::string>>> seen_verbalizations;
  for (const auto& v : verbalizations.entries) {
    if (match_fragment(graph, v.fragment).empty()) continue;
    if (!seen_verbalizations.insert({canonical_penman(v.fragment), v.tokens}).second) continue;
    rules.push_back(make_rule(v.fragment, v.tokens, 0, RuleOrigin::Verbalization));
  }
  return rules;
}

// ---------------------------------------------------------------------------
// Matching

namespace {

bool same_label(const ConceptNode& a, const ConceptNode& b) {
  return a.is_constant == b.is_constant && a.label == b.label;
}

struct TreeEdge {
  std::size_t parent;  // fragment node index
  const std::string* relation;
};

class FragmentMatcher {
 public:
  FragmentMatcher(const AmrGraph& graph, const AmrGraph& fragment)
      : graph_(graph), fragment_(fragment), order_(bfs_order(fragment, fragment.root())) {
    // the edge through which BFS first reached each non-root fragment node
    std::vector<bool> reached(fragment.size(), false);
    tree_.resize(fragment.size());
    reached[fragment.root().index] = true;
    for (NodeId u : order_) {
      for (std::size_t e : fragment.out_edges(u)) {
        const auto& edge = fragment.edges()[e];
        if (!reached[edge.target.index]) {
          reached[edge.target.index] = true;
          tree_[edge.target.index] = TreeEdge{u.index, &edge.relation};
        }
      }
    }
    mapping_.assign(fragment.size(), NodeId{});
    used_.assign(graph.size(), false);
  }

  std::vector<std::vector<NodeId>> run() {
    if (fragment_.size() <= graph_.size()) extend(0);
    std::sort(results_.begin(), results_.end());
    results_.erase(std::unique(results_.begin(), results_.end()), results_.end());
    return std::move(results_);
  }

 private:
  void try_assign(std::size_t depth, NodeId frag_node, NodeId input) {
    if (used_[input.index] || !same_label(fragment_.node(frag_node), graph_.node(input))) return;
    used_[input.index] = true;
    mapping_[frag_node.index] = input;
    extend(depth + 1);
    used_[input.index] = false;
  }

  void extend(std::size_t depth) {
    if (depth == order_.size()) {
      if (edges_preserved()) results_.push_back(mapping_);
      return;
    }
    const NodeId f = order_[depth];
    if (depth == 0) {
      for (const auto& n : graph_.nodes()) try_assign(depth, f, n.id);
      return;
    }
    const TreeEdge& t = tree_[f.index];
    const NodeId parent_image = mapping_[t.parent];
    for (std::size_t e : graph_.out_edges(parent_image)) {
      const auto& edge = graph_.edges()[e];
      if (edge.relation == *t.relation) try_assign(depth, f, edge.target);
    }
  }

  bool edges_preserved() const {
    for (const auto& e : fragment_.edges()) {
      if (!graph_.has_edge(mapping_[e.source.index], e.relation, mapping_[e.target.index])) return false;
    }
    return true;
  }

  const AmrGraph& graph_;
  const AmrGraph& fragment_;
  std::vector<NodeId> order_;
  std::vector<TreeEdge> tree_;
  std::vector<NodeId> mapping_;
  std::vector<bool> used_;
  std::vector<std::vector<NodeId>> results_;
};

}  // namespace

std::vector<std::vector<NodeId>> match_fragment(const AmrGraph& graph, const AmrGraph& fragment) {
  return FragmentMatcher(graph, fragment).run();
}

std::vector<MatchedRulePtr> match_rule(const AmrGraph& graph, const RulePtr& rule) {
  std::vector<MatchedRulePtr> out;
  for (auto& mapping : match_fragment(graph, rule->fragment)) {
    MatchedRule m;
    m.rule = rule;
    m.covered = mapping;
    std::sort(m.covered.begin(), m.covered.end());
    for (NodeId f : rule->fragment_order) m.order.push_back(mapping[f.index]);
    m.mapping = std::move(mapping);
    out.push_back(std::make_shared<const MatchedRule>(std::move(m)));
  }
  return out;
}

std::vector<MatchedRulePtr> candidates(const AmrGraph& graph, const RuleBank& bank, const SkipList& skip_list,
                                       const VerbalizationList& verbalizations, RuleSources sources) {
  std::vector<MatchedRulePtr> out;
  auto append = [&](const RulePtr& r) {
    auto matched = match_rule(graph, r);
    out.insert(out.end(), matched.begin(), matched.end());
  };
  if (sources.induced) {
    std::set<std::string> roots;
    for (const auto& n : graph.nodes()) {
      if (!roots.insert(n.label).second) continue;
      for (const auto& r : bank.rules_for_root(n.label)) append(r);
    }
  }
  if (sources.concepts) {
    for (const auto& r : generate_concept_rules(graph, skip_list, verbalizations)) append(r);
  }
  return out;
}

std::vector<NodeId> uncovered_nodes(const AmrGraph& graph, std::span<const MatchedRulePtr> cands) {
  std::vector<bool> covered(graph.size(), false);
  for (const auto& c : cands) {
    for (NodeId id : c->covered) covered[id.index] = true;
  }
  std::vector<NodeId> out;
  for (const auto& n : graph.nodes()) {
    if (!covered[n.id.index]) out.push_back(n.id);
  }
  return out;
}

}  // namespace amrgen
