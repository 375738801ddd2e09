#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "amrgen/errors.hpp"
#include "amrgen/morphology.hpp"
#include "amrgen/rulebank.hpp"
#include "support.hpp"

using namespace amrgen;

namespace {

std::string joined(const std::vector<std::string>& tokens) {
  std::string s;
  for (const auto& t : tokens) s += (s.empty() ? "" : " ") + t;
  return s;
}

std::set<std::string> translations_for(const std::vector<RulePtr>& rules, const std::string& label) {
  std::set<std::string> out;
  for (const auto& r : rules) {
    if (r->fragment.node(r->fragment.root()).label == label) out.insert(joined(r->translation));
  }
  return out;
}

// Every injective map from fragment nodes to graph nodes, filtered by the
// label and edge conditions.
std::vector<std::vector<NodeId>> brute_force_matches(const AmrGraph& graph, const AmrGraph& fragment) {
  std::vector<std::vector<NodeId>> out;
  const std::size_t k = fragment.size(), n = graph.size();
  std::vector<NodeId> map(k);
  std::vector<std::size_t> idx(k, 0);
  auto valid = [&] {
    std::set<NodeId> seen(map.begin(), map.end());
    if (seen.size() != k) return false;
    for (std::size_t i = 0; i < k; ++i) {
      const auto& fn = fragment.nodes()[i];
      const auto& gn = graph.node(map[i]);
      if (fn.label != gn.label || fn.is_constant != gn.is_constant) return false;
    }
    for (const auto& e : fragment.edges()) {
      if (!graph.has_edge(map[e.source.index], e.relation, map[e.target.index])) return false;
    }
    return true;
  };
  while (true) {
    for (std::size_t i = 0; i < k; ++i) map[i] = NodeId{static_cast<std::uint32_t>(idx[i])};
    if (valid()) out.push_back(map);
    std::size_t pos = 0;
    while (pos < k && ++idx[pos] == n) idx[pos++] = 0;
    if (pos == k) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string random_graph(std::mt19937_64& rng, std::size_t nodes) {
  const std::vector<std::string> concepts{"a", "b", "c"};
  const std::vector<std::string> roles{"r", "s"};
  // parent links make a tree; extra re-entrant edges come from earlier nodes
  std::vector<std::vector<std::pair<std::string, std::string>>> children(nodes);
  std::vector<std::string> label(nodes);
  for (std::size_t i = 0; i < nodes; ++i) label[i] = concepts[rng() % concepts.size()];
  for (std::size_t i = 1; i < nodes; ++i) {
    const std::size_t parent = rng() % i;
    children[parent].push_back({roles[rng() % roles.size()], "#" + std::to_string(i)});
  }
  for (std::size_t extra = 0; extra < nodes / 3; ++extra) {
    const std::size_t from = rng() % nodes, to = rng() % nodes;
    if (from != to) children[from].push_back({roles[rng() % roles.size()], "v" + std::to_string(to)});
  }
  std::function<std::string(std::size_t)> render = [&](std::size_t i) {
    std::string s = "(v" + std::to_string(i) + " / " + label[i];
    for (const auto& [role, target] : children[i]) {
      s += " :" + role + " ";
      s += target[0] == '#' ? render(std::stoul(target.substr(1))) : target;
    }
    return s + ")";
  };
  return render(0);
}

}  // namespace

TEST_CASE("rule file loading") {
  std::istringstream one("(w / want-01 :ARG1 (g / go-01)) ||| wants to go ||| 5\n");
  const RuleBank bank = load_rules(one, 10);
  REQUIRE(bank.size() == 1);
  const auto rules = bank.rules_for_root("want-01");
  REQUIRE(rules.size() == 1);
  CHECK(rules[0]->fragment.size() == 2);
  CHECK(rules[0]->count == 5);
  CHECK(joined(rules[0]->translation) == "wants to go");

  std::istringstream two("(w / want-01) ||| want ||| 2\n(x / want-01) ||| wants ||| 5\n");
  const RuleBank top1 = load_rules(two, 1);
  REQUIRE(top1.size() == 1);
  CHECK(joined(top1.rules_for_root("want-01")[0]->translation) == "wants");

  std::istringstream empty("");
  CHECK(load_rules(empty, 10).empty());
  CHECK(bank.rules_for_root("dog").empty());
}

TEST_CASE("top-N ties break lexicographically and dumps never exceed N") {
  std::istringstream in(
      "(w / want-01) ||| zzz ||| 3\n(w / want-01) ||| aaa ||| 3\n(w / want-01) ||| mmm ||| 3\n"
      "(b / boy) ||| boy ||| 1\n(b / boy) ||| boys ||| 1\n(b / boy) ||| lad ||| 1\n");
  const RuleBank bank = load_rules(in, 2);
  const auto want = bank.rules_for_root("want-01");
  REQUIRE(want.size() == 2);
  CHECK(joined(want[0]->translation) == "aaa");
  CHECK(joined(want[1]->translation) == "mmm");

  std::ostringstream out;
  bank.write(out);
  std::istringstream back(out.str());
  const RuleBank reloaded = load_rules(back, 100);
  for (const auto& [root, rules] : reloaded.by_root()) CHECK(rules.size() <= 2);
  CHECK(reloaded.size() == 4);
}

TEST_CASE("duplicate rule lines merge their counts") {
  std::istringstream in("(b / boy) ||| boy ||| 1\n(x / boy) ||| boy ||| 2\n(b / boy) ||| lad ||| 2\n");
  const RuleBank bank = load_rules(in, 1);
  const auto rules = bank.rules_for_root("boy");
  REQUIRE(rules.size() == 1);
  CHECK(joined(rules[0]->translation) == "boy");
  CHECK(rules[0]->count == 3);
}

TEST_CASE("malformed rule lines name their line") {
  auto error_for = [](const std::string& text) -> std::string {
    std::istringstream in(text);
    try {
      load_rules(in, 10);
    } catch (const FormatError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(error_for("(b / boy) ||| boy\n").find("line 1") != std::string::npos);
  CHECK(error_for("# c\n(b / boy) ||| boy ||| -1\n").find("line 2") != std::string::npos);
  CHECK_FALSE(error_for("(b / boy ||| boy ||| 1\n").empty());
  CHECK_FALSE(error_for("(b / boy) ||| boy ||| many\n").empty());
  CHECK_FALSE(error_for("(b / boy) |||  ||| 1\n").empty());
  CHECK_THROWS_AS(load_rules_file("/nonexistent/rules", 10), std::ios_base::failure);
  CHECK_THROWS_AS(RuleBank(0), std::invalid_argument);
}

TEST_CASE("morphological variants") {
  CHECK(concept_lemma("want-01") == "want");
  CHECK(concept_lemma("boy") == "boy");
  CHECK(concept_lemma("have-rel-role-91") == "have-rel-role");
  CHECK(is_predicate("go-01"));
  CHECK_FALSE(is_predicate("boy"));
  CHECK(past_ed("stop") == "stopped");
  CHECK(past_ed("hope") == "hoped");
  CHECK(past_ed("carry") == "carried");
  CHECK(past_ed("play") == "played");
  CHECK(present_participle("make") == "making");
  CHECK(present_participle("run") == "running");
  CHECK(present_participle("die") == "dying");
  CHECK(present_participle("see") == "seeing");
  CHECK(third_person_s("go") == "goes");
  CHECK(third_person_s("watch") == "watches");
  CHECK(plural_s("city") == "cities");
  CHECK(plural_s("box") == "boxes");
  CHECK(plural_s("boy") == "boys");
}

TEST_CASE("concept rules") {
  const AmrGraph g = parse_penman("(w / want-01 :ARG0 (b / boy) :ARG1 (h / have-rel-role-91) :polarity -)");
  const auto rules = generate_concept_rules(g, default_skip_list(), {});
  CHECK(translations_for(rules, "want-01") == std::set<std::string>{"want", "wants", "wanted", "wanting"});
  CHECK(translations_for(rules, "boy") == std::set<std::string>{"boy", "boys"});
  CHECK(translations_for(rules, "have-rel-role-91") == std::set<std::string>{""});
  CHECK(translations_for(rules, "-") == std::set<std::string>{"not"});
  for (const auto& r : rules) CHECK(r->origin == RuleOrigin::Concept);
}

TEST_CASE("verbalization rules") {
  std::istringstream list(
      "VERBALIZE peacekeeping TO keep-01 :ARG1 peace\n"
      "VERBALIZE teacher TO person :ARG0-of teach-01\n"
      "MAYBE-VERBALIZE something odd\n");
  const VerbalizationList verbs = parse_verbalizations(list);
  CHECK(verbs.entries.size() == 2);
  CHECK(verbs.skipped_lines == 1);

  const AmrGraph g = parse_penman("(s / support-01 :ARG1 (k / keep-01 :ARG1 (p / peace)))");
  const auto rules = generate_concept_rules(g, default_skip_list(), verbs);
  std::vector<RulePtr> verbal;
  for (const auto& r : rules)
    if (r->origin == RuleOrigin::Verbalization) verbal.push_back(r);
  REQUIRE(verbal.size() == 1);
  CHECK(joined(verbal[0]->translation) == "peacekeeping");
  CHECK(canonical_penman(verbal[0]->fragment) == canonical_penman(parse_penman("(k/keep-01 :ARG1 (p/peace))")));
}

TEST_CASE("fragment matching on the boy-wants graph") {
  const AmrGraph g = parse_penman(testing::kBoyWants);
  const NodeId w = g.find_variable("w").value(), b = g.find_variable("b").value(),
               go = g.find_variable("g").value();

  const auto r3 = match_fragment(g, parse_penman("(w/want-01 :ARG1 g/go-01)"));
  REQUIRE(r3.size() == 1);
  CHECK(r3[0] == std::vector<NodeId>{w, go});
  CHECK(match_fragment(g, parse_penman("(b / boy)")) == std::vector<std::vector<NodeId>>{{b}});
  CHECK(match_fragment(g, parse_penman("(d / dog)")).empty());
  CHECK(match_fragment(g, parse_penman("(g / go-01 :ARG1 (w / want-01))")).empty());
}

TEST_CASE("matching equals brute-force enumeration on small graphs") {
  std::mt19937_64 rng(7);
  const std::vector<std::string> fragments{"(x / a)", "(x / a :r (y / b))", "(x / a :r (y / a))",
                                           "(x / b :s (y / c) :r (z / a))", "(x / c :r (y / c :s (z / b)))"};
  std::size_t nonempty = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const AmrGraph g = parse_penman(random_graph(rng, 2 + rng() % 7));
    for (const auto& text : fragments) {
      const AmrGraph f = parse_penman(text);
      const auto got = match_fragment(g, f);
      const auto want = brute_force_matches(g, f);
      CHECK(got == want);
      nonempty += got.empty() ? 0 : 1;
      for (const auto& m : got)
        for (const auto& e : f.edges()) CHECK(g.has_edge(m[e.source.index], e.relation, m[e.target.index]));
    }
  }
  CHECK(nonempty > 50);
}

TEST_CASE("candidate sets") {
  const AmrGraph g = parse_penman(testing::kBoyWants);
  const RuleBank bank = testing::boy_wants_bank();
  const auto cands = candidates(g, bank, default_skip_list(), {});
  std::size_t induced = 0;
  std::set<std::string> concept_roots;
  for (const auto& c : cands) {
    if (c->rule->origin == RuleOrigin::Induced) {
      ++induced;
    } else {
      concept_roots.insert(g.node(c->root()).label);
    }
  }
  CHECK(induced == 4);
  CHECK(concept_roots == std::set<std::string>{"want-01", "boy", "go-01"});
  CHECK(cands.front()->rule->origin == RuleOrigin::Induced);
  CHECK(uncovered_nodes(g, cands).empty());

  const auto fallback = candidates(g, RuleBank(), default_skip_list(), {});
  CHECK(std::none_of(fallback.begin(), fallback.end(),
                     [](const auto& c) { return c->rule->origin == RuleOrigin::Induced; }));
  CHECK(uncovered_nodes(g, fallback).empty());

  std::istringstream r3("(w / want-01 :ARG1 (g / go-01)) ||| wants to go ||| 5\n");
  const RuleBank only_r3 = load_rules(r3, 10);
  const AmrGraph boy = parse_penman("(b / boy)");
  for (const auto& c : candidates(boy, only_r3, default_skip_list(), {})) {
    CHECK(c->rule->origin == RuleOrigin::Concept);
    CHECK(boy.node(c->root()).label == "boy");
  }

  const auto induced_only = candidates(g, RuleBank(), default_skip_list(), {}, RuleSources{true, false});
  CHECK(induced_only.empty());
  CHECK(uncovered_nodes(g, induced_only).size() == 3);
}

TEST_CASE("matched rule order follows fragment BFS") {
  const AmrGraph g = parse_penman(testing::kBoyWants);
  const RuleBank bank = testing::boy_wants_bank();
  const auto r3 = bank.rules_for_root("want-01");
  const auto it = std::find_if(r3.begin(), r3.end(), [](const RulePtr& r) { return r->fragment.size() == 2; });
  REQUIRE(it != r3.end());
  const auto matched = match_rule(g, *it);
  REQUIRE(matched.size() == 1);
  CHECK(g.node(matched[0]->first()).label == "want-01");
  CHECK(g.node(matched[0]->last()).label == "go-01");
  CHECK(matched[0]->position(g.find_variable("g").value()) == 1u);
  CHECK_FALSE(matched[0]->position(g.find_variable("b").value()).has_value());
}
