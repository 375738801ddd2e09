#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "amrgen/agtsp.hpp"
#include "amrgen/amr.hpp"
#include "amrgen/ngram_lm.hpp"
#include "amrgen/rulebank.hpp"
#include "amrgen/transition_model.hpp"

namespace testing {

inline std::string data_path(const std::string& name) { return std::string(AMRGEN_TEST_DATA) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

inline constexpr const char* kBoyWants = "(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-01 :ARG0 b))";
inline constexpr const char* kBoyGirlBelieve =
    "(w / want-01 :ARG0 (b / boy) :ARG1 (b2 / believe-01 :ARG0 (g / girl) :ARG1 b))";

inline constexpr const char* kBoyWantsRules =
    "(w / want-01) ||| wants ||| 3\n"
    "(g / go-01) ||| to go ||| 2\n"
    "(w / want-01 :ARG1 (g / go-01)) ||| wants to go ||| 5\n"
    "(b / boy) ||| The boy ||| 4\n";

inline amrgen::RuleBank boy_wants_bank() {
  std::istringstream in(kBoyWantsRules);
  return amrgen::load_rules(in, 10);
}

inline amrgen::NgramLm toy_lm(int order = 2) {
  return amrgen::NgramLm::train({{"the", "boy", "wants", "to", "go"}}, order, true);
}

/// lambda = [1, 0, 0, 0] with scaling disabled: cost falls as the LM score rises.
inline amrgen::TransitionModel lm_only_model() {
  amrgen::TransitionModel m;
  m.weights = {1.0, 0.0, 0.0, 0.0};
  return m;
}

/// Index of the instance node holding `variable` under the rule with this translation.
inline std::size_t node_index(const amrgen::AgtspInstance& inst, const amrgen::AmrGraph& graph,
                              const std::string& variable, const std::string& translation) {
  const auto id = graph.find_variable(variable).value();
  for (std::size_t i = 0; i < inst.nodes().size(); ++i) {
    const auto& n = inst.nodes()[i];
    if (!n.is_ordinary() || n.vertex != id) continue;
    std::string joined;
    for (const auto& t : n.rule->translation()) joined += (joined.empty() ? "" : " ") + t;
    if (joined == translation && n.rule->rule->origin == amrgen::RuleOrigin::Induced) return i;
  }
  throw std::runtime_error("no node (" + variable + ", " + translation + ")");
}

/// Random AGTSP instance: node 0 start, node 1 end, then `groups` groups
/// of 1..max_nodes nodes. A hidden tour is made finite so the instance is
/// always feasible; every other off-diagonal cell is finite with
/// probability `density`.
inline amrgen::AgtspInstance random_instance(std::mt19937_64& rng, std::size_t groups, std::size_t max_nodes,
                                             double density = 0.5) {
  using amrgen::Cost;
  std::uniform_int_distribution<std::size_t> nodes_per(1, max_nodes);
  std::uniform_real_distribution<double> cost(0.0, 10.0);
  std::bernoulli_distribution finite(density);

  std::vector<std::size_t> group_of{0, 1};
  std::vector<std::vector<std::size_t>> members(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t k = nodes_per(rng);
    for (std::size_t i = 0; i < k; ++i) {
      members[g].push_back(group_of.size());
      group_of.push_back(g + 2);
    }
  }
  const std::size_t n = group_of.size();
  std::vector<Cost> c(n * n, Cost::infinite());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (group_of[i] == group_of[j] || i == 1 || j == 0) continue;
      if (i == 0 && j == 1) continue;
      if (finite(rng)) c[i * n + j] = Cost(cost(rng));
    }
  }
  std::vector<std::size_t> perm(groups);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::size_t prev = 0;
  for (std::size_t g : perm) {
    const std::size_t pick = members[g][std::uniform_int_distribution<std::size_t>(0, members[g].size() - 1)(rng)];
    if (c[prev * n + pick].is_infinite()) c[prev * n + pick] = Cost(cost(rng));
    prev = pick;
  }
  if (c[prev * n + 1].is_infinite()) c[prev * n + 1] = Cost(cost(rng));
  c[1 * n + 0] = Cost(0.0);
  return amrgen::AgtspInstance(std::move(group_of), 0, 1, std::move(c));
}

/// Independent optimum: every permutation of the ordinary groups, with the
/// best node per group found by a left-to-right layered minimum.
inline double enumerate_optimum(const amrgen::AgtspInstance& inst) {
  const auto& groups = inst.groups();
  std::vector<std::size_t> order;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (g != inst.group_of(inst.start()) && g != inst.group_of(inst.end())) order.push_back(g);
  }
  const double inf = std::numeric_limits<double>::infinity();
  auto entry = [&](std::size_t a, std::size_t b) {
    const auto c = inst.cost(a, b);
    return c.is_infinite() ? inf : c.value();
  };
  double best = inf;
  do {
    std::vector<std::size_t> layer{inst.start()};
    std::vector<double> dist{0.0};
    for (std::size_t g : order) {
      std::vector<double> next(groups[g].size(), inf);
      for (std::size_t j = 0; j < groups[g].size(); ++j) {
        for (std::size_t i = 0; i < layer.size(); ++i) next[j] = std::min(next[j], dist[i] + entry(layer[i], groups[g][j]));
      }
      layer = groups[g];
      dist = std::move(next);
    }
    for (std::size_t i = 0; i < layer.size(); ++i) best = std::min(best, dist[i] + entry(layer[i], inst.end()));
  } while (std::next_permutation(order.begin(), order.end()));
  return best + entry(inst.end(), inst.start());
}

}  // namespace testing
