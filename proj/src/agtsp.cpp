#include "amrgen/agtsp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "amrgen/corpus.hpp"
#include "amrgen/errors.hpp"

namespace amrgen {

double Cost::value() const {
  if (infinite_) throw std::logic_error("value() of an infinite cost");
  return value_;
}

std::string to_string(Cost cost) {
  if (cost.is_infinite()) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", cost.value());
  return buf;
}

// ---------------------------------------------------------------------------
// AgtspInstance

AgtspInstance::AgtspInstance(std::vector<std::size_t> group_of, std::size_t start, std::size_t end,
                             std::vector<Cost> costs, std::vector<AgtspNode> nodes)
    : group_of_(std::move(group_of)), start_(start), end_(end), costs_(std::move(costs)), nodes_(std::move(nodes)) {
  const std::size_t n = group_of_.size();
  if (start_ >= n || end_ >= n || start_ == end_) throw std::invalid_argument("bad start/end node");
  if (costs_.size() != n * n) throw std::invalid_argument("cost matrix is not n x n");
  if (!nodes_.empty() && nodes_.size() != n) throw std::invalid_argument("node metadata size mismatch");

  const std::size_t group_count = *std::max_element(group_of_.begin(), group_of_.end()) + 1;
  groups_.assign(group_count, {});
  for (std::size_t i = 0; i < n; ++i) groups_[group_of_[i]].push_back(i);
  if (std::any_of(groups_.begin(), groups_.end(), [](const auto& g) { return g.empty(); })) {
    throw std::invalid_argument("group ids are not contiguous");
  }
  if (groups_[group_of_[start_]].size() != 1 || groups_[group_of_[end_]].size() != 1) {
    throw std::invalid_argument("start and end nodes need singleton groups");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (cost(i, i).is_finite()) throw std::invalid_argument("diagonal entries must be INFINITE");
    for (std::size_t j = 0; j < n; ++j) {
      const Cost c = cost(i, j);
      if (c.is_finite() && !(c.value() >= 0.0 && std::isfinite(c.value()))) {
        throw std::invalid_argument("finite costs must be non-negative");
      }
    }
  }
  if (cost(start_, end_).is_finite()) throw std::invalid_argument("cost(start, end) must be INFINITE");
  if (cost(end_, start_) != Cost(0.0)) throw std::invalid_argument("cost(end, start) must be 0");
}

void AgtspInstance::write_tsv(std::ostream& out) const {
  const std::size_t n = size();
  out << "agtsp\t" << n << '\t' << start_ << '\t' << end_ << '\n';
  out << "groups";
  for (std::size_t g : group_of_) out << '\t' << g;
  out << '\n';
  if (!nodes_.empty()) {
    out << "labels";
    for (const auto& node : nodes_) {
      out << '\t';
      if (node.is_start()) {
        out << NgramLm::kBos;
      } else if (node.is_end()) {
        out << NgramLm::kEos;
      } else {
        out << 'n' << node.vertex.index << '@' << join_tokens(node.rule->translation()) << '#' << node.position;
      }
    }
    out << '\n';
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j) out << '\t';
      out << to_string(cost(i, j));
    }
    out << '\n';
  }
}

AgtspInstance AgtspInstance::read_tsv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, '\t')) fields.push_back(f);
    return fields;
  };
  auto to_size = [](const std::string& s) -> std::size_t {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(s, &used);
      if (used != s.size()) throw FormatError("agtsp dump: bad integer '" + s + "'");
      return v;
    } catch (const std::logic_error&) {
      throw FormatError("agtsp dump: bad integer '" + s + "'");
    }
  };

  std::string line;
  if (!std::getline(in, line)) throw FormatError("agtsp dump: empty input");
  auto header = split(line);
  if (header.size() != 4 || header[0] != "agtsp") throw FormatError("agtsp dump: bad header");
  const std::size_t n = to_size(header[1]);
  const std::size_t start = to_size(header[2]);
  const std::size_t end = to_size(header[3]);

  if (!std::getline(in, line)) throw FormatError("agtsp dump: missing group line");
  auto groups = split(line);
  if (groups.size() != n + 1 || groups[0] != "groups") throw FormatError("agtsp dump: bad group line");
  std::vector<std::size_t> group_of;
  for (std::size_t i = 1; i <= n; ++i) group_of.push_back(to_size(groups[i]));

  std::vector<Cost> costs;
  costs.reserve(n * n);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line.rfind("labels", 0) == 0) continue;
    auto fields = split(line);
    if (fields.size() != n) throw FormatError("agtsp dump: row " + std::to_string(rows) + " has wrong width");
    for (const auto& f : fields) {
      if (f == "inf") {
        costs.push_back(Cost::infinite());
        continue;
      }
      try {
        costs.emplace_back(std::stod(f));
      } catch (const std::logic_error&) {
        throw FormatError("agtsp dump: bad cost '" + f + "'");
      }
    }
    ++rows;
  }
  if (rows != n) throw FormatError("agtsp dump: expected " + std::to_string(n) + " rows");
  try {
    return AgtspInstance(std::move(group_of), start, end, std::move(costs));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("agtsp dump: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

Cost tour_cost(const AgtspInstance& instance, std::span<const std::size_t> tour) {
  if (tour.size() < 2 || tour.front() != instance.start() || tour.back() != instance.end()) {
    throw TourError("tour must run from the start node to the end node");
  }
  std::vector<bool> seen(instance.groups().size(), false);
  for (std::size_t node : tour) {
    if (node >= instance.size()) throw TourError("tour node out of range");
    const std::size_t g = instance.group_of(node);
    if (seen[g]) throw TourError("group " + std::to_string(g) + " visited twice");
    seen[g] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) throw TourError("tour misses a group");

  Cost total;
  for (std::size_t i = 0; i + 1 < tour.size(); ++i) total += instance.cost(tour[i], tour[i + 1]);
  return total + instance.cost(tour.back(), tour.front());
}

TransitionScorer maxent_scorer(const AmrGraph& graph, const TransitionModel& model, const NgramLm& lm) {
  auto features = std::make_shared<FeatureExtractor>(graph, lm);
  return [features, &model](const AgtspNode& from, const AgtspNode& to) {
    return transition_cost(probability(model, (*features)(from, to)));
  };
}

TransitionScorer bigram_scorer(const NgramLm& lm) {
  return [&lm](const AgtspNode& from, const AgtspNode& to) {
    std::vector<std::string> history;
    if (from.is_start()) {
      history.push_back(NgramLm::kBos);
    } else if (!from.rule->translation().empty()) {
      history.push_back(from.rule->translation().back());
    }
    static const std::vector<std::string> eos{NgramLm::kEos};
    const auto& continuation = to.is_end() ? eos : to.rule->translation();
    const double log10p = lm.score_after(history, continuation, 2);
    return std::max(0.0, -log10p * std::log(10.0));
  };
}

AgtspInstance build_instance(const AmrGraph& graph, std::span<const MatchedRulePtr> candidates,
                             const TransitionScorer& score) {
  const auto missing = uncovered_nodes(graph, candidates);
  if (!missing.empty()) {
    throw InfeasibleError("candidate rules leave concept " + graph.node(missing.front()).label + " uncovered");
  }

  // node 0 = start, node 1 = end, then one group per concept in BFS order
  std::vector<AgtspNode> nodes{AgtspNode::start(), AgtspNode::end()};
  std::vector<std::size_t> group_of{0, 1};
  std::size_t group = 2;
  for (NodeId name : bfs_order(graph, graph.root())) {
    for (const auto& c : candidates) {
      if (auto pos = c->position(name)) {
        nodes.push_back(AgtspNode::at(c, *pos));
        group_of.push_back(group);
      }
    }
    ++group;
  }

  const std::size_t n = nodes.size();
  constexpr std::size_t s = 0;
  constexpr std::size_t e = 1;
  std::vector<Cost> costs(n * n, Cost::infinite());
  auto at = [&](std::size_t i, std::size_t j) -> Cost& { return costs[i * n + j]; };

  at(s, e) = Cost::infinite();
  at(e, s) = Cost(0.0);
  for (std::size_t i = 2; i < n; ++i) {
    const AgtspNode& ni = nodes[i];
    at(s, i) = ni.is_first() ? Cost(score(nodes[s], ni)) : Cost::infinite();
    at(i, e) = ni.is_last() ? Cost(score(ni, nodes[e])) : Cost::infinite();
  }
  for (std::size_t i = 2; i < n; ++i) {
    const AgtspNode& ni = nodes[i];
    for (std::size_t j = 2; j < n; ++j) {
      const AgtspNode& nj = nodes[j];
      if (ni.rule == nj.rule && ni.position + 1 == nj.position) {
        at(i, j) = Cost(0.0);
      } else if (!ni.rule->overlaps(*nj.rule) && ni.is_last() && nj.is_first()) {
        at(i, j) = Cost(score(ni, nj));
      } else {
        at(i, j) = Cost::infinite();
      }
    }
  }
  return AgtspInstance(std::move(group_of), s, e, std::move(costs), std::move(nodes));
}

AgtspInstance build_instance(const AmrGraph& graph, std::span<const MatchedRulePtr> candidates,
                             const TransitionModel& model, const NgramLm& lm) {
  return build_instance(graph, candidates, maxent_scorer(graph, model, lm));
}

}  // namespace amrgen
