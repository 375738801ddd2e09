#include <algorithm>
#include <ostream>
#include <random>

#include "amrgen/corpus.hpp"
#include "amrgen/transition_model.hpp"

namespace amrgen {

namespace {

bool prefix_matches(const std::vector<std::string>& reference, std::size_t pos, const std::vector<std::string>& tokens,
                    bool case_insensitive) {
  if (pos + tokens.size() > reference.size()) return false;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = case_insensitive ? to_lower(tokens[i]) : tokens[i];
    if (t != reference[pos + i]) return false;
  }
  return true;
}

bool overlaps_mask(const MatchedRule& rule, const std::vector<bool>& covered) {
  return std::any_of(rule.covered.begin(), rule.covered.end(), [&](NodeId n) { return covered[n.index]; });
}

// Same surface and span: sampling such a transition as a negative would
// contradict the positive it shadows.
bool equivalent(const AgtspNode& a, const AgtspNode& b) {
  if (a.kind != b.kind) return false;
  if (!a.is_ordinary()) return true;
  return a.rule == b.rule ||
         (a.rule->covered == b.rule->covered && a.rule->translation() == b.rule->translation() &&
          a.position == b.position);
}

}  // namespace

std::optional<std::vector<MatchedRulePtr>> gold_cut(const AmrGraph& graph, const std::vector<std::string>& reference,
                                                    std::span<const MatchedRulePtr> cands, bool case_insensitive) {
  std::vector<std::string> ref = reference;
  if (case_insensitive) {
    for (auto& t : ref) t = to_lower(t);
  }
  std::vector<bool> covered(graph.size(), false);
  std::vector<MatchedRulePtr> cut;

  std::size_t pos = 0;
  while (pos < ref.size()) {
    MatchedRulePtr best;
    for (const auto& c : cands) {
      const auto& tr = c->translation();
      if (tr.empty() || overlaps_mask(*c, covered) || !prefix_matches(ref, pos, tr, case_insensitive)) continue;
      if (!best || tr.size() > best->translation().size() ||
          (tr.size() == best->translation().size() && c->covered.size() > best->covered.size())) {
        best = c;
      }
    }
    if (!best) return std::nullopt;
    for (NodeId n : best->covered) covered[n.index] = true;
    pos += best->translation().size();
    cut.push_back(best);
  }

  for (const auto& n : graph.nodes()) {
    if (covered[n.id.index]) continue;
    MatchedRulePtr filler;
    for (const auto& c : cands) {
      if (c->translation().empty() && c->position(n.id) && !overlaps_mask(*c, covered)) {
        filler = c;
        break;
      }
    }
    if (!filler) return std::nullopt;
    for (NodeId id : filler->covered) covered[id.index] = true;
    cut.push_back(filler);
  }
  return cut;
}

MiningResult mine_examples(std::span<const TrainingPair> pairs, const RuleBank& bank, const NgramLm& lm,
                           const MiningOptions& options) {
  MiningResult result;
  std::mt19937_64 rng(options.seed);

  for (const auto& pair : pairs) {
    const auto cands = candidates(pair.graph, bank, options.skip_list, options.verbalizations);
    const auto cut = gold_cut(pair.graph, pair.reference, cands, options.case_insensitive);
    if (!cut) {
      ++result.pairs_skipped;
      continue;
    }
    ++result.pairs_used;
    const FeatureExtractor features(pair.graph, lm);

    AgtspNode from = AgtspNode::start();
    for (std::size_t i = 0; i <= cut->size(); ++i) {
      const AgtspNode to = i < cut->size() ? AgtspNode::at((*cut)[i], 0) : AgtspNode::end();
      result.examples.push_back({features(from, to), true});
      ++result.positives;

      std::vector<AgtspNode> alternatives;
      for (const auto& c : cands) {
        if (from.is_ordinary() && c->overlaps(*from.rule)) continue;
        AgtspNode alt = AgtspNode::at(c, 0);
        if (!equivalent(alt, to)) alternatives.push_back(std::move(alt));
      }
      if (from.is_ordinary() && !to.is_end()) alternatives.push_back(AgtspNode::end());

      const std::size_t k = std::min(options.negatives_per_positive, alternatives.size());
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t pick = j + static_cast<std::size_t>(rng() % (alternatives.size() - j));
        std::swap(alternatives[j], alternatives[pick]);
        result.examples.push_back({features(from, alternatives[j]), false});
        ++result.negatives;
      }

      if (i < cut->size()) from = AgtspNode::at((*cut)[i], (*cut)[i]->order.size() - 1);
    }
  }
  return result;
}

}  // namespace amrgen
