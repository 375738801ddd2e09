#include "amrgen/generator.hpp"

#include <algorithm>
#include <stdexcept>

#include "amrgen/bleu.hpp"
#include "amrgen/errors.hpp"

namespace amrgen {

std::string GenerationResult::text() const { return join_tokens(sentence); }

GenerationResult decode_tour(const AgtspInstance& instance, const Tour& tour, std::size_t concept_count) {
  if (instance.nodes().empty()) throw std::logic_error("decode_tour needs an instance built from rules");

  GenerationResult result;
  result.tour = tour;
  result.cost = tour.total.is_finite() ? tour.total.value() : 0.0;

  std::vector<bool> covered(concept_count, false);
  std::size_t covered_count = 0;
  const MatchedRule* open = nullptr;  // rule whose nodes are being walked
  std::size_t expected = 0;
  for (std::size_t idx : tour.nodes) {
    const AgtspNode& node = instance.nodes()[idx];
    if (!node.is_ordinary()) continue;
    if (open) {
      if (node.rule.get() != open || node.position != expected) throw std::logic_error("tour leaves a rule midway");
    } else {
      if (!node.is_first()) throw std::logic_error("tour enters a rule after its first node");
      result.used_rules.push_back(node.rule);
      const auto& words = node.rule->translation();
      result.sentence.insert(result.sentence.end(), words.begin(), words.end());
      for (NodeId c : node.rule->covered) {
        if (covered.at(c.index)) throw std::logic_error("used rules overlap");
        covered[c.index] = true;
        ++covered_count;
      }
    }
    open = node.is_last() ? nullptr : node.rule.get();
    expected = node.position + 1;
  }
  if (open || covered_count != concept_count) throw std::logic_error("used rules do not cover the graph");
  return result;
}

AgtspInstance make_instance(const AmrGraph& graph, const RuleBank& bank, const TransitionModel& model,
                            const NgramLm& lm, const GeneratorConfig& config) {
  const auto cands = candidates(graph, bank, config.skip_list, config.verbalizations, config.sources);
  if (config.baseline_bigram) return build_instance(graph, cands, bigram_scorer(lm));
  return build_instance(graph, cands, model, lm);
}

GenerationResult solve_and_decode(const AgtspInstance& instance, std::size_t concept_count,
                                  const GeneratorConfig& config) {
  const bool exact = instance.ordinary_group_count() <= config.exact_group_limit;
  const Tour tour = exact ? solve_exact(instance, config.exact_group_limit) : solve_heuristic(instance, config.heuristic);
  GenerationResult result = decode_tour(instance, tour, concept_count);
  result.exact = exact;
  return result;
}

GenerationResult generate(const AmrGraph& graph, const RuleBank& bank, const TransitionModel& model,
                          const NgramLm& lm, const GeneratorConfig& config) {
  return solve_and_decode(make_instance(graph, bank, model, lm, config), graph.size(), config);
}

double EvaluationReport::concept_coverage() const {
  return concepts == 0 ? 0.0 : 100.0 * static_cast<double>(concepts_with_induced_rule) / static_cast<double>(concepts);
}

double EvaluationReport::graph_coverage() const {
  return evaluated == 0 ? 0.0 : 100.0 * static_cast<double>(graphs_fully_induced) / static_cast<double>(evaluated);
}

EvaluationReport evaluate_corpus(std::span<const AmrBlock> blocks, const RuleBank& bank,
                                 const TransitionModel& model, const NgramLm& lm, const GeneratorConfig& config) {
  EvaluationReport report;
  std::vector<std::vector<std::string>> hypotheses;
  std::vector<std::vector<std::string>> references;

  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const AmrBlock& block = blocks[k];
    const std::string where = "block " + std::to_string(k + 1) + " (line " + std::to_string(block.first_line) + ")";
    ++report.total;
    if (!block.sentence) throw FormatError(where + " has no '# ::snt' reference");
    auto reference = split_tokens(*block.sentence);
    if (reference.size() > config.max_reference_words) {
      ++report.filtered;
      continue;
    }
    AmrGraph graph = [&] {
      try {
        return parse_penman(block.penman);
      } catch (const ParseError& e) {
        throw FormatError(where + ": " + e.what());
      }
    }();

    RuleSources induced_only{true, false};
    const auto induced = candidates(graph, bank, config.skip_list, config.verbalizations, induced_only);
    const std::size_t uncovered = uncovered_nodes(graph, induced).size();
    report.concepts += graph.size();
    report.concepts_with_induced_rule += graph.size() - uncovered;
    if (uncovered == 0) ++report.graphs_fully_induced;

    const auto result = generate(graph, bank, model, lm, config);
    ++report.evaluated;
    report.outputs.push_back(result.text());
    report.costs.push_back(result.cost);

    auto hyp = result.sentence;
    if (config.lowercase_eval) {
      for (auto& t : hyp) t = to_lower(t);
      for (auto& t : reference) t = to_lower(t);
    }
    hypotheses.push_back(std::move(hyp));
    references.push_back(std::move(reference));
  }
  report.bleu = bleu(hypotheses, references);
  return report;
}

}  // namespace amrgen
