#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "amrgen/agtsp.hpp"
#include "amrgen/amr.hpp"
#include "amrgen/corpus.hpp"
#include "amrgen/ngram_lm.hpp"
#include "amrgen/rulebank.hpp"
#include "amrgen/transition_model.hpp"

namespace amrgen {

struct GeneratorConfig {
  std::size_t exact_group_limit = kDefaultExactGroupLimit;
  HeuristicOptions heuristic;
  /// Score transitions with a bigram LM instead of the maxent model.
  bool baseline_bigram = false;
  RuleSources sources;
  SkipList skip_list = default_skip_list();
  VerbalizationList verbalizations;
  /// Lowercase hypotheses and references before BLEU.
  bool lowercase_eval = true;
  /// Instances whose reference exceeds this many words are not evaluated.
  std::size_t max_reference_words = 30;
};

struct GenerationResult {
  std::vector<std::string> sentence;
  Tour tour;
  std::vector<MatchedRulePtr> used_rules;  // tour order
  double cost = 0.0;
  bool exact = false;

  std::string text() const;
};

/// Reads a solved tour back into an ordered cut. Throws std::logic_error if
/// the used rules do not partition the graph's concepts.
GenerationResult decode_tour(const AgtspInstance& instance, const Tour& tour, std::size_t concept_count);

/// candidates -> AGTSP instance -> tour -> sentence. The exact solver runs
/// when the concept count is within config.exact_group_limit.
GenerationResult generate(const AmrGraph& graph, const RuleBank& bank, const TransitionModel& model,
                          const NgramLm& lm, const GeneratorConfig& config);

/// Same pipeline on a prepared instance.
GenerationResult solve_and_decode(const AgtspInstance& instance, std::size_t concept_count,
                                  const GeneratorConfig& config);

AgtspInstance make_instance(const AmrGraph& graph, const RuleBank& bank, const TransitionModel& model,
                            const NgramLm& lm, const GeneratorConfig& config);

struct EvaluationReport {
  std::size_t total = 0;
  std::size_t filtered = 0;  // references longer than the limit
  std::size_t evaluated = 0;
  double bleu = 0.0;
  std::vector<std::string> outputs;  // one per evaluated instance
  std::vector<double> costs;
  std::size_t concepts = 0;
  std::size_t concepts_with_induced_rule = 0;
  std::size_t graphs_fully_induced = 0;

  /// Percentage of concepts covered by at least one induced rule.
  double concept_coverage() const;
  /// Percentage of graphs whose concepts are all covered by induced rules.
  double graph_coverage() const;
};

/// Throws FormatError when a block lacks a "# ::snt" reference or its graph
/// does not parse.
EvaluationReport evaluate_corpus(std::span<const AmrBlock> blocks, const RuleBank& bank,
                                 const TransitionModel& model, const NgramLm& lm, const GeneratorConfig& config);

}  // namespace amrgen
