#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "amrgen/agtsp_node.hpp"
#include "amrgen/amr.hpp"
#include "amrgen/ngram_lm.hpp"
#include "amrgen/rulebank.hpp"

namespace amrgen {

inline constexpr std::size_t kNumFeatures = 3;
inline constexpr std::array<const char*, kNumFeatures + 1> kFeatureNames = {"lm_score", "word_count", "path_length",
                                                                           "bias"};

struct FeatureVector {
  double lm_score = 0.0;  // log10
  double word_count = 0.0;
  double path_length = 0.0;

  std::array<double, kNumFeatures> values() const { return {lm_score, word_count, path_length}; }
};

/// Two-class maximum-entropy model over the three transition features plus
/// a bias. Features are standardized with the stored mean/stdev before the
/// dot product; mean 0 and stdev 1 disable scaling.
struct TransitionModel {
  std::array<double, kNumFeatures + 1> weights{};  // last = bias
  std::array<double, kNumFeatures> mean{};
  std::array<double, kNumFeatures> stdev{1.0, 1.0, 1.0};

  std::array<double, kNumFeatures + 1> scaled(const FeatureVector& f) const;
  /// lambda . f_hat
  double activation(const FeatureVector& f) const;
  /// Equivalent model acting on raw features (mean 0, stdev 1).
  TransitionModel unscaled() const;

  void write(std::ostream& out) const;
  void write_file(const std::string& path) const;
  /// Throws FormatError.
  static TransitionModel read(std::istream& in);
  static TransitionModel read_file(const std::string& path);
};

/// p("yes" | n_i, n_j) = 1 / (1 + exp(-lambda . f_hat)); never NaN.
double probability(const TransitionModel& model, const FeatureVector& f);

inline constexpr double kProbabilityClamp = 1e-12;

/// -ln p with p clamped to [1e-12, 1 - 1e-12]: finite and positive.
double transition_cost(double probability);

/// Feature extraction for one input graph; caches all-pairs distances.
class FeatureExtractor {
 public:
  FeatureExtractor(const AmrGraph& graph, const NgramLm& lm);

  FeatureVector operator()(const AgtspNode& from, const AgtspNode& to) const;

 private:
  const AmrGraph& graph_;
  const NgramLm& lm_;
  std::vector<std::size_t> distances_;
};

FeatureVector extract_features(const AgtspNode& from, const AgtspNode& to, const AmrGraph& graph, const NgramLm& lm);

struct TransitionExample {
  FeatureVector features;
  bool positive = false;
};

struct TrainingOptions {
  double l2 = 1e-4;
  int epochs = 500;
  double learning_rate = 0.5;
  std::uint64_t seed = 1;
  std::size_t batch_size = 0;  // 0 = full batch
  bool standardize = true;
  double tolerance = 1e-12;    // stop when the epoch loss improves by less
};

struct TrainingReport {
  std::vector<double> losses;  // full-data objective after each epoch
  double accuracy = 0.0;
};

/// Mean negative log-likelihood plus (l2/2)|w|^2 over the non-bias weights,
/// evaluated with the model's scaling.
double regularized_nll(const TransitionModel& model, std::span<const TransitionExample> examples, double l2);
std::array<double, kNumFeatures + 1> regularized_nll_gradient(const TransitionModel& model,
                                                              std::span<const TransitionExample> examples,
                                                              double l2);

double accuracy(const TransitionModel& model, std::span<const TransitionExample> examples);

/// Gradient descent on regularized_nll. Throws TrainingError on single-label
/// input, a non-finite loss, or an epoch that increases the loss.
TransitionModel train_transition_model(std::span<const TransitionExample> examples, const TrainingOptions& options,
                                       TrainingReport* report = nullptr);

// ---------------------------------------------------------------------------
// Example mining

struct TrainingPair {
  AmrGraph graph;
  std::vector<std::string> reference;
};

struct MiningOptions {
  std::size_t negatives_per_positive = 5;
  std::uint64_t seed = 1;
  SkipList skip_list = default_skip_list();
  VerbalizationList verbalizations;
  bool case_insensitive = true;
};

struct MiningResult {
  std::vector<TransitionExample> examples;
  std::size_t pairs_used = 0;
  std::size_t pairs_skipped = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

/// Greedy longest-match segmentation of `reference` into non-overlapping
/// candidates. Concepts left uncovered afterwards are filled with
/// empty-translation candidates, appended in input node order. Returns
/// nullopt when the sentence or the graph cannot be fully covered.
std::optional<std::vector<MatchedRulePtr>> gold_cut(const AmrGraph& graph, const std::vector<std::string>& reference,
                                                    std::span<const MatchedRulePtr> candidates,
                                                    bool case_insensitive = true);

/// Positive examples for consecutive transitions of each gold cut, and up
/// to `negatives_per_positive` sampled legal non-gold transitions leaving
/// the same node.
MiningResult mine_examples(std::span<const TrainingPair> pairs, const RuleBank& bank, const NgramLm& lm,
                           const MiningOptions& options);

void write_examples_tsv(std::ostream& out, std::span<const TransitionExample> examples);

}  // namespace amrgen
