#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace amrgen {

/// Backoff n-gram language model in ARPA form (log10 probabilities plus
/// backoff weights). Models trained here use interpolated absolute
/// discounting, which converts to backoff form without loss: each stored
/// n-gram holds its interpolated probability and each context holds its
/// interpolation weight as backoff.
class NgramLm {
 public:
  static constexpr const char* kBos = "<s>";
  static constexpr const char* kEos = "</s>";
  static constexpr const char* kUnk = "<unk>";
  static constexpr double kDiscount = 0.75;
  /// log10 probability used for <s> entries and for unknown words when
  /// the model has no <unk> unigram.
  static constexpr double kFloor = -99.0;

  /// Throws std::invalid_argument if order < 1 or the corpus is empty.
  static NgramLm train(const std::vector<std::vector<std::string>>& corpus, int order, bool lowercase = false);

  /// Throws FormatError on a malformed header or a count mismatch.
  static NgramLm read_arpa(std::istream& in);
  static NgramLm read_arpa_file(const std::string& path);
  void write_arpa(std::ostream& out) const;
  void write_arpa_file(const std::string& path) const;

  int order() const { return static_cast<int>(tables_.size()); }

  /// When set, query tokens are lowercased before lookup (markers excepted).
  bool lowercase() const { return lowercase_; }
  void set_lowercase(bool on) { lowercase_ = on; }

  /// log10 p(word | history), using at most order-1 trailing history tokens.
  double log10_prob(std::span<const std::string> history, const std::string& word, int max_order = 0) const;

  /// Sum of conditional log10 probabilities of `continuation`, each token
  /// conditioned on the preceding tokens. An empty context stands for the
  /// beginning of a sentence ("<s>").
  double score_continuation(std::span<const std::string> context, std::span<const std::string> continuation,
                            int max_order = 0) const;

  /// Like score_continuation, but an empty history means no conditioning
  /// at all (the first token gets its unigram probability).
  double score_after(std::span<const std::string> history, std::span<const std::string> continuation,
                     int max_order = 0) const;

  /// All words except <s>: the support of every conditional distribution.
  std::vector<std::string> predictive_vocabulary() const;
  std::size_t vocabulary_size() const { return vocab_.size(); }
  /// Number of stored n-grams per order, index 0 = unigrams.
  std::vector<std::size_t> ngram_counts() const;
  /// Every history that carries a backoff weight (i.e. was observed as a context).
  std::vector<std::vector<std::string>> contexts() const;

 private:
  struct Entry {
    double logprob = 0.0;
    double backoff = 0.0;
    bool has_backoff = false;
  };
  using Key = std::vector<int>;

  int id_of(const std::string& token) const;
  int intern(const std::string& token);
  std::string normalize(const std::string& token) const;
  double log10_prob_ids(std::span<const int> history, int word) const;
  const Entry* find(const Key& key) const;

  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> ids_;
  std::vector<std::map<Key, Entry>> tables_;  // tables_[n - 1]: n-grams
  bool lowercase_ = false;
};

}  // namespace amrgen
