#include "amrgen/bleu.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace amrgen {

namespace {

std::map<std::vector<std::string>, std::size_t> ngram_counts(const std::vector<std::string>& tokens, std::size_t n) {
  std::map<std::vector<std::string>, std::size_t> counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                      tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

}  // namespace

void BleuStats::add(const std::vector<std::string>& candidate, const std::vector<std::string>& reference) {
  candidate_length += candidate.size();
  reference_length += reference.size();
  for (std::size_t n = 1; n <= kMaxOrder; ++n) {
    const auto cand = ngram_counts(candidate, n);
    const auto ref = ngram_counts(reference, n);
    for (const auto& [gram, count] : cand) {
      totals[n - 1] += count;
      auto it = ref.find(gram);
      if (it != ref.end()) matches[n - 1] += std::min(count, it->second);
    }
  }
}

double BleuStats::precision(std::size_t n) const {
  if (n < 1 || n > kMaxOrder) throw std::out_of_range("BLEU order");
  return totals[n - 1] == 0 ? 0.0 : static_cast<double>(matches[n - 1]) / static_cast<double>(totals[n - 1]);
}

double BleuStats::score() const {
  if (candidate_length == 0) return 0.0;
  double log_sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t n = 1; n <= kMaxOrder; ++n) {
    if (totals[n - 1] == 0) continue;
    if (matches[n - 1] == 0) return 0.0;
    log_sum += std::log(precision(n));
    ++orders;
  }
  const double c = static_cast<double>(candidate_length);
  const double r = static_cast<double>(reference_length);
  const double brevity = c < r ? std::exp(1.0 - r / c) : 1.0;
  return 100.0 * brevity * std::exp(log_sum / static_cast<double>(orders));
}

double bleu(const std::vector<std::vector<std::string>>& candidates,
            const std::vector<std::vector<std::string>>& references) {
  if (candidates.size() != references.size()) {
    throw std::invalid_argument("BLEU: " + std::to_string(candidates.size()) + " candidates vs " +
                                std::to_string(references.size()) + " references");
  }
  BleuStats stats;
  for (std::size_t i = 0; i < candidates.size(); ++i) stats.add(candidates[i], references[i]);
  return stats.score();
}

}  // namespace amrgen
