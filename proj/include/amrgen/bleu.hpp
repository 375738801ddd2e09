#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace amrgen {

/// Sufficient statistics for corpus BLEU-4 with a single reference.
struct BleuStats {
  static constexpr std::size_t kMaxOrder = 4;

  std::array<std::size_t, kMaxOrder> matches{};  // clipped n-gram matches, index n-1
  std::array<std::size_t, kMaxOrder> totals{};   // candidate n-grams, index n-1
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;

  void add(const std::vector<std::string>& candidate, const std::vector<std::string>& reference);
  double precision(std::size_t n) const;
  /// 0..100. Orders with no candidate n-grams anywhere are left out; any
  /// remaining order without a match gives 0 (no smoothing).
  double score() const;
};

/// Corpus-level BLEU-4. Throws std::invalid_argument on a length mismatch.
double bleu(const std::vector<std::vector<std::string>>& candidates,
            const std::vector<std::vector<std::string>>& references);

}  // namespace amrgen
