#pragma once

#include <chrono>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "amrgen/agtsp_node.hpp"
#include "amrgen/amr.hpp"
#include "amrgen/ngram_lm.hpp"
#include "amrgen/rulebank.hpp"
#include "amrgen/transition_model.hpp"

namespace amrgen {

/// Extended non-negative real: a finite value or INFINITE. Addition
/// saturates at INFINITE.
class Cost {
 public:
  constexpr Cost() = default;
  constexpr explicit Cost(double value) : value_(value) {}

  static constexpr Cost infinite() {
    Cost c;
    c.infinite_ = true;
    return c;
  }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr bool is_finite() const { return !infinite_; }
  /// Throws std::logic_error for INFINITE.
  double value() const;

  friend constexpr Cost operator+(Cost a, Cost b) {
    if (a.infinite_ || b.infinite_) return infinite();
    return Cost(a.value_ + b.value_);
  }
  constexpr Cost& operator+=(Cost other) { return *this = *this + other; }

  friend constexpr bool operator==(Cost a, Cost b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend constexpr std::partial_ordering operator<=>(Cost a, Cost b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ <=> b.infinite_;
    return a.value_ <=> b.value_;
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

std::string to_string(Cost cost);

/// Generalized TSP instance: nodes partitioned into groups, two singleton
/// terminal groups, and a dense asymmetric cost matrix.
class AgtspInstance {
 public:
  /// Throws std::invalid_argument unless: group ids are 0..G-1 with no gaps,
  /// start and end sit in singleton groups, the matrix is n x n with
  /// non-negative finite entries, INFINITE diagonal, cost(start, end) INFINITE
  /// and cost(end, start) 0. `nodes` is either empty or has one entry per node.
  AgtspInstance(std::vector<std::size_t> group_of, std::size_t start, std::size_t end, std::vector<Cost> costs,
                std::vector<AgtspNode> nodes = {});

  std::size_t size() const { return group_of_.size(); }
  std::size_t start() const { return start_; }
  std::size_t end() const { return end_; }
  std::size_t group_of(std::size_t node) const { return group_of_.at(node); }
  const std::vector<std::vector<std::size_t>>& groups() const { return groups_; }
  /// Groups other than the two terminal groups.
  std::size_t ordinary_group_count() const { return groups_.size() - 2; }
  Cost cost(std::size_t from, std::size_t to) const { return costs_[from * size() + to]; }
  /// Node metadata; empty for instances built from a raw matrix.
  const std::vector<AgtspNode>& nodes() const { return nodes_; }

  /// Tab-separated dump: header, group map, optional labels, matrix rows.
  void write_tsv(std::ostream& out) const;
  /// Throws FormatError.
  static AgtspInstance read_tsv(std::istream& in);

 private:
  std::vector<std::size_t> group_of_;
  std::vector<std::vector<std::size_t>> groups_;
  std::size_t start_;
  std::size_t end_;
  std::vector<Cost> costs_;
  std::vector<AgtspNode> nodes_;
};

struct Tour {
  std::vector<std::size_t> nodes;  // start ... end
  Cost total;                      // includes the closing end -> start step
};

/// Thrown when a tour misses a group, repeats one, or is not anchored at
/// the terminals.
class TourError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sum of consecutive matrix entries including end -> start.
Cost tour_cost(const AgtspInstance& instance, std::span<const std::size_t> tour);

/// ModelScore(n_i, n_j): cost of a legal inter-rule (or terminal) move.
using TransitionScorer = std::function<double(const AgtspNode& from, const AgtspNode& to)>;

/// -ln p("yes" | from, to) under the maximum-entropy model.
TransitionScorer maxent_scorer(const AmrGraph& graph, const TransitionModel& model, const NgramLm& lm);

/// -ln of the LM probability of `to`'s translation given the last word of
/// `from`'s, scored with a bigram window.
TransitionScorer bigram_scorer(const NgramLm& lm);

/// Groups = concepts in input BFS order, nodes = (concept, rule) pairs, cost
/// matrix filled by the traveling-cost algorithm. Node 0 is the start node,
/// node 1 the end node. Throws InfeasibleError if a concept is uncovered.
AgtspInstance build_instance(const AmrGraph& graph, std::span<const MatchedRulePtr> candidates,
                             const TransitionScorer& score);
AgtspInstance build_instance(const AmrGraph& graph, std::span<const MatchedRulePtr> candidates,
                             const TransitionModel& model, const NgramLm& lm);

inline constexpr std::size_t kDefaultExactGroupLimit = 16;

/// Dynamic program over (visited groups, current node). Among optimal
/// tours, returns the lexicographically smallest node sequence. Throws
/// std::invalid_argument when the instance has more than `group_limit`
/// ordinary groups and InfeasibleError when no finite tour exists.
Tour solve_exact(const AgtspInstance& instance, std::size_t group_limit = kDefaultExactGroupLimit);

struct HeuristicOptions {
  std::uint64_t seed = 1;
  std::size_t restarts = 50;
  /// Wall-clock cap; zero means none. Hitting it makes the result depend on
  /// timing, so deterministic runs should leave it unset.
  std::chrono::milliseconds time_budget{0};
};

/// Backtracking nearest-neighbor construction, then iterated local search
/// over the group order (segment relocation, 2-opt reversal, group swap)
/// with an optimal node choice per group order. Throws InfeasibleError.
Tour solve_heuristic(const AgtspInstance& instance, const HeuristicOptions& options = {});

/// Exhaustive enumeration of all finite tours, pruned only by infinite
/// steps and by partial cost exceeding the best complete tour.
Tour solve_brute_force(const AgtspInstance& instance);

}  // namespace amrgen
