#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <unordered_map>

#include "amrgen/agtsp.hpp"
#include "amrgen/errors.hpp"

namespace amrgen {

namespace {

constexpr double kUnreachable = std::numeric_limits<double>::infinity();
constexpr double kUnknown = -1.0;  // completions are never negative

// Finite out-arcs per node, ascending by target index.
std::vector<std::vector<std::size_t>> finite_successors(const AgtspInstance& inst) {
  std::vector<std::vector<std::size_t>> succ(inst.size());
  for (std::size_t i = 0; i < inst.size(); ++i) {
    for (std::size_t j = 0; j < inst.size(); ++j) {
      if (inst.cost(i, j).is_finite() && inst.group_of(i) != inst.group_of(j)) succ[i].push_back(j);
    }
  }
  return succ;
}

// Bit position of each ordinary group; terminal groups map to npos.
std::vector<std::size_t> ordinary_group_bits(const AgtspInstance& inst) {
  std::vector<std::size_t> bit(inst.groups().size(), std::string::npos);
  std::size_t next = 0;
  for (std::size_t g = 0; g < inst.groups().size(); ++g) {
    if (g != inst.group_of(inst.start()) && g != inst.group_of(inst.end())) bit[g] = next++;
  }
  return bit;
}

Tour make_tour(const AgtspInstance& inst, std::vector<std::size_t> nodes) {
  Tour t;
  t.total = tour_cost(inst, nodes);
  t.nodes = std::move(nodes);
  return t;
}

// ---------------------------------------------------------------------------
// Exact: memoized DP over reachable (visited-group mask, node) states.

class ExactSolver {
 public:
  explicit ExactSolver(const AgtspInstance& inst)
      : inst_(inst), succ_(finite_successors(inst)), bit_(ordinary_group_bits(inst)) {
    full_ = inst.ordinary_group_count() == 64 ? ~std::uint64_t{0}
                                              : (std::uint64_t{1} << inst.ordinary_group_count()) - 1;
  }

  Tour solve() {
    const std::size_t start = inst_.start();
    if (completion(0, start) == kUnreachable) throw InfeasibleError("AGTSP instance has no finite tour");

    std::vector<std::size_t> tour{start};
    std::uint64_t mask = 0;
    std::size_t cur = start;
    while (mask != full_) {
      const double target = completion(mask, cur);
      bool moved = false;
      for (std::size_t next : succ_[cur]) {
        const std::size_t b = bit_[inst_.group_of(next)];
        if (b == std::string::npos || (mask >> b & 1)) continue;
        const std::uint64_t m = mask | std::uint64_t{1} << b;
        if (inst_.cost(cur, next).value() + completion(m, next) == target) {
          mask = m;
          cur = next;
          tour.push_back(next);
          moved = true;
          break;
        }
      }
      if (!moved) throw std::logic_error("exact solver: reconstruction failed");
    }
    tour.push_back(inst_.end());
    return make_tour(inst_, std::move(tour));
  }

 private:
  // min cost of finishing the tour from `node` having visited `mask`
  double completion(std::uint64_t mask, std::size_t node) {
    if (mask == full_) {
      const Cost c = inst_.cost(node, inst_.end()) + inst_.cost(inst_.end(), inst_.start());
      return c.is_finite() ? c.value() : kUnreachable;
    }
    auto& row = memo_[mask];
    if (row.empty()) row.assign(inst_.size(), kUnknown);
    if (row[node] != kUnknown) return row[node];

    double best = kUnreachable;
    for (std::size_t next : succ_[node]) {
      const std::size_t b = bit_[inst_.group_of(next)];
      if (b == std::string::npos || (mask >> b & 1)) continue;
      const double rest = completion(mask | std::uint64_t{1} << b, next);
      if (rest == kUnreachable) continue;
      best = std::min(best, inst_.cost(node, next).value() + rest);
    }
    memo_[mask][node] = best;  // recursion may have rehashed, so look the row up again
    return best;
  }

  const AgtspInstance& inst_;
  std::vector<std::vector<std::size_t>> succ_;
  std::vector<std::size_t> bit_;
  std::uint64_t full_ = 0;
  std::unordered_map<std::uint64_t, std::vector<double>> memo_;  // mask -> per-node completion
};

// ---------------------------------------------------------------------------
// Brute force

class BruteForce {
 public:
  explicit BruteForce(const AgtspInstance& inst) : inst_(inst), used_(inst.groups().size(), false) {}

  Tour solve() {
    path_.push_back(inst_.start());
    used_[inst_.group_of(inst_.start())] = true;
    used_[inst_.group_of(inst_.end())] = true;
    search(0.0, inst_.ordinary_group_count());
    if (best_.empty()) throw InfeasibleError("AGTSP instance has no finite tour");
    return make_tour(inst_, best_);
  }

 private:
  void search(double partial, std::size_t remaining) {
    const std::size_t cur = path_.back();
    if (remaining == 0) {
      const Cost close = inst_.cost(cur, inst_.end()) + inst_.cost(inst_.end(), inst_.start());
      if (close.is_infinite()) return;
      const double total = partial + close.value();
      if (best_.empty() || total < best_cost_) {
        best_cost_ = total;
        best_ = path_;
        best_.push_back(inst_.end());
      }
      return;
    }
    for (std::size_t next = 0; next < inst_.size(); ++next) {
      const std::size_t g = inst_.group_of(next);
      const Cost step = inst_.cost(cur, next);
      if (used_[g] || step.is_infinite()) continue;
      const double p = partial + step.value();
      if (!best_.empty() && p > best_cost_) continue;
      used_[g] = true;
      path_.push_back(next);
      search(p, remaining - 1);
      path_.pop_back();
      used_[g] = false;
    }
  }

  const AgtspInstance& inst_;
  std::vector<bool> used_;
  std::vector<std::size_t> path_;
  std::vector<std::size_t> best_;
  double best_cost_ = 0.0;
};

// ---------------------------------------------------------------------------
// Heuristic

class LocalSearch {
 public:
  LocalSearch(const AgtspInstance& inst, const HeuristicOptions& options)
      : inst_(inst), options_(options), succ_(finite_successors(inst)), rng_(options.seed) {
    for (std::size_t g = 0; g < inst.groups().size(); ++g) {
      if (g != inst.group_of(inst.start()) && g != inst.group_of(inst.end())) ordinary_.push_back(g);
    }
  }

  Tour solve() {
    const auto started = std::chrono::steady_clock::now();
    auto out_of_time = [&] {
      return options_.time_budget.count() > 0 && std::chrono::steady_clock::now() - started > options_.time_budget;
    };

    auto initial = construct();
    if (initial.empty()) throw InfeasibleError("AGTSP instance has no finite tour");
    const Cost constructed = tour_cost(inst_, initial);

    std::vector<std::size_t> order;
    for (std::size_t i = 1; i + 1 < initial.size(); ++i) order.push_back(inst_.group_of(initial[i]));
    double cost = evaluate(order);
    improve(order, cost);

    std::vector<std::size_t> best = order;
    double best_cost = cost;
    for (std::size_t r = 0; r < options_.restarts && order.size() > 1 && !out_of_time(); ++r) {
      std::vector<std::size_t> trial = best;
      perturb(trial);
      // an infeasible perturbation is still a starting point: any feasible
      // neighbour improves on it
      double c = evaluate(trial);
      improve(trial, c);
      if (c < best_cost) {
        best = std::move(trial);
        best_cost = c;
      }
    }

    auto nodes = select_nodes(best);
    Tour tour = make_tour(inst_, std::move(nodes));
    if (constructed < tour.total) {
      // node selection is optimal for the constructed order, so this is a
      // rounding artifact; keep the constructed tour
      return make_tour(inst_, std::move(initial));
    }
    return tour;
  }

 private:
  // Depth-first, cheapest finite successor first; backtracks on dead ends.
  std::vector<std::size_t> construct() {
    std::vector<bool> used(inst_.groups().size(), false);
    used[inst_.group_of(inst_.start())] = true;
    used[inst_.group_of(inst_.end())] = true;
    std::vector<std::size_t> path{inst_.start()};
    std::size_t budget = 2'000'000;
    if (!extend(path, used, ordinary_.size(), budget)) return {};
    path.push_back(inst_.end());
    return path;
  }

  bool extend(std::vector<std::size_t>& path, std::vector<bool>& used, std::size_t remaining, std::size_t& budget) {
    const std::size_t cur = path.back();
    if (remaining == 0) return inst_.cost(cur, inst_.end()).is_finite();
    if (budget == 0) return false;
    --budget;
    std::vector<std::size_t> next;
    for (std::size_t j : succ_[cur]) {
      if (!used[inst_.group_of(j)]) next.push_back(j);
    }
    std::stable_sort(next.begin(), next.end(),
                     [&](std::size_t a, std::size_t b) { return inst_.cost(cur, a) < inst_.cost(cur, b); });
    for (std::size_t j : next) {
      used[inst_.group_of(j)] = true;
      path.push_back(j);
      if (extend(path, used, remaining - 1, budget)) return true;
      path.pop_back();
      used[inst_.group_of(j)] = false;
    }
    return false;
  }

  // Shortest path through the layered graph start -> order[0] -> ... -> end.
  double layered(const std::vector<std::size_t>& order, std::vector<std::size_t>* choice) {
    const auto& groups = inst_.groups();
    std::vector<std::vector<double>> dist(order.size());
    std::vector<std::vector<std::size_t>> parent(order.size());
    for (std::size_t layer = 0; layer < order.size(); ++layer) {
      const auto& members = groups[order[layer]];
      dist[layer].assign(members.size(), kUnreachable);
      parent[layer].assign(members.size(), 0);
      for (std::size_t k = 0; k < members.size(); ++k) {
        if (layer == 0) {
          const Cost c = inst_.cost(inst_.start(), members[k]);
          if (c.is_finite()) dist[0][k] = c.value();
          continue;
        }
        const auto& prev = groups[order[layer - 1]];
        for (std::size_t p = 0; p < prev.size(); ++p) {
          const Cost c = inst_.cost(prev[p], members[k]);
          if (dist[layer - 1][p] == kUnreachable || c.is_infinite()) continue;
          const double d = dist[layer - 1][p] + c.value();
          if (d < dist[layer][k]) {
            dist[layer][k] = d;
            parent[layer][k] = p;
          }
        }
      }
    }
    const auto& last = groups[order.back()];
    double best = kUnreachable;
    std::size_t arg = 0;
    for (std::size_t k = 0; k < last.size(); ++k) {
      const Cost c = inst_.cost(last[k], inst_.end());
      if (dist.back()[k] == kUnreachable || c.is_infinite()) continue;
      if (dist.back()[k] + c.value() < best) {
        best = dist.back()[k] + c.value();
        arg = k;
      }
    }
    if (choice && best != kUnreachable) {
      choice->assign(order.size(), 0);
      for (std::size_t layer = order.size(); layer-- > 0;) {
        (*choice)[layer] = groups[order[layer]][arg];
        arg = parent[layer][arg];
      }
    }
    return best;
  }

  double evaluate(const std::vector<std::size_t>& order) { return layered(order, nullptr); }

  std::vector<std::size_t> select_nodes(const std::vector<std::size_t>& order) {
    std::vector<std::size_t> choice;
    layered(order, &choice);
    std::vector<std::size_t> nodes{inst_.start()};
    nodes.insert(nodes.end(), choice.begin(), choice.end());
    nodes.push_back(inst_.end());
    return nodes;
  }

  bool accept(std::vector<std::size_t>& order, std::vector<std::size_t>& trial, double& cost) {
    const double c = evaluate(trial);
    if (c < cost - 1e-12) {
      order.swap(trial);
      cost = c;
      return true;
    }
    return false;
  }

  void improve(std::vector<std::size_t>& order, double& cost) {
    const std::size_t m = order.size();
    std::vector<std::size_t> trial;
    bool improved = true;
    while (improved) {
      improved = false;
      // segment relocation (Or-opt)
      for (std::size_t len = 1; len <= 3 && len < m; ++len) {
        for (std::size_t i = 0; i + len <= m; ++i) {
          for (std::size_t j = 0; j + len <= m; ++j) {
            if (j == i) continue;
            trial = order;
            std::vector<std::size_t> seg(trial.begin() + static_cast<std::ptrdiff_t>(i),
                                         trial.begin() + static_cast<std::ptrdiff_t>(i + len));
            trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i),
                        trial.begin() + static_cast<std::ptrdiff_t>(i + len));
            trial.insert(trial.begin() + static_cast<std::ptrdiff_t>(j), seg.begin(), seg.end());
            if (accept(order, trial, cost)) improved = true;
          }
        }
      }
      // 2-opt: reverse order[i..j]
      for (std::size_t i = 0; i + 1 < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
          trial = order;
          std::reverse(trial.begin() + static_cast<std::ptrdiff_t>(i), trial.begin() + static_cast<std::ptrdiff_t>(j + 1));
          if (accept(order, trial, cost)) improved = true;
        }
      }
      // exchange two groups
      for (std::size_t i = 0; i + 1 < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
          trial = order;
          std::swap(trial[i], trial[j]);
          if (accept(order, trial, cost)) improved = true;
        }
      }
    }
  }

  std::size_t draw(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

  void perturb(std::vector<std::size_t>& order) {
    const std::size_t m = order.size();
    if (m >= 8) {
      // double bridge
      std::vector<std::size_t> cuts{1 + draw(m - 1), 1 + draw(m - 1), 1 + draw(m - 1)};
      std::sort(cuts.begin(), cuts.end());
      std::vector<std::size_t> out;
      auto append = [&](std::size_t a, std::size_t b) {
        out.insert(out.end(), order.begin() + static_cast<std::ptrdiff_t>(a), order.begin() + static_cast<std::ptrdiff_t>(b));
      };
      append(0, cuts[0]);
      append(cuts[2], m);
      append(cuts[1], cuts[2]);
      append(cuts[0], cuts[1]);
      order = std::move(out);
    }
    // plus a random shuffle of a short window
    const std::size_t len = std::min<std::size_t>(m, 2 + draw(3));
    const std::size_t at = draw(m - len + 1);
    for (std::size_t i = len - 1; i > 0; --i) std::swap(order[at + i], order[at + draw(i + 1)]);
  }

  const AgtspInstance& inst_;
  HeuristicOptions options_;
  std::vector<std::vector<std::size_t>> succ_;
  std::vector<std::size_t> ordinary_;
  std::mt19937_64 rng_;
};

}  // namespace

Tour solve_exact(const AgtspInstance& instance, std::size_t group_limit) {
  const std::size_t m = instance.ordinary_group_count();
  if (m > group_limit) {
    throw std::invalid_argument("exact solver: " + std::to_string(m) + " groups exceed the limit of " +
                                std::to_string(group_limit));
  }
  if (m > 63) throw std::invalid_argument("exact solver supports at most 63 groups");
  return ExactSolver(instance).solve();
}

Tour solve_heuristic(const AgtspInstance& instance, const HeuristicOptions& options) {
  if (instance.ordinary_group_count() == 0) throw InfeasibleError("AGTSP instance has no finite tour");
  return LocalSearch(instance, options).solve();
}

Tour solve_brute_force(const AgtspInstance& instance) { return BruteForce(instance).solve(); }

}  // namespace amrgen
