#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "amrgen/rulebank.hpp"

namespace amrgen::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kIoError = 2,
  kDataError = 3,
  kInfeasible = 4,
};

struct Config {
  std::size_t top_n = 10;
  int order = 4;
  std::size_t exact_limit = 16;
  std::size_t negatives = 5;
  int epochs = 500;
  double learning_rate = 0.5;
  double l2 = 1e-4;
  std::uint64_t seed = 1;
  std::size_t restarts = 50;
  std::size_t max_reference_words = 30;
  bool lowercase = true;
  bool baseline_bigram = false;
  SkipList skip_list = default_skip_list();
  std::optional<std::string> rules;
  std::optional<std::string> verbalizations;
  std::optional<std::string> lm;
  std::optional<std::string> model;

  /// Throws std::invalid_argument naming the first out-of-range field.
  void validate() const;
};

/// JSON object with the Config field names as keys (paths as strings,
/// skip_list as an array). Unknown keys are rejected.
Config load_config(const std::string& path);

/// Runs one command line (args[0] is the program name). Never throws;
/// failures map to ExitCode values with a message on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace amrgen::cli
