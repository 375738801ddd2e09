#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace amrgen {

enum class ParseErrorKind {
  EmptyInput,
  UnbalancedParen,
  ConceptConflict,
  UndefinedVariable,
  UnexpectedToken,
};

const char* to_string(ParseErrorKind kind);

/// Penman syntax error. `offset` is the byte position in the parsed text.
class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::size_t offset, const std::string& what);

  ParseErrorKind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  ParseErrorKind kind_;
  std::size_t offset_;
};

/// Malformed rule files, ARPA files, model files, corpora.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No finite tour exists, or a candidate set fails to cover the graph.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Degenerate training data or a diverging optimizer.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace amrgen
