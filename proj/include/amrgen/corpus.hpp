#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace amrgen {

/// One block of an AMR-bank file: "# ::" metadata lines followed by a
/// penman graph. The graph text is kept unparsed so callers can decide how
/// to handle a malformed block.
struct AmrBlock {
  std::size_t first_line = 0;  // 1-based line of the block's first line
  std::optional<std::string> id;
  std::optional<std::string> sentence;  // "# ::snt"
  std::string penman;
};

/// Splits an AMR-bank stream into blocks separated by blank lines. Blocks
/// that carry no graph text (file headers, stray comments) are dropped.
std::vector<AmrBlock> read_amr_bank(std::istream& in);

/// Reads a file with read_amr_bank; throws std::ios_base::failure if it
/// cannot be opened.
std::vector<AmrBlock> read_amr_bank_file(const std::string& path);

/// Whitespace tokenization.
std::vector<std::string> split_tokens(const std::string& text);

std::string join_tokens(const std::vector<std::string>& tokens);

std::string to_lower(std::string s);

}  // namespace amrgen
