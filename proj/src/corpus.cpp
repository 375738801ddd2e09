#include "amrgen/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <sstream>

namespace amrgen {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// "# ::id x ::date y" -> {id: x, date: y}
void read_metadata(const std::string& line, AmrBlock& block) {
  std::size_t pos = line.find("::");
  while (pos != std::string::npos) {
    const std::size_t next = line.find(" ::", pos + 2);
    const std::string field = line.substr(pos + 2, next == std::string::npos ? std::string::npos : next - pos - 2);
    const auto space = field.find_first_of(" \t");
    const std::string key = field.substr(0, space);
    const std::string value = space == std::string::npos ? "" : trim(field.substr(space + 1));
    if (key == "snt") {
      // the sentence may itself contain "::", so it always runs to end of line
      block.sentence = trim(line.substr(pos + 2 + 3));
      return;
    }
    if (key == "id") block.id = value;
    pos = next == std::string::npos ? next : next + 1;
  }
}

}  // namespace

std::vector<AmrBlock> read_amr_bank(std::istream& in) {
  std::vector<AmrBlock> blocks;
  AmrBlock current;
  bool open = false;
  std::string line;
  std::size_t lineno = 0;

  auto flush = [&] {
    if (open && !trim(current.penman).empty()) {
      current.penman = trim(current.penman);
      blocks.push_back(std::move(current));
    }
    current = AmrBlock{};
    open = false;
  };

  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) {
      flush();
      continue;
    }
    if (!open) {
      open = true;
      current.first_line = lineno;
    }
    if (t.rfind("#", 0) == 0) {
      if (t.rfind("# ::", 0) == 0) read_metadata(t, current);
      continue;
    }
    current.penman += line;
    current.penman += '\n';
  }
  flush();
  return blocks;
}

std::vector<AmrBlock> read_amr_bank_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  return read_amr_bank(in);
}

std::vector<std::string> split_tokens(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace amrgen
