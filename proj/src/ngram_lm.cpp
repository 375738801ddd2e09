#include "amrgen/ngram_lm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "amrgen/corpus.hpp"
#include "amrgen/errors.hpp"

namespace amrgen {

namespace {

bool is_marker(const std::string& t) { return t == NgramLm::kBos || t == NgramLm::kEos || t == NgramLm::kUnk; }

struct ContextStats {
  double total = 0;     // c(h .)
  double distinct = 0;  // N1+(h .)
};

}  // namespace

int NgramLm::intern(const std::string& token) {
  auto [it, inserted] = ids_.emplace(token, static_cast<int>(vocab_.size()));
  if (inserted) vocab_.push_back(token);
  return it->second;
}

int NgramLm::id_of(const std::string& token) const {
  auto it = ids_.find(normalize(token));
  if (it != ids_.end()) return it->second;
  auto unk = ids_.find(kUnk);
  return unk == ids_.end() ? -1 : unk->second;
}

std::string NgramLm::normalize(const std::string& token) const {
  return lowercase_ && !is_marker(token) ? to_lower(token) : token;
}

const NgramLm::Entry* NgramLm::find(const Key& key) const {
  if (key.empty() || key.size() > tables_.size()) return nullptr;
  const auto& table = tables_[key.size() - 1];
  auto it = table.find(key);
  return it == table.end() ? nullptr : &it->second;
}

NgramLm NgramLm::train(const std::vector<std::vector<std::string>>& corpus, int order, bool lowercase) {
  if (order < 1) throw std::invalid_argument("n-gram order must be >= 1");
  if (corpus.empty()) throw std::invalid_argument("empty training corpus");

  NgramLm lm;
  lm.lowercase_ = lowercase;
  std::set<std::string> words;
  for (const auto& sentence : corpus) {
    for (const auto& t : sentence) words.insert(lm.normalize(t));
  }
  lm.intern(kBos);
  lm.intern(kEos);
  lm.intern(kUnk);
  for (const auto& w : words) lm.intern(w);
  const int bos = lm.ids_.at(kBos);

  // counts[n-1][ngram], only n-grams whose last token is predicted (not <s>)
  std::vector<std::map<Key, double>> counts(static_cast<std::size_t>(order));
  for (const auto& sentence : corpus) {
    std::vector<int> padded{bos};
    for (const auto& t : sentence) padded.push_back(lm.ids_.at(lm.normalize(t)));
    padded.push_back(lm.ids_.at(kEos));
    for (std::size_t end = 1; end < padded.size(); ++end) {
      for (int n = 1; n <= order && static_cast<std::size_t>(n) <= end + 1; ++n) {
        Key key(padded.begin() + static_cast<std::ptrdiff_t>(end + 1 - static_cast<std::size_t>(n)),
                padded.begin() + static_cast<std::ptrdiff_t>(end + 1));
        counts[static_cast<std::size_t>(n - 1)][key] += 1.0;
      }
    }
  }

  lm.tables_.assign(static_cast<std::size_t>(order), {});
  const double d = kDiscount;

  // unigrams: discounted counts plus a uniform floor over V (which includes <unk>)
  double total = 0;
  for (const auto& [key, c] : counts[0]) total += c;
  const double types = static_cast<double>(counts[0].size());
  const double support = static_cast<double>(lm.vocab_.size() - 1);  // everything but <s>
  const double floor_mass = d * types / total;
  for (int w = 0; w < static_cast<int>(lm.vocab_.size()); ++w) {
    if (w == bos) {
      lm.tables_[0][{w}] = Entry{kFloor, 0.0, false};
      continue;
    }
    auto it = counts[0].find({w});
    const double c = it == counts[0].end() ? 0.0 : it->second;
    const double p = std::max(c - d, 0.0) / total + floor_mass / support;
    lm.tables_[0][{w}] = Entry{std::log10(p), 0.0, false};
  }

  for (int n = 2; n <= order; ++n) {
    const auto& table = counts[static_cast<std::size_t>(n - 1)];
    std::map<Key, ContextStats> stats;
    for (const auto& [key, c] : table) {
      auto& s = stats[Key(key.begin(), key.end() - 1)];
      s.total += c;
      s.distinct += 1;
    }
    for (const auto& [history, s] : stats) {
      auto& entry = lm.tables_[history.size() - 1].at(history);
      entry.backoff = std::log10(d * s.distinct / s.total);
      entry.has_backoff = true;
    }
    for (const auto& [key, c] : table) {
      const Key history(key.begin(), key.end() - 1);
      const auto& s = stats.at(history);
      const double lower = std::pow(10.0, lm.log10_prob_ids(std::span<const int>(history).subspan(1), key.back()));
      const double p = (c - d) / s.total + d * s.distinct / s.total * lower;
      lm.tables_[static_cast<std::size_t>(n - 1)][key] = Entry{std::log10(p), 0.0, false};
    }
  }
  return lm;
}

double NgramLm::log10_prob_ids(std::span<const int> history, int word) const {
  const std::size_t max_history = tables_.size() - 1;
  if (history.size() > max_history) history = history.subspan(history.size() - max_history);
  if (word < 0) return kFloor;

  double acc = 0.0;
  for (std::size_t len = history.size(); len > 0; --len) {
    const auto h = history.subspan(history.size() - len);
    Key key(h.begin(), h.end());
    key.push_back(word);
    if (const Entry* e = find(key)) return acc + e->logprob;
    key.pop_back();
    if (const Entry* ctx = find(key); ctx && ctx->has_backoff) acc += ctx->backoff;
  }
  if (const Entry* e = find({word})) return acc + e->logprob;
  return acc + kFloor;
}

double NgramLm::log10_prob(std::span<const std::string> history, const std::string& word, int max_order) const {
  std::vector<int> ids;
  for (const auto& t : history) ids.push_back(id_of(t));
  std::span<const int> h(ids);
  if (max_order > 0 && h.size() > static_cast<std::size_t>(max_order - 1)) {
    h = h.subspan(h.size() - static_cast<std::size_t>(max_order - 1));
  }
  // unknown history tokens without an <unk> entry cut the history there
  auto cut = std::find(h.rbegin(), h.rend(), -1);
  if (cut != h.rend()) h = h.subspan(static_cast<std::size_t>(h.rend() - cut));
  return log10_prob_ids(h, id_of(word));
}

double NgramLm::score_after(std::span<const std::string> history, std::span<const std::string> continuation,
                            int max_order) const {
  std::vector<std::string> h(history.begin(), history.end());
  double total = 0.0;
  for (const auto& tok : continuation) {
    total += log10_prob(h, tok, max_order);
    h.push_back(tok);
  }
  return total;
}

double NgramLm::score_continuation(std::span<const std::string> context, std::span<const std::string> continuation,
                                   int max_order) const {
  if (context.empty()) {
    const std::string bos = kBos;
    return score_after(std::span<const std::string>(&bos, 1), continuation, max_order);
  }
  return score_after(context, continuation, max_order);
}

std::vector<std::string> NgramLm::predictive_vocabulary() const {
  std::vector<std::string> out;
  for (const auto& w : vocab_) {
    if (w != kBos) out.push_back(w);
  }
  return out;
}

std::vector<std::size_t> NgramLm::ngram_counts() const {
  std::vector<std::size_t> out;
  for (const auto& t : tables_) out.push_back(t.size());
  return out;
}

std::vector<std::vector<std::string>> NgramLm::contexts() const {
  std::vector<std::vector<std::string>> out;
  for (const auto& table : tables_) {
    for (const auto& [key, e] : table) {
      if (!e.has_backoff) continue;
      std::vector<std::string> words;
      for (int id : key) words.push_back(vocab_[static_cast<std::size_t>(id)]);
      out.push_back(std::move(words));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// ARPA

void NgramLm::write_arpa(std::ostream& out) const {
  out << "\n\\data\\\n";
  for (std::size_t n = 0; n < tables_.size(); ++n) out << "ngram " << n + 1 << '=' << tables_[n].size() << '\n';
  out << std::setprecision(10);
  for (std::size_t n = 0; n < tables_.size(); ++n) {
    out << "\n\\" << n + 1 << "-grams:\n";
    for (const auto& [key, e] : tables_[n]) {
      out << e.logprob << '\t';
      for (std::size_t i = 0; i < key.size(); ++i) {
        if (i) out << ' ';
        out << vocab_[static_cast<std::size_t>(key[i])];
      }
      if (e.has_backoff) out << '\t' << e.backoff;
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
}

void NgramLm::write_arpa_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write " + path);
  write_arpa(out);
  if (!out) throw std::ios_base::failure("write failed: " + path);
}

NgramLm NgramLm::read_arpa(std::istream& in) {
  NgramLm lm;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) -> FormatError {
    return FormatError("ARPA line " + std::to_string(lineno) + ": " + msg);
  };
  auto next_nonblank = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++lineno;
      if (!out.empty() && out.back() == '\r') out.pop_back();
      if (out.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  };

  bool found = false;
  while (next_nonblank(line)) {
    if (line == "\\data\\") {
      found = true;
      break;
    }
  }
  if (!found) throw FormatError("ARPA: missing \\data\\ header");

  std::vector<std::size_t> declared;
  while (next_nonblank(line) && line.rfind("ngram ", 0) == 0) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw fail("malformed count line '" + line + "'");
    try {
      const std::size_t n = std::stoul(line.substr(6, eq - 6));
      const std::size_t c = std::stoul(line.substr(eq + 1));
      if (n != declared.size() + 1) throw fail("n-gram counts out of order");
      declared.push_back(c);
    } catch (const std::logic_error&) {
      throw fail("malformed count line '" + line + "'");
    }
  }
  if (declared.empty()) throw fail("no n-gram counts in header");
  lm.tables_.assign(declared.size(), {});

  // `line` now holds the first section header (or \end\)
  for (std::size_t n = 1; n <= declared.size(); ++n) {
    const std::string header = "\\" + std::to_string(n) + "-grams:";
    if (line != header) throw fail("expected " + header);
    std::size_t seen = 0;
    bool more = false;
    while ((more = next_nonblank(line))) {
      if (line.front() == '\\') break;
      std::istringstream fields(line);
      std::vector<std::string> parts;
      std::string f;
      while (fields >> f) parts.push_back(f);
      if (parts.size() != n + 1 && parts.size() != n + 2) throw fail("wrong field count");
      Entry e;
      try {
        e.logprob = std::stod(parts[0]);
        if (parts.size() == n + 2) {
          e.backoff = std::stod(parts.back());
          e.has_backoff = true;
        }
      } catch (const std::logic_error&) {
        throw fail("bad number");
      }
      Key key;
      for (std::size_t i = 1; i <= n; ++i) key.push_back(lm.intern(parts[i]));
      lm.tables_[n - 1][key] = e;
      ++seen;
    }
    if (seen != declared[n - 1]) {
      throw fail(std::to_string(n) + "-grams: header declares " + std::to_string(declared[n - 1]) + ", found " +
                 std::to_string(seen));
    }
    if (!more) throw fail("missing \\end\\");
  }
  if (line != "\\end\\") throw fail("expected \\end\\");
  return lm;
}

NgramLm NgramLm::read_arpa_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  return read_arpa(in);
}

}  // namespace amrgen
