#include "amrgen/morphology.hpp"

#include <algorithm>
#include <cctype>
#include <string_view>

namespace amrgen {

namespace {

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool is_consonant(char c) { return std::isalpha(static_cast<unsigned char>(c)) && !is_vowel(c); }

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::size_t vowel_groups(std::string_view w) {
  std::size_t groups = 0;
  bool in_group = false;
  for (char c : w) {
    const bool v = is_vowel(c);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  return groups;
}

// stop -> stopp(ed); only single-syllable consonant-vowel-consonant endings,
// and never w/x/y which do not double in English.
bool doubles_final_consonant(std::string_view w) {
  if (w.size() < 3) return false;
  const char c3 = w[w.size() - 1];
  const char v = w[w.size() - 2];
  const char c1 = w[w.size() - 3];
  if (!is_consonant(c1) || !is_vowel(v) || !is_consonant(c3)) return false;
  if (c3 == 'w' || c3 == 'x' || c3 == 'y') return false;
  return vowel_groups(w) == 1;
}

bool sibilant_end(std::string_view w) {
  return ends_with(w, "s") || ends_with(w, "x") || ends_with(w, "z") || ends_with(w, "ch") || ends_with(w, "sh");
}

bool consonant_y(std::string_view w) { return w.size() >= 2 && w.back() == 'y' && is_consonant(w[w.size() - 2]); }

}  // namespace

std::string concept_lemma(const std::string& name) {
  const auto dash = name.rfind('-');
  if (dash == std::string::npos || dash == 0 || dash + 1 == name.size()) return name;
  const bool digits = std::all_of(name.begin() + static_cast<std::ptrdiff_t>(dash) + 1, name.end(),
                                  [](unsigned char c) { return std::isdigit(c); });
  return digits ? name.substr(0, dash) : name;
}

bool is_predicate(const std::string& name) { return concept_lemma(name) != name; }

std::string plural_s(const std::string& w) {
  if (w.empty()) return w;
  if (consonant_y(w)) return w.substr(0, w.size() - 1) + "ies";
  if (sibilant_end(w)) return w + "es";
  return w + "s";
}

std::string third_person_s(const std::string& w) {
  if (w.size() >= 2 && w.back() == 'o' && is_consonant(w[w.size() - 2])) return w + "es";  // goes, does
  return plural_s(w);
}

std::string past_ed(const std::string& w) {
  if (w.empty()) return w;
  if (w.back() == 'e') return w + "d";
  if (consonant_y(w)) return w.substr(0, w.size() - 1) + "ied";
  if (doubles_final_consonant(w)) return w + w.back() + "ed";
  return w + "ed";
}

std::string present_participle(const std::string& w) {
  if (w.empty()) return w;
  if (ends_with(w, "ie")) return w.substr(0, w.size() - 2) + "ying";
  if (w.back() == 'e' && !ends_with(w, "ee") && !ends_with(w, "ye") && !ends_with(w, "oe") && w.size() > 2) {
    return w.substr(0, w.size() - 1) + "ing";
  }
  if (doubles_final_consonant(w)) return w + w.back() + "ing";
  return w + "ing";
}

std::vector<std::string> morphological_variants(const std::string& name) {
  const std::string lemma = concept_lemma(name);
  std::vector<std::string> forms{lemma};
  if (is_predicate(name)) {
    forms.push_back(third_person_s(lemma));
    forms.push_back(past_ed(lemma));
    forms.push_back(present_participle(lemma));
  } else {
    forms.push_back(plural_s(lemma));
  }
  std::vector<std::string> unique;
  for (auto& f : forms) {
    if (std::find(unique.begin(), unique.end(), f) == unique.end()) unique.push_back(std::move(f));
  }
  return unique;
}

std::string constant_surface(const std::string& literal) {
  if (literal == "-") return "not";
  if (literal.size() >= 2 && literal.front() == '"' && literal.back() == '"') {
    return literal.substr(1, literal.size() - 2);
  }
  return literal;
}

}  // namespace amrgen
