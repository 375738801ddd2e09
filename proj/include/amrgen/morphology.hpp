#pragma once

#include <string>
#include <vector>

namespace amrgen {

/// "want-01" -> "want"; concepts without a numeric sense suffix are returned unchanged.
std::string concept_lemma(const std::string& name);

/// True when the concept carries a PropBank-style sense suffix ("-01").
bool is_predicate(const std::string& name);

// English suffixing without a lexicon.
std::string third_person_s(const std::string& word);
std::string plural_s(const std::string& word);
std::string past_ed(const std::string& word);
std::string present_participle(const std::string& word);

/// Surface forms tried for a concept: lemma, +s, +ed, +ing for predicates;
/// lemma and plural otherwise. No duplicates; order is fixed.
std::vector<std::string> morphological_variants(const std::string& name);

/// Surface token for a constant: quotes stripped, polarity "-" -> "not".
std::string constant_surface(const std::string& literal);

}  // namespace amrgen
