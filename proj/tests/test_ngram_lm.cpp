#include <doctest.h>

#include <cmath>
#include <sstream>

#include "amrgen/errors.hpp"
#include "amrgen/ngram_lm.hpp"
#include "support.hpp"

using namespace amrgen;

namespace {

using Tokens = std::vector<std::string>;

double pow10sum(const NgramLm& lm, const Tokens& history) {
  double total = 0.0;
  for (const auto& w : lm.predictive_vocabulary()) total += std::pow(10.0, lm.log10_prob(history, w));
  return total;
}

const std::vector<Tokens> kSmallCorpus{
    {"the", "boy", "wants", "to", "go"},
    {"the", "girl", "wants", "the", "boy"},
    {"a", "boy", "goes"},
    {"the", "boy", "wants", "to", "believe", "the", "girl"},
    {"girls", "go"},
};

}  // namespace

TEST_CASE("bigram values match a hand computation on the toy sentence") {
  const NgramLm lm = testing::toy_lm(2);
  // six predicted tokens (five words and </s>), all seen once; the unigram
  // floor spreads 0.75 * 6 / 6 over the seven predictable types
  const double uni = 0.25 / 6.0 + 0.75 / 7.0;
  const double boy_given_the = 0.25 + 0.75 * uni;
  const double go_given_the = 0.75 * uni;
  const Tokens the{"the"};
  CHECK(lm.log10_prob(the, "boy") == doctest::Approx(std::log10(boy_given_the)).epsilon(1e-12));
  CHECK(lm.log10_prob(the, "go") == doctest::Approx(std::log10(go_given_the)).epsilon(1e-12));
  CHECK(lm.log10_prob(the, "boy") > lm.log10_prob(the, "go"));
  CHECK(lm.score_continuation(the, Tokens{"boy"}) == doctest::Approx(std::log10(boy_given_the)).epsilon(1e-12));

  const double unk = 0.75 / 7.0;
  CHECK(lm.log10_prob(Tokens{"zebra"}, "aardvark") == doctest::Approx(std::log10(unk)).epsilon(1e-12));
}

TEST_CASE("unigram distribution and every observed context sum to one") {
  for (int order : {1, 2, 3, 4}) {
    const NgramLm lm = NgramLm::train(kSmallCorpus, order);
    CHECK(pow10sum(lm, {}) == doctest::Approx(1.0).epsilon(1e-6));
    for (const auto& ctx : lm.contexts()) CHECK(pow10sum(lm, ctx) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("scoring is total and monotone") {
  const NgramLm lm = NgramLm::train(kSmallCorpus, 3);
  const double unseen = lm.score_continuation(Tokens{"the"}, Tokens{"xylophone"});
  CHECK(std::isfinite(unseen));
  CHECK(unseen == doctest::Approx(lm.log10_prob(Tokens{"the"}, "<unk>")));
  CHECK(lm.score_continuation(Tokens{"the"}, Tokens{}) == 0.0);

  Tokens sentence;
  double previous = 0.0;
  for (const auto& w : Tokens{"the", "boy", "wants", "a", "zebra", "</s>"}) {
    sentence.push_back(w);
    const double now = lm.score_continuation({}, sentence);
    CHECK(now <= previous);
    previous = now;
  }
}

TEST_CASE("chain rule decomposition is exact") {
  const NgramLm lm = NgramLm::train(kSmallCorpus, 3);
  const Tokens ctx{"<s>", "the"};
  const Tokens a{"boy", "wants"};
  const Tokens b{"to", "believe", "girls"};
  Tokens ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  Tokens ctx_a = ctx;
  ctx_a.insert(ctx_a.end(), a.begin(), a.end());
  const double whole = lm.score_continuation(ctx, ab);
  const double split = lm.score_continuation(ctx, a) + lm.score_continuation(ctx_a, b);
  CHECK(std::abs(whole - split) <= 1e-12);
}

TEST_CASE("empty context means sentence start") {
  const NgramLm lm = testing::toy_lm(2);
  CHECK(lm.score_continuation({}, Tokens{"the"}) == lm.score_continuation(Tokens{"<s>"}, Tokens{"the"}));
  CHECK(lm.score_after({}, Tokens{"the"}) == lm.log10_prob({}, "the"));
}

TEST_CASE("ARPA round trip keeps scores") {
  const NgramLm lm = NgramLm::train(kSmallCorpus, 3);
  std::stringstream buffer;
  lm.write_arpa(buffer);
  const NgramLm back = NgramLm::read_arpa(buffer);
  CHECK(back.order() == 3);
  CHECK(back.ngram_counts() == lm.ngram_counts());
  for (const auto& ctx : lm.contexts()) {
    for (const auto& w : lm.predictive_vocabulary()) CHECK(std::abs(back.log10_prob(ctx, w) - lm.log10_prob(ctx, w)) <= 1e-4);
  }
  const Tokens s{"the", "boy", "wants", "to", "go", "</s>"};
  CHECK(std::abs(back.score_continuation({}, s) - lm.score_continuation({}, s)) <= 1e-4);
  CHECK(std::isfinite(back.score_continuation({}, Tokens{"platypus"})));
}

TEST_CASE("ARPA reader rejects malformed files") {
  auto rejects = [](const std::string& text) {
    std::istringstream in(text);
    CHECK_THROWS_AS(NgramLm::read_arpa(in), FormatError);
  };
  const std::string unigrams = "\\1-grams:\n-1\t<s>\t-0.3\n-0.5\t</s>\n-0.5\ta\n\n";
  rejects("");
  rejects("\\data\\\nngram 1=3\n\n" + unigrams);  // no \end\ marker
  rejects("\\data\\\nngram 1=4\n\n" + unigrams + "\\end\\\n");
  rejects("\\data\\\nngram 1=3\nngram 2=5\n\n" + unigrams +
          "\\2-grams:\n-0.1\t<s> a\n-0.1\ta </s>\n-0.2\ta a\n-0.3\t<s> </s>\n\n\\end\\\n");
  rejects("\\data\\\nngram one=3\n\n" + unigrams + "\\end\\\n");

  std::istringstream ok("\\data\\\nngram 1=3\n\n" + unigrams + "\\end\\\n");
  const NgramLm lm = NgramLm::read_arpa(ok);
  CHECK(lm.order() == 1);
  CHECK(std::isfinite(lm.score_continuation({}, Tokens{"unseen"})));
}

TEST_CASE("training is deterministic and validates its input") {
  std::ostringstream a, b;
  NgramLm::train(kSmallCorpus, 4).write_arpa(a);
  NgramLm::train(kSmallCorpus, 4).write_arpa(b);
  CHECK(a.str() == b.str());
  CHECK_THROWS_AS(NgramLm::train(kSmallCorpus, 0), std::invalid_argument);
  CHECK_THROWS_AS(NgramLm::train({}, 2), std::invalid_argument);
}

TEST_CASE("lowercasing applies to training and queries") {
  const NgramLm lm = NgramLm::train({{"The", "Boy"}}, 2, true);
  CHECK(lm.log10_prob(Tokens{"THE"}, "boy") == lm.log10_prob(Tokens{"the"}, "boy"));
  const NgramLm cased = NgramLm::train({{"The", "Boy"}}, 2, false);
  CHECK(cased.log10_prob(Tokens{"The"}, "Boy") > cased.log10_prob(Tokens{"the"}, "boy"));
}
