#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "support.hpp"
#include "vocabadapt/adapt_bpe.hpp"
#include "vocabadapt/corpus_metrics.hpp"
#include "vocabadapt/vocab_adapt.hpp"

using namespace vocabadapt;
using testsupport::fixture;
using testsupport::kG;
using testsupport::toks;

TEST_CASE("longest match") {
  const std::vector<std::string> inhibitor = {"inhibitor"};
  const MatchIndex idx(inhibitor);
  CHECK(idx.max_len() == 9);
  CHECK(longest_match(idx, kG + "inhibitory") == Match{1, 9});
  CHECK(!longest_match(idx, "nothing"));
  const std::vector<std::string> two = {"ab", "abc"};
  CHECK(longest_match(MatchIndex(two), "xabcx") == Match{1, 3});
  const std::vector<std::string> tie = {"bc", "ab"};
  CHECK(longest_match(MatchIndex(tie), "abc") == Match{0, 2});
}

TEST_CASE("morphological boundaries are preserved") {
  const Tokenizer base = load_tokenizer(fixture("morph_base.json"));
  const Tokenizer t = apply_added_vocab(base, load_added_vocab(fixture("morph_added.json")));
  const MatchIndex idx = added_index(t);
  CHECK(base.tokenize_word("inhibitory").tokens == std::vector<std::string>{kG + "inhib", "itory"});
  CHECK(base.tokenize_word("microbiologically").tokens == std::vector<std::string>{kG + "microbi", "ologically"});
  const auto inh = adaptbpe_tokenize(t, idx, "inhibitory");
  CHECK(inh.tokens == std::vector<std::string>{kG, "inhibitor", "y"});
  CHECK(inh.subword_count == 2);
  CHECK(!inh.had_unknown_chars);
  CHECK(adaptbpe_tokenize(t, idx, "microbiologically").tokens ==
        std::vector<std::string>{kG + "micro", "biological", "ly"});
  const auto whole = adaptbpe_tokenize(t, idx, "inhibitor");
  CHECK(whole.tokens == std::vector<std::string>{kG, "inhibitor"});
  CHECK(whole.subword_count == 1);
}

TEST_CASE("no match falls back to plain BPE") {
  const Tokenizer t = load_tokenizer(fixture("toy_llama.json"));
  const MatchIndex empty;
  const std::vector<std::string> entries = {"zzzz"};
  const MatchIndex unused(entries);
  std::mt19937 rng(2);
  for (int i = 0; i < 300; ++i) {
    const std::string w = testsupport::random_word(rng, 12, "abcdefghilmnorstu");
    CHECK(adaptbpe_tokenize(t, empty, w).tokens == t.tokenize_word(w).tokens);
    CHECK(adaptbpe_tokenize(t, unused, w).tokens == t.tokenize_word(w).tokens);
  }
}

TEST_CASE("AdaptBPE equals the brute-force recursion") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const auto words = testsupport::random_corpus(rng, 12, 8, "abcd");
    const Tokenizer base = train_bpe(words, rng() % 15, trial % 2 ? kG : "");
    std::vector<std::string> added;
    const std::size_t k = 1 + rng() % 5;
    for (std::size_t i = 0; i < k; ++i) added.push_back(testsupport::random_word(rng, 4, "abcd"));
    const Tokenizer t = base.extended(added, {}, true);
    const MatchIndex idx = added_index(t);
    const std::set<std::string> entries(added.begin(), added.end());
    for (int j = 0; j < 10; ++j) {
      const std::string w = testsupport::random_word(rng, 12, "abcd");
      const auto got = adaptbpe_tokenize(t, idx, w);
      CHECK(got.tokens == oracle::adaptbpe(t.marker(), {base.merges().begin(), base.merges().end()}, entries, w));
      std::string joined;
      for (const auto& tok : got.tokens) joined += tok;
      CHECK(joined == t.marker() + w);
      if (entries.contains(w)) CHECK(got.subword_count == 1);
    }
  }
}
