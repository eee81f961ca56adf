#include <doctest.h>

#include <algorithm>
#include <random>

#include "support.hpp"
#include "vocabadapt/corpus_metrics.hpp"
#include "vocabadapt/error.hpp"
#include "vocabadapt/vocab_adapt.hpp"

using namespace vocabadapt;
using testsupport::fixture;
using testsupport::toks;

namespace {

// Word tokenizer with a hand-picked subword count per word; 1 for anything else.
WordTokenizer fixed_counts(std::map<std::string, std::size_t> counts) {
  return [counts = std::move(counts)](std::string_view w) {
    TokenizationResult r;
    auto it = counts.find(std::string(w));
    r.subword_count = it == counts.end() ? 1 : it->second;
    r.tokens.assign(r.subword_count, "x");
    return r;
  };
}

}  // namespace

TEST_CASE("fragment score") {
  const Tokenizer whole("", toks({"a", "b", "ab"}), {{"a", "b"}});
  CHECK(fragment_score(whole, WordCounts{{"ab", 4}, {"a", 1}}) == 1.0);
  CHECK(fragment_score(fixed_counts({{"p", 2}, {"q", 3}}), WordCounts{{"p", 1}, {"q", 1}}) == 2.5);
  CHECK_THROWS_WITH_AS(fragment_score(whole, WordCounts{}), "empty corpus", DataError);
}

TEST_CASE("split fractions") {
  const auto tok = fixed_counts({{"six", 6}, {"two", 2}});
  CHECK(split_gt_fraction(tok, WordCounts{{"two", 3}}, 3) == 0.0);
  CHECK(split_gt_fraction(tok, WordCounts{{"six", 1}, {"two", 1}}, 3) == 0.5);
  CHECK(split_gt_fraction(tok, WordCounts{{"six", 1}, {"two", 1}}, 1) == 1.0);
  CHECK_THROWS_AS(split_gt_fraction(tok, WordCounts{}, 1), DataError);

  const Tokenizer llama2 = load_tokenizer(fixture("llama2_style.json"));
  CHECK(split_gt_fraction(llama2, WordCounts{{"antipyretics", 1}}, 3) == 1.0);
}

TEST_CASE("corpus stats invariants on random corpora") {
  const Tokenizer t = load_tokenizer(fixture("toy_llama.json"));
  std::mt19937 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto words = testsupport::random_corpus(rng, 30, 12, "abcdefghilmnoprstu");
    const CorpusStats s = corpus_stats(bpe_tokenizer(t), words);
    CHECK(s.fragment_score >= 1.0);
    CHECK(s.split_gt3_fraction <= s.split_gt1_fraction);
    CHECK((s.fragment_score == 1.0) == (s.split_gt1_fraction == 0.0));
    CHECK(s.fragment_score == doctest::Approx(fragment_score(t, words)).epsilon(1e-15));
    CHECK(s.split_gt1_fraction == split_gt_fraction(t, words, 1));
    double prev = 1.0;
    for (std::size_t k = 1; k < 8; ++k) {
      const double f = split_gt_fraction(t, words, k);
      CHECK(f <= prev);
      prev = f;
    }
    for (const auto& o : s.oov_words) CHECK(o.subword_count > 1);
    std::size_t multi = 0;
    for (const auto& [w, c] : words) multi += t.tokenize_word(w).subword_count > 1;
    CHECK(s.oov_words.size() == multi);
  }
}

TEST_CASE("whole-word tokens never raise the fragment score") {
  const Tokenizer t = load_tokenizer(fixture("toy_llama.json"));
  const WordCounts words = text::count_words(read_file(fixture("medical.txt")));
  std::vector<std::string> whole;
  for (const auto& [w, c] : words) {
    if (c >= 5 && !text::contains_digit(w)) whole.push_back(t.marker() + w);
  }
  REQUIRE(!whole.empty());
  const Tokenizer e = apply_added_vocab(t, plan_added_vocab(t, whole, Strategy::Medvoc));
  CHECK(fragment_score(e, words) <= fragment_score(t, words));
  for (const auto& w : whole) CHECK(e.tokenize_word(w.substr(t.marker().size())).tokens.size() == 1);
}

TEST_CASE("oov_words") {
  const Tokenizer llama2 = load_tokenizer(fixture("llama2_style.json"));
  const DomainLexicon lex(toks({"cardiomyopathy", "antipyretics", "a"}));
  CHECK(oov_words(llama2, "nothing here", lex, false).empty());
  const auto all = oov_words(llama2, "cardiomyopathy and Antipyretics then cardiomyopathy", lex, false);
  REQUIRE(all.size() == 2);
  CHECK(all[0] == OovWord{"cardiomyopathy", 6, 2});
  CHECK(all[1].word == "antipyretics");
  const auto hard = oov_words(llama2, "cardiomyopathy", lex, true);
  REQUIRE(hard.size() == 1);
  CHECK(hard[0].subword_count == 6);
  // "a" is a single token: in the lexicon but never OOV.
  const Tokenizer single("", toks({"a"}), {});
  CHECK(oov_words(single, "a a", lex, false).empty());
}

TEST_CASE("lexicon") {
  const DomainLexicon lex(toks({"Insulin", "aspirin"}));
  CHECK(lex.contains("INSULIN"));
  CHECK(lex.contains("insulin"));
  CHECK(!lex.contains("the"));
  CHECK_THROWS_AS(DomainLexicon(toks({"two words"})), DataError);
  const auto built = DomainLexicon::from_corpus({"The insulin dose, 5 units.", "the Aspirin"}, toks({"the", "dose"}));
  CHECK(built.words() == std::set<std::string, std::less<>>{"aspirin", "insulin", "units"});
}

TEST_CASE("novelty fraction") {
  DatasetRecord r{"1", "", "the drug reduced pain", "the drug cured migraine"};
  CHECK(novelty_fraction(r) == 0.5);
  r.summary = "drug the";
  CHECK(novelty_fraction(r) == 0.0);
  r.summary = "The DRUG, reduced!";
  CHECK(novelty_fraction(r) == 0.0);
  r.summary = "...";
  CHECK_THROWS_AS(novelty_fraction(r), DataError);
  DatasetRecord s{"2", "", "pain reduced drug the", "migraine cured drug the"};
  CHECK(novelty_fraction(s) == 0.5);
}

TEST_CASE("corpus report matches per-record recomputation") {
  const Tokenizer t = load_tokenizer(fixture("toy_llama.json"));
  const DomainLexicon lex = load_lexicon(fixture("medical_lexicon.txt"));
  auto records = load_dataset(fixture("test.jsonl"));
  records.resize(30);
  const CorpusReport rep = corpus_report(t, records, lex);
  CHECK(rep.record_count == 30);

  OovTally src;
  double nov = 0.0;
  std::uint64_t summary_tokens = 0;
  WordCounts source_words;
  for (const auto& r : records) {
    src += oov_tally(bpe_tokenizer(t), r.source, lex);
    nov += novelty_fraction(r);
    text::add_counts(source_words, text::count_words(r.source));
    for (const auto& [w, c] : text::count_words(r.summary)) summary_tokens += c * t.tokenize_word(w).subword_count;
  }
  CHECK(rep.source.oov.words == src.words);
  CHECK(rep.source.oov.split_gt1 == src.split_gt1);
  CHECK(rep.source.oov.split_gt3 == src.split_gt3);
  CHECK(rep.mean_novelty == doctest::Approx(nov / 30).epsilon(1e-12));
  CHECK(rep.mean_summary_tokens == doctest::Approx(static_cast<double>(summary_tokens) / 30).epsilon(1e-12));
  CHECK(rep.source.stats.fragment_score == doctest::Approx(fragment_score(t, source_words)).epsilon(1e-12));

  // Aggregation over two halves recombines by counts.
  std::vector<DatasetRecord> a(records.begin(), records.begin() + 10);
  std::vector<DatasetRecord> b(records.begin() + 10, records.end());
  const auto ra = corpus_report(t, a, lex);
  const auto rb = corpus_report(t, b, lex);
  CHECK(ra.source.oov.words + rb.source.oov.words == rep.source.oov.words);
  CHECK(ra.summary.stats.word_count + rb.summary.stats.word_count == rep.summary.stats.word_count);
  CHECK(ra.summary.stats.subword_total + rb.summary.stats.subword_total == rep.summary.stats.subword_total);

  const DatasetRecord same{"x", "", "insulin dose", "insulin dose"};
  const auto one = corpus_report(t, {same}, lex);
  CHECK(one.mean_novelty == 0.0);
  CHECK(one.source.stats.fragment_score == one.summary.stats.fragment_score);
  CHECK(one.source.oov.gt1() == one.summary.oov.gt1());
  CHECK_THROWS_AS(corpus_report(t, {}, lex), DataError);
}

TEST_CASE("dataset parsing") {
  const auto rs = parse_dataset("{\"id\":\"a\",\"source\":\"s\",\"summary\":\"t\"}\n\n{\"id\":\"b\",\"query\":\"q\",\"source\":\"s\",\"summary\":\"t\"}\n");
  REQUIRE(rs.size() == 2);
  CHECK(rs[1].query == "q");
  CHECK_THROWS_WITH_AS(parse_dataset("{\"id\":\"a\",\"source\":\"s\",\"summary\":\"t\"}\n{\"id\":\"a\",\"source\":\"s\",\"summary\":\"t\"}"),
                       doctest::Contains("duplicate id"), DataError);
  CHECK_THROWS_AS(parse_dataset("{\"id\":\"a\",\"source\":\"\",\"summary\":\"t\"}"), DataError);
  CHECK_THROWS_AS(parse_dataset("{\"id\":\"a\",\"summary\":\"t\"}"), DataError);
  CHECK_THROWS_AS(parse_dataset("[1,2]"), DataError);
  CHECK_THROWS_AS(parse_dataset("{oops"), DataError);

  const auto dir = testsupport::temp_dir("ds");
  save_dataset(rs, dir / "d.jsonl");
  const auto back = load_dataset(dir / "d.jsonl");
  REQUIRE(back.size() == 2);
  CHECK(back[0].id == "a");
  CHECK(back[1].summary == "t");
  std::filesystem::remove_all(dir);
}
