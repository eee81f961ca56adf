#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "vocabadapt/text.hpp"
#include "vocabadapt/tokenizer.hpp"

namespace vocabadapt {

/// Any word-level tokenization routine: plain BPE or AdaptBPE.
using WordTokenizer = std::function<TokenizationResult(std::string_view)>;

/// Plain merge-loop tokenization under `t`. The tokenizer must outlive the result.
WordTokenizer bpe_tokenizer(const Tokenizer& t);

/// One summarization example.
struct DatasetRecord {
  std::string id;
  std::string query;
  std::string source;
  std::string summary;
};

/// Lowercase, whitespace-free "medical words".
class DomainLexicon {
 public:
  DomainLexicon() = default;
  explicit DomainLexicon(const std::vector<std::string>& words);

  /// Case-insensitive membership.
  bool contains(std::string_view word) const;
  const std::set<std::string, std::less<>>& words() const { return words_; }
  std::size_t size() const { return words_.size(); }

  /// Every normalized word of the domain texts that is absent from the general wordlist.
  static DomainLexicon from_corpus(const std::vector<std::string>& domain_texts,
                                   const std::vector<std::string>& general_words);

 private:
  std::set<std::string, std::less<>> words_;
};

struct OovWord {
  std::string word;
  std::size_t subword_count;
  std::uint64_t occurrences;

  friend bool operator==(const OovWord&, const OovWord&) = default;
};

struct CorpusStats {
  std::uint64_t word_count = 0;
  std::uint64_t subword_total = 0;
  double fragment_score = 0.0;
  double split_gt1_fraction = 0.0;
  double split_gt3_fraction = 0.0;
  /// Words with more than one subword, sorted by word.
  std::vector<OovWord> oov_words;
};

/// Count-weighted mean subword count. Throws DataError on an empty multiset.
double fragment_score(const WordTokenizer& tok, const WordCounts& words);
double fragment_score(const Tokenizer& t, const WordCounts& words);

/// Count-weighted fraction of occurrences split into more than `k` subwords.
double split_gt_fraction(const WordTokenizer& tok, const WordCounts& words, std::size_t k);
double split_gt_fraction(const Tokenizer& t, const WordCounts& words, std::size_t k);

CorpusStats corpus_stats(const WordTokenizer& tok, const WordCounts& words);

/// Lexicon words of `text` split into more than one subword (more than three
/// when `difficult`), in order of first appearance with occurrence counts.
std::vector<OovWord> oov_words(const WordTokenizer& tok, std::string_view text, const DomainLexicon& lexicon,
                               bool difficult);
std::vector<OovWord> oov_words(const Tokenizer& t, std::string_view text, const DomainLexicon& lexicon,
                               bool difficult);

/// Fraction of unique summary unigrams that never appear in the source.
double novelty_fraction(const DatasetRecord& r);

/// Lexicon-word OOV concentration of one text: occurrences of lexicon words
/// split into more than `k` subwords over all word occurrences.
struct OovTally {
  std::uint64_t words = 0;
  std::uint64_t split_gt1 = 0;
  std::uint64_t split_gt3 = 0;

  double gt1() const { return words == 0 ? 0.0 : static_cast<double>(split_gt1) / static_cast<double>(words); }
  double gt3() const { return words == 0 ? 0.0 : static_cast<double>(split_gt3) / static_cast<double>(words); }
  OovTally& operator+=(const OovTally& o) {
    words += o.words;
    split_gt1 += o.split_gt1;
    split_gt3 += o.split_gt3;
    return *this;
  }
};
OovTally oov_tally(const WordTokenizer& tok, std::string_view text, const DomainLexicon& lexicon);

struct FieldReport {
  CorpusStats stats;
  OovTally oov;
};

/// Dataset-level statistics in the shape of the dataset table: fragmentation
/// and lexicon OOV concentration over sources and summaries, novelty, and
/// summary length in tokens.
struct CorpusReport {
  std::size_t record_count = 0;
  FieldReport source;
  FieldReport summary;
  double mean_novelty = 0.0;
  double mean_summary_tokens = 0.0;
  std::vector<std::string> warnings;
};

CorpusReport corpus_report(const WordTokenizer& tok, const std::vector<DatasetRecord>& records,
                           const DomainLexicon& lexicon);
CorpusReport corpus_report(const Tokenizer& t, const std::vector<DatasetRecord>& records,
                           const DomainLexicon& lexicon);

// --- file formats ------------------------------------------------------------

/// JSON-Lines, one {id, query, source, summary} object per line.
std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path);
std::vector<DatasetRecord> parse_dataset(std::string_view jsonl);
void save_dataset(const std::vector<DatasetRecord>& records, const std::filesystem::path& path);

/// UTF-8 text, one entry per line; blank lines are ignored.
std::vector<std::string> load_wordlist(const std::filesystem::path& path);
DomainLexicon load_lexicon(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

}  // namespace vocabadapt
