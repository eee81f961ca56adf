#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vocabadapt/corpus_metrics.hpp"
#include "vocabadapt/tokenizer.hpp"

namespace vocabadapt {

enum class Strategy { Medvoc, MedvocLlm, Scaffix };

std::string to_string(Strategy s);
/// Accepts "MEDVOC", "MEDVOC_LLM", "SCAFFIX" in any case, with '-' or '_'.
Strategy parse_strategy(std::string_view s);

enum class CandidateSource { Pac, Tgt };

/// Tokens learned by BPE training on domain OOV words at one vocabulary size.
struct CandidateVocab {
  std::vector<std::pair<std::string, std::uint64_t>> tokens;
  CandidateSource source = CandidateSource::Tgt;
  std::size_t config_size = 0;
  /// Vocabulary size actually reached; smaller than config_size when merges ran out.
  std::size_t reached_size = 0;
  bool exhausted() const { return reached_size < config_size; }
};

struct AddedVocabulary {
  Strategy strategy = Strategy::Medvoc;
  std::vector<std::string> tokens;
  std::vector<Merge> synthesized_merges;
  /// Intermediates that exist only so a target can be reached by merges.
  std::vector<std::string> scaffold_tokens;

  /// tokens minus scaffold_tokens, in order.
  std::vector<std::string> targets() const;
};

struct GridEntry {
  std::string config;
  double utility;
  std::size_t size;
};

struct SearchResult {
  std::vector<std::string> tokens;
  std::string config;
  double utility = 0.0;
  std::size_t size = 0;
  std::vector<GridEntry> grid;
  std::vector<std::string> warnings;
};

/// Lexicon words (lowercased) split into more than one subword, with corpus counts.
/// Throws DataError("nothing to adapt") when there are none.
WordCounts extract_candidate_words(const Tokenizer& t, const WordCounts& corpus, const DomainLexicon& lexicon);

/// One candidate vocabulary per size, trained incrementally. Token frequency
/// is the weighted pair count at the moment the token was learned.
std::vector<CandidateVocab> build_candidate_vocab(const WordCounts& words, const std::vector<std::size_t>& sizes,
                                                  const std::string& marker, CandidateSource source);

/// Index of the grid entry to keep: the smallest-size entry whose utility is
/// within (1 + tolerance) of the minimum; ties go to lower utility, then grid order.
std::size_t select_in_neighborhood(const std::vector<GridEntry>& grid, double tolerance);

SearchResult medvoc_search(const Tokenizer& t, const std::vector<CandidateVocab>& pac,
                           const std::vector<CandidateVocab>& tgt, const WordCounts& eval_words, double tolerance);

/// Drops tokens that never occur as a word in the reference summaries and
/// tokens mixing digits or punctuation with other characters.
std::vector<std::string> medvoc_llm_clean(const std::vector<std::string>& tokens,
                                          const std::vector<std::string>& train_summaries, const std::string& marker);

std::vector<std::size_t> default_quota_grid();

/// Top-x whole words by frequency for each quota x, scored under AdaptBPE.
SearchResult scaffix_select(const WordCounts& words, const std::vector<std::size_t>& quota_grid, const Tokenizer& t,
                            const WordCounts& eval_words, double tolerance);

struct Synthesis {
  std::vector<std::string> new_tokens;
  std::vector<Merge> new_merges;
};

/// Left-to-right merge chain that makes `target` reachable as one token.
/// Empty when the target already tokenizes to a single token.
Synthesis synthesize_merges(const Tokenizer& t, std::string_view target);

/// Plans an added vocabulary for the given targets. MEDVOC strategies chain
/// merge synthesis through the growing tokenizer; SCAFFIX records words only.
AddedVocabulary plan_added_vocab(const Tokenizer& t, const std::vector<std::string>& targets, Strategy strategy,
                                 std::vector<std::string>* warnings = nullptr);

/// Extends `t` with `v`. Duplicates are skipped and reported through `warnings`.
Tokenizer apply_added_vocab(const Tokenizer& t, const AddedVocabulary& v, std::vector<std::string>* warnings = nullptr);

struct ScaffoldStats {
  std::size_t scaffold_count = 0;
  double overhead_fraction = 0.0;
};

/// Counts the distinct intermediates merge synthesis would need for `targets`
/// against the unmodified tokenizer.
ScaffoldStats scaffolding_stats(const Tokenizer& t, const std::vector<std::string>& targets);

/// Inputs of a full strategy run.
struct StrategyInputs {
  Strategy strategy = Strategy::Scaffix;
  WordCounts pac_corpus;
  WordCounts tgt_corpus;
  std::vector<std::string> train_summaries;
  DomainLexicon lexicon;
  std::vector<std::size_t> size_grid;
  std::vector<std::size_t> quota_grid;
  double tolerance = 0.02;
};

struct StrategyOutcome {
  AddedVocabulary added;
  SearchResult search;
  /// Medical OOV words of the target corpus; the utility corpus.
  WordCounts eval_words;
};

StrategyOutcome run_strategy(const Tokenizer& t, const StrategyInputs& in);

// --- file formats ------------------------------------------------------------

std::string serialize_added_vocab(const AddedVocabulary& v);
AddedVocabulary parse_added_vocab(std::string_view json_text);
void save_added_vocab(const AddedVocabulary& v, const std::filesystem::path& path);
AddedVocabulary load_added_vocab(const std::filesystem::path& path);

/// JSON array of {config, utility, size}.
std::string serialize_search_audit(const std::vector<GridEntry>& grid);

}  // namespace vocabadapt
