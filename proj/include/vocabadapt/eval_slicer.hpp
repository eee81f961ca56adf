#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vocabadapt/corpus_metrics.hpp"

namespace vocabadapt {

/// Per-record OOV and novelty concentrations.
struct RecordScore {
  std::string id;
  double difficult_sd = 0.0;
  double difficult_rs = 0.0;
  double all_sd = 0.0;
  double all_rs = 0.0;
  double novel_rs = 0.0;
};

enum class Setting { DifficultSD, DifficultRS, NovelRS, AllSD, AllRS, TestFull };

/// The five top-decile settings, in report order.
inline constexpr Setting kSliceSettings[] = {Setting::DifficultSD, Setting::DifficultRS, Setting::NovelRS,
                                             Setting::AllSD, Setting::AllRS};

std::string to_string(Setting s);
Setting parse_setting(std::string_view s);
double score_of(const RecordScore& r, Setting s);

struct ScoredRecords {
  std::vector<RecordScore> scores;
  /// Records dropped because their summary is empty after normalization.
  std::vector<std::string> warnings;
};

ScoredRecords score_records(const WordTokenizer& tok, const std::vector<DatasetRecord>& records,
                            const DomainLexicon& lexicon);
ScoredRecords score_records(const Tokenizer& t, const std::vector<DatasetRecord>& records,
                            const DomainLexicon& lexicon);

struct EvalSlice {
  Setting setting = Setting::TestFull;
  std::vector<std::string> ids;
  double threshold = 0.0;
};

/// ceil(0.1 * n) for n >= 1.
std::size_t top_decile_size(std::size_t n);

/// Top ceil(10%) by the setting's score (descending, ties by ascending id);
/// threshold is the last member's score. TestFull returns every id in input order.
EvalSlice percentile_slice(const std::vector<RecordScore>& scores, Setting setting,
                           std::vector<std::string>* warnings = nullptr);

/// Every record whose score reaches an absolute threshold, in slice order.
EvalSlice threshold_slice(const std::vector<RecordScore>& scores, Setting setting, double threshold);

struct SubsetProfile {
  std::size_t count = 0;
  double difficult_rs = 0.0;
  double novel_rs = 0.0;
  /// Mean Rouge-L F1 between source and reference summary.
  double rouge_overlap = 0.0;
};

SubsetProfile subset_profile(const std::vector<DatasetRecord>& records, const std::vector<std::string>& subset_ids,
                             const WordTokenizer& tok, const DomainLexicon& lexicon);
SubsetProfile subset_profile(const std::vector<DatasetRecord>& records, const std::vector<std::string>& subset_ids,
                             const Tokenizer& t, const DomainLexicon& lexicon);

std::string serialize_slice(const EvalSlice& s, const std::string& config_hash = {});
EvalSlice parse_slice(std::string_view json_text);
std::string serialize_profile(const SubsetProfile& p, const std::string& config_hash = {});

}  // namespace vocabadapt
