#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>

#include "vocabadapt/corpus_metrics.hpp"
#include "vocabadapt/tokenizer.hpp"

namespace vocabadapt {

/// Exact-string index over an added vocabulary, queried for the longest
/// entry occurring inside a string.
class MatchIndex {
 public:
  MatchIndex() = default;
  explicit MatchIndex(std::span<const std::string> entries);

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  /// Length in code points of the longest entry.
  std::size_t max_len() const { return max_len_; }
  bool contains(std::string_view s) const { return entries_.contains(std::string(s)); }

 private:
  std::unordered_set<std::string> entries_;
  std::size_t max_len_ = 0;
};

/// Position and length of a match, both in code points.
struct Match {
  std::size_t start;
  std::size_t length;

  friend bool operator==(const Match&, const Match&) = default;
};

/// Longest substring of `s` that is an entry; leftmost among equal lengths.
std::optional<Match> longest_match(const MatchIndex& idx, std::string_view s);

/// AdaptBPE: keep longest added-vocabulary matches whole, BPE the rest.
///
/// The marker is prepended but never consumed by a match, so a word that
/// starts with a match yields a standalone marker token first.
TokenizationResult adaptbpe_tokenize(const Tokenizer& t, const MatchIndex& idx, std::string_view word);

/// Builds the index from `t.added()`.
MatchIndex added_index(const Tokenizer& t);

/// Word tokenizer closure; `t` and `idx` must outlive it.
WordTokenizer adaptbpe_tokenizer(const Tokenizer& t, const MatchIndex& idx);

}  // namespace vocabadapt
