#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vocabadapt/text.hpp"

namespace vocabadapt {

using TokenId = std::uint32_t;

struct Merge {
  std::string left;
  std::string right;

  std::string joined() const { return left + right; }
  friend bool operator==(const Merge&, const Merge&) = default;
  friend auto operator<=>(const Merge&, const Merge&) = default;
};

struct TokenizationResult {
  std::vector<std::string> tokens;
  /// Number of tokens that carry word content. A standalone word-boundary
  /// marker (only AdaptBPE emits one) is not a subword of the word.
  std::size_t subword_count = 0;
  bool had_unknown_chars = false;
};

/// Vocabulary, ordered merge table and word-boundary marker of a BPE tokenizer.
///
/// Immutable after construction; every constructor path validates the
/// invariants (contiguous ids, merge targets present, no duplicate merges,
/// added tokens present). Extension methods return a new tokenizer.
class Tokenizer {
 public:
  Tokenizer(std::string marker, std::vector<std::string> id_to_token, std::vector<Merge> merges,
            std::vector<std::string> added = {});

  const std::string& marker() const { return marker_; }
  std::size_t size() const { return id_to_token_.size(); }
  std::span<const std::string> tokens() const { return id_to_token_; }
  std::span<const Merge> merges() const { return merges_; }
  std::span<const std::string> added() const { return added_; }

  bool contains(std::string_view token) const;
  std::optional<TokenId> id(std::string_view token) const;
  const std::string& token(TokenId id) const { return id_to_token_.at(id); }
  std::optional<std::size_t> merge_rank(std::string_view left, std::string_view right) const;
  bool is_added(std::string_view token) const;

  /// Initial symbols of a surface string: one per code point, with a leading
  /// marker glued to the following character.
  std::vector<std::string> initial_symbols(std::string_view surface) const;

  /// Runs the merge loop on a raw surface string (no marker is prepended).
  std::vector<std::string> segment(std::string_view surface) const;

  /// Prepends the marker and runs the merge loop.
  TokenizationResult tokenize_word(std::string_view word) const;
  std::vector<TokenizationResult> tokenize_text(std::string_view text) const;

  /// Wraps a symbol sequence for a word, counting unknown symbols and a bare marker.
  TokenizationResult make_result(std::vector<std::string> tokens) const;

  /// Returns a copy with new tokens appended (contiguous ids) and new merges
  /// appended after the existing ones. Tokens already present are skipped.
  /// When `record_added` is set, every listed token is also appended to `added`.
  Tokenizer extended(std::span<const std::string> new_tokens, std::span<const Merge> new_merges,
                     bool record_added) const;

  friend bool operator==(const Tokenizer& a, const Tokenizer& b) {
    return a.marker_ == b.marker_ && a.id_to_token_ == b.id_to_token_ && a.merges_ == b.merges_ &&
           a.added_ == b.added_;
  }

 private:
  struct PairHash {
    std::size_t operator()(const std::pair<std::string, std::string>& p) const noexcept;
  };

  std::string marker_;
  std::vector<std::string> id_to_token_;
  std::vector<Merge> merges_;
  std::vector<std::string> added_;
  std::unordered_map<std::string, TokenId> token_to_id_;
  std::unordered_map<std::pair<std::string, std::string>, std::size_t, PairHash> merge_rank_;
  std::unordered_map<std::string, std::size_t> added_index_;
};

/// Reads the JSON tokenizer format: {marker, vocab, merges, added}.
Tokenizer load_tokenizer(const std::filesystem::path& path);
Tokenizer parse_tokenizer(std::string_view json_text);

/// Byte-stable serialization; vocab is written in id order.
std::string serialize_tokenizer(const Tokenizer& t);
void save_tokenizer(const Tokenizer& t, const std::filesystem::path& path);

/// Greedy BPE trainer. Symbols containing a digit never take part in a merge.
///
/// Each step merges the adjacent pair with the highest count-weighted
/// frequency; ties go to the lexicographically smaller (left, right).
class BpeTrainer {
 public:
  BpeTrainer(const WordCounts& words, std::string marker);

  /// Performs one merge. Returns false when no pair is left.
  bool step();

  std::size_t vocab_size() const { return vocab_.size(); }
  std::size_t alphabet_size() const { return alphabet_size_; }
  const std::vector<Merge>& merges() const { return merges_; }
  /// Weighted pair count at the time each merge was learned.
  const std::vector<std::uint64_t>& merge_counts() const { return merge_counts_; }
  /// Tokens in id order: alphabet first, then one per merge that introduced a new string.
  const std::vector<std::string>& vocab() const { return vocab_; }

  Tokenizer tokenizer() const;

 private:
  struct Word {
    std::vector<std::string> symbols;
    std::uint64_t count;
  };

  std::string marker_;
  std::vector<Word> words_;
  std::vector<std::string> vocab_;
  std::size_t alphabet_size_ = 0;
  std::vector<Merge> merges_;
  std::vector<std::uint64_t> merge_counts_;
  std::unordered_map<std::string, TokenId> index_;
};

/// Trains up to `merge_budget` merges; stops early when no pair remains
/// (the returned tokenizer's merge count records what was actually done).
Tokenizer train_bpe(const WordCounts& words, std::size_t merge_budget, const std::string& marker);

}  // namespace vocabadapt
