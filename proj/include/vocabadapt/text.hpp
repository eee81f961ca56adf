#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace vocabadapt {

/// Occurrence counts keyed by word. Ordered so every derived artifact is deterministic.
using WordCounts = std::map<std::string, std::uint64_t, std::less<>>;

namespace text {

/// Splits a UTF-8 string into code points, each returned as its own UTF-8 string.
/// Invalid bytes are passed through one byte at a time.
std::vector<std::string> split_chars(std::string_view s);

/// Number of code points in a UTF-8 string.
std::size_t char_count(std::string_view s);

bool is_space(std::string_view ch);
bool is_digit(std::string_view ch);
bool is_punct(std::string_view ch);
bool contains_digit(std::string_view s);

/// Whitespace split, then every ASCII digit and every ASCII punctuation
/// character becomes a word of its own. Case is preserved.
std::vector<std::string> pretokenize(std::string_view text);

/// ASCII lowercase; other code points are left untouched.
std::string lower(std::string_view s);

/// Pretokenized words with punctuation-only pieces dropped, lowercased.
/// This is the one word notion shared by novelty, lexicon lookup and Rouge-L.
std::vector<std::string> normalized_words(std::string_view text);

/// Counts of pretokenized, non-punctuation words (case preserved).
WordCounts count_words(std::string_view text);
void add_counts(WordCounts& into, const WordCounts& from);

}  // namespace text
}  // namespace vocabadapt
