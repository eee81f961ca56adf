#include "vocabadapt/adapt_bpe.hpp"

#include <algorithm>
#include <vector>

#include "vocabadapt/error.hpp"

namespace vocabadapt {
namespace {

std::string join(const std::vector<std::string>& chars, std::size_t lo, std::size_t hi) {
  std::string out;
  for (std::size_t i = lo; i < hi; ++i) out += chars[i];
  return out;
}

std::optional<Match> longest_match_in(const MatchIndex& idx, const std::vector<std::string>& chars,
                                      std::size_t lo, std::size_t hi) {
  const std::size_t n = hi - lo;
  for (std::size_t len = std::min(idx.max_len(), n); len > 0; --len) {
    for (std::size_t start = lo; start + len <= hi; ++start) {
      if (idx.contains(join(chars, start, start + len))) return Match{start, len};
    }
  }
  return std::nullopt;
}

void adapt(const Tokenizer& t, const MatchIndex& idx, const std::vector<std::string>& chars, std::size_t lo,
           std::size_t hi, bool leading_marker, std::vector<std::string>& out) {
  auto m = longest_match_in(idx, chars, lo, hi);
  if (!m) {
    if (lo == hi && !leading_marker) return;
    const std::string surface = (leading_marker ? t.marker() : std::string()) + join(chars, lo, hi);
    if (surface.empty()) return;
    for (auto& s : t.segment(surface)) out.push_back(std::move(s));
    return;
  }
  if (lo < m->start || (leading_marker && !t.marker().empty())) {
    adapt(t, idx, chars, lo, m->start, leading_marker, out);
  }
  out.push_back(join(chars, m->start, m->start + m->length));
  if (m->start + m->length < hi) adapt(t, idx, chars, m->start + m->length, hi, false, out);
}

}  // namespace

MatchIndex::MatchIndex(std::span<const std::string> entries) {
  for (const auto& e : entries) {
    if (e.empty()) continue;
    entries_.insert(e);
    max_len_ = std::max(max_len_, text::char_count(e));
  }
}

std::optional<Match> longest_match(const MatchIndex& idx, std::string_view s) {
  const auto chars = text::split_chars(s);
  return longest_match_in(idx, chars, 0, chars.size());
}

TokenizationResult adaptbpe_tokenize(const Tokenizer& t, const MatchIndex& idx, std::string_view word) {
  if (word.empty()) throw DataError("adaptbpe_tokenize: empty word");
  if (idx.empty()) return t.tokenize_word(word);
  const auto chars = text::split_chars(word);
  std::vector<std::string> out;
  adapt(t, idx, chars, 0, chars.size(), true, out);
  return t.make_result(std::move(out));
}

MatchIndex added_index(const Tokenizer& t) { return MatchIndex(t.added()); }

WordTokenizer adaptbpe_tokenizer(const Tokenizer& t, const MatchIndex& idx) {
  return [&t, &idx](std::string_view w) { return adaptbpe_tokenize(t, idx, w); };
}

}  // namespace vocabadapt
