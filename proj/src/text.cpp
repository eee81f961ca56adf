#include "vocabadapt/text.hpp"

#include <algorithm>

namespace vocabadapt::text {
namespace {

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

bool is_punct_word(std::string_view w) {
  for (const auto& ch : split_chars(w)) {
    if (!is_punct(ch)) return false;
  }
  return true;
}

}  // namespace

std::vector<std::string> split_chars(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t len = utf8_length(static_cast<unsigned char>(s[i]));
    if (i + len > s.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    out.emplace_back(s.substr(i, len));
    i += len;
  }
  return out;
}

std::size_t char_count(std::string_view s) {
  std::size_t n = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t len = utf8_length(static_cast<unsigned char>(s[i]));
    i += std::min(len, s.size() - i);
    ++n;
  }
  return n;
}

bool is_space(std::string_view ch) {
  if (ch.size() == 1) {
    const char c = ch[0];
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  }
  return ch == "\xC2\xA0";  // no-break space
}

bool is_digit(std::string_view ch) { return ch.size() == 1 && ch[0] >= '0' && ch[0] <= '9'; }

bool is_punct(std::string_view ch) {
  if (ch.size() != 1) return false;
  const unsigned char c = static_cast<unsigned char>(ch[0]);
  return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
         (c >= 0x7B && c <= 0x7E);
}

bool contains_digit(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::vector<std::string> pretokenize(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  };
  for (const auto& ch : split_chars(text)) {
    if (is_space(ch)) {
      flush();
    } else if (is_digit(ch) || is_punct(ch)) {
      flush();
      words.push_back(ch);
    } else {
      current += ch;
    }
  }
  flush();
  return words;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<std::string> normalized_words(std::string_view text) {
  std::vector<std::string> out;
  for (auto& w : pretokenize(text)) {
    if (!is_punct_word(w)) out.push_back(lower(w));
  }
  return out;
}

WordCounts count_words(std::string_view text) {
  WordCounts counts;
  for (auto& w : pretokenize(text)) {
    if (!is_punct_word(w)) ++counts[w];
  }
  return counts;
}

void add_counts(WordCounts& into, const WordCounts& from) {
  for (const auto& [w, c] : from) into[w] += c;
}

}  // namespace vocabadapt::text
