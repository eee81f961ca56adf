#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace vocabadapt {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t lcs_len = 0;
};

/// Longest common subsequence length, O(|a|·|b|) time and O(|b|) memory.
template <typename Seq>
std::size_t lcs_length(const Seq& a, const Seq& b) {
  std::vector<std::size_t> row(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = 0;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = a[i - 1] == b[j - 1] ? diag + 1 : std::max(row[j], row[j - 1]);
      diag = up;
    }
  }
  return row[b.size()];
}

/// Sentence-level Rouge-L with beta = 1 over pre-split tokens.
RougeScore rouge_l(const std::vector<std::string>& reference, const std::vector<std::string>& hypothesis);

/// Rouge-L over normalized words (lowercased, punctuation stripped).
/// Throws DataError if either side has no words.
RougeScore rouge_l_f(std::string_view reference, std::string_view hypothesis);

}  // namespace vocabadapt
