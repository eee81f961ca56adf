#include "vocabadapt/rouge.hpp"

#include "vocabadapt/error.hpp"
#include "vocabadapt/text.hpp"

namespace vocabadapt {

RougeScore rouge_l(const std::vector<std::string>& reference, const std::vector<std::string>& hypothesis) {
  if (reference.empty() || hypothesis.empty()) throw DataError("rouge_l: empty token sequence");
  RougeScore s;
  s.lcs_len = lcs_length(reference, hypothesis);
  if (s.lcs_len == 0) return s;
  s.precision = static_cast<double>(s.lcs_len) / static_cast<double>(hypothesis.size());
  s.recall = static_cast<double>(s.lcs_len) / static_cast<double>(reference.size());
  s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

RougeScore rouge_l_f(std::string_view reference, std::string_view hypothesis) {
  const auto ref = text::normalized_words(reference);
  const auto hyp = text::normalized_words(hypothesis);
  if (ref.empty()) throw DataError("rouge_l_f: empty reference");
  if (hyp.empty()) throw DataError("rouge_l_f: empty hypothesis");
  return rouge_l(ref, hyp);
}

}  // namespace vocabadapt
