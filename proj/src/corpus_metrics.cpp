#include "vocabadapt/corpus_metrics.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "vocabadapt/error.hpp"

namespace vocabadapt {
namespace {

bool punct_only(std::string_view w) {
  for (const auto& ch : text::split_chars(w)) {
    if (!text::is_punct(ch)) return false;
  }
  return true;
}

}  // namespace

WordTokenizer bpe_tokenizer(const Tokenizer& t) {
  return [&t](std::string_view w) { return t.tokenize_word(w); };
}

DomainLexicon::DomainLexicon(const std::vector<std::string>& words) {
  for (const auto& w : words) {
    if (w.empty()) continue;
    for (const auto& ch : text::split_chars(w)) {
      if (text::is_space(ch)) throw DataError("lexicon entry contains whitespace: \"" + w + "\"");
    }
    words_.insert(text::lower(w));
  }
}

bool DomainLexicon::contains(std::string_view word) const { return words_.contains(text::lower(word)); }

DomainLexicon DomainLexicon::from_corpus(const std::vector<std::string>& domain_texts,
                                         const std::vector<std::string>& general_words) {
  std::unordered_set<std::string> general;
  for (const auto& g : general_words) general.insert(text::lower(g));
  std::vector<std::string> words;
  for (const auto& doc : domain_texts) {
    for (auto& w : text::normalized_words(doc)) {
      if (text::contains_digit(w) || general.contains(w)) continue;
      words.push_back(std::move(w));
    }
  }
  return DomainLexicon(words);
}

double fragment_score(const WordTokenizer& tok, const WordCounts& words) {
  std::uint64_t total = 0;
  std::uint64_t pieces = 0;
  for (const auto& [w, c] : words) {
    total += c;
    pieces += c * tok(w).subword_count;
  }
  if (total == 0) throw DataError("empty corpus");
  return static_cast<double>(pieces) / static_cast<double>(total);
}

double fragment_score(const Tokenizer& t, const WordCounts& words) { return fragment_score(bpe_tokenizer(t), words); }

double split_gt_fraction(const WordTokenizer& tok, const WordCounts& words, std::size_t k) {
  std::uint64_t total = 0;
  std::uint64_t split = 0;
  for (const auto& [w, c] : words) {
    total += c;
    if (tok(w).subword_count > k) split += c;
  }
  if (total == 0) throw DataError("empty corpus");
  return static_cast<double>(split) / static_cast<double>(total);
}

double split_gt_fraction(const Tokenizer& t, const WordCounts& words, std::size_t k) {
  return split_gt_fraction(bpe_tokenizer(t), words, k);
}

CorpusStats corpus_stats(const WordTokenizer& tok, const WordCounts& words) {
  CorpusStats s;
  std::uint64_t pieces = 0;
  std::uint64_t gt1 = 0;
  std::uint64_t gt3 = 0;
  for (const auto& [w, c] : words) {
    const std::size_t n = tok(w).subword_count;
    s.word_count += c;
    pieces += c * n;
    if (n > 1) {
      gt1 += c;
      s.oov_words.push_back({w, n, c});
    }
    if (n > 3) gt3 += c;
  }
  s.subword_total = pieces;
  if (s.word_count == 0) return s;
  const auto total = static_cast<double>(s.word_count);
  s.fragment_score = static_cast<double>(pieces) / total;
  s.split_gt1_fraction = static_cast<double>(gt1) / total;
  s.split_gt3_fraction = static_cast<double>(gt3) / total;
  return s;
}

std::vector<OovWord> oov_words(const WordTokenizer& tok, std::string_view text, const DomainLexicon& lexicon,
                               bool difficult) {
  const std::size_t threshold = difficult ? 3 : 1;
  std::vector<OovWord> out;
  std::unordered_map<std::string, std::size_t> position;
  for (const auto& w : text::pretokenize(text)) {
    if (punct_only(w)) continue;
    std::string key = text::lower(w);
    if (!lexicon.contains(key)) continue;
    const std::size_t n = tok(w).subword_count;
    if (n <= threshold) continue;
    auto [it, inserted] = position.emplace(key, out.size());
    if (inserted) {
      out.push_back({std::move(key), n, 1});
    } else {
      ++out[it->second].occurrences;
    }
  }
  return out;
}

std::vector<OovWord> oov_words(const Tokenizer& t, std::string_view text, const DomainLexicon& lexicon,
                               bool difficult) {
  return oov_words(bpe_tokenizer(t), text, lexicon, difficult);
}

double novelty_fraction(const DatasetRecord& r) {
  const auto summary = text::normalized_words(r.summary);
  if (summary.empty()) throw DataError("record " + r.id + ": summary is empty after normalization");
  const auto source_words = text::normalized_words(r.source);
  const std::unordered_set<std::string> source(source_words.begin(), source_words.end());
  const std::unordered_set<std::string> unique(summary.begin(), summary.end());
  std::size_t novel = 0;
  for (const auto& w : unique) {
    if (!source.contains(w)) ++novel;
  }
  return static_cast<double>(novel) / static_cast<double>(unique.size());
}

OovTally oov_tally(const WordTokenizer& tok, std::string_view text, const DomainLexicon& lexicon) {
  OovTally tally;
  for (const auto& w : text::pretokenize(text)) {
    if (punct_only(w)) continue;
    ++tally.words;
    if (!lexicon.contains(w)) continue;
    const std::size_t n = tok(w).subword_count;
    if (n > 1) ++tally.split_gt1;
    if (n > 3) ++tally.split_gt3;
  }
  return tally;
}

CorpusReport corpus_report(const WordTokenizer& tok, const std::vector<DatasetRecord>& records,
                           const DomainLexicon& lexicon) {
  if (records.empty()) throw DataError("corpus_report: empty record list");
  CorpusReport report;
  report.record_count = records.size();
  WordCounts source_words;
  WordCounts summary_words;
  double novelty_sum = 0.0;
  std::size_t novelty_n = 0;
  for (const auto& r : records) {
    text::add_counts(source_words, text::count_words(r.source));
    text::add_counts(summary_words, text::count_words(r.summary));
    report.source.oov += oov_tally(tok, r.source, lexicon);
    report.summary.oov += oov_tally(tok, r.summary, lexicon);
    try {
      novelty_sum += novelty_fraction(r);
      ++novelty_n;
    } catch (const DataError& e) {
      report.warnings.emplace_back(e.what());
    }
  }
  report.source.stats = corpus_stats(tok, source_words);
  report.summary.stats = corpus_stats(tok, summary_words);
  report.mean_novelty = novelty_n == 0 ? 0.0 : novelty_sum / static_cast<double>(novelty_n);
  report.mean_summary_tokens =
      static_cast<double>(report.summary.stats.subword_total) / static_cast<double>(records.size());
  return report;
}

CorpusReport corpus_report(const Tokenizer& t, const std::vector<DatasetRecord>& records,
                           const DomainLexicon& lexicon) {
  return corpus_report(bpe_tokenizer(t), records, lexicon);
}

// --- file formats ------------------------------------------------------------

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<DatasetRecord> parse_dataset(std::string_view jsonl) {
  std::vector<DatasetRecord> records;
  std::unordered_set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= jsonl.size()) {
    std::size_t end = jsonl.find('\n', start);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "dataset line " + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(where + ": " + e.what());
    }
    if (!j.is_object()) throw DataError(where + ": expected a JSON object");
    auto field = [&](const char* key, bool required) -> std::string {
      if (!j.contains(key)) {
        if (required) throw DataError(where + ": missing key \"" + key + "\"");
        return {};
      }
      if (!j[key].is_string()) throw DataError(where + ": \"" + key + "\" must be a string");
      return j[key].get<std::string>();
    };
    DatasetRecord r{field("id", true), field("query", false), field("source", true), field("summary", true)};
    if (r.source.empty()) throw DataError(where + ": empty source for id " + r.id);
    if (r.summary.empty()) throw DataError(where + ": empty summary for id " + r.id);
    if (!ids.insert(r.id).second) throw DataError(where + ": duplicate id " + r.id);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path) {
  try {
    return parse_dataset(read_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void save_dataset(const std::vector<DatasetRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["query"] = r.query;
    j["source"] = r.source;
    j["summary"] = r.summary;
    out << j.dump() << '\n';
  }
}

std::vector<std::string> load_wordlist(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(b, e - b + 1));
  }
  return out;
}

DomainLexicon load_lexicon(const std::filesystem::path& path) {
  try {
    return DomainLexicon(load_wordlist(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace vocabadapt
