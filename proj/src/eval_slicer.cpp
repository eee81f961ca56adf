#include "vocabadapt/eval_slicer.hpp"

#include <algorithm>
#include <unordered_map>

#include <json.hpp>

#include "vocabadapt/error.hpp"
#include "vocabadapt/rouge.hpp"

namespace vocabadapt {

std::string to_string(Setting s) {
  switch (s) {
    case Setting::DifficultSD:
      return "Difficult_SD";
    case Setting::DifficultRS:
      return "Difficult_RS";
    case Setting::NovelRS:
      return "Novel_RS";
    case Setting::AllSD:
      return "All_SD";
    case Setting::AllRS:
      return "All_RS";
    case Setting::TestFull:
      return "Test_Full";
  }
  return "?";
}

Setting parse_setting(std::string_view s) {
  for (Setting k : {Setting::DifficultSD, Setting::DifficultRS, Setting::NovelRS, Setting::AllSD, Setting::AllRS,
                    Setting::TestFull}) {
    if (to_string(k) == s) return k;
  }
  throw DataError("unknown evaluation setting \"" + std::string(s) + "\"");
}

double score_of(const RecordScore& r, Setting s) {
  switch (s) {
    case Setting::DifficultSD:
      return r.difficult_sd;
    case Setting::DifficultRS:
      return r.difficult_rs;
    case Setting::NovelRS:
      return r.novel_rs;
    case Setting::AllSD:
      return r.all_sd;
    case Setting::AllRS:
      return r.all_rs;
    case Setting::TestFull:
      return 0.0;
  }
  return 0.0;
}

ScoredRecords score_records(const WordTokenizer& tok, const std::vector<DatasetRecord>& records,
                            const DomainLexicon& lexicon) {
  if (records.empty()) throw DataError("score_records: no records");
  ScoredRecords out;
  for (const auto& r : records) {
    RecordScore s;
    s.id = r.id;
    try {
      s.novel_rs = novelty_fraction(r);
    } catch (const DataError& e) {
      out.warnings.push_back(std::string(e.what()) + "; record excluded");
      continue;
    }
    const OovTally sd = oov_tally(tok, r.source, lexicon);
    const OovTally rs = oov_tally(tok, r.summary, lexicon);
    s.all_sd = sd.gt1();
    s.difficult_sd = sd.gt3();
    s.all_rs = rs.gt1();
    s.difficult_rs = rs.gt3();
    out.scores.push_back(std::move(s));
  }
  return out;
}

ScoredRecords score_records(const Tokenizer& t, const std::vector<DatasetRecord>& records,
                            const DomainLexicon& lexicon) {
  return score_records(bpe_tokenizer(t), records, lexicon);
}

std::size_t top_decile_size(std::size_t n) { return (n + 9) / 10; }

namespace {

std::vector<const RecordScore*> ranked(const std::vector<RecordScore>& scores, Setting setting) {
  std::vector<const RecordScore*> order;
  order.reserve(scores.size());
  for (const auto& s : scores) order.push_back(&s);
  std::sort(order.begin(), order.end(), [setting](const RecordScore* a, const RecordScore* b) {
    const double sa = score_of(*a, setting);
    const double sb = score_of(*b, setting);
    return sa != sb ? sa > sb : a->id < b->id;
  });
  return order;
}

}  // namespace

EvalSlice percentile_slice(const std::vector<RecordScore>& scores, Setting setting, std::vector<std::string>* warnings) {
  if (scores.empty()) throw DataError("percentile_slice: no scored records");
  EvalSlice slice;
  slice.setting = setting;
  if (setting == Setting::TestFull) {
    for (const auto& s : scores) slice.ids.push_back(s.id);
    return slice;
  }
  if (scores.size() < 10 && warnings) {
    warnings->push_back("only " + std::to_string(scores.size()) + " records; " + to_string(setting) +
                        " slice has a single member");
  }
  const auto order = ranked(scores, setting);
  const std::size_t k = top_decile_size(scores.size());
  for (std::size_t i = 0; i < k; ++i) slice.ids.push_back(order[i]->id);
  slice.threshold = score_of(*order[k - 1], setting);
  return slice;
}

EvalSlice threshold_slice(const std::vector<RecordScore>& scores, Setting setting, double threshold) {
  if (scores.empty()) throw DataError("threshold_slice: no scored records");
  EvalSlice slice;
  slice.setting = setting;
  slice.threshold = threshold;
  for (const auto* s : ranked(scores, setting)) {
    if (score_of(*s, setting) >= threshold) slice.ids.push_back(s->id);
  }
  return slice;
}

SubsetProfile subset_profile(const std::vector<DatasetRecord>& records, const std::vector<std::string>& subset_ids,
                             const WordTokenizer& tok, const DomainLexicon& lexicon) {
  if (subset_ids.empty()) throw DataError("subset_profile: empty subset");
  std::unordered_map<std::string, const DatasetRecord*> by_id;
  for (const auto& r : records) by_id.emplace(r.id, &r);
  SubsetProfile p;
  for (const auto& id : subset_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw DataError("subset_profile: unknown record id " + id);
    const DatasetRecord& r = *it->second;
    p.difficult_rs += oov_tally(tok, r.summary, lexicon).gt3();
    p.novel_rs += novelty_fraction(r);
    p.rouge_overlap += rouge_l_f(r.summary, r.source).f1;
    ++p.count;
  }
  const auto n = static_cast<double>(p.count);
  p.difficult_rs /= n;
  p.novel_rs /= n;
  p.rouge_overlap /= n;
  return p;
}

SubsetProfile subset_profile(const std::vector<DatasetRecord>& records, const std::vector<std::string>& subset_ids,
                             const Tokenizer& t, const DomainLexicon& lexicon) {
  return subset_profile(records, subset_ids, bpe_tokenizer(t), lexicon);
}

std::string serialize_slice(const EvalSlice& s, const std::string& config_hash) {
  nlohmann::ordered_json j;
  j["setting"] = to_string(s.setting);
  j["threshold"] = s.threshold;
  j["ids"] = s.ids;
  if (!config_hash.empty()) j["config_hash"] = config_hash;
  return j.dump(2) + "\n";
}

EvalSlice parse_slice(std::string_view json_text) {
  try {
    const auto j = nlohmann::json::parse(json_text);
    EvalSlice s;
    s.setting = parse_setting(j.at("setting").get<std::string>());
    s.threshold = j.at("threshold").get<double>();
    s.ids = j.at("ids").get<std::vector<std::string>>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("slice file: ") + e.what());
  }
}

std::string serialize_profile(const SubsetProfile& p, const std::string& config_hash) {
  nlohmann::ordered_json j;
  j["count"] = p.count;
  j["difficult_rs_concentration"] = p.difficult_rs;
  j["novel_rs_concentration"] = p.novel_rs;
  j["rouge_lcs_source_reference"] = p.rouge_overlap;
  if (!config_hash.empty()) j["config_hash"] = config_hash;
  return j.dump(2) + "\n";
}

}  // namespace vocabadapt
