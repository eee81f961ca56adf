#include "vocabadapt/vocab_adapt.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "vocabadapt/adapt_bpe.hpp"
#include "vocabadapt/error.hpp"

namespace vocabadapt {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Medvoc:
      return "MEDVOC";
    case Strategy::MedvocLlm:
      return "MEDVOC_LLM";
    case Strategy::Scaffix:
      return "SCAFFIX";
  }
  return "?";
}

Strategy parse_strategy(std::string_view s) {
  std::string key;
  for (char c : s) key += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (key == "MEDVOC") return Strategy::Medvoc;
  if (key == "MEDVOC_LLM") return Strategy::MedvocLlm;
  if (key == "SCAFFIX") return Strategy::Scaffix;
  throw ConfigError("unknown strategy \"" + std::string(s) + "\" (expected medvoc, medvoc_llm or scaffix)");
}

std::vector<std::string> AddedVocabulary::targets() const {
  const std::set<std::string> scaffolds(scaffold_tokens.begin(), scaffold_tokens.end());
  std::vector<std::string> out;
  for (const auto& tok : tokens) {
    if (!scaffolds.contains(tok)) out.push_back(tok);
  }
  return out;
}

WordCounts extract_candidate_words(const Tokenizer& t, const WordCounts& corpus, const DomainLexicon& lexicon) {
  if (corpus.empty()) throw DataError("extract_candidate_words: empty corpus");
  WordCounts lowered;
  for (const auto& [w, c] : corpus) {
    if (lexicon.contains(w)) lowered[text::lower(w)] += c;
  }
  WordCounts out;
  for (const auto& [w, c] : lowered) {
    if (t.tokenize_word(w).subword_count > 1) out.emplace(w, c);
  }
  if (out.empty()) throw DataError("nothing to adapt: no lexicon word is split by the tokenizer");
  return out;
}

std::vector<CandidateVocab> build_candidate_vocab(const WordCounts& words, const std::vector<std::size_t>& sizes,
                                                  const std::string& marker, CandidateSource source) {
  if (sizes.empty()) throw ConfigError("size grid is empty");
  if (!std::is_sorted(sizes.begin(), sizes.end()) ||
      std::adjacent_find(sizes.begin(), sizes.end()) != sizes.end()) {
    throw ConfigError("size grid must be strictly ascending");
  }
  BpeTrainer trainer(words, marker);
  if (sizes.front() <= trainer.alphabet_size()) {
    throw ConfigError("size " + std::to_string(sizes.front()) + " does not exceed the " +
                      std::to_string(trainer.alphabet_size()) + "-symbol alphabet");
  }
  std::vector<CandidateVocab> out;
  bool exhausted = false;
  std::size_t merges_seen = 0;
  std::vector<std::pair<std::string, std::uint64_t>> learned;
  std::set<std::string> learned_set;
  for (std::size_t size : sizes) {
    while (!exhausted && trainer.vocab_size() < size) exhausted = !trainer.step();
    for (; merges_seen < trainer.merges().size(); ++merges_seen) {
      std::string tok = trainer.merges()[merges_seen].joined();
      if (learned_set.insert(tok).second) learned.emplace_back(std::move(tok), trainer.merge_counts()[merges_seen]);
    }
    out.push_back({learned, source, size, trainer.vocab_size()});
  }
  return out;
}

std::size_t select_in_neighborhood(const std::vector<GridEntry>& grid, double tolerance) {
  if (grid.empty()) throw DataError("empty search grid");
  if (tolerance < 0.0) throw ConfigError("tolerance must be >= 0");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : grid) best = std::min(best, g.utility);
  const double bound = (1.0 + tolerance) * best;
  std::size_t chosen = grid.size();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i].utility > bound) continue;
    if (chosen == grid.size() || grid[i].size < grid[chosen].size ||
        (grid[i].size == grid[chosen].size && grid[i].utility < grid[chosen].utility)) {
      chosen = i;
    }
  }
  return chosen;
}

SearchResult medvoc_search(const Tokenizer& t, const std::vector<CandidateVocab>& pac,
                           const std::vector<CandidateVocab>& tgt, const WordCounts& eval_words, double tolerance) {
  if (pac.empty() || tgt.empty()) throw DataError("medvoc_search: candidate grids must be non-empty");
  if (eval_words.empty()) throw DataError("medvoc_search: empty evaluation corpus");
  SearchResult result;
  std::vector<std::vector<std::string>> configs;
  for (const auto& p : pac) {
    std::unordered_set<std::string> pac_tokens;
    for (const auto& [tok, f] : p.tokens) pac_tokens.insert(tok);
    for (const auto& g : tgt) {
      std::vector<std::string> both;
      for (const auto& [tok, f] : g.tokens) {
        if (pac_tokens.contains(tok)) both.push_back(tok);
      }
      const std::string config = "pac=" + std::to_string(p.config_size) + ",tgt=" + std::to_string(g.config_size);
      if (both.empty()) {
        result.warnings.push_back(config + ": empty intersection, skipped");
        continue;
      }
      const Tokenizer extended = apply_added_vocab(t, plan_added_vocab(t, both, Strategy::Medvoc));
      result.grid.push_back({config, fragment_score(extended, eval_words), both.size()});
      configs.push_back(std::move(both));
    }
  }
  if (result.grid.empty()) throw DataError("medvoc_search: every PAC/TGT intersection is empty");
  const std::size_t i = select_in_neighborhood(result.grid, tolerance);
  result.tokens = configs[i];
  result.config = result.grid[i].config;
  result.utility = result.grid[i].utility;
  result.size = result.grid[i].size;
  return result;
}

std::vector<std::string> medvoc_llm_clean(const std::vector<std::string>& tokens,
                                          const std::vector<std::string>& train_summaries, const std::string& marker) {
  if (train_summaries.empty()) throw DataError("medvoc_llm_clean: no training summaries");
  std::unordered_set<std::string> summary_words;
  for (const auto& s : train_summaries) {
    for (auto& w : text::normalized_words(s)) summary_words.insert(std::move(w));
  }
  std::vector<std::string> kept;
  for (const auto& tok : tokens) {
    std::string_view surface = tok;
    if (!marker.empty() && surface.starts_with(marker)) surface.remove_prefix(marker.size());
    const auto chars = text::split_chars(surface);
    if (chars.empty()) continue;
    const bool mixed = chars.size() > 1 && std::any_of(chars.begin(), chars.end(), [](const std::string& c) {
                         return text::is_digit(c) || text::is_punct(c);
                       });
    if (mixed) continue;
    if (!summary_words.contains(text::lower(surface))) continue;
    kept.push_back(tok);
  }
  if (kept.empty()) throw DataError("cleaned vocabulary empty");
  return kept;
}

std::vector<std::size_t> default_quota_grid() {
  std::vector<std::size_t> grid;
  for (std::size_t q = 50; q <= 500; q += 50) grid.push_back(q);
  return grid;
}

SearchResult scaffix_select(const WordCounts& words, const std::vector<std::size_t>& quota_grid, const Tokenizer& t,
                            const WordCounts& eval_words, double tolerance) {
  if (words.empty()) throw DataError("scaffix_select: no candidate words");
  if (quota_grid.empty()) throw ConfigError("quota grid is empty");
  if (eval_words.empty()) throw DataError("scaffix_select: empty evaluation corpus");
  std::vector<std::pair<std::string, std::uint64_t>> ranked(words.begin(), words.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  SearchResult result;
  std::vector<std::vector<std::string>> configs;
  for (std::size_t quota : quota_grid) {
    if (quota == 0) throw ConfigError("quota must be positive");
    if (quota > ranked.size()) {
      result.warnings.push_back("quota " + std::to_string(quota) + " exceeds " + std::to_string(ranked.size()) +
                                " distinct words; using all");
    }
    std::vector<std::string> top;
    for (std::size_t i = 0; i < std::min(quota, ranked.size()); ++i) top.push_back(ranked[i].first);
    const Tokenizer extended = t.extended(top, {}, true);
    const MatchIndex idx = added_index(extended);
    const double utility = fragment_score(adaptbpe_tokenizer(extended, idx), eval_words);
    result.grid.push_back({"quota=" + std::to_string(quota), utility, top.size()});
    configs.push_back(std::move(top));
  }
  const std::size_t i = select_in_neighborhood(result.grid, tolerance);
  result.tokens = configs[i];
  result.config = result.grid[i].config;
  result.utility = result.grid[i].utility;
  result.size = result.grid[i].size;
  return result;
}

Synthesis synthesize_merges(const Tokenizer& t, std::string_view target) {
  if (target.empty()) throw DataError("synthesize_merges: empty target");
  const auto pieces = t.segment(target);
  if (pieces.size() <= 1) return {};
  if (text::contains_digit(target)) {
    throw DataError("cannot synthesize merges for \"" + std::string(target) + "\": digits are never merged");
  }
  Synthesis s;
  std::map<std::pair<std::string, std::string>, std::size_t> added;
  auto rank_of = [&](const std::string& l, const std::string& r) -> std::optional<std::size_t> {
    if (auto old = t.merge_rank(l, r)) return old;
    auto it = added.find({l, r});
    if (it == added.end()) return std::nullopt;
    return t.merges().size() + it->second;
  };
  // Merge loop of the extended tokenizer, started from the base fixpoint.
  auto run = [&] {
    std::vector<std::string> cur = pieces;
    while (cur.size() > 1) {
      std::size_t best = cur.size();
      std::size_t best_rank = 0;
      for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
        const auto r = rank_of(cur[i], cur[i + 1]);
        if (r && (best == cur.size() || *r < best_rank)) {
          best = i;
          best_rank = *r;
        }
      }
      if (best == cur.size()) break;
      cur[best] += cur[best + 1];
      cur.erase(cur.begin() + static_cast<std::ptrdiff_t>(best) + 1);
    }
    return cur;
  };
  // Left-to-right chain, one merge at a time: each step joins the first two
  // pieces of the current segmentation, which also covers merges that fire
  // at more than one position.
  for (auto cur = pieces; cur.size() > 1; cur = run()) {
    added.emplace(std::pair{cur[0], cur[1]}, added.size());
    s.new_merges.push_back({cur[0], cur[1]});
    std::string next = cur[0] + cur[1];
    if (!t.contains(next) && std::find(s.new_tokens.begin(), s.new_tokens.end(), next) == s.new_tokens.end()) {
      s.new_tokens.push_back(std::move(next));
    }
  }
  return s;
}

namespace {

struct Extension {
  Tokenizer tokenizer;
  AddedVocabulary plan;
};

Extension extend_with_targets(const Tokenizer& t, const std::vector<std::string>& targets, Strategy strategy,
                              std::vector<std::string>* warnings) {
  auto warn = [&](std::string msg) {
    if (warnings) warnings->push_back(std::move(msg));
  };
  AddedVocabulary plan;
  plan.strategy = strategy;
  std::set<std::string> seen;
  std::vector<std::string> unique;
  for (const auto& tok : targets) {
    if (tok.empty()) continue;
    if (seen.insert(tok).second) {
      unique.push_back(tok);
    } else {
      warn("duplicate token \"" + tok + "\" skipped");
    }
  }

  if (strategy == Strategy::Scaffix) {
    std::vector<std::string> fresh;
    for (const auto& tok : unique) {
      if (t.is_added(tok)) {
        warn("token \"" + tok + "\" already added, skipped");
        continue;
      }
      if (t.contains(tok)) warn("token \"" + tok + "\" already in vocab; reusing its id");
      fresh.push_back(tok);
    }
    plan.tokens = fresh;
    return {t.extended(fresh, {}, true), std::move(plan)};
  }

  const std::set<std::string> target_set(unique.begin(), unique.end());
  Tokenizer current = t;
  for (const auto& target : unique) {
    Synthesis s;
    try {
      s = synthesize_merges(current, target);
    } catch (const DataError& e) {
      warn(std::string(e.what()) + ", skipped");
      continue;
    }
    if (s.new_tokens.empty() && s.new_merges.empty()) {
      warn("token \"" + target + "\" is already a single token, skipped");
      continue;
    }
    current = current.extended(s.new_tokens, s.new_merges, true);
    if (current.segment(target).size() != 1) {
      throw InvariantError("merge synthesis did not make \"" + target + "\" a single token");
    }
    for (auto& tok : s.new_tokens) {
      if (!target_set.contains(tok)) plan.scaffold_tokens.push_back(tok);
      plan.tokens.push_back(std::move(tok));
    }
    for (auto& m : s.new_merges) plan.synthesized_merges.push_back(std::move(m));
  }
  return {std::move(current), std::move(plan)};
}

}  // namespace

AddedVocabulary plan_added_vocab(const Tokenizer& t, const std::vector<std::string>& targets, Strategy strategy,
                                 std::vector<std::string>* warnings) {
  return extend_with_targets(t, targets, strategy, warnings).plan;
}

Tokenizer apply_added_vocab(const Tokenizer& t, const AddedVocabulary& v, std::vector<std::string>* warnings) {
  if (v.strategy == Strategy::Scaffix && (!v.scaffold_tokens.empty() || !v.synthesized_merges.empty())) {
    throw DataError("SCAFFIX added vocabulary must not carry scaffolds or merges");
  }
  return extend_with_targets(t, v.targets(), v.strategy, warnings).tokenizer;
}

ScaffoldStats scaffolding_stats(const Tokenizer& t, const std::vector<std::string>& targets) {
  const std::set<std::string> target_set(targets.begin(), targets.end());
  std::set<std::string> scaffolds;
  for (const auto& target : target_set) {
    for (const auto& tok : synthesize_merges(t, target).new_tokens) {
      if (!target_set.contains(tok)) scaffolds.insert(tok);
    }
  }
  ScaffoldStats s;
  s.scaffold_count = scaffolds.size();
  const std::size_t denom = s.scaffold_count + target_set.size();
  s.overhead_fraction = denom == 0 ? 0.0 : static_cast<double>(s.scaffold_count) / static_cast<double>(denom);
  return s;
}

StrategyOutcome run_strategy(const Tokenizer& t, const StrategyInputs& in) {
  StrategyOutcome out;
  const WordCounts tgt_words = extract_candidate_words(t, in.tgt_corpus, in.lexicon);
  out.eval_words = tgt_words;
  if (in.strategy == Strategy::Scaffix) {
    out.search = scaffix_select(tgt_words, in.quota_grid.empty() ? default_quota_grid() : in.quota_grid, t,
                                out.eval_words, in.tolerance);
    out.added = plan_added_vocab(t, out.search.tokens, Strategy::Scaffix, &out.search.warnings);
    return out;
  }
  if (in.pac_corpus.empty()) throw ConfigError("MEDVOC strategies need a PAC corpus");
  const WordCounts pac_words = extract_candidate_words(t, in.pac_corpus, in.lexicon);
  const auto pac = build_candidate_vocab(pac_words, in.size_grid, t.marker(), CandidateSource::Pac);
  const auto tgt = build_candidate_vocab(tgt_words, in.size_grid, t.marker(), CandidateSource::Tgt);
  for (const auto* grid : {&pac, &tgt}) {
    for (const auto& c : *grid) {
      if (c.exhausted()) {
        out.search.warnings.push_back(std::string(c.source == CandidateSource::Pac ? "PAC" : "TGT") + " size " +
                                      std::to_string(c.config_size) + " unreachable; stopped at " +
                                      std::to_string(c.reached_size));
      }
    }
  }
  auto warnings = std::move(out.search.warnings);
  out.search = medvoc_search(t, pac, tgt, out.eval_words, in.tolerance);
  warnings.insert(warnings.end(), out.search.warnings.begin(), out.search.warnings.end());
  out.search.warnings = std::move(warnings);
  std::vector<std::string> chosen = out.search.tokens;
  if (in.strategy == Strategy::MedvocLlm) chosen = medvoc_llm_clean(chosen, in.train_summaries, t.marker());
  out.added = plan_added_vocab(t, chosen, in.strategy, &out.search.warnings);
  return out;
}

// --- file formats ------------------------------------------------------------

std::string serialize_added_vocab(const AddedVocabulary& v) {
  nlohmann::ordered_json j;
  j["strategy"] = to_string(v.strategy);
  j["tokens"] = v.tokens;
  auto merges = nlohmann::ordered_json::array();
  for (const auto& m : v.synthesized_merges) merges.push_back({m.left, m.right});
  j["merges"] = merges;
  j["scaffolds"] = v.scaffold_tokens;
  return j.dump(2) + "\n";
}

AddedVocabulary parse_added_vocab(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("added vocabulary parse failure: ") + e.what());
  }
  try {
    AddedVocabulary v;
    v.strategy = parse_strategy(j.at("strategy").get<std::string>());
    v.tokens = j.at("tokens").get<std::vector<std::string>>();
    for (const auto& m : j.value("merges", nlohmann::json::array())) {
      if (!m.is_array() || m.size() != 2) throw DataError("merge entry must be a pair: " + m.dump());
      v.synthesized_merges.push_back({m[0].get<std::string>(), m[1].get<std::string>()});
    }
    v.scaffold_tokens = j.value("scaffolds", std::vector<std::string>{});
    const std::set<std::string> tokens(v.tokens.begin(), v.tokens.end());
    for (const auto& s : v.scaffold_tokens) {
      if (!tokens.contains(s)) throw DataError("scaffold \"" + s + "\" is not among the tokens");
    }
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("added vocabulary: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("added vocabulary: ") + e.what());
  }
}

void save_added_vocab(const AddedVocabulary& v, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << serialize_added_vocab(v);
}

AddedVocabulary load_added_vocab(const std::filesystem::path& path) {
  try {
    return parse_added_vocab(read_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string serialize_search_audit(const std::vector<GridEntry>& grid) {
  auto j = nlohmann::ordered_json::array();
  for (const auto& g : grid) {
    nlohmann::ordered_json e;
    e["config"] = g.config;
    e["utility"] = g.utility;
    e["size"] = g.size;
    j.push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

}  // namespace vocabadapt
