#include "vocabadapt/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vocabadapt/error.hpp"

namespace vocabadapt {

std::size_t Tokenizer::PairHash::operator()(const std::pair<std::string, std::string>& p) const noexcept {
  const std::size_t h1 = std::hash<std::string>{}(p.first);
  const std::size_t h2 = std::hash<std::string>{}(p.second);
  return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
}

Tokenizer::Tokenizer(std::string marker, std::vector<std::string> id_to_token, std::vector<Merge> merges,
                     std::vector<std::string> added)
    : marker_(std::move(marker)),
      id_to_token_(std::move(id_to_token)),
      merges_(std::move(merges)),
      added_(std::move(added)) {
  token_to_id_.reserve(id_to_token_.size());
  for (std::size_t i = 0; i < id_to_token_.size(); ++i) {
    if (id_to_token_[i].empty()) throw DataError("empty token string at id " + std::to_string(i));
    auto [it, inserted] = token_to_id_.emplace(id_to_token_[i], static_cast<TokenId>(i));
    if (!inserted) {
      throw DataError("duplicate token \"" + id_to_token_[i] + "\" at ids " + std::to_string(it->second) +
                      " and " + std::to_string(i));
    }
  }
  merge_rank_.reserve(merges_.size());
  for (std::size_t i = 0; i < merges_.size(); ++i) {
    const Merge& m = merges_[i];
    if (!token_to_id_.contains(m.joined())) {
      throw DataError("merge target not in vocab: [\"" + m.left + "\", \"" + m.right + "\"] -> \"" +
                      m.joined() + "\"");
    }
    if (!merge_rank_.emplace(std::pair{m.left, m.right}, i).second) {
      throw DataError("duplicate merge: [\"" + m.left + "\", \"" + m.right + "\"]");
    }
  }
  for (std::size_t i = 0; i < added_.size(); ++i) {
    if (!token_to_id_.contains(added_[i])) throw DataError("added token not in vocab: \"" + added_[i] + "\"");
    if (!added_index_.emplace(added_[i], i).second) {
      throw DataError("duplicate added token: \"" + added_[i] + "\"");
    }
  }
}

bool Tokenizer::contains(std::string_view token) const { return token_to_id_.contains(std::string(token)); }

std::optional<TokenId> Tokenizer::id(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  if (it == token_to_id_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Tokenizer::merge_rank(std::string_view left, std::string_view right) const {
  auto it = merge_rank_.find(std::pair{std::string(left), std::string(right)});
  if (it == merge_rank_.end()) return std::nullopt;
  return it->second;
}

bool Tokenizer::is_added(std::string_view token) const { return added_index_.contains(std::string(token)); }

std::vector<std::string> Tokenizer::initial_symbols(std::string_view surface) const {
  if (!marker_.empty() && surface.starts_with(marker_)) {
    auto rest = text::split_chars(surface.substr(marker_.size()));
    if (rest.empty()) return {marker_};
    rest.front().insert(0, marker_);
    return rest;
  }
  return text::split_chars(surface);
}

std::vector<std::string> Tokenizer::segment(std::string_view surface) const {
  std::vector<std::string> symbols = initial_symbols(surface);
  while (symbols.size() > 1) {
    std::size_t best_rank = std::numeric_limits<std::size_t>::max();
    std::size_t best_pos = 0;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      if (text::contains_digit(symbols[i]) || text::contains_digit(symbols[i + 1])) continue;
      auto rank = merge_rank(symbols[i], symbols[i + 1]);
      if (rank && *rank < best_rank) {
        best_rank = *rank;
        best_pos = i;
      }
    }
    if (best_rank == std::numeric_limits<std::size_t>::max()) break;
    symbols[best_pos] += symbols[best_pos + 1];
    symbols.erase(symbols.begin() + static_cast<std::ptrdiff_t>(best_pos) + 1);
  }
  return symbols;
}

TokenizationResult Tokenizer::make_result(std::vector<std::string> tokens) const {
  TokenizationResult r;
  r.tokens = std::move(tokens);
  for (const auto& tok : r.tokens) {
    if (!contains(tok)) r.had_unknown_chars = true;
    if (marker_.empty() || tok != marker_) ++r.subword_count;
  }
  return r;
}

TokenizationResult Tokenizer::tokenize_word(std::string_view word) const {
  if (word.empty()) throw DataError("tokenize_word: empty word");
  return make_result(segment(marker_ + std::string(word)));
}

std::vector<TokenizationResult> Tokenizer::tokenize_text(std::string_view text) const {
  std::vector<TokenizationResult> out;
  for (const auto& w : text::pretokenize(text)) out.push_back(tokenize_word(w));
  return out;
}

Tokenizer Tokenizer::extended(std::span<const std::string> new_tokens, std::span<const Merge> new_merges,
                              bool record_added) const {
  std::vector<std::string> vocab = id_to_token_;
  std::vector<Merge> merges = merges_;
  std::vector<std::string> added = added_;
  std::unordered_map<std::string, bool> seen;
  for (const auto& tok : vocab) seen.emplace(tok, true);
  std::set<std::string> added_set(added.begin(), added.end());
  for (const auto& tok : new_tokens) {
    if (seen.emplace(tok, true).second) vocab.push_back(tok);
    if (record_added && added_set.insert(tok).second) added.push_back(tok);
  }
  for (const auto& m : new_merges) {
    if (!merge_rank(m.left, m.right) &&
        std::find(merges.begin() + static_cast<std::ptrdiff_t>(merges_.size()), merges.end(), m) == merges.end()) {
      merges.push_back(m);
    }
  }
  return Tokenizer(marker_, std::move(vocab), std::move(merges), std::move(added));
}

// --- serialization ---------------------------------------------------------

Tokenizer parse_tokenizer(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("tokenizer parse failure: ") + e.what());
  }
  if (!j.is_object()) throw DataError("tokenizer file must be a JSON object");
  for (const char* key : {"marker", "vocab", "merges"}) {
    if (!j.contains(key)) throw DataError(std::string("tokenizer file missing key \"") + key + "\"");
  }
  if (!j["marker"].is_string()) throw DataError("tokenizer \"marker\" must be a string");
  if (!j["vocab"].is_object()) throw DataError("tokenizer \"vocab\" must be an object");
  if (!j["merges"].is_array()) throw DataError("tokenizer \"merges\" must be an array");

  const auto& jv = j["vocab"];
  std::vector<std::string> id_to_token(jv.size());
  std::vector<bool> filled(jv.size(), false);
  for (auto it = jv.begin(); it != jv.end(); ++it) {
    if (!it.value().is_number_integer()) throw DataError("vocab id for \"" + it.key() + "\" is not an integer");
    const auto id = it.value().get<std::int64_t>();
    if (id < 0 || static_cast<std::size_t>(id) >= id_to_token.size()) {
      throw DataError("vocab id " + std::to_string(id) + " for \"" + it.key() + "\" outside [0, " +
                      std::to_string(id_to_token.size()) + ")");
    }
    if (filled[static_cast<std::size_t>(id)]) {
      throw DataError("vocab id " + std::to_string(id) + " used twice (\"" + it.key() + "\")");
    }
    filled[static_cast<std::size_t>(id)] = true;
    id_to_token[static_cast<std::size_t>(id)] = it.key();
  }

  std::vector<Merge> merges;
  merges.reserve(j["merges"].size());
  for (const auto& m : j["merges"]) {
    if (!m.is_array() || m.size() != 2 || !m[0].is_string() || !m[1].is_string()) {
      throw DataError("merge entry must be a 2-element string array: " + m.dump());
    }
    merges.push_back({m[0].get<std::string>(), m[1].get<std::string>()});
  }

  std::vector<std::string> added;
  if (j.contains("added")) {
    if (!j["added"].is_array()) throw DataError("tokenizer \"added\" must be an array");
    for (const auto& a : j["added"]) {
      if (!a.is_string()) throw DataError("added entry must be a string: " + a.dump());
      added.push_back(a.get<std::string>());
    }
  }
  return Tokenizer(j["marker"].get<std::string>(), std::move(id_to_token), std::move(merges), std::move(added));
}

Tokenizer load_tokenizer(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open tokenizer file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_tokenizer(ss.str());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string serialize_tokenizer(const Tokenizer& t) {
  // Hand-assembled so each merge stays on one line; strings go through the
  // JSON library for escaping.
  auto quote = [](const std::string& s) { return nlohmann::json(s).dump(); };
  std::string out = "{\n  \"marker\": " + quote(t.marker()) + ",\n  \"vocab\": {";
  const auto tokens = t.tokens();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out += (i == 0 ? "\n    " : ",\n    ") + quote(tokens[i]) + ": " + std::to_string(i);
  }
  out += tokens.empty() ? "},\n  \"merges\": [" : "\n  },\n  \"merges\": [";
  const auto merges = t.merges();
  for (std::size_t i = 0; i < merges.size(); ++i) {
    out += (i == 0 ? "\n    [" : ",\n    [") + quote(merges[i].left) + ", " + quote(merges[i].right) + "]";
  }
  out += merges.empty() ? "],\n  \"added\": [" : "\n  ],\n  \"added\": [";
  const auto added = t.added();
  for (std::size_t i = 0; i < added.size(); ++i) {
    out += (i == 0 ? "\n    " : ",\n    ") + quote(added[i]);
  }
  out += added.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

void save_tokenizer(const Tokenizer& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write tokenizer file " + path.string());
  out << serialize_tokenizer(t);
  if (!out) throw DataError("write failed for " + path.string());
}

// --- training --------------------------------------------------------------

BpeTrainer::BpeTrainer(const WordCounts& words, std::string marker) : marker_(std::move(marker)) {
  if (words.empty()) throw DataError("train_bpe: empty word multiset");
  // A throwaway tokenizer supplies the marker-gluing rule for initial symbols.
  const Tokenizer splitter(marker_, {}, {});
  std::set<std::string> alphabet;
  if (!marker_.empty()) alphabet.insert(marker_);
  for (const auto& [w, c] : words) {
    if (w.empty()) throw DataError("train_bpe: empty word");
    if (c == 0) throw DataError("train_bpe: zero count for \"" + w + "\"");
    Word word{splitter.initial_symbols(marker_ + w), c};
    alphabet.insert(word.symbols.begin(), word.symbols.end());
    words_.push_back(std::move(word));
  }
  vocab_.assign(alphabet.begin(), alphabet.end());
  alphabet_size_ = vocab_.size();
  for (std::size_t i = 0; i < vocab_.size(); ++i) index_.emplace(vocab_[i], static_cast<TokenId>(i));
}

bool BpeTrainer::step() {
  std::map<std::pair<std::string_view, std::string_view>, std::uint64_t> counts;
  for (const auto& w : words_) {
    for (std::size_t i = 0; i + 1 < w.symbols.size(); ++i) {
      if (text::contains_digit(w.symbols[i]) || text::contains_digit(w.symbols[i + 1])) continue;
      counts[{w.symbols[i], w.symbols[i + 1]}] += w.count;
    }
  }
  if (counts.empty()) return false;
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  Merge m{std::string(best->first.first), std::string(best->first.second)};
  const std::uint64_t count = best->second;
  const std::string joined = m.joined();

  for (auto& w : words_) {
    std::vector<std::string> next;
    next.reserve(w.symbols.size());
    for (std::size_t i = 0; i < w.symbols.size(); ++i) {
      if (i + 1 < w.symbols.size() && w.symbols[i] == m.left && w.symbols[i + 1] == m.right) {
        next.push_back(joined);
        ++i;
      } else {
        next.push_back(std::move(w.symbols[i]));
      }
    }
    w.symbols = std::move(next);
  }
  if (index_.emplace(joined, static_cast<TokenId>(vocab_.size())).second) vocab_.push_back(joined);
  merges_.push_back(std::move(m));
  merge_counts_.push_back(count);
  return true;
}

Tokenizer BpeTrainer::tokenizer() const { return Tokenizer(marker_, vocab_, merges_); }

Tokenizer train_bpe(const WordCounts& words, std::size_t merge_budget, const std::string& marker) {
  BpeTrainer trainer(words, marker);
  for (std::size_t i = 0; i < merge_budget; ++i) {
    if (!trainer.step()) break;
  }
  return trainer.tokenizer();
}

}  // namespace vocabadapt
