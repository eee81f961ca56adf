#include "vocabadapt/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "vocabadapt/adapt_bpe.hpp"
#include "vocabadapt/corpus_metrics.hpp"
#include "vocabadapt/embed_init.hpp"
#include "vocabadapt/error.hpp"
#include "vocabadapt/eval_slicer.hpp"
#include "vocabadapt/rouge.hpp"
#include "vocabadapt/tokenizer.hpp"
#include "vocabadapt/vocab_adapt.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace vocabadapt {

PipelineConfig::PipelineConfig() : quota_grid(default_quota_grid()) {}

ordered_json PipelineConfig::to_json() const {
  ordered_json j;
  j["tokenizer"] = tokenizer;
  j["train"] = train;
  j["test"] = test;
  j["lexicon"] = lexicon;
  j["general_wordlist"] = general_wordlist;
  j["pac"] = pac;
  j["strategy"] = strategy;
  j["quota_grid"] = quota_grid;
  j["size_grid"] = size_grid;
  j["tolerance"] = tolerance;
  j["marker"] = marker;
  j["output_dir"] = output_dir;
  return j;
}

void PipelineConfig::merge_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  std::vector<std::string> problems;
  auto take_string = [&](const std::string& key, std::string& dst) {
    if (!j.contains(key)) return;
    if (j[key].is_string()) {
      dst = j[key].get<std::string>();
    } else {
      problems.push_back("\"" + key + "\" must be a string");
    }
  };
  auto take_grid = [&](const std::string& key, std::vector<std::size_t>& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_array()) {
      problems.push_back("\"" + key + "\" must be an array of positive integers");
      return;
    }
    std::vector<std::size_t> grid;
    for (const auto& v : j[key]) {
      if (!v.is_number_unsigned() || v.get<std::size_t>() == 0) {
        problems.push_back("\"" + key + "\" must be an array of positive integers");
        return;
      }
      grid.push_back(v.get<std::size_t>());
    }
    dst = std::move(grid);
  };
  static const std::vector<std::string> known = {"tokenizer", "train",      "test",      "lexicon",
                                                 "general_wordlist", "pac", "strategy",  "quota_grid",
                                                 "size_grid", "tolerance",  "marker",    "output_dir"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      problems.push_back("unknown config key \"" + it.key() + "\"");
    }
  }
  take_string("tokenizer", tokenizer);
  take_string("train", train);
  take_string("test", test);
  take_string("lexicon", lexicon);
  take_string("general_wordlist", general_wordlist);
  take_string("pac", pac);
  take_string("strategy", strategy);
  take_string("marker", marker);
  take_string("output_dir", output_dir);
  take_grid("quota_grid", quota_grid);
  take_grid("size_grid", size_grid);
  if (j.contains("tolerance")) {
    if (j["tolerance"].is_number()) {
      tolerance = j["tolerance"].get<double>();
    } else {
      problems.push_back("\"tolerance\" must be a number");
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid config:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw ConfigError(msg);
  }
}

std::string PipelineConfig::hash() const {
  const std::string canonical = to_json().dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  PipelineConfig cfg;
  cfg.merge_json(j);
  return cfg;
}

namespace {

/// Command-line overrides for every config field; each flag has the config key's name.
struct Overrides {
  std::string config_path;
  std::map<std::string, std::string> strings;
  std::map<std::string, CLI::Option*> string_opts;
  std::vector<std::size_t> quota_grid;
  std::vector<std::size_t> size_grid;
  CLI::Option* quota_opt = nullptr;
  CLI::Option* size_opt = nullptr;
  double tolerance = 0.0;
  CLI::Option* tolerance_opt = nullptr;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file")->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    for (const char* key : {"tokenizer", "train", "test", "lexicon", "general_wordlist", "pac", "strategy", "marker",
                            "output_dir"}) {
      std::string name = "--" + std::string(key);
      std::string dashed = name;
      std::replace(dashed.begin() + 2, dashed.end(), '_', '-');
      if (dashed != name) name += "," + dashed;
      string_opts[key] = app->add_option(name, strings[key])->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
    quota_opt = app->add_option("--quota_grid,--quota-grid", quota_grid)->delimiter(',');
    size_opt = app->add_option("--size_grid,--size-grid", size_grid)->delimiter(',');
    tolerance_opt = app->add_option("--tolerance", tolerance)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  }

  PipelineConfig resolve() const {
    PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : load_config(config_path);
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [key, opt] : string_opts) {
      if (opt->count() > 0) j[key] = strings.at(key);
    }
    if (quota_opt->count() > 0) j["quota_grid"] = quota_grid;
    if (size_opt->count() > 0) j["size_grid"] = size_grid;
    if (tolerance_opt->count() > 0) j["tolerance"] = tolerance;
    cfg.merge_json(j);
    return cfg;
  }
};

/// Collects every configuration problem before failing.
class Validator {
 public:
  explicit Validator(const PipelineConfig& cfg) : cfg_(cfg) {}

  Validator& file(const std::string& key, const std::string& value) {
    if (value.empty()) {
      problems_.push_back("missing \"" + key + "\"");
    } else if (!fs::exists(value)) {
      problems_.push_back("\"" + key + "\": file not found: " + value);
    }
    return *this;
  }
  Validator& optional_file(const std::string& key, const std::string& value) {
    if (!value.empty() && !fs::exists(value)) problems_.push_back("\"" + key + "\": file not found: " + value);
    return *this;
  }
  Validator& lexicon_source() {
    if (cfg_.lexicon.empty() && cfg_.general_wordlist.empty()) {
      problems_.push_back("need \"lexicon\" or \"general_wordlist\"");
    }
    optional_file("lexicon", cfg_.lexicon);
    optional_file("general_wordlist", cfg_.general_wordlist);
    return *this;
  }
  Validator& search_settings() {
    if (cfg_.tolerance < 0.0) problems_.push_back("\"tolerance\" must be >= 0");
    if (cfg_.quota_grid.empty()) problems_.push_back("\"quota_grid\" is empty");
    if (cfg_.size_grid.empty()) problems_.push_back("\"size_grid\" is empty");
    try {
      parse_strategy(cfg_.strategy);
    } catch (const ConfigError& e) {
      problems_.emplace_back(e.what());
    }
    return *this;
  }
  Validator& require(bool ok, const std::string& problem) {
    if (!ok) problems_.push_back(problem);
    return *this;
  }
  void check() const {
    if (problems_.empty()) return;
    std::string msg = "invalid configuration:";
    for (const auto& p : problems_) msg += "\n  - " + p;
    throw ConfigError(msg);
  }

 private:
  const PipelineConfig& cfg_;
  std::vector<std::string> problems_;
};

fs::path output_path(const PipelineConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output_dir);
  return fs::path(cfg.output_dir) / name;
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("write failed for " + path.string());
}

std::vector<std::string> record_texts(const std::vector<DatasetRecord>& records) {
  std::vector<std::string> texts;
  for (const auto& r : records) {
    texts.push_back(r.source);
    texts.push_back(r.summary);
  }
  return texts;
}

DomainLexicon resolve_lexicon(const PipelineConfig& cfg, const std::vector<std::string>& domain_texts) {
  if (!cfg.lexicon.empty()) return load_lexicon(cfg.lexicon);
  return DomainLexicon::from_corpus(domain_texts, load_wordlist(cfg.general_wordlist));
}

/// Tokenizer plus the AdaptBPE index over its added tokens, kept together so
/// the word-tokenizer closure stays valid.
struct LoadedTokenizer {
  Tokenizer tokenizer;
  MatchIndex index;
  bool adaptbpe = false;

  WordTokenizer word_tokenizer() const {
    return adaptbpe ? adaptbpe_tokenizer(tokenizer, index) : bpe_tokenizer(tokenizer);
  }
};

LoadedTokenizer load_for_metrics(const std::string& path, bool adaptbpe) {
  LoadedTokenizer lt{load_tokenizer(path), {}, adaptbpe};
  lt.index = added_index(lt.tokenizer);
  return lt;
}

ordered_json field_pair(double sd, double rs) {
  ordered_json j;
  j["SD"] = sd;
  j["RS"] = rs;
  return j;
}

void print_warnings(std::ostream& err, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) err << "warning: " << w << "\n";
}

WordCounts corpus_words(const std::vector<std::string>& texts) {
  WordCounts counts;
  for (const auto& t : texts) text::add_counts(counts, text::count_words(t));
  return counts;
}

// --- subcommands ---------------------------------------------------------------

int cmd_analyze(const PipelineConfig& cfg, const std::vector<std::string>& corpora, bool adaptbpe, std::ostream& out) {
  Validator v(cfg);
  v.file("tokenizer", cfg.tokenizer).require(!cfg.test.empty() || !corpora.empty(), "need \"test\" or --corpus");
  if (!cfg.test.empty()) v.file("test", cfg.test).lexicon_source();
  for (const auto& c : corpora) v.file("corpus", c);
  v.check();

  const LoadedTokenizer lt = load_for_metrics(cfg.tokenizer, adaptbpe);
  const WordTokenizer tok = lt.word_tokenizer();
  ordered_json report;
  report["config_hash"] = cfg.hash();
  report["tokenizer_vocab_size"] = lt.tokenizer.size();
  report["adaptbpe"] = adaptbpe;
  std::vector<std::string> warnings;
  if (!cfg.test.empty()) {
    const auto records = load_dataset(cfg.test);
    const DomainLexicon lexicon = resolve_lexicon(cfg, record_texts(records));
    const CorpusReport r = corpus_report(tok, records, lexicon);
    report["test_set_size"] = r.record_count;
    report["rs_token_count"] = r.mean_summary_tokens;
    report["oov_split_gt1"] = field_pair(r.source.oov.gt1(), r.summary.oov.gt1());
    report["oov_split_gt3"] = field_pair(r.source.oov.gt3(), r.summary.oov.gt3());
    report["unigram_novelty"] = r.mean_novelty;
    report["fragment_score"] = field_pair(r.source.stats.fragment_score, r.summary.stats.fragment_score);
    report["split_gt1"] = field_pair(r.source.stats.split_gt1_fraction, r.summary.stats.split_gt1_fraction);
    report["split_gt3"] = field_pair(r.source.stats.split_gt3_fraction, r.summary.stats.split_gt3_fraction);
    warnings = r.warnings;
  }
  auto corpus_rows = ordered_json::array();
  for (const auto& path : corpora) {
    const CorpusStats s = corpus_stats(tok, text::count_words(read_file(path)));
    if (s.word_count == 0) throw DataError(path + ": empty corpus");
    ordered_json row;
    row["corpus"] = fs::path(path).filename().string();
    row["word_count"] = s.word_count;
    row["fragment_score"] = s.fragment_score;
    row["split_gt1"] = s.split_gt1_fraction;
    row["split_gt3"] = s.split_gt3_fraction;
    corpus_rows.push_back(std::move(row));
  }
  if (!corpora.empty()) report["corpora"] = corpus_rows;
  report["warnings"] = warnings;
  const fs::path dst = output_path(cfg, "analysis.json");
  write_text(dst, report.dump(2) + "\n");
  out << dst.string() << "\n";
  return 0;
}

int cmd_build_vocab(const PipelineConfig& cfg, std::ostream& out, std::ostream& err) {
  Validator v(cfg);
  v.file("tokenizer", cfg.tokenizer).file("train", cfg.train).lexicon_source().search_settings();
  const bool scaffix = cfg.strategy.empty() || text::lower(cfg.strategy) == "scaffix";
  if (!scaffix) v.file("pac", cfg.pac);
  v.check();

  const Tokenizer base = load_tokenizer(cfg.tokenizer);
  const auto records = load_dataset(cfg.train);
  StrategyInputs in;
  in.strategy = parse_strategy(cfg.strategy);
  const auto texts = record_texts(records);
  in.tgt_corpus = corpus_words(texts);
  std::vector<std::string> domain_texts = texts;
  if (!cfg.pac.empty()) {
    const std::string pac_text = read_file(cfg.pac);
    in.pac_corpus = text::count_words(pac_text);
    domain_texts.push_back(pac_text);
  }
  for (const auto& r : records) in.train_summaries.push_back(r.summary);
  in.lexicon = resolve_lexicon(cfg, domain_texts);
  in.size_grid = cfg.size_grid;
  in.quota_grid = cfg.quota_grid;
  in.tolerance = cfg.tolerance;

  const StrategyOutcome outcome = run_strategy(base, in);
  const Tokenizer extended = apply_added_vocab(base, outcome.added);
  const MatchIndex idx = added_index(extended);
  const WordTokenizer adapted_tok =
      in.strategy == Strategy::Scaffix ? adaptbpe_tokenizer(extended, idx) : bpe_tokenizer(extended);

  ordered_json stats;
  stats["config_hash"] = cfg.hash();
  stats["strategy"] = to_string(in.strategy);
  stats["chosen_config"] = outcome.search.config;
  stats["base_vocab_size"] = base.size();
  stats["final_vocab_size"] = extended.size();
  stats["added_tokens"] = outcome.added.tokens.size();
  stats["scaffold_tokens"] = outcome.added.scaffold_tokens.size();
  stats["base_fragment_score"] = fragment_score(base, outcome.eval_words);
  stats["adapted_fragment_score"] = fragment_score(adapted_tok, outcome.eval_words);
  stats["warnings"] = outcome.search.warnings;

  save_added_vocab(outcome.added, output_path(cfg, "added_vocab.json"));
  write_text(output_path(cfg, "search_audit.json"), serialize_search_audit(outcome.search.grid));
  write_text(output_path(cfg, "vocab_stats.json"), stats.dump(2) + "\n");
  print_warnings(err, outcome.search.warnings);
  out << (fs::path(cfg.output_dir) / "added_vocab.json").string() << "\n";
  return 0;
}

int cmd_extend(const PipelineConfig& cfg, const std::string& added_path, std::string out_path, std::ostream& out,
               std::ostream& err) {
  Validator(cfg).file("tokenizer", cfg.tokenizer).file("added", added_path).check();
  const Tokenizer base = load_tokenizer(cfg.tokenizer);
  std::vector<std::string> warnings;
  const Tokenizer extended = apply_added_vocab(base, load_added_vocab(added_path), &warnings);
  print_warnings(err, warnings);
  const fs::path dst = out_path.empty() ? output_path(cfg, "extended_tokenizer.json") : fs::path(out_path);
  if (dst.has_parent_path()) fs::create_directories(dst.parent_path());
  save_tokenizer(extended, dst);
  out << dst.string() << "\n";
  return 0;
}

int cmd_tokenize(const PipelineConfig& cfg, bool adaptbpe, std::istream& in, std::ostream& out) {
  Validator(cfg).file("tokenizer", cfg.tokenizer).check();
  const LoadedTokenizer lt = load_for_metrics(cfg.tokenizer, adaptbpe);
  const WordTokenizer tok = lt.word_tokenizer();
  std::string line;
  while (std::getline(in, line)) {
    for (const auto& w : text::pretokenize(line)) {
      const auto r = tok(w);
      for (std::size_t i = 0; i < r.tokens.size(); ++i) out << (i ? " " : "") << r.tokens[i];
      out << "\n";
    }
  }
  return 0;
}

int cmd_scaffold_stats(const PipelineConfig& cfg, const std::string& targets_path, const std::string& added_path,
                       std::ostream& out) {
  Validator v(cfg);
  v.file("tokenizer", cfg.tokenizer)
      .require(!targets_path.empty() || !added_path.empty(), "need --targets or --added")
      .optional_file("targets", targets_path)
      .optional_file("added", added_path)
      .check();
  const Tokenizer t = load_tokenizer(cfg.tokenizer);
  std::vector<std::string> targets;
  if (!targets_path.empty()) targets = load_wordlist(targets_path);
  if (!added_path.empty()) {
    const auto added = load_added_vocab(added_path);
    for (auto& tok : added.targets()) targets.push_back(std::move(tok));
  }
  const ScaffoldStats s = scaffolding_stats(t, targets);
  ordered_json j;
  j["config_hash"] = cfg.hash();
  j["targets"] = targets.size();
  j["scaffold_count"] = s.scaffold_count;
  j["overhead_fraction"] = s.overhead_fraction;
  write_text(output_path(cfg, "scaffold_stats.json"), j.dump(2) + "\n");
  out << j.dump(2) << "\n";
  return 0;
}

int cmd_slice(const PipelineConfig& cfg, bool adaptbpe, std::optional<double> novel_threshold, std::ostream& out,
              std::ostream& err) {
  Validator(cfg).file("tokenizer", cfg.tokenizer).file("test", cfg.test).lexicon_source().check();
  const LoadedTokenizer lt = load_for_metrics(cfg.tokenizer, adaptbpe);
  const auto records = load_dataset(cfg.test);
  const DomainLexicon lexicon = resolve_lexicon(cfg, record_texts(records));
  const ScoredRecords scored = score_records(lt.word_tokenizer(), records, lexicon);
  std::vector<std::string> warnings = scored.warnings;
  const std::string hash = cfg.hash();
  for (Setting s : kSliceSettings) {
    const EvalSlice slice = (s == Setting::NovelRS && novel_threshold)
                                ? threshold_slice(scored.scores, s, *novel_threshold)
                                : percentile_slice(scored.scores, s, &warnings);
    write_text(output_path(cfg, "slices/" + to_string(s) + ".json"), serialize_slice(slice, hash));
    out << to_string(s) << " " << slice.ids.size() << "\n";
  }
  const EvalSlice full = percentile_slice(scored.scores, Setting::TestFull);
  write_text(output_path(cfg, "slices/Test_Full.json"), serialize_slice(full, hash));
  out << "Test_Full " << full.ids.size() << "\n";
  print_warnings(err, warnings);
  return 0;
}

int cmd_rouge(const PipelineConfig& cfg, const std::string& predictions, std::string slices_dir, std::ostream& out) {
  if (slices_dir.empty()) slices_dir = (fs::path(cfg.output_dir) / "slices").string();
  Validator(cfg).file("test", cfg.test).file("predictions", predictions).check();
  if (!fs::is_directory(slices_dir)) throw ConfigError("slices directory not found: " + slices_dir);

  std::map<std::string, std::string> references;
  for (const auto& r : load_dataset(cfg.test)) references.emplace(r.id, r.summary);
  std::map<std::string, double> f1_by_id;
  {
    std::istringstream lines(read_file(predictions));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
        const auto id = j.at("id").get<std::string>();
        const auto hyp = j.at("hypothesis").get<std::string>();
        auto ref = references.find(id);
        if (ref == references.end()) throw DataError("prediction for unknown id " + id);
        f1_by_id[id] = rouge_l_f(ref->second, hyp).f1;
      } catch (const nlohmann::json::exception& e) {
        throw DataError(predictions + " line " + std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(slices_dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  ordered_json settings;
  for (const auto& f : files) {
    const EvalSlice slice = parse_slice(read_file(f));
    double sum = 0.0;
    for (const auto& id : slice.ids) {
      auto it = f1_by_id.find(id);
      if (it == f1_by_id.end()) throw DataError("no prediction for id " + id + " (slice " + to_string(slice.setting) + ")");
      sum += it->second;
    }
    ordered_json row;
    row["count"] = slice.ids.size();
    row["mean_f1"] = slice.ids.empty() ? 0.0 : sum / static_cast<double>(slice.ids.size());
    settings[to_string(slice.setting)] = row;
    out << to_string(slice.setting) << " " << row["mean_f1"].get<double>() << "\n";
  }
  ordered_json j;
  j["config_hash"] = cfg.hash();
  j["settings"] = settings;
  write_text(output_path(cfg, "rouge.json"), j.dump(2) + "\n");
  return 0;
}

int cmd_profile(const PipelineConfig& cfg, const std::string& ids_path, bool adaptbpe, std::ostream& out) {
  Validator(cfg).file("tokenizer", cfg.tokenizer).file("test", cfg.test).file("ids", ids_path).lexicon_source().check();
  const LoadedTokenizer lt = load_for_metrics(cfg.tokenizer, adaptbpe);
  const auto records = load_dataset(cfg.test);
  const DomainLexicon lexicon = resolve_lexicon(cfg, record_texts(records));
  const EvalSlice slice = parse_slice(read_file(ids_path));
  const SubsetProfile p = subset_profile(records, slice.ids, lt.word_tokenizer(), lexicon);
  const std::string body = serialize_profile(p, cfg.hash());
  write_text(output_path(cfg, "profile_" + to_string(slice.setting) + ".json"), body);
  out << body;
  return 0;
}

int cmd_init_embed(const PipelineConfig& cfg, const std::string& matrix, const std::string& extended_path,
                   std::string out_path, std::ostream& out) {
  Validator(cfg).file("tokenizer", cfg.tokenizer).file("matrix", matrix).file("extended", extended_path).check();
  const Tokenizer base = load_tokenizer(cfg.tokenizer);
  const Tokenizer extended = load_tokenizer(extended_path);
  const EmbeddingMatrixXd m = load_matrix(matrix);
  const EmbeddingMatrixXd grown = extend_matrix(m, base, extended);
  const fs::path dst = out_path.empty() ? output_path(cfg, "embeddings.txt") : fs::path(out_path);
  if (dst.has_parent_path()) fs::create_directories(dst.parent_path());
  save_matrix(grown, dst);
  out << dst.string() << "\n";
  return 0;
}

int cmd_train(const PipelineConfig& cfg, const std::vector<std::string>& corpora, std::size_t merges,
              std::string out_path, std::ostream& out) {
  Validator v(cfg);
  v.require(!corpora.empty(), "need at least one --corpus");
  for (const auto& c : corpora) v.file("corpus", c);
  v.check();
  WordCounts words;
  for (const auto& c : corpora) text::add_counts(words, text::count_words(read_file(c)));
  const Tokenizer t = train_bpe(words, merges, cfg.marker);
  const fs::path dst = out_path.empty() ? output_path(cfg, "tokenizer.json") : fs::path(out_path);
  if (dst.has_parent_path()) fs::create_directories(dst.parent_path());
  save_tokenizer(t, dst);
  out << dst.string() << " " << t.size() << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Domain vocabulary adaptation toolkit for BPE tokenizers", "vocabadapt"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto add = [&](const std::string& name, const std::string& help) { return app.add_subcommand(name, help); };

  // Each subcommand gets its own override set so flags may follow the subcommand name.
  std::map<std::string, Overrides> overrides;
  std::vector<std::string> corpora;
  bool adaptbpe = false;
  std::string added_path;
  std::string out_path;
  std::string targets_path;
  std::string predictions;
  std::string slices_dir;
  std::string ids_path;
  std::string matrix;
  std::string extended_path;
  std::size_t merges = 200;
  double novel_threshold = 0.0;
  CLI::Option* novel_opt = nullptr;

  auto* analyze = add("analyze", "Fragmentation, OOV concentration and novelty report");
  analyze->add_option("--corpus", corpora, "Plain-text corpus to profile (repeatable)");
  analyze->add_flag("--adaptbpe", adaptbpe, "Tokenize with AdaptBPE over the added tokens");
  add("build-vocab", "Select an added vocabulary with the configured strategy");
  auto* extend = add("extend", "Apply an added vocabulary to a tokenizer");
  extend->add_option("--added", added_path, "Added vocabulary JSON")->required();
  extend->add_option("--out", out_path, "Output tokenizer path");
  auto* tokenize = add("tokenize", "Tokenize stdin, one output line per word");
  tokenize->add_flag("--adaptbpe", adaptbpe, "Use AdaptBPE over the added tokens");
  auto* scaffold = add("scaffold-stats", "Count scaffolding tokens merge synthesis would add");
  scaffold->add_option("--targets", targets_path, "Target tokens, one per line");
  scaffold->add_option("--added", added_path, "Added vocabulary JSON");
  auto* slice = add("slice", "Write the top-decile evaluation slices");
  slice->add_flag("--adaptbpe", adaptbpe, "Use AdaptBPE over the added tokens");
  novel_opt = slice->add_option("--novel-threshold,--novel_threshold", novel_threshold,
                                "Absolute Novel_RS threshold instead of the top decile");
  auto* rouge = add("rouge", "Mean Rouge-L F1 of predictions per slice");
  rouge->add_option("--predictions", predictions, "JSON-Lines {id, hypothesis}")->required();
  rouge->add_option("--slices", slices_dir, "Directory of slice files (default <output_dir>/slices)");
  auto* profile = add("profile", "Difficult-RS, Novel-RS and source/reference Rouge-L of a subset");
  profile->add_option("--ids", ids_path, "Slice file naming the subset")->required();
  profile->add_flag("--adaptbpe", adaptbpe, "Use AdaptBPE over the added tokens");
  auto* init = add("init-embed", "Extend an embedding matrix for added tokens");
  init->add_option("--matrix", matrix, "Embedding matrix text file")->required();
  init->add_option("--extended", extended_path, "Extended tokenizer")->required();
  init->add_option("--out", out_path, "Output matrix path");
  auto* train = add("train", "Train a BPE tokenizer on plain-text corpora");
  train->add_option("--corpus", corpora, "Plain-text corpus (repeatable)")->required();
  train->add_option("--merges", merges, "Merge budget");
  train->add_option("--out", out_path, "Output tokenizer path");

  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
    overrides[sub->get_name()].attach(sub);
  }

  std::vector<std::string> argv_store = args;
  argv_store.insert(argv_store.begin(), "vocabadapt");
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    const PipelineConfig cfg = overrides.at(name).resolve();
    if (name == "analyze") return cmd_analyze(cfg, corpora, adaptbpe, out);
    if (name == "build-vocab") return cmd_build_vocab(cfg, out, err);
    if (name == "extend") return cmd_extend(cfg, added_path, out_path, out, err);
    if (name == "tokenize") return cmd_tokenize(cfg, adaptbpe, in, out);
    if (name == "scaffold-stats") return cmd_scaffold_stats(cfg, targets_path, added_path, out);
    if (name == "slice") {
      return cmd_slice(cfg, adaptbpe, novel_opt->count() ? std::optional<double>(novel_threshold) : std::nullopt, out,
                       err);
    }
    if (name == "rouge") return cmd_rouge(cfg, predictions, slices_dir, out);
    if (name == "profile") return cmd_profile(cfg, ids_path, adaptbpe, out);
    if (name == "init-embed") return cmd_init_embed(cfg, matrix, extended_path, out_path, out);
    if (name == "train") return cmd_train(cfg, corpora, merges, out_path, out);
    err << "error: unknown subcommand " << name << "\n";
    return 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return 3;
  } catch (const InvariantError& e) {
    err << "internal error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace vocabadapt
