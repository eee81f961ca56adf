#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "support.hpp"
#include "vocabadapt/adapt_bpe.hpp"
#include "vocabadapt/cli.hpp"
#include "vocabadapt/corpus_metrics.hpp"
#include "vocabadapt/vocab_adapt.hpp"

using namespace vocabadapt;
using testsupport::fixture;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = run_cli(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> base_flags(const std::filesystem::path& out_dir) {
  return {"--tokenizer", fixture("toy_llama.json").string(), "--train",   fixture("train.jsonl").string(),
          "--test",      fixture("test.jsonl").string(),     "--lexicon", fixture("medical_lexicon.txt").string(),
          "--pac",       fixture("pac.txt").string(),        "--output-dir", out_dir.string(),
          "--size-grid", "80,160,320",                       "--quota-grid", "10,20,40,80,160"};
}

std::vector<std::string> cmd(const std::string& sub, const std::filesystem::path& dir,
                             std::vector<std::string> extra = {}) {
  std::vector<std::string> args = {sub};
  for (auto& a : base_flags(dir)) args.push_back(std::move(a));
  for (auto& a : extra) args.push_back(std::move(a));
  return args;
}

nlohmann::json read_json(const std::filesystem::path& p) { return nlohmann::json::parse(read_file(p)); }

}  // namespace

TEST_CASE("help and version") {
  CHECK(run({"--help"}).code == 0);
  const auto v = run({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out == std::string(kVersion) + "\n");
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
}

TEST_CASE("config validation lists every problem") {
  const auto dir = testsupport::temp_dir("cfgval");
  const auto r = run({"build-vocab", "--tokenizer", "/nope/t.json", "--train", "/nope/train.jsonl", "--strategy",
                      "bogus", "--output-dir", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("/nope/t.json") != std::string::npos);
  CHECK(r.err.find("/nope/train.jsonl") != std::string::npos);
  CHECK(r.err.find("lexicon") != std::string::npos);
  CHECK(r.err.find("bogus") != std::string::npos);

  std::ofstream(dir / "bad.json") << R"({"tokenizer": 3, "colour": "red"})";
  const auto u = run({"tokenize", "--config", (dir / "bad.json").string()});
  CHECK(u.code == 2);
  CHECK(u.err.find("colour") != std::string::npos);
  CHECK(u.err.find("tokenizer") != std::string::npos);

  std::ofstream(dir / "broken.json") << "{";
  CHECK(run({"tokenize", "--config", (dir / "broken.json").string()}).code == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("data errors exit with 3") {
  const auto dir = testsupport::temp_dir("dataerr");
  std::ofstream(dir / "bad.jsonl") << "{\"id\":\"a\"}\n";
  auto args = cmd("analyze", dir);
  args.push_back("--test");
  args.push_back((dir / "bad.jsonl").string());
  const auto r = run(args);
  CHECK(r.code == 3);
  CHECK(r.err.find("source") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("config file values are overridden by flags") {
  const auto dir = testsupport::temp_dir("cfg");
  nlohmann::json cfg = {{"tokenizer", fixture("llama2_style.json").string()}, {"output_dir", dir.string()}};
  std::ofstream(dir / "c.json") << cfg.dump();
  const auto a = run({"tokenize", "--config", (dir / "c.json").string()}, "cardiomyopathy\n");
  CHECK(a.code == 0);
  CHECK(a.out == "\xE2\x96\x81" "card iom y op ath y\n");
  const auto b = run({"tokenize", "--config", (dir / "c.json").string(), "--tokenizer",
                      fixture("cholesterol_tokenizer.json").string()},
                     "cholesterol\n");
  CHECK(b.code == 0);
  CHECK(b.out == "cho le sterol\n");
  std::filesystem::remove_all(dir);
}

TEST_CASE("analyze writes every dataset column") {
  const auto dir = testsupport::temp_dir("analyze");
  const auto r = run(cmd("analyze", dir, {"--corpus", fixture("general.txt").string(), "--corpus",
                                          fixture("medical.txt").string()}));
  REQUIRE(r.code == 0);
  const auto j = read_json(dir / "analysis.json");
  for (const char* key : {"config_hash", "test_set_size", "rs_token_count", "oov_split_gt1", "oov_split_gt3",
                          "unigram_novelty", "fragment_score", "split_gt1", "split_gt3", "corpora", "warnings"}) {
    CHECK_MESSAGE(j.contains(key), key);
  }
  CHECK(j["test_set_size"] == 424);
  CHECK(j["oov_split_gt1"].contains("SD"));
  CHECK(j["oov_split_gt1"].contains("RS"));
  CHECK(j["corpora"].size() == 2);
  CHECK(j["corpora"][1]["fragment_score"].get<double>() > j["corpora"][0]["fragment_score"].get<double>());
  std::filesystem::remove_all(dir);
}

TEST_CASE("build-vocab, extend and tokenize compose like the library") {
  const auto dir = testsupport::temp_dir("pipeline");
  REQUIRE(run(cmd("build-vocab", dir, {"--strategy", "scaffix"})).code == 0);
  const auto stats = read_json(dir / "vocab_stats.json");
  CHECK(stats["scaffold_tokens"] == 0);
  CHECK(stats["adapted_fragment_score"].get<double>() <= stats["base_fragment_score"].get<double>());
  CHECK(read_json(dir / "search_audit.json").size() == 5);

  REQUIRE(run(cmd("extend", dir, {"--added", (dir / "added_vocab.json").string()})).code == 0);
  const Tokenizer ext = load_tokenizer(dir / "extended_tokenizer.json");
  const Tokenizer base = load_tokenizer(fixture("toy_llama.json"));
  const Tokenizer lib = apply_added_vocab(base, load_added_vocab(dir / "added_vocab.json"));
  CHECK(ext == lib);

  const std::string words = "cardiomyopathy insulin hypertension the\nantibiotics\n";
  const auto tk = run({"tokenize", "--tokenizer", (dir / "extended_tokenizer.json").string(), "--adaptbpe"}, words);
  REQUIRE(tk.code == 0);
  const MatchIndex idx = added_index(lib);
  std::string expected;
  for (const auto& w : text::pretokenize(words)) {
    const auto r = adaptbpe_tokenize(lib, idx, w);
    for (std::size_t i = 0; i < r.tokens.size(); ++i) expected += (i ? " " : "") + r.tokens[i];
    expected += "\n";
  }
  CHECK(tk.out == expected);

  // Analyzing with AdaptBPE after adaptation does not raise the score of the lexicon OOV words.
  REQUIRE(run(cmd("analyze", dir, {"--tokenizer", (dir / "extended_tokenizer.json").string(), "--adaptbpe"})).code ==
          0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("medvoc build-vocab records scaffolds") {
  const auto dir = testsupport::temp_dir("medvoc");
  const auto r = run(cmd("build-vocab", dir, {"--strategy", "medvoc"}));
  REQUIRE(r.code == 0);
  const auto added = load_added_vocab(dir / "added_vocab.json");
  CHECK(added.strategy == Strategy::Medvoc);
  const auto stats = read_json(dir / "vocab_stats.json");
  CHECK(stats["scaffold_tokens"] == added.scaffold_tokens.size());
  CHECK(stats["adapted_fragment_score"].get<double>() <= stats["base_fragment_score"].get<double>());

  REQUIRE(run(cmd("scaffold-stats", dir, {"--added", (dir / "added_vocab.json").string()})).code == 0);
  const auto ss = read_json(dir / "scaffold_stats.json");
  CHECK(ss.contains("overhead_fraction"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("slice, rouge, profile") {
  const auto dir = testsupport::temp_dir("slice");
  const auto s = run(cmd("slice", dir));
  REQUIRE(s.code == 0);
  for (const char* name : {"Difficult_SD", "Difficult_RS", "Novel_RS", "All_SD", "All_RS"}) {
    const auto j = read_json(dir / "slices" / (std::string(name) + ".json"));
    CHECK(j["ids"].size() == 43);
    CHECK(j["setting"] == name);
    CHECK(j.contains("config_hash"));
  }
  CHECK(read_json(dir / "slices" / "Test_Full.json")["ids"].size() == 424);

  const auto r = run(cmd("rouge", dir, {"--predictions", fixture("predictions.jsonl").string()}));
  REQUIRE(r.code == 0);
  const auto rouge = read_json(dir / "rouge.json");
  CHECK(rouge["settings"].size() == 6);
  CHECK(rouge["settings"]["Test_Full"]["count"] == 424);

  const auto p = run(cmd("profile", dir, {"--ids", (dir / "slices" / "Novel_RS.json").string()}));
  REQUIRE(p.code == 0);
  CHECK(read_json(dir / "profile_Novel_RS.json")["count"] == 43);

  const auto abs = run(cmd("slice", dir, {"--novel-threshold", "0.6"}));
  REQUIRE(abs.code == 0);
  const auto nov = read_json(dir / "slices" / "Novel_RS.json");
  CHECK(nov["threshold"] == 0.6);
  std::filesystem::remove_all(dir);
}

TEST_CASE("init-embed and train") {
  const auto dir = testsupport::temp_dir("embed");
  AddedVocabulary v;
  v.strategy = Strategy::Scaffix;
  v.tokens = {"insulin", "aspirin"};
  save_added_vocab(v, dir / "added.json");
  REQUIRE(run(cmd("extend", dir, {"--added", (dir / "added.json").string(), "--out", (dir / "ext.json").string()}))
              .code == 0);
  const auto e = run(cmd("init-embed", dir, {"--matrix", fixture("toy_llama_embeddings.txt").string(), "--extended",
                                             (dir / "ext.json").string()}));
  REQUIRE(e.code == 0);
  CHECK(read_file(dir / "embeddings.txt").substr(0, 6) == "202 8\n");
  CHECK(run(cmd("init-embed", dir, {"--matrix", fixture("toy_llama_embeddings.txt").string(), "--extended",
                                    fixture("llama2_style.json").string()}))
            .code == 3);

  const auto t = run({"train", "--corpus", fixture("general.txt").string(), "--merges", "50", "--out",
                      (dir / "trained.json").string(), "--marker", "\xC4\xA0"});
  REQUIRE(t.code == 0);
  CHECK(load_tokenizer(dir / "trained.json").merges().size() == 50);
  std::filesystem::remove_all(dir);
}
