// Regenerates everything under fixtures/. Randomness comes from raw
// std::mt19937 outputs only, so the files are identical on every platform.
#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "vocabadapt/corpus_metrics.hpp"
#include "vocabadapt/embed_init.hpp"
#include "vocabadapt/tokenizer.hpp"
#include "vocabadapt/vocab_adapt.hpp"

namespace fs = std::filesystem;
using namespace vocabadapt;

namespace {

const std::vector<std::string> kGeneral = {
    "the",     "a",       "of",      "and",     "to",      "in",      "is",      "was",     "for",     "on",
    "with",    "as",      "by",      "at",      "from",    "this",    "that",    "it",      "be",      "are",
    "were",    "have",    "has",     "had",     "not",     "but",     "or",      "an",      "they",    "we",
    "he",      "she",     "his",     "her",     "their",   "our",     "which",   "who",     "when",    "after",
    "before",  "during",  "about",   "into",    "over",    "under",   "more",    "most",    "some",    "many",
    "other",   "new",     "old",     "first",   "last",    "long",    "great",   "little",  "good",    "small",
    "large",   "high",    "low",     "young",   "early",   "late",    "people",  "time",    "year",    "day",
    "week",    "month",   "world",   "city",    "house",   "school",  "family",  "group",   "study",   "work",
    "result",  "report",  "number",  "part",    "place",   "case",    "point",   "water",   "food",    "money",
    "market",  "company", "country", "state",   "history", "story",   "music",   "game",    "team",    "player",
    "season",  "road",    "river",   "town",    "garden",  "window",  "friend",  "mother",  "father",  "child",
    "children", "man",    "woman",   "paper",   "book",    "letter",  "office",  "plan",    "idea",    "change",
    "show",    "found",   "made",    "said",    "took",    "gave",    "went",    "came",    "saw",     "used",
    "called",  "asked",   "told",    "began",   "kept",    "left",    "turned",  "moved",   "lived",   "played",
    "opened",  "closed",  "started", "ended",   "helped",  "wanted",  "needed",  "looked",  "seemed",  "became",
    "also",    "only",    "very",    "then",    "there",   "here",    "now",     "still",   "again",   "often",
    "always",  "never",   "later",   "together", "between", "against", "without", "through", "around", "across",
    "morning", "evening", "night",   "summer",  "winter",  "spring",  "autumn",  "weather", "train",   "station",
    "street",  "village", "island",  "mountain", "forest", "bridge",  "church",  "museum",  "library", "theatre",
};

const std::vector<std::string> kMedical = {
    "cholesterol",     "cardiomyopathy",  "antipyretics",    "inhibitory",      "microbiologically",
    "hypertension",    "hyperglycemia",   "hypoglycemia",    "tachycardia",     "bradycardia",
    "arrhythmia",      "myocardial",      "infarction",      "atherosclerosis", "thrombosis",
    "embolism",        "anticoagulant",   "antibiotic",      "antibiotics",     "antiviral",
    "antifungal",      "analgesic",       "anesthesia",      "anaesthetic",     "immunotherapy",
    "chemotherapy",    "radiotherapy",    "oncology",        "carcinoma",       "adenocarcinoma",
    "metastasis",      "lymphoma",        "leukemia",        "melanoma",        "glioblastoma",
    "neuropathy",      "nephropathy",     "retinopathy",     "encephalitis",    "meningitis",
    "hepatitis",       "cirrhosis",       "pancreatitis",    "gastritis",       "colitis",
    "dermatitis",      "arthritis",       "osteoporosis",    "osteoarthritis",  "fibromyalgia",
    "pneumonia",       "bronchitis",      "tuberculosis",    "influenza",       "sepsis",
    "bacteremia",      "bacteria",        "bacterial",       "biological",      "inhibitor",
    "chronic",         "acute",           "syndrome",        "symptoms",        "diagnosis",
    "prognosis",       "etiology",        "pathogenesis",    "epidemiology",    "comorbidity",
    "mortality",       "morbidity",       "randomized",      "placebo",         "cohort",
    "dyspnea",         "hemoglobin",      "erythrocyte",     "leukocyte",       "thrombocytopenia",
    "neutropenia",     "anemia",          "insulin",         "metformin",       "statin",
    "atorvastatin",    "ibuprofen",       "acetaminophen",   "paracetamol",     "aspirin",
    "corticosteroid",  "prednisone",      "dexamethasone",   "methotrexate",    "rituximab",
    "pembrolizumab",   "trastuzumab",     "bevacizumab",     "nivolumab",       "tamoxifen",
    "hypothyroidism",  "hyperthyroidism", "thyroiditis",     "adrenal",         "pituitary",
    "endocrine",       "endometriosis",   "preeclampsia",    "gestational",     "neonatal",
    "pediatric",       "geriatric",       "psychiatric",     "schizophrenia",   "depression",
    "anxiety",         "dementia",        "alzheimer",       "parkinsonism",    "epilepsy",
    "seizures",        "migraine",        "stroke",          "ischemic",        "hemorrhagic",
    "aneurysm",        "stenosis",        "angioplasty",     "catheterization", "echocardiography",
    "electrocardiogram", "tomography",    "ultrasonography", "biopsy",          "histopathology",
    "immunohistochemistry", "cytokine",   "interleukin",     "antibody",        "antigen",
    "vaccination",     "immunization",    "pathogen",        "microbiome",      "probiotic",
    "staphylococcus",  "streptococcus",   "escherichia",     "pseudomonas",     "candida",
    "nephrotoxicity",  "hepatotoxicity",  "pharmacokinetics", "bioavailability", "contraindication",
    "hypersensitivity", "anaphylaxis",    "urticaria",       "eczema",          "psoriasis",
};

class Rng {
 public:
  explicit Rng(std::uint32_t seed) : gen_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(gen_()) % n; }
  double unit() { return static_cast<double>(gen_() % 1000) / 1000.0; }

 private:
  std::mt19937 gen_;
};

std::string capitalized(std::string w) {
  if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
  return w;
}

std::vector<std::string> draw_words(Rng& rng, std::size_t n, double medical_share) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pool = rng.unit() < medical_share ? kMedical : kGeneral;
    out.push_back(pool[rng.below(pool.size())]);
  }
  return out;
}

/// Joins words into sentences with occasional numbers and commas.
std::string to_prose(Rng& rng, const std::vector<std::string>& words) {
  std::string out;
  std::size_t in_sentence = 0;
  std::size_t sentence_len = 6 + rng.below(8);
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!out.empty()) out += ' ';
    out += in_sentence == 0 ? capitalized(words[i]) : words[i];
    ++in_sentence;
    if (rng.below(25) == 0) out += " " + std::to_string(1 + rng.below(250)) + " mg";
    const bool last = i + 1 == words.size();
    if (last || in_sentence == sentence_len) {
      out += '.';
      in_sentence = 0;
      sentence_len = 6 + rng.below(8);
    } else if (rng.below(12) == 0) {
      out += ',';
    }
  }
  return out;
}

std::string corpus(Rng& rng, std::size_t paragraphs, double medical_share) {
  std::string out;
  for (std::size_t p = 0; p < paragraphs; ++p) {
    out += to_prose(rng, draw_words(rng, 40 + rng.below(40), medical_share));
    out += '\n';
  }
  return out;
}

std::vector<DatasetRecord> dataset(Rng& rng, const std::string& prefix, std::size_t n) {
  std::vector<DatasetRecord> records;
  for (std::size_t i = 0; i < n; ++i) {
    const double source_share = rng.unit() * 0.6;
    const double novelty = rng.unit() * 0.7;
    const double summary_share = rng.unit() * 0.8;
    const auto source_words = draw_words(rng, 30 + rng.below(40), source_share);
    std::vector<std::string> summary_words;
    const std::size_t summary_len = 8 + rng.below(10);
    for (std::size_t k = 0; k < summary_len; ++k) {
      if (rng.unit() < novelty) {
        const auto& pool = rng.unit() < summary_share ? kMedical : kGeneral;
        summary_words.push_back(pool[rng.below(pool.size())]);
      } else {
        summary_words.push_back(source_words[rng.below(source_words.size())]);
      }
    }
    char id[32];
    std::snprintf(id, sizeof(id), "%s%04zu", prefix.c_str(), i + 1);
    DatasetRecord r;
    r.id = id;
    r.query = "What does the report say about " + source_words[rng.below(source_words.size())] + "?";
    r.source = to_prose(rng, source_words);
    r.summary = to_prose(rng, summary_words);
    records.push_back(std::move(r));
  }
  return records;
}

void write(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

std::string lines(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) out += x + "\n";
  return out;
}

/// Tokenizer with the given merges; the vocabulary is every single code point
/// used, the glued marker symbols, and every merge result.
Tokenizer hand_tokenizer(const std::string& marker, const std::string& alphabet_text,
                         const std::vector<std::string>& extra, const std::vector<Merge>& merges) {
  std::vector<std::string> vocab;
  auto push = [&](const std::string& s) {
    if (std::find(vocab.begin(), vocab.end(), s) == vocab.end()) vocab.push_back(s);
  };
  if (!marker.empty()) push(marker);
  for (const auto& ch : text::split_chars(alphabet_text)) push(ch);
  for (const auto& e : extra) push(e);
  for (const auto& m : merges) {
    push(m.left);
    push(m.right);
    push(m.joined());
  }
  return Tokenizer(marker, vocab, merges);
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path("fixtures");
  fs::create_directories(dir);
  Rng rng(20240611u);

  const std::string general = corpus(rng, 60, 0.0);
  const std::string medical = corpus(rng, 60, 0.5);
  const std::string pac = corpus(rng, 80, 0.6);
  write(dir / "general.txt", general);
  write(dir / "medical.txt", medical);
  write(dir / "pac.txt", pac);
  write(dir / "general_wordlist.txt", lines(kGeneral));
  write(dir / "medical_lexicon.txt", lines(kMedical));

  // 200-token SentencePiece-style tokenizer trained on the general corpus.
  const std::string sp_marker = "\xE2\x96\x81";  // ▁
  BpeTrainer trainer(text::count_words(general), sp_marker);
  while (trainer.vocab_size() < 200 && trainer.step()) {
  }
  const Tokenizer toy = trainer.tokenizer();
  save_tokenizer(toy, dir / "toy_llama.json");

  save_dataset(dataset(rng, "train", 160), dir / "train.jsonl");
  const auto test = dataset(rng, "test", 424);
  save_dataset(test, dir / "test.jsonl");

  std::string predictions;
  for (const auto& r : test) {
    const auto words = text::pretokenize(r.source);
    std::string hyp;
    for (std::size_t i = 0; i < words.size() && i < 14; ++i) hyp += (i ? " " : "") + words[i];
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["hypothesis"] = hyp;
    predictions += j.dump() + "\n";
  }
  write(dir / "predictions.jsonl", predictions);

  EmbeddingMatrixXd emb(static_cast<Eigen::Index>(toy.size()), 8);
  for (Eigen::Index r = 0; r < emb.rows(); ++r) {
    for (Eigen::Index c = 0; c < emb.cols(); ++c) {
      emb(r, c) = (static_cast<double>(rng.below(20001)) - 10000.0) / 10000.0;
    }
  }
  save_matrix(emb, dir / "toy_llama_embeddings.txt");

  // 100 lexicon words as scaffolding targets.
  write(dir / "scaffold_targets.txt", lines(std::vector<std::string>(kMedical.begin(), kMedical.begin() + 100)));

  // Reproduces the Llama-2 splits of "cardiomyopathy" and "antipyretics".
  const Tokenizer llama2 = hand_tokenizer(sp_marker, "cardiomyopathyantipyretics", {sp_marker + "c", sp_marker + "a"},
                                          {{sp_marker + "c", "a"},
                                           {sp_marker + "ca", "r"},
                                           {sp_marker + "car", "d"},
                                           {"i", "o"},
                                           {"io", "m"},
                                           {"o", "p"},
                                           {"a", "t"},
                                           {"at", "h"},
                                           {sp_marker + "a", "n"},
                                           {sp_marker + "an", "t"},
                                           {"i", "p"},
                                           {"r", "e"},
                                           {"re", "t"},
                                           {"i", "c"},
                                           {"ic", "s"}});
  save_tokenizer(llama2, dir / "llama2_style.json");

  // Base segmentation of "cholesterol" is [cho, le, sterol].
  const Tokenizer table3 = hand_tokenizer("", "cholesterol", {},
                                          {{"c", "h"},
                                           {"ch", "o"},
                                           {"l", "e"},
                                           {"s", "t"},
                                           {"st", "e"},
                                           {"ste", "r"},
                                           {"ster", "o"},
                                           {"stero", "l"}});
  save_tokenizer(table3, dir / "cholesterol_tokenizer.json");

  // Base splits [Ġmicrobi, ologically] and [Ġinhib, itory]; the added set
  // keeps "biological" and "inhibitor" whole under AdaptBPE.
  const std::string g = "\xC4\xA0";  // Ġ
  const Tokenizer table6 = hand_tokenizer(g, "microbiologicallyinhibitory", {g + "m", g + "i"},
                                          {{"l", "y"},
                                           {g + "m", "i"},
                                           {g + "mi", "c"},
                                           {g + "mic", "r"},
                                           {g + "micr", "o"},
                                           {g + "micro", "b"},
                                           {g + "microb", "i"},
                                           {"o", "l"},
                                           {"ol", "o"},
                                           {"olo", "g"},
                                           {"olog", "i"},
                                           {"ologi", "c"},
                                           {"ologic", "a"},
                                           {"ologica", "l"},
                                           {"ological", "ly"},
                                           {g + "i", "n"},
                                           {g + "in", "h"},
                                           {g + "inh", "i"},
                                           {g + "inhi", "b"},
                                           {"i", "t"},
                                           {"it", "o"},
                                           {"ito", "r"},
                                           {"itor", "y"}});
  save_tokenizer(table6, dir / "morph_base.json");
  save_added_vocab(plan_added_vocab(table6, {"biological", "inhibitor"}, Strategy::Scaffix), dir / "morph_added.json");

  nlohmann::ordered_json cfg;
  cfg["tokenizer"] = "fixtures/toy_llama.json";
  cfg["train"] = "fixtures/train.jsonl";
  cfg["test"] = "fixtures/test.jsonl";
  cfg["lexicon"] = "fixtures/medical_lexicon.txt";
  cfg["pac"] = "fixtures/pac.txt";
  cfg["strategy"] = "scaffix";
  cfg["quota_grid"] = {10, 20, 40, 80, 120};
  cfg["size_grid"] = {80, 160, 320};
  cfg["tolerance"] = 0.02;
  cfg["marker"] = sp_marker;
  cfg["output_dir"] = "out";
  write(dir / "pipeline.json", cfg.dump(2) + "\n");

  std::cout << "fixtures written to " << dir.string() << "\n";
  return 0;
}
