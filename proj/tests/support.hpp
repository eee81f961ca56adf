#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <unistd.h>
#include <string>
#include <vector>

#include "vocabadapt/tokenizer.hpp"

namespace testsupport {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(VOCABADAPT_FIXTURES) / name; }

inline const std::string kG = "\xC4\xA0";       // Ġ
inline const std::string kSp = "\xE2\x96\x81";  // ▁

inline std::vector<std::string> toks(std::initializer_list<const char*> xs) { return {xs.begin(), xs.end()}; }

/// Random lowercase word over a small alphabet so pairs repeat.
inline std::string random_word(std::mt19937& rng, std::size_t max_len, const std::string& alphabet = "abcde") {
  const std::size_t len = 1 + rng() % max_len;
  std::string w;
  for (std::size_t i = 0; i < len; ++i) w += alphabet[rng() % alphabet.size()];
  return w;
}

inline vocabadapt::WordCounts random_corpus(std::mt19937& rng, std::size_t max_words, std::size_t max_len,
                                            const std::string& alphabet = "abcde") {
  vocabadapt::WordCounts words;
  const std::size_t n = 1 + rng() % max_words;
  for (std::size_t i = 0; i < n; ++i) words[random_word(rng, max_len, alphabet)] += 1 + rng() % 5;
  return words;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("vocabadapt_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testsupport
