#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace vocabadapt {

inline constexpr const char* kVersion = "0.3.0";

/// Resolved pipeline settings: defaults, then the JSON config file, then flags.
struct PipelineConfig {
  std::string tokenizer;
  std::string train;
  std::string test;
  std::string lexicon;
  std::string general_wordlist;
  std::string pac;
  std::string strategy = "scaffix";
  std::vector<std::size_t> quota_grid;
  std::vector<std::size_t> size_grid = {1000, 2000, 5000, 10000};
  double tolerance = 0.02;
  std::string marker = "\xC4\xA0";  // Ġ
  std::string output_dir = "out";

  PipelineConfig();

  nlohmann::ordered_json to_json() const;
  /// Overlays the keys present in `j`; unknown keys are configuration errors.
  void merge_json(const nlohmann::json& j);
  /// FNV-1a of the canonical JSON form, as 16 hex digits.
  std::string hash() const;
};

PipelineConfig load_config(const std::filesystem::path& path);

/// Exit codes: 0 success, 2 configuration error, 3 data error, 4 internal invariant violation.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace vocabadapt
