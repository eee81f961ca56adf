#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "vocabadapt/error.hpp"
#include "vocabadapt/rouge.hpp"

using namespace vocabadapt;

namespace {

std::vector<std::string> random_seq(std::mt19937& rng, std::size_t max_len) {
  std::vector<std::string> out(rng() % (max_len + 1));
  for (auto& s : out) s = std::string(1, static_cast<char>('a' + rng() % 5));
  return out;
}

}  // namespace

TEST_CASE("lcs length") {
  const std::vector<std::string> abcd = {"a", "b", "c", "d"};
  const std::vector<std::string> acde = {"a", "c", "d", "e"};
  const std::vector<std::string> xyz = {"x", "y", "z"};
  CHECK(lcs_length(abcd, abcd) == 4);
  CHECK(lcs_length(abcd, xyz) == 0);
  CHECK(lcs_length(abcd, acde) == 3);
  CHECK(lcs_length(std::vector<std::string>{}, abcd) == 0);
}

TEST_CASE("rouge-l examples") {
  const auto s = rouge_l_f("a b c d", "a c d e");
  CHECK(s.precision == 0.75);
  CHECK(s.recall == 0.75);
  CHECK(s.f1 == 0.75);
  CHECK(rouge_l_f("The cat sat.", "the CAT sat").f1 == 1.0);
  const auto none = rouge_l_f("a b", "c d");
  CHECK(none.f1 == 0.0);
  CHECK(none.lcs_len == 0);
  CHECK_THROWS_AS(rouge_l_f("", "a"), DataError);
  CHECK_THROWS_AS(rouge_l_f("a", " ... "), DataError);
}

TEST_CASE("rouge-l agrees with subsequence enumeration") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = random_seq(rng, 10);
    const auto b = random_seq(rng, 10);
    const std::size_t expected = oracle::lcs(a, b);
    CHECK(lcs_length(a, b) == expected);
    CHECK(lcs_length(b, a) == expected);
    if (a.empty() || b.empty()) continue;
    const auto s = rouge_l(a, b);
    const double p = static_cast<double>(expected) / static_cast<double>(b.size());
    const double r = static_cast<double>(expected) / static_cast<double>(a.size());
    const double f = expected == 0 ? 0.0 : 2 * p * r / (p + r);
    CHECK(std::abs(s.f1 - f) <= 1e-9);
    CHECK(s.f1 >= 0.0);
    CHECK(s.f1 <= 1.0);
    CHECK((s.f1 == 0.0) == (expected == 0));
    CHECK(rouge_l(a, a).f1 == 1.0);
  }
}
