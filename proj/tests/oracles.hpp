#pragma once

// Independent reference implementations used as test oracles.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vocabadapt/text.hpp"
#include "vocabadapt/tokenizer.hpp"

namespace oracle {

using vocabadapt::Merge;
using vocabadapt::WordCounts;

inline bool has_digit(const std::string& s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

inline std::vector<std::string> initial(const std::string& marker, const std::string& word) {
  std::vector<std::string> cps = vocabadapt::text::split_chars(word);
  if (!marker.empty()) {
    if (cps.empty()) return {marker};
    cps.front() = marker + cps.front();
  }
  return cps;
}

/// Brute-force BPE trainer: recount every adjacent pair from scratch each step,
/// scan for the maximum by hand.
inline std::vector<Merge> train(const WordCounts& words, std::size_t budget, const std::string& marker) {
  std::vector<std::pair<std::vector<std::string>, std::uint64_t>> ws;
  for (const auto& [w, c] : words) ws.push_back({initial(marker, w), c});
  std::vector<Merge> merges;
  for (std::size_t step = 0; step < budget; ++step) {
    std::vector<std::pair<std::pair<std::string, std::string>, std::uint64_t>> counts;
    for (const auto& [syms, c] : ws) {
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        if (has_digit(syms[i]) || has_digit(syms[i + 1])) continue;
        std::pair<std::string, std::string> p{syms[i], syms[i + 1]};
        bool found = false;
        for (auto& [q, n] : counts) {
          if (q == p) {
            n += c;
            found = true;
          }
        }
        if (!found) counts.push_back({p, c});
      }
    }
    if (counts.empty()) break;
    auto best = counts.front();
    for (const auto& e : counts) {
      if (e.second > best.second || (e.second == best.second && e.first < best.first)) best = e;
    }
    const Merge m{best.first.first, best.first.second};
    for (auto& [syms, c] : ws) {
      std::vector<std::string> out;
      for (std::size_t i = 0; i < syms.size();) {
        if (i + 1 < syms.size() && syms[i] == m.left && syms[i + 1] == m.right) {
          out.push_back(m.left + m.right);
          i += 2;
        } else {
          out.push_back(syms[i]);
          ++i;
        }
      }
      syms = out;
    }
    merges.push_back(m);
  }
  return merges;
}

/// Merge loop over an explicit merge list: repeatedly find the lowest-index
/// merge applicable anywhere, apply it at its leftmost position.
inline std::vector<std::string> apply_merges(std::vector<std::string> syms, const std::vector<Merge>& merges) {
  while (true) {
    bool done = true;
    for (const auto& m : merges) {
      if (has_digit(m.left) || has_digit(m.right)) continue;
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        if (syms[i] == m.left && syms[i + 1] == m.right) {
          syms[i] += syms[i + 1];
          syms.erase(syms.begin() + static_cast<std::ptrdiff_t>(i) + 1);
          done = false;
          break;
        }
      }
      if (!done) break;
    }
    if (done) return syms;
  }
}

/// Intermediates needed to make each target one token: append the join of the
/// first two pieces as a new last merge until the target segments whole.
inline std::set<std::string> scaffolds(const std::vector<std::string>& vocab, const std::vector<Merge>& base,
                                       const std::set<std::string>& targets) {
  const std::set<std::string> known(vocab.begin(), vocab.end());
  std::set<std::string> out;
  for (const auto& w : targets) {
    std::vector<Merge> merges = base;
    for (auto p = apply_merges(vocabadapt::text::split_chars(w), merges); p.size() > 1;
         p = apply_merges(vocabadapt::text::split_chars(w), merges)) {
      merges.push_back(Merge{p[0], p[1]});
      const std::string joined = p[0] + p[1];
      if (!known.contains(joined) && !targets.contains(joined)) out.insert(joined);
    }
  }
  return out;
}

/// Longest entry occurring as a substring; leftmost among equal lengths.
/// Enumerates every (start, length) pair over code points.
inline std::optional<std::pair<std::size_t, std::size_t>> longest_match(const std::set<std::string>& entries,
                                                                       const std::string& s) {
  const auto cps = vocabadapt::text::split_chars(s);
  std::optional<std::pair<std::size_t, std::size_t>> best;
  for (std::size_t len = cps.size(); len >= 1 && !best; --len) {
    for (std::size_t start = 0; start + len <= cps.size(); ++start) {
      std::string sub;
      for (std::size_t k = start; k < start + len; ++k) sub += cps[k];
      if (entries.contains(sub)) {
        best = {start, len};
        break;
      }
    }
  }
  return best;
}

/// AdaptBPE by direct recursion over substrings.
inline std::vector<std::string> adaptbpe(const std::string& marker, const std::vector<Merge>& merges,
                                         const std::set<std::string>& entries, const std::string& word) {
  std::vector<std::string> out;
  // segment: text with an optional leading marker that can never be matched.
  auto rec = [&](auto&& self, const std::string& lead, const std::string& s) -> void {
    const auto m = longest_match(entries, s);
    if (!m) {
      const std::string surface = lead + s;
      if (surface.empty()) return;
      std::vector<std::string> syms = vocabadapt::text::split_chars(s);
      if (!lead.empty()) {
        if (syms.empty()) {
          syms = {lead};
        } else {
          syms.front() = lead + syms.front();
        }
      }
      for (auto& t : apply_merges(syms, merges)) out.push_back(t);
      return;
    }
    const auto cps = vocabadapt::text::split_chars(s);
    std::string pre, mid, post;
    for (std::size_t k = 0; k < cps.size(); ++k) {
      (k < m->first ? pre : k < m->first + m->second ? mid : post) += cps[k];
    }
    self(self, lead, pre);
    out.push_back(mid);
    self(self, "", post);
  };
  rec(rec, marker, word);
  return out;
}

/// LCS by enumerating every subsequence of the shorter side.
inline std::size_t lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const auto& s = a.size() <= b.size() ? a : b;
  const auto& l = a.size() <= b.size() ? b : a;
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << s.size()); ++mask) {
    std::vector<std::string> sub;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (mask & (1u << i)) sub.push_back(s[i]);
    }
    if (sub.size() <= best) continue;
    std::size_t j = 0;
    for (std::size_t i = 0; i < l.size() && j < sub.size(); ++i) {
      if (l[i] == sub[j]) ++j;
    }
    if (j == sub.size()) best = sub.size();
  }
  return best;
}

}  // namespace oracle
