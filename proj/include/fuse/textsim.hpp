#pragma once

// Text canonicalization and the string similarity primitives.
//
// All lengths are counted in Unicode scalar values. Every similarity returns a
// value in [0, 1], scores two empty inputs as 1.0 and scores an empty input
// against a non-empty one as 0.0.

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fuse/unicode.hpp"

namespace fuse {

// Text after NFC, lowercasing and whitespace collapsing. The only way to build
// one is through normalization, so the invariants always hold.
class NormalizedText {
 public:
  NormalizedText() = default;
  explicit NormalizedText(std::string_view raw);

  const std::string& str() const noexcept { return text_; }
  bool empty() const noexcept { return text_.empty(); }

  friend bool operator==(const NormalizedText&, const NormalizedText&) = default;
  friend auto operator<=>(const NormalizedText&, const NormalizedText&) = default;

 private:
  std::string text_;
};

inline NormalizedText normalize(std::string_view raw) { return NormalizedText(raw); }

inline NormalizedText::NormalizedText(std::string_view raw) {
  const std::u32string folded = unicode::to_u32(unicode::nfc(unicode::lower(unicode::nfc(raw))));
  std::u32string collapsed;
  collapsed.reserve(folded.size());
  bool pending_space = false;
  for (char32_t c : folded) {
    if (unicode::is_space(c)) {
      pending_space = !collapsed.empty();
      continue;
    }
    if (pending_space) collapsed.push_back(U' ');
    pending_space = false;
    collapsed.push_back(c);
  }
  text_ = unicode::to_utf8(collapsed);
}

// Splits on single spaces. Empty text yields no tokens.
inline std::vector<std::string> tokenize(const NormalizedText& t) {
  std::vector<std::string> tokens;
  const std::string& s = t.str();
  size_t start = 0;
  while (start < s.size()) {
    size_t end = s.find(' ', start);
    if (end == std::string::npos) end = s.size();
    tokens.emplace_back(s.substr(start, end - start));
    start = end + 1;
  }
  return tokens;
}

// Set of contiguous length-n substrings (by code point). A non-empty text
// shorter than n contributes itself as the only gram.
inline std::set<std::u32string> char_ngrams(std::u32string_view text, size_t n) {
  std::set<std::u32string> grams;
  if (n == 0) throw UsageError("char_ngrams: n must be positive");
  if (text.empty()) return grams;
  if (text.size() < n) {
    grams.emplace(text);
    return grams;
  }
  for (size_t i = 0; i + n <= text.size(); ++i) grams.emplace(text.substr(i, n));
  return grams;
}

inline std::set<std::u32string> char_ngrams(const NormalizedText& t, size_t n) {
  return char_ngrams(unicode::to_u32(t.str()), n);
}

inline double jaccard_trigram(const NormalizedText& r, const NormalizedText& h) {
  if (r.empty() && h.empty()) return 1.0;
  const auto gr = char_ngrams(r, 3);
  const auto gh = char_ngrams(h, 3);
  size_t common = 0;
  for (const auto& g : gr) common += gh.count(g);
  const size_t united = gr.size() + gh.size() - common;
  return united == 0 ? 1.0 : static_cast<double>(common) / static_cast<double>(united);
}

// Optimal string alignment distance: insertions, deletions, substitutions and
// transpositions of adjacent symbols, with no substring edited twice.
inline size_t damerau_levenshtein(std::u32string_view a, std::u32string_view b) {
  const size_t n = a.size();
  const size_t m = b.size();
  // Three rolling rows: i-2, i-1, i.
  std::vector<size_t> before(m + 1), prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = j;
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= m; ++j) {
      const size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      size_t best = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
        best = std::min(best, before[j - 2] + 1);
      }
      cur[j] = best;
    }
    std::swap(before, prev);
    std::swap(prev, cur);
  }
  return prev[m];
}

inline size_t damerau_levenshtein(const NormalizedText& a, const NormalizedText& b) {
  return damerau_levenshtein(unicode::to_u32(a.str()), unicode::to_u32(b.str()));
}

// L(r,h) = 1 - d(r,h) / max(|r|, |h|).
inline double lexical_similarity(const NormalizedText& r, const NormalizedText& h) {
  const std::u32string a = unicode::to_u32(r.str());
  const std::u32string b = unicode::to_u32(h.str());
  const size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(damerau_levenshtein(a, b)) / static_cast<double>(longest);
}

namespace detail {

struct Match {
  size_t a = 0;
  size_t b = 0;
  size_t size = 0;
};

// Longest common substring of a[alo,ahi) and b[blo,bhi). Ties go to the block
// starting earliest in a, then earliest in b.
inline Match longest_match(std::u32string_view a, std::u32string_view b, size_t alo, size_t ahi,
                           size_t blo, size_t bhi) {
  Match best{alo, blo, 0};
  std::vector<size_t> prev(bhi - blo + 1, 0), cur(bhi - blo + 1, 0);
  // Cell j-blo+1 holds the length of the common suffix ending at (i, j).
  for (size_t i = alo; i < ahi; ++i) {
    for (size_t j = blo; j < bhi; ++j) {
      const size_t k = a[i] == b[j] ? prev[j - blo] + 1 : 0;
      cur[j - blo + 1] = k;
      if (k > best.size) best = {i + 1 - k, j + 1 - k, k};
    }
    std::swap(prev, cur);
  }
  return best;
}

}  // namespace detail

// Total characters matched by recursive longest-common-substring matching.
inline size_t matched_characters(std::u32string_view a, std::u32string_view b) {
  size_t total = 0;
  std::vector<std::pair<std::pair<size_t, size_t>, std::pair<size_t, size_t>>> pending;
  pending.push_back({{0, a.size()}, {0, b.size()}});
  while (!pending.empty()) {
    const auto [ar, br] = pending.back();
    pending.pop_back();
    const auto m = detail::longest_match(a, b, ar.first, ar.second, br.first, br.second);
    if (m.size == 0) continue;
    total += m.size;
    if (ar.first < m.a && br.first < m.b) pending.push_back({{ar.first, m.a}, {br.first, m.b}});
    if (m.a + m.size < ar.second && m.b + m.size < br.second) {
      pending.push_back({{m.a + m.size, ar.second}, {m.b + m.size, br.second}});
    }
  }
  return total;
}

// Ratcliff/Obershelp ratio 2M / (|a| + |b|). Matching always runs with the
// code-point-lexicographically smaller string first, which makes the ratio
// symmetric (the longest-match tie-break alone is order dependent).
inline double sequence_ratio(std::string_view a, std::string_view b) {
  std::u32string ua = unicode::to_u32(a);
  std::u32string ub = unicode::to_u32(b);
  const size_t total = ua.size() + ub.size();
  if (total == 0) return 1.0;
  if (ub < ua) std::swap(ua, ub);
  return 2.0 * static_cast<double>(matched_characters(ua, ub)) / static_cast<double>(total);
}

inline std::string sorted_tokens(const NormalizedText& t) {
  auto tokens = tokenize(t);
  std::sort(tokens.begin(), tokens.end());
  std::string joined;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) joined.push_back(' ');
    joined += tokens[i];
  }
  return joined;
}

// F(r,h): sequence ratio of the lexicographically token-sorted texts.
inline double token_sort_ratio(const NormalizedText& r, const NormalizedText& h) {
  return sequence_ratio(sorted_tokens(r), sorted_tokens(h));
}

}  // namespace fuse
