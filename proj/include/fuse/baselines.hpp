#pragma once

// Reference baselines: sentence-level BLEU, chrF and chrF++ on a 0-100 scale.
// All take (reference, hypothesis) and are not symmetric.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fuse/textsim.hpp"

namespace fuse {

namespace detail {

template <typename Seq>
std::map<Seq, size_t> ngram_counts(const std::vector<typename Seq::value_type>& items, size_t n) {
  std::map<Seq, size_t> counts;
  if (items.size() < n) return counts;
  for (size_t i = 0; i + n <= items.size(); ++i) ++counts[Seq(items.begin() + static_cast<std::ptrdiff_t>(i),
                                                              items.begin() + static_cast<std::ptrdiff_t>(i + n))];
  return counts;
}

template <typename Key>
size_t clipped_matches(const std::map<Key, size_t>& hyp, const std::map<Key, size_t>& ref) {
  size_t matches = 0;
  for (const auto& [gram, count] : hyp) {
    if (auto it = ref.find(gram); it != ref.end()) matches += std::min(count, it->second);
  }
  return matches;
}

template <typename Key>
size_t total_count(const std::map<Key, size_t>& counts) {
  size_t total = 0;
  for (const auto& [gram, count] : counts) total += count;
  return total;
}

}  // namespace detail

// Word n-grams of orders 1-4 over whitespace tokens. Unigram precision is
// unsmoothed; orders 2-4 use (matches + 1) / (total + 1). Brevity penalty
// exp(1 - |r|/|h|) applies when the hypothesis is shorter.
inline double bleu(const NormalizedText& r, const NormalizedText& h) {
  const auto ref = tokenize(r);
  const auto hyp = tokenize(h);
  if (hyp.empty()) return 0.0;
  double log_sum = 0.0;
  for (size_t n = 1; n <= 4; ++n) {
    using Gram = std::vector<std::string>;
    const auto hc = detail::ngram_counts<Gram>(hyp, n);
    const auto rc = detail::ngram_counts<Gram>(ref, n);
    const double matches = static_cast<double>(detail::clipped_matches(hc, rc));
    const double total = static_cast<double>(detail::total_count(hc));
    if (n == 1 && matches == 0.0) return 0.0;
    const double precision = n == 1 ? matches / total : (matches + 1.0) / (total + 1.0);
    log_sum += std::log(precision);
  }
  const double hl = static_cast<double>(hyp.size());
  const double rl = static_cast<double>(ref.size());
  const double bp = hl < rl ? std::exp(1.0 - rl / hl) : 1.0;
  return std::clamp(100.0 * bp * std::exp(log_sum / 4.0), 0.0, 100.0);
}

namespace detail {

struct OrderStats {
  size_t hyp = 0;
  size_t ref = 0;
  size_t match = 0;
};

// Precision and recall are averaged over the orders where both sides have
// n-grams, then combined as F-beta.
inline double f_beta_from_orders(const std::vector<OrderStats>& orders, double beta) {
  double avg_p = 0.0, avg_r = 0.0;
  size_t effective = 0;
  for (const auto& o : orders) {
    if (o.hyp == 0 || o.ref == 0) continue;
    avg_p += static_cast<double>(o.match) / static_cast<double>(o.hyp);
    avg_r += static_cast<double>(o.match) / static_cast<double>(o.ref);
    ++effective;
  }
  if (effective == 0) return 0.0;
  avg_p /= static_cast<double>(effective);
  avg_r /= static_cast<double>(effective);
  if (avg_p + avg_r == 0.0) return 0.0;
  const double b2 = beta * beta;
  return 100.0 * (1.0 + b2) * avg_p * avg_r / (b2 * avg_p + avg_r);
}

inline std::vector<OrderStats> char_order_stats(const NormalizedText& r, const NormalizedText& h, size_t max_n) {
  auto strip = [](const NormalizedText& t) {
    std::vector<char32_t> out;
    for (char32_t c : unicode::to_u32(t.str())) {
      if (c != U' ') out.push_back(c);
    }
    return out;
  };
  const auto rc = strip(r), hc = strip(h);
  std::vector<OrderStats> stats;
  for (size_t n = 1; n <= max_n; ++n) {
    const auto hg = ngram_counts<std::u32string>(hc, n);
    const auto rg = ngram_counts<std::u32string>(rc, n);
    stats.push_back({total_count(hg), total_count(rg), clipped_matches(hg, rg)});
  }
  return stats;
}

// Words with one leading or trailing ASCII punctuation mark split off, for the
// word n-grams of chrF++.
inline std::vector<std::string> chrf_words(const NormalizedText& t) {
  static constexpr std::string_view kPunct = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";
  auto is_punct = [](char c) { return kPunct.find(c) != std::string_view::npos; };
  std::vector<std::string> out;
  for (const auto& w : tokenize(t)) {
    if (unicode::length(w) == 1) {
      out.push_back(w);
    } else if (is_punct(w.back())) {
      out.push_back(w.substr(0, w.size() - 1));
      out.push_back(w.substr(w.size() - 1));
    } else if (is_punct(w.front())) {
      out.push_back(w.substr(0, 1));
      out.push_back(w.substr(1));
    } else {
      out.push_back(w);
    }
  }
  return out;
}

}  // namespace detail

// Character n-grams of orders 1..max_n with spaces removed.
inline double chrf(const NormalizedText& r, const NormalizedText& h, size_t max_n = 6, double beta = 2.0) {
  if (h.empty()) return 0.0;
  return std::clamp(detail::f_beta_from_orders(detail::char_order_stats(r, h, max_n), beta), 0.0, 100.0);
}

// chrF with word unigrams and bigrams added as two more orders.
inline double chrf_pp(const NormalizedText& r, const NormalizedText& h, size_t max_n = 6, double beta = 2.0) {
  if (h.empty()) return 0.0;
  auto stats = detail::char_order_stats(r, h, max_n);
  const auto rw = detail::chrf_words(r), hw = detail::chrf_words(h);
  for (size_t n = 1; n <= 2; ++n) {
    using Gram = std::vector<std::string>;
    const auto hg = detail::ngram_counts<Gram>(hw, n);
    const auto rg = detail::ngram_counts<Gram>(rw, n);
    stats.push_back({detail::total_count(hg), detail::total_count(rg), detail::clipped_matches(hg, rg)});
  }
  return std::clamp(detail::f_beta_from_orders(stats, beta), 0.0, 100.0);
}

enum class Baseline { kBleu, kChrf, kChrfPlusPlus };

inline Baseline parse_baseline(const std::string& s) {
  if (s == "bleu") return Baseline::kBleu;
  if (s == "chrf") return Baseline::kChrf;
  if (s == "chrfpp" || s == "chrf++") return Baseline::kChrfPlusPlus;
  throw UsageError("unknown baseline metric: " + s + " (expected bleu, chrf or chrfpp)");
}

inline const char* to_string(Baseline b) {
  return b == Baseline::kBleu ? "bleu" : b == Baseline::kChrf ? "chrf" : "chrfpp";
}

inline double baseline_score(Baseline b, const NormalizedText& r, const NormalizedText& h) {
  switch (b) {
    case Baseline::kBleu: return bleu(r, h);
    case Baseline::kChrf: return chrf(r, h);
    case Baseline::kChrfPlusPlus: return chrf_pp(r, h);
  }
  return 0.0;
}

}  // namespace fuse
