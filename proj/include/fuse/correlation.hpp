#pragma once

// Pearson and Spearman correlation, and scoring predictions against a dataset.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "fuse/dataset.hpp"
#include "fuse/errors.hpp"

namespace fuse {

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DataError("pearson: vectors differ in length");
  const size_t n = x.size();
  if (n < 2) throw NumericError("pearson: needs at least 2 points, got " + std::to_string(n));
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw NumericError("correlation undefined: zero variance");
  const double r = sxy / std::sqrt(sxx * syy);
  if (!std::isfinite(r)) throw NumericError("correlation undefined: non-finite input");
  return std::clamp(r, -1.0, 1.0);
}

// 1-based ranks; tied values share the mean of the ranks they span.
inline std::vector<double> average_ranks(const std::vector<double>& x) {
  std::vector<size_t> order(x.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (size_t i = 0; i < order.size();) {
    size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DataError("spearman: vectors differ in length");
  return pearson(average_ranks(x), average_ranks(y));
}

enum class Dimension { kSemantic, kFluency, kOverall, kMean };

inline const char* to_string(Dimension d) {
  switch (d) {
    case Dimension::kSemantic: return "semantic";
    case Dimension::kFluency: return "fluency";
    case Dimension::kOverall: return "overall";
    case Dimension::kMean: return "mean";
  }
  return "";
}

inline Dimension parse_dimension(const std::string& s) {
  if (s == "semantic") return Dimension::kSemantic;
  if (s == "fluency") return Dimension::kFluency;
  if (s == "overall") return Dimension::kOverall;
  if (s == "mean") return Dimension::kMean;
  throw UsageError("unknown dimension: " + s + " (expected semantic, fluency, overall or mean)");
}

// overall when the dataset has it, otherwise the mean of semantic and fluency.
inline Dimension default_dimension(const AnnotatedDataset& ds) {
  const bool has_overall = !ds.rows.empty() && std::all_of(ds.rows.begin(), ds.rows.end(),
                                                           [](const DatasetRow& r) { return r.overall.has_value(); });
  return has_overall ? Dimension::kOverall : Dimension::kMean;
}

inline std::optional<double> human_score(const DatasetRow& row, Dimension d) {
  switch (d) {
    case Dimension::kSemantic: return row.semantic;
    case Dimension::kFluency: return row.fluency;
    case Dimension::kOverall: return row.overall;
    case Dimension::kMean:
      if (!row.semantic || !row.fluency) return std::nullopt;
      return (*row.semantic + *row.fluency) / 2.0;
  }
  return std::nullopt;
}

struct Correlations {
  double pearson = 0.0;
  double spearman = 0.0;
  size_t n = 0;
};

// Joins predictions to the dataset by id. Every prediction id must exist in the
// dataset and carry the requested human score.
inline Correlations evaluate(const std::vector<SegmentScore>& predictions, const AnnotatedDataset& ds, Dimension d) {
  std::map<std::string, const DatasetRow*> by_id;
  for (const auto& r : ds.rows) by_id.emplace(r.id, &r);
  std::vector<std::string> missing;
  std::vector<double> pred, human;
  for (const auto& p : predictions) {
    const auto it = by_id.find(p.id);
    if (it == by_id.end()) {
      missing.push_back(p.id);
      continue;
    }
    const auto h = human_score(*it->second, d);
    if (!h) throw DataError("segment '" + p.id + "' has no " + to_string(d) + " annotation");
    pred.push_back(p.score);
    human.push_back(*h);
  }
  if (!missing.empty()) {
    std::string list;
    for (size_t i = 0; i < missing.size() && i < 10; ++i) list += (i ? ", " : "") + missing[i];
    if (missing.size() > 10) list += ", ... (" + std::to_string(missing.size()) + " total)";
    throw DataError("prediction ids not in dataset: " + list);
  }
  return {pearson(pred, human), spearman(pred, human), pred.size()};
}

}  // namespace fuse
