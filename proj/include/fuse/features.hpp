#pragma once

// The four-component feature vector X(r,h) = [L, P, S, F] and Min-Max scaling.

#include <algorithm>
#include <array>
#include <cstddef>
#include <vector>

#include "fuse/errors.hpp"
#include "fuse/phonetics.hpp"
#include "fuse/semantics.hpp"
#include "fuse/textsim.hpp"

namespace fuse {

inline constexpr size_t kNumFeatures = 4;

struct FeatureVector {
  double l = 0.0;  // lexical
  double p = 0.0;  // phonetic
  double s = 0.0;  // semantic
  double f = 0.0;  // fuzzy token-sort

  double operator[](size_t i) const { return i == 0 ? l : i == 1 ? p : i == 2 ? s : f; }
  double& operator[](size_t i) { return i == 0 ? l : i == 1 ? p : i == 2 ? s : f; }

  std::array<double, kNumFeatures> as_array() const { return {l, p, s, f}; }
  static FeatureVector from_array(const std::array<double, kNumFeatures>& a) { return {a[0], a[1], a[2], a[3]}; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

inline const char* feature_name(size_t i) {
  static constexpr const char* kNames[kNumFeatures] = {"lexical", "phonetic", "semantic", "fuzzy"};
  return kNames[i];
}

inline FeatureVector extract_features(const NormalizedText& r, const NormalizedText& h,
                                      const EmbeddingProvider& provider, PhoneticScheme scheme) {
  return {lexical_similarity(r, h), phonetic_similarity(r, h, scheme), semantic_similarity(r, h, provider),
          token_sort_ratio(r, h)};
}

class MinMaxScaler {
 public:
  MinMaxScaler() = default;
  MinMaxScaler(std::array<double, kNumFeatures> mins, std::array<double, kNumFeatures> maxs)
      : mins_(mins), maxs_(maxs) {
    for (size_t i = 0; i < kNumFeatures; ++i) {
      if (!(maxs_[i] >= mins_[i])) throw DataError("scaler: max below min for " + std::string(feature_name(i)));
    }
  }

  static MinMaxScaler fit(const std::vector<FeatureVector>& rows) {
    if (rows.size() < 2) throw NumericError("min-max scaler needs at least 2 rows, got " + std::to_string(rows.size()));
    std::array<double, kNumFeatures> mins, maxs;
    for (size_t i = 0; i < kNumFeatures; ++i) mins[i] = maxs[i] = rows.front()[i];
    for (const auto& row : rows) {
      for (size_t i = 0; i < kNumFeatures; ++i) {
        mins[i] = std::min(mins[i], row[i]);
        maxs[i] = std::max(maxs[i], row[i]);
      }
    }
    return MinMaxScaler(mins, maxs);
  }

  // Constant columns map to 0; values outside the fitted range are clamped.
  FeatureVector apply(const FeatureVector& x) const {
    FeatureVector out;
    for (size_t i = 0; i < kNumFeatures; ++i) {
      const double range = maxs_[i] - mins_[i];
      out[i] = range > 0.0 ? std::clamp((x[i] - mins_[i]) / range, 0.0, 1.0) : 0.0;
    }
    return out;
  }

  std::vector<FeatureVector> apply(const std::vector<FeatureVector>& rows) const {
    std::vector<FeatureVector> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(apply(row));
    return out;
  }

  const std::array<double, kNumFeatures>& mins() const noexcept { return mins_; }
  const std::array<double, kNumFeatures>& maxs() const noexcept { return maxs_; }

  friend bool operator==(const MinMaxScaler&, const MinMaxScaler&) = default;

 private:
  std::array<double, kNumFeatures> mins_{};
  std::array<double, kNumFeatures> maxs_{};
};

}  // namespace fuse
