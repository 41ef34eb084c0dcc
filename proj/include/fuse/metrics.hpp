#pragma once

// The six FUSE scorers. Approaches 1-3 are fixed weighted sums of similarity
// components; Approaches 4-6 blend a semantic and a fluency regressor trained
// on annotated pairs. Every score is clamped to [0, 100].

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fuse/errors.hpp"
#include "fuse/features.hpp"
#include "fuse/model.hpp"
#include "fuse/phonetics.hpp"
#include "fuse/regression.hpp"
#include "fuse/semantics.hpp"
#include "fuse/textsim.hpp"
#include "fuse/trees.hpp"

namespace fuse {

inline bool is_fixed_approach(int id) { return id >= 1 && id <= 3; }
inline bool is_trained_approach(int id) { return id >= 4 && id <= 6; }

inline void check_approach(int id) {
  if (id < 1 || id > 6) throw UsageError("approach must be between 1 and 6, got " + std::to_string(id));
}

// Component weights for Approaches 1-3: alpha..delta multiply the components in
// the order (J or L, P, S, F).
struct FixedWeights {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
};

inline FixedWeights default_weights(int id) {
  switch (id) {
    case 1: return {0.7, 0.3, 0.0, 0.0};
    case 2: return {0.5, 0.2, 0.3, 0.0};
    case 3: return {0.45, 0.15, 0.30, 0.10};
    default: throw UsageError("approach " + std::to_string(id) + " has no fixed weights");
  }
}

// (semantic, fluency) output blend for Approaches 4-6.
inline std::pair<double, double> default_blend(int id) {
  switch (id) {
    case 4: return {0.5, 0.5};
    case 5: return {0.6, 0.4};
    case 6: return {0.7, 0.3};
    default: throw UsageError("approach " + std::to_string(id) + " has no blend weights");
  }
}

inline PhoneticScheme approach_scheme(int id) {
  switch (id) {
    case 1: return PhoneticScheme::kMetaphone;
    case 2: return PhoneticScheme::kDoubleMetaphonePrimary;
    case 3: return PhoneticScheme::kSoundexPlusDoubleMetaphone;
    default: return PhoneticScheme::kSoundexPlusMetaphone;
  }
}

inline double clamp_score(double x) {
  if (std::isnan(x)) throw NumericError("score is NaN");
  return std::clamp(x, 0.0, 100.0);
}

// 100 * sum(w_i c_i) / sum(w_i). Dividing by the weight total keeps identical
// pairs at exactly 100 even though the published weights do not sum to 1.0 in
// binary floating point.
inline double weighted_score(const FixedWeights& w, double c1, double c2, double c3, double c4) {
  const double total = w.alpha + w.beta + w.gamma + w.delta;
  if (!(total > 0.0)) throw UsageError("approach weights must have a positive sum");
  return clamp_score(100.0 * (w.alpha * c1 + w.beta * c2 + w.gamma * c3 + w.delta * c4) / total);
}

inline double approach1(const NormalizedText& r, const NormalizedText& h, const FixedWeights& w = default_weights(1)) {
  return weighted_score(w, jaccard_trigram(r, h), phonetic_similarity(r, h, approach_scheme(1)), 0.0, 0.0);
}

inline double approach2(const NormalizedText& r, const NormalizedText& h, const EmbeddingProvider& provider,
                        const FixedWeights& w = default_weights(2)) {
  return weighted_score(w, lexical_similarity(r, h), phonetic_similarity(r, h, approach_scheme(2)),
                        semantic_similarity(r, h, provider), 0.0);
}

inline double approach3(const NormalizedText& r, const NormalizedText& h, const EmbeddingProvider& provider,
                        const FixedWeights& w = default_weights(3)) {
  return weighted_score(w, lexical_similarity(r, h), phonetic_similarity(r, h, approach_scheme(3)),
                        semantic_similarity(r, h, provider), token_sort_ratio(r, h));
}

inline double score_fixed(int id, const NormalizedText& r, const NormalizedText& h, const EmbeddingProvider& provider,
                          const std::optional<FixedWeights>& weights = std::nullopt) {
  const FixedWeights w = weights.value_or(default_weights(id));
  switch (id) {
    case 1: return approach1(r, h, w);
    case 2: return approach2(r, h, provider, w);
    case 3: return approach3(r, h, provider, w);
    default: throw UsageError("approach " + std::to_string(id) + " needs a trained model");
  }
}

// Empty hypothesis against a non-empty reference scores 0 regardless of model.
inline double score_with_model(const ScoreModel& model, const NormalizedText& r, const NormalizedText& h,
                               const EmbeddingProvider& provider) {
  if (h.empty() && !r.empty()) return 0.0;
  return clamp_score(model.predict(extract_features(r, h, provider, model.scheme)));
}

struct AnnotatedPair {
  std::string id;
  NormalizedText reference;
  NormalizedText hypothesis;
  double semantic = 0.0;
  double fluency = 0.0;
};

struct TrainingOptions {
  double ridge_lambda = 1.0;
  TreeParams random_forest = TreeParams::random_forest();
  TreeParams gradient_boosting = TreeParams::gradient_boosting();
  std::optional<std::pair<double, double>> blend;  // defaults per approach
  std::string language_tag;
};

inline std::vector<FeatureVector> extract_all(const std::vector<AnnotatedPair>& pairs, const EmbeddingProvider& provider,
                                              PhoneticScheme scheme) {
  std::vector<NormalizedText> texts;
  for (const auto& p : pairs) {
    texts.push_back(p.reference);
    texts.push_back(p.hypothesis);
  }
  provider.prefetch(texts);
  std::vector<FeatureVector> X;
  X.reserve(pairs.size());
  for (const auto& p : pairs) X.push_back(extract_features(p.reference, p.hypothesis, provider, scheme));
  return X;
}

// Trains from precomputed features; rows line up with the target vectors.
inline ScoreModel train_from_features(int id, const std::vector<FeatureVector>& X, const std::vector<double>& semantic,
                                      const std::vector<double>& fluency, const TrainingOptions& options = {}) {
  if (!is_trained_approach(id)) throw UsageError("only approaches 4, 5 and 6 are trained, got " + std::to_string(id));
  ScoreModel m;
  m.approach = id;
  m.scheme = approach_scheme(id);
  m.language_tag = options.language_tag;
  std::tie(m.w_semantic, m.w_fluency) = options.blend.value_or(default_blend(id));
  if (id == 4) {
    m.semantic_model = ols_fit(X, semantic, Target::kSemantic);
    m.fluency_model = ols_fit(X, fluency, Target::kFluency);
  } else {
    m.scaler = MinMaxScaler::fit(X);
    const auto Z = m.scaler->apply(X);
    m.ridge_lambda = options.ridge_lambda;
    m.semantic_model = ridge_fit(Z, semantic, options.ridge_lambda, Target::kSemantic);
    m.fluency_model = id == 5 ? rf_fit(Z, fluency, options.random_forest) : gbr_fit(Z, fluency, options.gradient_boosting);
  }
  m.validate();
  return m;
}

inline ScoreModel train_approach(int id, const std::vector<AnnotatedPair>& dev, const EmbeddingProvider& provider,
                                 const TrainingOptions& options = {}) {
  if (!is_trained_approach(id)) throw UsageError("only approaches 4, 5 and 6 are trained, got " + std::to_string(id));
  const auto X = extract_all(dev, provider, approach_scheme(id));
  std::vector<double> semantic, fluency;
  for (const auto& p : dev) {
    semantic.push_back(p.semantic);
    fluency.push_back(p.fluency);
  }
  auto m = train_from_features(id, X, semantic, fluency, options);
  m.encoder_tag = provider.source_tag();
  return m;
}

}  // namespace fuse
