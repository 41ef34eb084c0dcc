#pragma once

// Trained scorer for Approaches 4-6 and its JSON model file.
//
// Model file (format "fuse-model/1"):
//   {
//     "format": "fuse-model/1",
//     "approach": 4 | 5 | 6,
//     "language": "<tag>",
//     "encoder": "<embedding source tag>",
//     "phonetic_scheme": "soundex+metaphone",
//     "blend": {"semantic": w1, "fluency": w2},
//     "scaler": null | {"mins": [4 numbers], "maxs": [4 numbers]},
//     "ridge_lambda": null | number,
//     "semantic_model": <linear>,
//     "fluency_model": <linear> | <ensemble>
//   }
//   <linear>   = {"kind": "linear", "target": "semantic"|"fluency", "weights": [4], "intercept": x}
//   <ensemble> = {"kind": "random_forest"|"gradient_boosting", "target": "fluency",
//                 "params": {"n_trees", "max_depth", "min_leaf", "learning_rate", "bootstrap",
//                            "max_features", "seed"},
//                 "base_prediction": x,
//                 "trees": [[[feature, threshold, left, right, value], ...], ...]}
// Leaves carry feature -1. Numbers are written in shortest round-trip form, so a
// reloaded model predicts bit-identically.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "fuse/errors.hpp"
#include "fuse/features.hpp"
#include "fuse/phonetics.hpp"
#include "fuse/regression.hpp"
#include "fuse/trees.hpp"

namespace fuse {

inline constexpr const char* kModelFormat = "fuse-model/1";

struct ScoreModel {
  int approach = 4;
  std::optional<MinMaxScaler> scaler;
  LinearModel semantic_model;
  std::variant<LinearModel, TreeEnsemble> fluency_model;
  double w_semantic = 0.5;
  double w_fluency = 0.5;
  std::optional<double> ridge_lambda;
  PhoneticScheme scheme = PhoneticScheme::kSoundexPlusMetaphone;
  std::string language_tag;
  std::string encoder_tag;

  double predict_semantic(const FeatureVector& x) const { return semantic_model.predict(prepare(x)); }

  double predict_fluency(const FeatureVector& x) const {
    const FeatureVector z = prepare(x);
    return std::visit([&](const auto& m) { return m.predict(z); }, fluency_model);
  }

  // Blended output before clamping.
  double predict(const FeatureVector& x) const {
    return w_semantic * predict_semantic(x) + w_fluency * predict_fluency(x);
  }

  void validate() const {
    if (approach < 4 || approach > 6) throw DataError("model approach must be 4, 5 or 6, got " + std::to_string(approach));
    if (!(w_semantic >= 0.0 && w_fluency >= 0.0) || std::abs(w_semantic + w_fluency - 1.0) > 1e-12) {
      throw DataError("model blend weights must be non-negative and sum to 1");
    }
  }

 private:
  FeatureVector prepare(const FeatureVector& x) const { return scaler ? scaler->apply(x) : x; }
};

namespace detail {

using nlohmann::json;

inline json linear_to_json(const LinearModel& m) {
  return {{"kind", "linear"}, {"target", to_string(m.target)}, {"weights", m.weights}, {"intercept", m.intercept}};
}

inline json ensemble_to_json(const TreeEnsemble& e) {
  json trees = json::array();
  for (const auto& t : e.trees) {
    json nodes = json::array();
    for (const auto& n : t.nodes) nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.value}));
    trees.push_back(std::move(nodes));
  }
  const auto& p = e.params;
  return {{"kind", to_string(e.kind)},
          {"target", "fluency"},
          {"params",
           {{"n_trees", p.n_trees},
            {"max_depth", p.max_depth},
            {"min_leaf", p.min_leaf},
            {"learning_rate", p.learning_rate},
            {"bootstrap", p.bootstrap},
            {"max_features", p.max_features},
            {"seed", p.seed}}},
          {"base_prediction", e.base_prediction},
          {"trees", std::move(trees)}};
}

inline double finite(const json& j, const char* what) {
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw DataError(std::string("model file: non-finite ") + what);
  return x;
}

inline LinearModel linear_from_json(const json& j) {
  LinearModel m;
  m.target = parse_target(j.at("target").get<std::string>());
  const auto& w = j.at("weights");
  if (!w.is_array() || w.size() != kNumFeatures) throw DataError("model file: linear weights must have 4 entries");
  for (size_t i = 0; i < kNumFeatures; ++i) m.weights[i] = finite(w[i], "weight");
  m.intercept = finite(j.at("intercept"), "intercept");
  return m;
}

inline TreeEnsemble ensemble_from_json(const json& j) {
  TreeEnsemble e;
  e.kind = parse_ensemble_kind(j.at("kind").get<std::string>());
  const auto& p = j.at("params");
  e.params.n_trees = p.at("n_trees").get<size_t>();
  e.params.max_depth = p.at("max_depth").get<size_t>();
  e.params.min_leaf = p.at("min_leaf").get<size_t>();
  e.params.learning_rate = finite(p.at("learning_rate"), "learning rate");
  e.params.bootstrap = p.at("bootstrap").get<bool>();
  e.params.max_features = p.at("max_features").get<size_t>();
  e.params.seed = p.at("seed").get<uint64_t>();
  e.base_prediction = finite(j.at("base_prediction"), "base prediction");
  for (const auto& t : j.at("trees")) {
    RegressionTree tree;
    for (const auto& n : t) {
      if (!n.is_array() || n.size() != 5) throw DataError("model file: tree node must have 5 entries");
      tree.nodes.push_back({n[0].get<int>(), finite(n[1], "threshold"), n[2].get<int>(), n[3].get<int>(),
                            finite(n[4], "leaf value")});
    }
    const int count = static_cast<int>(tree.nodes.size());
    if (count == 0) throw DataError("model file: empty tree");
    for (int i = 0; i < count; ++i) {
      const auto& n = tree.nodes[static_cast<size_t>(i)];
      if (n.feature < -1 || n.feature >= static_cast<int>(kNumFeatures)) throw DataError("model file: bad split feature");
      if (n.feature >= 0 && (n.left <= i || n.right <= i || n.left >= count || n.right >= count)) {
        throw DataError("model file: bad child index");
      }
    }
    e.trees.push_back(std::move(tree));
  }
  if (e.trees.size() != e.params.n_trees) throw DataError("model file: tree count does not match n_trees");
  return e;
}

}  // namespace detail

inline nlohmann::json model_to_json(const ScoreModel& m) {
  using nlohmann::json;
  json j;
  j["format"] = kModelFormat;
  j["approach"] = m.approach;
  j["language"] = m.language_tag;
  j["encoder"] = m.encoder_tag;
  j["phonetic_scheme"] = to_string(m.scheme);
  j["blend"] = {{"semantic", m.w_semantic}, {"fluency", m.w_fluency}};
  j["scaler"] = m.scaler ? json{{"mins", m.scaler->mins()}, {"maxs", m.scaler->maxs()}} : json(nullptr);
  j["ridge_lambda"] = m.ridge_lambda ? json(*m.ridge_lambda) : json(nullptr);
  j["semantic_model"] = detail::linear_to_json(m.semantic_model);
  j["fluency_model"] = std::visit(
      [](const auto& f) {
        if constexpr (std::is_same_v<std::decay_t<decltype(f)>, LinearModel>) {
          return detail::linear_to_json(f);
        } else {
          return detail::ensemble_to_json(f);
        }
      },
      m.fluency_model);
  return j;
}

inline ScoreModel model_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw DataError("model file: expected a JSON object");
    const auto format = j.at("format").get<std::string>();
    if (format != kModelFormat) {
      throw VersionMismatch("model file format is \"" + format + "\", this build reads \"" + kModelFormat + "\"");
    }
    ScoreModel m;
    m.approach = j.at("approach").get<int>();
    m.language_tag = j.at("language").get<std::string>();
    m.encoder_tag = j.at("encoder").get<std::string>();
    try {
      m.scheme = parse_phonetic_scheme(j.at("phonetic_scheme").get<std::string>());
    } catch (const UsageError& e) {
      throw DataError(std::string("model file: ") + e.what());
    }
    m.w_semantic = detail::finite(j.at("blend").at("semantic"), "blend weight");
    m.w_fluency = detail::finite(j.at("blend").at("fluency"), "blend weight");
    if (const auto& s = j.at("scaler"); !s.is_null()) {
      std::array<double, kNumFeatures> mins{}, maxs{};
      for (size_t i = 0; i < kNumFeatures; ++i) {
        mins[i] = detail::finite(s.at("mins").at(i), "scaler bound");
        maxs[i] = detail::finite(s.at("maxs").at(i), "scaler bound");
      }
      m.scaler = MinMaxScaler(mins, maxs);
    }
    if (const auto& l = j.at("ridge_lambda"); !l.is_null()) m.ridge_lambda = detail::finite(l, "ridge lambda");
    m.semantic_model = detail::linear_from_json(j.at("semantic_model"));
    const auto& f = j.at("fluency_model");
    if (f.at("kind").get<std::string>() == "linear") {
      m.fluency_model = detail::linear_from_json(f);
    } else {
      m.fluency_model = detail::ensemble_from_json(f);
    }
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

inline void save_model(const ScoreModel& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file " + path.string());
  out << model_to_json(m).dump(1) << '\n';
  if (!out) throw DataError("failed writing model file " + path.string());
}

inline ScoreModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read model file " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw DataError("model file is empty: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed model file " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace fuse
