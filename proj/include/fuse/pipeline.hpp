#pragma once

// Batch pipeline: load datasets, score or train+score every requested system,
// and write score files, models and a correlation report.
//
// Config file: one `key = value` per line, `#` starts a comment. Relative paths
// are resolved against the config file's directory.
//
//   output_dir      = out                    (required)
//   languages       = gn nah                 (required, space separated)
//   dev.<lang>      = data/gn.dev.tsv        (required for every language)
//   test.<lang>     = data/gn.test.tsv       (optional)
//   approaches      = 1 2 3 4 5 6            (default: all six)
//   baselines       = bleu chrf chrfpp       (default: none)
//   provider        = hashed | store | remote
//   provider.store  = path                   (store: one file for every language)
//   provider.store.<lang> = path             (store: per-language override)
//   provider.endpoint = http://host:port/embed
//   provider.timeout_ms, provider.retries, provider.batch_size
//   hashed.dim = 1024, hashed.n = 3
//   training        = per-language | pooled
//   dimension       = auto | semantic | fluency | overall | mean
//   ridge_lambda    = 1.0
//   seed            = 42                     (all tree ensembles)
//   rf.n_trees, rf.max_depth, rf.min_leaf, rf.max_features, rf.bootstrap
//   gbr.n_trees, gbr.max_depth, gbr.min_leaf, gbr.learning_rate
//
// Output layout under output_dir:
//   scores/<lang>/<system>.<split>.tsv
//   models/<lang or pooled>/approach<k>.json
//   report.tsv

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fuse/baselines.hpp"
#include "fuse/correlation.hpp"
#include "fuse/dataset.hpp"
#include "fuse/errors.hpp"
#include "fuse/metrics.hpp"
#include "fuse/model.hpp"
#include "fuse/semantics.hpp"

namespace fuse {

namespace fs = std::filesystem;

struct ProviderConfig {
  std::string backend = "hashed";
  size_t hashed_dim = 1024;
  size_t hashed_n = 3;
  std::optional<fs::path> store;
  std::map<std::string, fs::path> store_by_language;
  std::string endpoint;
  RemoteOptions remote;
};

struct PipelineConfig {
  fs::path output_dir;
  std::vector<std::string> languages;
  std::map<std::string, fs::path> dev;
  std::map<std::string, fs::path> test;
  std::vector<int> approaches{1, 2, 3, 4, 5, 6};
  std::vector<Baseline> baselines;
  ProviderConfig provider;
  bool pooled = false;
  std::optional<Dimension> dimension;  // nullopt: per dataset default
  TrainingOptions training;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T x{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw UsageError("config: '" + key + "' expects a number, got '" + value + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(x)) throw UsageError("config: '" + key + "' must be finite");
  }
  return x;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw UsageError("config: '" + key + "' expects true or false, got '" + value + "'");
}

}  // namespace detail

inline PipelineConfig parse_config(std::istream& in, const fs::path& base_dir) {
  PipelineConfig c;
  std::set<std::string> seen;
  auto path = [&](const std::string& v) { return fs::path(v).is_absolute() ? fs::path(v) : (base_dir / v).lexically_normal(); };
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    if (!seen.insert(key).second) throw UsageError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    auto& rf = c.training.random_forest;
    auto& gbr = c.training.gradient_boosting;
    if (key == "output_dir") {
      c.output_dir = path(value);
    } else if (key == "languages") {
      c.languages = detail::words(value);
    } else if (key.starts_with("dev.")) {
      c.dev[key.substr(4)] = path(value);
    } else if (key.starts_with("test.")) {
      c.test[key.substr(5)] = path(value);
    } else if (key == "approaches") {
      c.approaches.clear();
      for (const auto& w : detail::words(value)) {
        const int id = detail::parse_number<int>(key, w);
        check_approach(id);
        c.approaches.push_back(id);
      }
    } else if (key == "baselines") {
      for (const auto& w : detail::words(value)) c.baselines.push_back(parse_baseline(w));
    } else if (key == "provider") {
      if (value != "hashed" && value != "store" && value != "remote") {
        throw UsageError("config: provider must be hashed, store or remote");
      }
      c.provider.backend = value;
    } else if (key == "provider.store") {
      c.provider.store = path(value);
    } else if (key.starts_with("provider.store.")) {
      c.provider.store_by_language[key.substr(15)] = path(value);
    } else if (key == "provider.endpoint") {
      c.provider.endpoint = value;
    } else if (key == "provider.timeout_ms") {
      c.provider.remote.timeout = std::chrono::milliseconds(detail::parse_number<long>(key, value));
    } else if (key == "provider.retries") {
      c.provider.remote.retries = detail::parse_number<int>(key, value);
    } else if (key == "provider.batch_size") {
      c.provider.remote.batch_size = detail::parse_number<size_t>(key, value);
    } else if (key == "hashed.dim") {
      c.provider.hashed_dim = detail::parse_number<size_t>(key, value);
    } else if (key == "hashed.n") {
      c.provider.hashed_n = detail::parse_number<size_t>(key, value);
    } else if (key == "training") {
      if (value != "per-language" && value != "pooled") throw UsageError("config: training must be per-language or pooled");
      c.pooled = value == "pooled";
    } else if (key == "dimension") {
      if (value != "auto") c.dimension = parse_dimension(value);
    } else if (key == "ridge_lambda") {
      c.training.ridge_lambda = detail::parse_number<double>(key, value);
    } else if (key == "seed") {
      rf.seed = gbr.seed = detail::parse_number<uint64_t>(key, value);
    } else if (key == "rf.n_trees") {
      rf.n_trees = detail::parse_number<size_t>(key, value);
    } else if (key == "rf.max_depth") {
      rf.max_depth = detail::parse_number<size_t>(key, value);
    } else if (key == "rf.min_leaf") {
      rf.min_leaf = detail::parse_number<size_t>(key, value);
    } else if (key == "rf.max_features") {
      rf.max_features = detail::parse_number<size_t>(key, value);
    } else if (key == "rf.bootstrap") {
      rf.bootstrap = detail::parse_bool(key, value);
    } else if (key == "gbr.n_trees") {
      gbr.n_trees = detail::parse_number<size_t>(key, value);
    } else if (key == "gbr.max_depth") {
      gbr.max_depth = detail::parse_number<size_t>(key, value);
    } else if (key == "gbr.min_leaf") {
      gbr.min_leaf = detail::parse_number<size_t>(key, value);
    } else if (key == "gbr.learning_rate") {
      gbr.learning_rate = detail::parse_number<double>(key, value);
    } else {
      throw UsageError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (c.output_dir.empty()) throw UsageError("config: output_dir is required");
  if (c.languages.empty()) throw UsageError("config: languages is required");
  for (const auto& lang : c.languages) {
    if (!c.dev.count(lang)) throw UsageError("config: no dev.<lang> entry for language '" + lang + "'");
  }
  for (const auto& [lang, p] : c.dev) {
    if (std::find(c.languages.begin(), c.languages.end(), lang) == c.languages.end()) {
      throw UsageError("config: dev." + lang + " names a language not listed in languages");
    }
  }
  if (c.provider.backend == "store" && !c.provider.store && c.provider.store_by_language.empty()) {
    throw UsageError("config: provider = store needs provider.store");
  }
  if (c.provider.backend == "remote" && c.provider.endpoint.empty()) {
    throw UsageError("config: provider = remote needs provider.endpoint");
  }
  return c;
}

inline PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path.string());
  return parse_config(in, path.parent_path());
}

// Builds the provider for one language.
inline std::shared_ptr<const EmbeddingProvider> make_provider(const ProviderConfig& pc, const std::string& language) {
  if (pc.backend == "hashed") return std::make_shared<HashedNgramProvider>(pc.hashed_dim, pc.hashed_n);
  if (pc.backend == "remote") return std::make_shared<RemoteEncoderProvider>(pc.endpoint, pc.remote);
  fs::path store = pc.store.value_or(fs::path());
  if (auto it = pc.store_by_language.find(language); it != pc.store_by_language.end()) store = it->second;
  if (store.empty()) throw UsageError("no embedding store configured for language '" + language + "'");
  return std::make_shared<StoreProvider>(std::make_shared<EmbeddingStore>(load_store(store)));
}

struct ReportRow {
  std::string language;  // "average" for the cross-language mean
  std::string system;
  Split split = Split::kDev;
  Dimension dimension = Dimension::kMean;
  std::optional<double> pearson;  // nullopt: undefined
  std::optional<double> spearman;
  size_t n = 0;
};

struct PipelineResult {
  std::vector<ReportRow> report;
  std::vector<std::string> warnings;
  std::vector<fs::path> files;  // relative to output_dir
};

namespace detail {

inline std::string format_corr(const std::optional<double>& x) {
  if (!x) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *x);
  return buf;
}

// Rethrows with the stage name in front, keeping the exit code.
template <typename F>
auto staged(const std::string& stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), "[" + stage + "] " + e.what());
  }
}

inline std::string system_name(int approach) { return "approach" + std::to_string(approach); }

}  // namespace detail

inline void write_report(const std::vector<ReportRow>& rows, std::ostream& out) {
  out << "language\tsystem\tsplit\tdimension\tpearson\tspearman\tn\n";
  for (const auto& r : rows) {
    out << r.language << '\t' << r.system << '\t' << to_string(r.split) << '\t' << to_string(r.dimension) << '\t'
        << detail::format_corr(r.pearson) << '\t' << detail::format_corr(r.spearman) << '\t' << r.n << '\n';
  }
}

// Human-readable table: one block per (split, dimension), one row per system,
// Spearman/Pearson per language followed by the averages.
inline void print_report_table(const std::vector<ReportRow>& rows, const std::vector<std::string>& languages,
                               std::ostream& out) {
  std::vector<std::pair<Split, Dimension>> blocks;
  std::vector<std::string> systems;
  for (const auto& r : rows) {
    if (std::find(blocks.begin(), blocks.end(), std::make_pair(r.split, r.dimension)) == blocks.end()) {
      blocks.emplace_back(r.split, r.dimension);
    }
    if (std::find(systems.begin(), systems.end(), r.system) == systems.end()) systems.push_back(r.system);
  }
  std::vector<std::string> columns = languages;
  columns.push_back("average");
  for (const auto& [split, dim] : blocks) {
    out << "\n" << to_string(split) << " / " << to_string(dim) << " (spearman pearson)\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-12s", "system");
    out << buf;
    for (const auto& c : columns) {
      std::snprintf(buf, sizeof buf, " %19s", c.c_str());
      out << buf;
    }
    out << "\n";
    for (const auto& sys : systems) {
      bool any = false;
      std::string line;
      std::snprintf(buf, sizeof buf, "%-12s", sys.c_str());
      line += buf;
      for (const auto& c : columns) {
        const auto it = std::find_if(rows.begin(), rows.end(), [&](const ReportRow& r) {
          return r.system == sys && r.split == split && r.dimension == dim && r.language == c;
        });
        if (it == rows.end()) {
          std::snprintf(buf, sizeof buf, " %19s", "-");
        } else {
          any = true;
          std::snprintf(buf, sizeof buf, " %9s %9s", detail::format_corr(it->spearman).c_str(),
                        detail::format_corr(it->pearson).c_str());
        }
        line += buf;
      }
      if (any) out << line << "\n";
    }
  }
}

inline PipelineResult run_pipeline(const PipelineConfig& config, std::ostream* log = nullptr) {
  PipelineResult result;

  // Load every dataset before writing anything.
  struct LanguageData {
    std::string language;
    AnnotatedDataset dev;
    std::optional<AnnotatedDataset> test;
    std::shared_ptr<const EmbeddingProvider> provider;
  };
  std::vector<LanguageData> data;
  for (const auto& lang : config.languages) {
    LanguageData d;
    d.language = lang;
    d.dev = detail::staged("load " + lang + " dev", [&] { return load_dataset(config.dev.at(lang), lang, Split::kDev); });
    if (auto it = config.test.find(lang); it != config.test.end()) {
      d.test = detail::staged("load " + lang + " test", [&] { return load_dataset(it->second, lang, Split::kTest); });
    }
    d.provider = detail::staged("provider " + lang, [&] { return make_provider(config.provider, lang); });
    for (const auto* ds : {&d.dev, d.test ? &*d.test : nullptr}) {
      if (!ds) continue;
      for (const auto& w : ds->warnings) result.warnings.push_back(w);
    }
    data.push_back(std::move(d));
  }
  const bool needs_training = std::any_of(config.approaches.begin(), config.approaches.end(), is_trained_approach);
  if (needs_training) {
    for (const auto& d : data) {
      if (!d.dev.annotated()) throw DataError("[load " + d.language + " dev] trained approaches need semantic and fluency scores");
    }
  }

  // Everything is written to a staging directory that replaces files in
  // output_dir only after every stage succeeded.
  const fs::path staging = config.output_dir.string() + ".staging";
  fs::remove_all(staging);
  fs::create_directories(staging);
  auto write_file = [&](const fs::path& rel, const std::function<void(const fs::path&)>& writer) {
    fs::create_directories((staging / rel).parent_path());
    writer(staging / rel);
    result.files.push_back(rel);
  };

  try {
    // Features for trained approaches, cached per (language, split).
    std::map<std::pair<std::string, Split>, std::vector<FeatureVector>> features;
    auto features_for = [&](const LanguageData& d, const AnnotatedDataset& ds) -> const std::vector<FeatureVector>& {
      auto key = std::make_pair(d.language, ds.split);
      auto it = features.find(key);
      if (it != features.end()) return it->second;
      return features[key] = detail::staged("features " + d.language + " " + to_string(ds.split), [&] {
               std::vector<NormalizedText> texts;
               for (const auto& r : ds.rows) {
                 texts.push_back(r.reference);
                 texts.push_back(r.hypothesis);
               }
               d.provider->prefetch(texts);
               std::vector<FeatureVector> X;
               for (const auto& r : ds.rows) {
                 X.push_back(extract_features(r.reference, r.hypothesis, *d.provider, PhoneticScheme::kSoundexPlusMetaphone));
               }
               return X;
             });
    };
    auto targets = [](const AnnotatedDataset& ds, std::vector<double>& sem, std::vector<double>& flu) {
      for (const auto& r : ds.rows) {
        sem.push_back(*r.semantic);
        flu.push_back(*r.fluency);
      }
    };

    // Trained models: per language, or one pooled model per approach.
    std::map<std::pair<std::string, int>, ScoreModel> models;
    for (int id : config.approaches) {
      if (!is_trained_approach(id)) continue;
      auto options = config.training;
      if (config.pooled) {
        std::vector<FeatureVector> X;
        std::vector<double> sem, flu;
        for (const auto& d : data) {
          const auto& f = features_for(d, d.dev);
          X.insert(X.end(), f.begin(), f.end());
          targets(d.dev, sem, flu);
        }
        options.language_tag = "pooled";
        auto m = detail::staged("train " + detail::system_name(id) + " pooled",
                                [&] { return train_from_features(id, X, sem, flu, options); });
        m.encoder_tag = data.front().provider->source_tag();
        write_file(fs::path("models") / "pooled" / (detail::system_name(id) + ".json"),
                   [&](const fs::path& p) { save_model(m, p); });
        for (const auto& d : data) models[{d.language, id}] = m;
      } else {
        for (const auto& d : data) {
          std::vector<double> sem, flu;
          targets(d.dev, sem, flu);
          options.language_tag = d.language;
          auto m = detail::staged("train " + detail::system_name(id) + " " + d.language,
                                  [&] { return train_from_features(id, features_for(d, d.dev), sem, flu, options); });
          m.encoder_tag = d.provider->source_tag();
          write_file(fs::path("models") / d.language / (detail::system_name(id) + ".json"),
                     [&](const fs::path& p) { save_model(m, p); });
          models[{d.language, id}] = std::move(m);
        }
      }
      if (log) *log << "trained " << detail::system_name(id) << "\n";
    }

    struct SystemScores {
      std::string system;
      std::string language;
      const AnnotatedDataset* ds;
      std::vector<SegmentScore> scores;
    };
    std::vector<SystemScores> all_scores;

    for (const auto& d : data) {
      for (const auto* ds : {&d.dev, d.test ? &*d.test : nullptr}) {
        if (!ds) continue;
        const std::string where = d.language + " " + to_string(ds->split);
        for (int id : config.approaches) {
          const std::string name = detail::system_name(id);
          auto scores = detail::staged("score " + name + " " + where, [&] {
            std::vector<SegmentScore> out;
            if (is_trained_approach(id)) {
              const auto& m = models.at({d.language, id});
              const auto& X = features_for(d, *ds);
              for (size_t i = 0; i < ds->rows.size(); ++i) {
                const auto& r = ds->rows[i];
                const double s = r.hypothesis.empty() && !r.reference.empty() ? 0.0 : clamp_score(m.predict(X[i]));
                out.push_back({r.id, s});
              }
            } else {
              std::vector<NormalizedText> texts;
              for (const auto& r : ds->rows) {
                texts.push_back(r.reference);
                texts.push_back(r.hypothesis);
              }
              if (id != 1) d.provider->prefetch(texts);
              for (const auto& r : ds->rows) out.push_back({r.id, score_fixed(id, r.reference, r.hypothesis, *d.provider)});
            }
            return out;
          });
          all_scores.push_back({name, d.language, ds, std::move(scores)});
        }
        for (auto b : config.baselines) {
          std::vector<SegmentScore> out;
          for (const auto& r : ds->rows) out.push_back({r.id, baseline_score(b, r.reference, r.hypothesis)});
          all_scores.push_back({to_string(b), d.language, ds, std::move(out)});
        }
      }
    }

    for (const auto& s : all_scores) {
      write_file(fs::path("scores") / s.language / (s.system + "." + to_string(s.ds->split) + ".tsv"),
                 [&](const fs::path& p) { save_scores(s.scores, p); });
    }

    // Correlations against the human scores. Scores are read back at their
    // written precision so the report matches what evaluate computes from the files.
    for (const auto& s : all_scores) {
      if (!s.ds->annotated()) continue;
      const Dimension dim = config.dimension.value_or(default_dimension(*s.ds));
      ReportRow row{s.language, s.system, s.ds->split, dim, std::nullopt, std::nullopt, s.scores.size()};
      std::vector<SegmentScore> rounded;
      for (const auto& x : s.scores) rounded.push_back({x.id, std::stod(format_score(x.score))});
      try {
        const auto c = evaluate(rounded, *s.ds, dim);
        row.pearson = c.pearson;
        row.spearman = c.spearman;
      } catch (const NumericError& e) {
        result.warnings.push_back(s.system + " " + s.language + " " + to_string(s.ds->split) + ": " + e.what());
      }
      result.report.push_back(row);
    }
    // Cross-language averages; undefined if any language is undefined.
    std::vector<ReportRow> averages;
    for (const auto& r : result.report) {
      auto it = std::find_if(averages.begin(), averages.end(), [&](const ReportRow& a) {
        return a.system == r.system && a.split == r.split && a.dimension == r.dimension;
      });
      if (it != averages.end()) continue;
      ReportRow avg{"average", r.system, r.split, r.dimension, 0.0, 0.0, 0};
      size_t count = 0;
      for (const auto& o : result.report) {
        if (o.system != r.system || o.split != r.split || o.dimension != r.dimension) continue;
        ++count;
        avg.n += o.n;
        if (!o.pearson || !avg.pearson) {
          avg.pearson.reset();
          avg.spearman.reset();
        } else {
          *avg.pearson += *o.pearson;
          *avg.spearman += *o.spearman;
        }
      }
      if (avg.pearson) {
        *avg.pearson /= static_cast<double>(count);
        *avg.spearman /= static_cast<double>(count);
      }
      averages.push_back(avg);
    }
    result.report.insert(result.report.end(), averages.begin(), averages.end());
    write_file("report.tsv", [&](const fs::path& p) {
      std::ofstream out(p, std::ios::binary);
      write_report(result.report, out);
      if (!out) throw DataError("failed writing " + p.string());
    });
  } catch (...) {
    std::error_code ec;
    fs::remove_all(staging, ec);
    throw;
  }

  for (const auto& rel : result.files) {
    fs::create_directories((config.output_dir / rel).parent_path());
    fs::rename(staging / rel, config.output_dir / rel);
  }
  fs::remove_all(staging);
  return result;
}

}  // namespace fuse
