// fuse: command-line front end for feature extraction, training, scoring,
// baselines, evaluation and the batch pipeline.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "fuse/baselines.hpp"
#include "fuse/correlation.hpp"
#include "fuse/dataset.hpp"
#include "fuse/metrics.hpp"
#include "fuse/model.hpp"
#include "fuse/pipeline.hpp"

namespace {

using namespace fuse;

struct ProviderArgs {
  std::string backend = "hashed";
  std::string store;
  std::string endpoint;
  size_t dim = 1024;
  size_t n = 3;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--provider", backend, "Embedding backend")
        ->check(CLI::IsMember({"hashed", "store", "remote"}))
        ->capture_default_str();
    cmd->add_option("--store", store, "Embedding store file (provider=store)");
    cmd->add_option("--endpoint", endpoint, "Encoder URL (provider=remote)");
    cmd->add_option("--dim", dim, "Hashed embedding dimension")->capture_default_str();
    cmd->add_option("--ngram", n, "Hashed embedding n-gram length")->capture_default_str();
  }

  std::shared_ptr<const EmbeddingProvider> make() const {
    ProviderConfig pc;
    pc.backend = backend;
    pc.hashed_dim = dim;
    pc.hashed_n = n;
    if (!store.empty()) pc.store = store;
    pc.endpoint = endpoint;
    if (backend == "store" && store.empty()) throw UsageError("--provider store needs --store");
    if (backend == "remote" && endpoint.empty()) throw UsageError("--provider remote needs --endpoint");
    return make_provider(pc, "");
  }
};

Split parse_split(const std::string& s) {
  if (s == "dev") return Split::kDev;
  if (s == "test") return Split::kTest;
  return Split::kOther;
}

AnnotatedDataset read_dataset(const std::string& path, const std::string& language, const std::string& split) {
  auto ds = load_dataset(path, language, parse_split(split));
  for (const auto& w : ds.warnings) std::cerr << "warning: " << w << "\n";
  return ds;
}

// Writes to the file when a path is given, otherwise to stdout.
template <typename F>
void emit(const std::string& out_path, F&& writer) {
  if (out_path.empty() || out_path == "-") {
    writer(std::cout);
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw DataError("cannot write " + out_path);
  writer(out);
  if (!out) throw DataError("failed writing " + out_path);
}

int run(int argc, char** argv) {
  CLI::App app{"FUSE machine translation evaluation metrics"};
  app.require_subcommand(1);

  ProviderArgs provider;
  std::string data, out, language, split = "other", model_path, scores_path, config_path, metric, scheme_name;
  std::string dimension = "auto";
  int approach = 0;
  double lambda = 1.0;
  uint64_t seed = 42;

  auto* features = app.add_subcommand("features", "Write the [L P S F] feature vector of every pair as TSV");
  features->add_option("--data", data, "Dataset TSV")->required();
  features->add_option("--scheme", scheme_name, "Phonetic scheme")->default_str("soundex+metaphone");
  features->add_option("--out", out, "Output file (default stdout)");
  provider.add_to(features);

  auto* train = app.add_subcommand("train", "Train an Approach 4, 5 or 6 model on an annotated dev set");
  train->add_option("--approach", approach, "Approach id")->required()->check(CLI::Range(4, 6));
  train->add_option("--data", data, "Annotated dev TSV")->required();
  train->add_option("--out", out, "Model file")->required();
  train->add_option("--language", language, "Language tag recorded in the model");
  train->add_option("--lambda", lambda, "Ridge penalty")->capture_default_str();
  train->add_option("--seed", seed, "Tree ensemble seed")->capture_default_str();
  provider.add_to(train);

  auto* score = app.add_subcommand("score", "Score every pair with one approach");
  score->add_option("--approach", approach, "Approach id")->required()->check(CLI::Range(1, 6));
  score->add_option("--data", data, "Dataset TSV")->required();
  score->add_option("--model", model_path, "Model file (approaches 4-6)");
  score->add_option("--out", out, "Score file (default stdout)");
  provider.add_to(score);

  auto* baseline = app.add_subcommand("baseline", "Score every pair with BLEU, chrF or chrF++");
  baseline->add_option("--metric", metric, "bleu, chrf or chrfpp")->required();
  baseline->add_option("--data", data, "Dataset TSV")->required();
  baseline->add_option("--out", out, "Score file (default stdout)");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Correlate a score file with human annotations");
  evaluate_cmd->add_option("--scores", scores_path, "Score file")->required();
  evaluate_cmd->add_option("--data", data, "Annotated dataset TSV")->required();
  evaluate_cmd->add_option("--dimension", dimension, "auto, semantic, fluency, overall or mean")->capture_default_str();

  auto* pipeline = app.add_subcommand("pipeline", "Run the configured batch pipeline");
  pipeline->add_option("--config", config_path, "Config file")->required();

  for (auto* cmd : {features, train, score, baseline, evaluate_cmd}) {
    cmd->add_option("--split", split, "dev or test, enables the row count check")->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : static_cast<int>(ExitCode::kUsage);
  }

  if (*features) {
    const auto scheme = parse_phonetic_scheme(scheme_name.empty() ? "soundex+metaphone" : scheme_name);
    const auto ds = read_dataset(data, language, split);
    const auto p = provider.make();
    std::vector<NormalizedText> texts;
    for (const auto& r : ds.rows) {
      texts.push_back(r.reference);
      texts.push_back(r.hypothesis);
    }
    p->prefetch(texts);
    emit(out, [&](std::ostream& os) {
      os << "id\tlexical\tphonetic\tsemantic\tfuzzy\n";
      for (const auto& r : ds.rows) {
        const auto x = extract_features(r.reference, r.hypothesis, *p, scheme);
        os << r.id;
        for (size_t i = 0; i < kNumFeatures; ++i) os << '\t' << detail::format_double(x[i]);
        os << '\n';
      }
    });
  } else if (*train) {
    const auto ds = read_dataset(data, language, split.empty() ? "dev" : split);
    if (!ds.annotated()) throw DataError(data + ": training needs semantic and fluency columns");
    std::vector<AnnotatedPair> pairs;
    for (const auto& r : ds.rows) pairs.push_back({r.id, r.reference, r.hypothesis, *r.semantic, *r.fluency});
    TrainingOptions options;
    options.ridge_lambda = lambda;
    options.random_forest.seed = options.gradient_boosting.seed = seed;
    options.language_tag = language;
    const auto p = provider.make();
    save_model(train_approach(approach, pairs, *p, options), out);
  } else if (*score) {
    const auto ds = read_dataset(data, language, split);
    const auto p = provider.make();
    std::optional<ScoreModel> model;
    if (is_trained_approach(approach)) {
      if (model_path.empty()) throw UsageError("approach " + std::to_string(approach) + " needs --model");
      model = load_model(model_path);
      if (model->approach != approach) {
        throw UsageError("model file is for approach " + std::to_string(model->approach));
      }
      if (model->encoder_tag != p->source_tag()) {
        std::cerr << "warning: model was trained with embeddings '" << model->encoder_tag << "', scoring with '"
                  << p->source_tag() << "'\n";
      }
    }
    std::vector<NormalizedText> texts;
    for (const auto& r : ds.rows) {
      texts.push_back(r.reference);
      texts.push_back(r.hypothesis);
    }
    if (approach != 1) p->prefetch(texts);
    std::vector<SegmentScore> scores;
    for (const auto& r : ds.rows) {
      scores.push_back({r.id, model ? score_with_model(*model, r.reference, r.hypothesis, *p)
                                    : score_fixed(approach, r.reference, r.hypothesis, *p)});
    }
    emit(out, [&](std::ostream& os) { write_scores(scores, os); });
  } else if (*baseline) {
    const auto b = parse_baseline(metric);
    const auto ds = read_dataset(data, language, split);
    std::vector<SegmentScore> scores;
    for (const auto& r : ds.rows) scores.push_back({r.id, baseline_score(b, r.reference, r.hypothesis)});
    emit(out, [&](std::ostream& os) { write_scores(scores, os); });
  } else if (*evaluate_cmd) {
    const auto ds = read_dataset(data, language, split);
    const auto predictions = load_scores(scores_path);
    const Dimension dim = dimension == "auto" ? default_dimension(ds) : parse_dimension(dimension);
    const auto c = evaluate(predictions, ds, dim);
    std::printf("dimension\t%s\npearson\t%.6f\nspearman\t%.6f\nn\t%zu\n", to_string(dim), c.pearson, c.spearman, c.n);
  } else if (*pipeline) {
    const auto config = load_config(config_path);
    const auto result = run_pipeline(config, &std::cerr);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    print_report_table(result.report, config.languages, std::cout);
    std::cout << "\nwrote " << result.files.size() << " files to " << config.output_dir.string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const fuse::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(fuse::ExitCode::kData);
  }
}
