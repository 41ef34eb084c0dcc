#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fuse/correlation.hpp"
#include "fuse/dataset.hpp"
#include "fuse/metrics.hpp"
#include "fuse/pipeline.hpp"

namespace fs = std::filesystem;
using namespace fuse;

namespace {

const std::string kHeader = "id\tsource\treference\thypothesis\tsemantic\tfluency\n";

std::string rows_tsv(size_t n) {
  std::string s = kHeader;
  for (size_t i = 0; i < n; ++i) {
    s += "s" + std::to_string(i) + "\tsrc\tref " + std::to_string(i) + "\thyp " + std::to_string(i) + "\t" +
         std::to_string(i % 7) + "\t" + std::to_string(i % 5) + "\n";
  }
  return s;
}

AnnotatedDataset parse(const std::string& text, Split split = Split::kOther) {
  std::istringstream in(text);
  return parse_dataset(in, "xx", split);
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("fuse-test-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

// ---- dataset ----

TEST(Dataset, WellFormedThreeRows) {
  const auto ds = parse(kHeader + "a\tx\tHello  World\thello world\t4\t5\nb\tx\tr\th\t1\t2\nc\tx\tr\th\t3.5\t0\n");
  ASSERT_EQ(ds.rows.size(), 3u);
  EXPECT_TRUE(ds.annotated());
  EXPECT_EQ(ds.rows[0].reference, ds.rows[0].hypothesis);  // normalized on load
  EXPECT_DOUBLE_EQ(*ds.rows[2].semantic, 3.5);
  EXPECT_FALSE(ds.rows[0].overall.has_value());
}

TEST(Dataset, ColumnsInAnyOrderAndOverall) {
  const auto ds = parse("hypothesis\toverall\tid\treference\tsource\tfluency\tsemantic\nh\t7\tq\tr\ts\t2\t3\n");
  ASSERT_EQ(ds.rows.size(), 1u);
  EXPECT_EQ(ds.rows[0].id, "q");
  EXPECT_DOUBLE_EQ(*ds.rows[0].overall, 7);
  EXPECT_DOUBLE_EQ(*ds.rows[0].semantic, 3);
  EXPECT_EQ(default_dimension(ds), Dimension::kOverall);
}

TEST(Dataset, UnannotatedSetLoads) {
  const auto ds = parse("id\tsource\treference\thypothesis\na\ts\tr\th\n");
  EXPECT_EQ(ds.rows.size(), 1u);
  EXPECT_FALSE(ds.annotated());
}

TEST(Dataset, DuplicateIdNamed) {
  const auto msg = error_of([] { parse(kHeader + "a\tx\tr\th\t1\t1\ndup7\tx\tr\th\t1\t1\ndup7\tx\tr\th\t1\t1\n"); });
  EXPECT_NE(msg.find("duplicate id 'dup7'"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 4"), std::string::npos) << msg;
}

TEST(Dataset, ShapeWarning) {
  EXPECT_TRUE(parse(rows_tsv(100), Split::kDev).warnings.empty());
  const auto short_dev = parse(rows_tsv(99), Split::kDev);
  ASSERT_EQ(short_dev.warnings.size(), 1u);
  EXPECT_NE(short_dev.warnings[0].find("99 rows, expected 100"), std::string::npos);
  EXPECT_TRUE(parse(rows_tsv(200), Split::kTest).warnings.empty());
  EXPECT_EQ(parse(rows_tsv(100), Split::kTest).warnings.size(), 1u);
  EXPECT_TRUE(parse(rows_tsv(7)).warnings.empty());
}

TEST(Dataset, Errors) {
  EXPECT_THROW(parse(""), DataError);
  EXPECT_NE(error_of([] { parse("id\tsource\thypothesis\n"); }).find("missing column 'reference'"), std::string::npos);
  EXPECT_NE(error_of([] { parse("id\tsource\treference\thypothesis\tsemantic\n"); }).find("together"),
            std::string::npos);
  const auto bad = error_of([] { parse(kHeader + "a\tx\tr\th\t1\t1\nb\tx\tr\th\tgood\t1\n"); });
  EXPECT_NE(bad.find("line 3"), std::string::npos) << bad;
  EXPECT_NE(bad.find("semantic"), std::string::npos) << bad;
  EXPECT_NE(error_of([] { parse(kHeader + "a\tx\tr\th\t1\n"); }).find("expected 6 fields"), std::string::npos);
  EXPECT_THROW(parse(kHeader + "a\tx\tr\th\tnan\t1\n"), DataError);
  EXPECT_THROW(load_dataset("/nonexistent/file.tsv", "xx"), DataError);
}

TEST(Scores, RoundTripAndErrors) {
  std::ostringstream out;
  write_scores({{"a", 1.0}, {"b", 99.123456}, {"c", 0.00005}}, out);
  EXPECT_EQ(out.str(), "a\t1.0000\nb\t99.1235\nc\t0.0001\n");
  std::istringstream in(out.str());
  const auto back = parse_scores(in);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_DOUBLE_EQ(back[1].score, 99.1235);
  std::istringstream dup("a\t1\na\t2\n");
  EXPECT_THROW(parse_scores(dup), DataError);
  std::istringstream bad("a 1\n");
  EXPECT_THROW(parse_scores(bad), DataError);
}

// ---- correlation ----

namespace {

// Direct textbook formulas, written independently of the library.
double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i];
  const double mx = sx / n, my = sy / n;
  double num = 0, dx2 = 0, dy2 = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    dx2 += (x[i] - mx) * (x[i] - mx);
    dy2 += (y[i] - my) * (y[i] - my);
  }
  return num / std::sqrt(dx2 * dy2);
}

// Average rank by counting: rank = #less + (#equal + 1) / 2.
std::vector<double> oracle_ranks(const std::vector<double>& x) {
  std::vector<double> r(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    double less = 0, equal = 0;
    for (double v : x) less += v < x[i], equal += v == x[i];
    r[i] = less + (equal + 1) / 2;
  }
  return r;
}

}  // namespace

TEST(Correlation, Trivial) {
  EXPECT_DOUBLE_EQ(pearson({1, 2, 3}, {2, 4, 6}), 1.0);
  EXPECT_DOUBLE_EQ(pearson({1, 2, 3}, {3, 2, 1}), -1.0);
  EXPECT_DOUBLE_EQ(spearman({1, 2, 3}, {3, 2, 1}), -1.0);
}

TEST(Correlation, DirectFormula) {
  // mean x = 3.75, mean y = 3.25; Sxy = 22.25, Sxx = 28.75, Syy = 20.75
  const double expected = 22.25 / std::sqrt(28.75 * 20.75);
  EXPECT_NEAR(pearson({1, 2, 4, 8}, {1, 3, 2, 7}), expected, 1e-15);
  EXPECT_NEAR(expected, 0.91097, 1e-5);
}

TEST(Correlation, SpearmanTwoWayTie) {
  // x ranks: 1, 2.5, 2.5, 4, 5; y ranks: 2, 1, 3, 5, 4
  const std::vector<double> x{10, 20, 20, 30, 40}, y{5, 1, 7, 9, 8};
  EXPECT_NEAR(spearman(x, y), oracle_pearson({1, 2.5, 2.5, 4, 5}, {2, 1, 3, 5, 4}), 1e-15);
  EXPECT_EQ(average_ranks(x), (std::vector<double>{1, 2.5, 2.5, 4, 5}));
}

TEST(Correlation, MonotoneAndAffineInvariance) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  std::vector<double> x(40), y(40);
  for (size_t i = 0; i < x.size(); ++i) x[i] = g(rng), y[i] = x[i] + g(rng);
  std::vector<double> ex(x.size()), cube(x.size()), affine(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    ex[i] = std::exp(x[i]);
    cube[i] = x[i] * x[i] * x[i];
    affine[i] = 3.5 * x[i] - 2;
  }
  EXPECT_EQ(spearman(x, ex), 1.0);
  EXPECT_EQ(spearman(ex, y), spearman(x, y));
  EXPECT_EQ(spearman(cube, y), spearman(x, y));
  EXPECT_NEAR(pearson(affine, y), pearson(x, y), 1e-12);
}

TEST(Correlation, MatchesOracleOnRandomVectors) {
  std::mt19937_64 rng(20250101);
  std::uniform_real_distribution<double> u(-5, 5);
  std::uniform_int_distribution<int> small(0, 6);
  for (int trial = 0; trial < 50; ++trial) {
    const bool ties = trial % 2 == 1;
    std::vector<double> x(50), y(50);
    for (size_t i = 0; i < 50; ++i) {
      x[i] = ties ? small(rng) : u(rng);
      y[i] = ties ? small(rng) : u(rng);
    }
    EXPECT_NEAR(pearson(x, y), oracle_pearson(x, y), 1e-10);
    EXPECT_NEAR(spearman(x, y), oracle_pearson(oracle_ranks(x), oracle_ranks(y)), 1e-10);
  }
}

TEST(Correlation, Undefined) {
  EXPECT_THROW(pearson({1, 1, 1}, {1, 2, 3}), NumericError);
  EXPECT_THROW(spearman({1, 2, 3}, {4, 4, 4}), NumericError);
  EXPECT_THROW(pearson({1}, {1}), NumericError);
  EXPECT_THROW(pearson({1, 2}, {1, 2, 3}), DataError);
}

// ---- evaluate ----

TEST(Evaluate, IdentityNegationPermutation) {
  const auto ds = parse(rows_tsv(30));
  std::vector<SegmentScore> same, neg;
  for (const auto& r : ds.rows) {
    const double h = *human_score(r, Dimension::kSemantic);
    same.push_back({r.id, h});
    neg.push_back({r.id, -h});
  }
  auto c = evaluate(same, ds, Dimension::kSemantic);
  EXPECT_DOUBLE_EQ(c.pearson, 1.0);
  EXPECT_DOUBLE_EQ(c.spearman, 1.0);
  EXPECT_EQ(c.n, 30u);
  c = evaluate(neg, ds, Dimension::kSemantic);
  EXPECT_DOUBLE_EQ(c.pearson, -1.0);
  EXPECT_DOUBLE_EQ(c.spearman, -1.0);

  std::vector<SegmentScore> noisy;
  for (size_t i = 0; i < ds.rows.size(); ++i) noisy.push_back({ds.rows[i].id, std::sin(static_cast<double>(i))});
  const auto base = evaluate(noisy, ds, Dimension::kMean);
  std::mt19937 rng(3);
  for (int k = 0; k < 5; ++k) {
    std::shuffle(noisy.begin(), noisy.end(), rng);
    const auto c2 = evaluate(noisy, ds, Dimension::kMean);
    EXPECT_NEAR(c2.pearson, base.pearson, 1e-12);
    EXPECT_EQ(c2.spearman, base.spearman);
  }
}

TEST(Evaluate, MissingIdsListed) {
  const auto ds = parse(rows_tsv(5));
  const auto msg = error_of([&] { evaluate({{"s0", 1}, {"ghost", 2}, {"s1", 3}, {"phantom", 4}}, ds, Dimension::kMean); });
  EXPECT_NE(msg.find("ghost, phantom"), std::string::npos) << msg;
  const auto unannotated = parse("id\tsource\treference\thypothesis\ns0\tx\tr\th\ns1\tx\tr\th\n");
  EXPECT_THROW(evaluate({{"s0", 1}, {"s1", 2}}, unannotated, Dimension::kMean), DataError);
}

TEST(Evaluate, Approach3OnFixtureMatchesScriptedOracle) {
  // tests/oracles/evaluate_values.py
  const auto ds = load_dataset(fs::path(FUSE_FIXTURE_DIR) / "eval_pairs.tsv", "en");
  const HashedNgramProvider provider;
  const std::vector<double> oracle_scores{99.99999999999999, 66.0193891471606,  66.54895104895105, 68.9381516546751,
                                          23.222222222222225, 74.46820960797592, 61.24050786676083, 54.552795031055915,
                                          2.6470588235294117, 99.99999999999999, 73.91472527151342, 83.89819762110382};
  std::vector<SegmentScore> preds;
  for (size_t i = 0; i < ds.rows.size(); ++i) {
    const auto& r = ds.rows[i];
    preds.push_back({r.id, approach3(r.reference, r.hypothesis, provider)});
    EXPECT_NEAR(preds.back().score, oracle_scores[i], 1e-9) << r.id;
  }
  const auto c = evaluate(preds, ds, default_dimension(ds));
  EXPECT_NEAR(c.pearson, 0.8948687458331361, 1e-9);
  EXPECT_NEAR(c.spearman, 0.7263157894736844, 1e-9);
}

// ---- config ----

namespace {
PipelineConfig config_from(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "/base");
}
}  // namespace

TEST(Config, ParsesAndResolvesPaths) {
  const auto c = config_from(
      "# comment\noutput_dir = out\nlanguages = gn nah\ndev.gn = d/gn.tsv\ndev.nah = /abs/nah.tsv  # trailing\n"
      "test.gn = ../gn.test.tsv\napproaches = 1 5\nbaselines = bleu chrf++\nseed = 9\nrf.n_trees = 12\n"
      "gbr.learning_rate = 0.05\ntraining = pooled\ndimension = fluency\nridge_lambda = 2.5\n");
  EXPECT_EQ(c.output_dir, fs::path("/base/out"));
  EXPECT_EQ(c.languages, (std::vector<std::string>{"gn", "nah"}));
  EXPECT_EQ(c.dev.at("gn"), fs::path("/base/d/gn.tsv"));
  EXPECT_EQ(c.dev.at("nah"), fs::path("/abs/nah.tsv"));
  EXPECT_EQ(c.test.at("gn"), fs::path("/gn.test.tsv"));
  EXPECT_EQ(c.approaches, (std::vector<int>{1, 5}));
  EXPECT_EQ(c.baselines, (std::vector<Baseline>{Baseline::kBleu, Baseline::kChrfPlusPlus}));
  EXPECT_EQ(c.training.random_forest.seed, 9u);
  EXPECT_EQ(c.training.gradient_boosting.seed, 9u);
  EXPECT_EQ(c.training.random_forest.n_trees, 12u);
  EXPECT_DOUBLE_EQ(c.training.gradient_boosting.learning_rate, 0.05);
  EXPECT_TRUE(c.pooled);
  EXPECT_EQ(c.dimension, Dimension::kFluency);
  EXPECT_DOUBLE_EQ(c.training.ridge_lambda, 2.5);
}

TEST(Config, Errors) {
  const std::string base = "output_dir = o\nlanguages = gn\ndev.gn = g\n";
  EXPECT_NO_THROW(config_from(base));
  EXPECT_THROW(config_from(base + "colour = blue\n"), UsageError);
  EXPECT_THROW(config_from(base + "seed = 1\nseed = 2\n"), UsageError);
  EXPECT_THROW(config_from(base + "approaches = 7\n"), UsageError);
  EXPECT_THROW(config_from(base + "seed = many\n"), UsageError);
  EXPECT_THROW(config_from(base + "provider = magic\n"), UsageError);
  EXPECT_THROW(config_from(base + "provider = store\n"), UsageError);
  EXPECT_THROW(config_from(base + "provider = remote\n"), UsageError);
  EXPECT_THROW(config_from(base + "just words\n"), UsageError);
  EXPECT_THROW(config_from("languages = gn\ndev.gn = g\n"), UsageError);
  EXPECT_THROW(config_from("output_dir = o\nlanguages = gn nah\ndev.gn = g\n"), UsageError);
  EXPECT_THROW(config_from(base + "dev.bzd = b\n"), UsageError);
}

// ---- pipeline ----

namespace {

fs::path data_file(const std::string& name) { return fs::path(FUSE_DATA_DIR) / name; }

PipelineConfig small_config(const fs::path& out, std::vector<int> approaches) {
  PipelineConfig c;
  c.output_dir = out;
  c.languages = {"gn", "nah"};
  for (const auto& l : c.languages) {
    c.dev[l] = data_file(l + ".dev.tsv");
    c.test[l] = data_file(l + ".test.tsv");
  }
  c.approaches = std::move(approaches);
  return c;
}

}  // namespace

TEST(Pipeline, Approach1Smoke) {
  TempDir tmp;
  auto c = small_config(tmp.path / "out", {1});
  c.languages = {"gn"};
  c.dev.erase("nah");
  c.test.erase("nah");
  const auto result = run_pipeline(c);
  EXPECT_TRUE(fs::exists(tmp.path / "out/scores/gn/approach1.dev.tsv"));
  EXPECT_TRUE(fs::exists(tmp.path / "out/scores/gn/approach1.test.tsv"));
  EXPECT_TRUE(fs::exists(tmp.path / "out/report.tsv"));
  EXPECT_EQ(result.files.size(), 3u);
  EXPECT_FALSE(fs::exists(tmp.path / "out.staging"));
  EXPECT_TRUE(result.warnings.empty());

  // The score file agrees with direct scoring, and the report with evaluate.
  const auto dev = load_dataset(data_file("gn.dev.tsv"), "gn", Split::kDev);
  const auto scores = load_scores(tmp.path / "out/scores/gn/approach1.dev.tsv");
  ASSERT_EQ(scores.size(), dev.rows.size());
  const HashedNgramProvider provider;
  for (size_t i = 0; i < scores.size(); ++i) {
    EXPECT_EQ(scores[i].id, dev.rows[i].id);
    EXPECT_NEAR(scores[i].score, approach1(dev.rows[i].reference, dev.rows[i].hypothesis), 5e-5);
  }
  const auto c_dev = evaluate(scores, dev, Dimension::kMean);
  const auto row = std::find_if(result.report.begin(), result.report.end(), [](const ReportRow& r) {
    return r.language == "gn" && r.split == Split::kDev;
  });
  ASSERT_NE(row, result.report.end());
  EXPECT_DOUBLE_EQ(*row->pearson, c_dev.pearson);
  EXPECT_DOUBLE_EQ(*row->spearman, c_dev.spearman);
}

TEST(Pipeline, Approach5DeterministicRerun) {
  TempDir tmp;
  const auto a = run_pipeline(small_config(tmp.path / "a", {5}));
  const auto b = run_pipeline(small_config(tmp.path / "b", {5}));
  ASSERT_EQ(a.files, b.files);
  EXPECT_TRUE(std::find(a.files.begin(), a.files.end(), fs::path("models/gn/approach5.json")) != a.files.end());
  for (const auto& rel : a.files) EXPECT_EQ(slurp(tmp.path / "a" / rel), slurp(tmp.path / "b" / rel)) << rel;

  // Rerunning into the same directory replaces the files with identical content.
  const std::string first = slurp(tmp.path / "a/scores/nah/approach5.test.tsv");
  run_pipeline(small_config(tmp.path / "a", {5}));
  EXPECT_EQ(slurp(tmp.path / "a/scores/nah/approach5.test.tsv"), first);

  // The saved model reproduces the score file.
  const auto model = load_model(tmp.path / "a/models/nah/approach5.json");
  const auto test = load_dataset(data_file("nah.test.tsv"), "nah", Split::kTest);
  const auto scores = load_scores(tmp.path / "a/scores/nah/approach5.test.tsv");
  const HashedNgramProvider provider;
  for (size_t i = 0; i < scores.size(); ++i) {
    EXPECT_EQ(format_score(score_with_model(model, test.rows[i].reference, test.rows[i].hypothesis, provider)),
              format_score(scores[i].score));
  }
}

TEST(Pipeline, PooledTrainingWritesOneModel) {
  TempDir tmp;
  auto c = small_config(tmp.path / "out", {4});
  c.pooled = true;
  run_pipeline(c);
  EXPECT_TRUE(fs::exists(tmp.path / "out/models/pooled/approach4.json"));
  EXPECT_FALSE(fs::exists(tmp.path / "out/models/gn"));
}

TEST(Pipeline, MissingDatasetLeavesNoOutput) {
  TempDir tmp;
  auto c = small_config(tmp.path / "out", {1, 5});
  c.test["nah"] = tmp.path / "missing.tsv";
  try {
    run_pipeline(c);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ExitCode::kData);
    EXPECT_NE(std::string(e.what()).find("[load nah test]"), std::string::npos) << e.what();
  }
  EXPECT_FALSE(fs::exists(tmp.path / "out"));
  EXPECT_FALSE(fs::exists(tmp.path / "out.staging"));
}

TEST(Pipeline, TrainingFailureRemovesStaging) {
  TempDir tmp;
  std::ofstream(tmp.path / "tiny.tsv") << kHeader << "a\tx\tr one\th one\t1\t2\nb\tx\tr two\th two\t3\t4\n";
  PipelineConfig c;
  c.output_dir = tmp.path / "out";
  c.languages = {"xx"};
  c.dev["xx"] = tmp.path / "tiny.tsv";
  c.approaches = {1, 4};
  try {
    run_pipeline(c);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ExitCode::kNumeric);
    EXPECT_NE(std::string(e.what()).find("[train approach4 xx]"), std::string::npos) << e.what();
  }
  EXPECT_FALSE(fs::exists(tmp.path / "out"));
  EXPECT_FALSE(fs::exists(tmp.path / "out.staging"));
}

// ---- command line ----

namespace {

int run_cli(const std::string& args, const fs::path& out_file = {}) {
  std::string cmd = std::string("\"") + FUSE_CLI_PATH + "\" " + args;
  cmd += out_file.empty() ? " >/dev/null 2>&1" : " >\"" + out_file.string() + "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, ExitCodes) {
  TempDir tmp;
  const std::string dev = data_file("gn.dev.tsv").string();
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli(""), 1);
  EXPECT_EQ(run_cli("frobnicate"), 1);
  EXPECT_EQ(run_cli("score --approach 9 --data " + dev), 1);
  EXPECT_EQ(run_cli("score --approach 5 --data " + dev), 1);  // no --model
  EXPECT_EQ(run_cli("score --approach 1 --data /nonexistent.tsv"), 2);
  EXPECT_EQ(run_cli("baseline --metric meteor --data " + dev), 1);

  std::ofstream(tmp.path / "tiny.tsv") << kHeader << "a\tx\tr one\th one\t1\t2\nb\tx\tr two\th two\t3\t4\n";
  EXPECT_EQ(run_cli("train --approach 4 --data " + (tmp.path / "tiny.tsv").string() + " --out " +
                    (tmp.path / "m.json").string()),
            3);
  std::ofstream(tmp.path / "flat.txt") << "a\t1\nb\t1\n";
  EXPECT_EQ(run_cli("evaluate --scores " + (tmp.path / "flat.txt").string() + " --data " + (tmp.path / "tiny.tsv").string()), 3);
}

TEST(Cli, TrainScoreEvaluateRoundTrip) {
  TempDir tmp;
  const std::string dev = data_file("bzd.dev.tsv").string();
  const std::string test = data_file("bzd.test.tsv").string();
  const auto model = tmp.path / "m.json";
  ASSERT_EQ(run_cli("train --approach 6 --language bzd --data " + dev + " --out " + model.string()), 0);
  ASSERT_EQ(run_cli("score --approach 6 --split test --model " + model.string() + " --data " + test,
                    tmp.path / "scores.tsv"),
            0);
  ASSERT_EQ(run_cli("evaluate --dimension fluency --scores " + (tmp.path / "scores.tsv").string() + " --data " + test,
                    tmp.path / "eval.txt"),
            0);
  const auto ds = load_dataset(test, "bzd");
  const auto c = evaluate(load_scores(tmp.path / "scores.tsv"), ds, Dimension::kFluency);
  char expected[128];
  std::snprintf(expected, sizeof expected, "dimension\tfluency\npearson\t%.6f\nspearman\t%.6f\nn\t200\n", c.pearson,
                c.spearman);
  EXPECT_EQ(slurp(tmp.path / "eval.txt"), expected);

  ASSERT_EQ(run_cli("features --data " + test, tmp.path / "features.tsv"), 0);
  const auto features = slurp(tmp.path / "features.tsv");
  EXPECT_TRUE(features.starts_with("id\tlexical\tphonetic\tsemantic\tfuzzy\nbzd-test-0001\t"));
  EXPECT_EQ(std::count(features.begin(), features.end(), '\n'), 201);

  ASSERT_EQ(run_cli("baseline --metric chrfpp --data " + test, tmp.path / "chrf.tsv"), 0);
  const auto chrf = load_scores(tmp.path / "chrf.tsv");
  ASSERT_EQ(chrf.size(), 200u);
  EXPECT_EQ(format_score(chrf[3].score), format_score(chrf_pp(ds.rows[3].reference, ds.rows[3].hypothesis)));
}

TEST(Cli, PipelineCommand) {
  TempDir tmp;
  std::ofstream(tmp.path / "p.conf") << "output_dir = out\nlanguages = gn\ndev.gn = " << data_file("gn.dev.tsv").string()
                                     << "\napproaches = 2 4\nbaselines = bleu\n";
  EXPECT_EQ(run_cli("pipeline --config " + (tmp.path / "p.conf").string(), tmp.path / "stdout.txt"), 0);
  EXPECT_TRUE(fs::exists(tmp.path / "out/models/gn/approach4.json"));
  EXPECT_TRUE(fs::exists(tmp.path / "out/scores/gn/bleu.dev.tsv"));
  EXPECT_NE(slurp(tmp.path / "stdout.txt").find("approach4"), std::string::npos);
  std::ofstream(tmp.path / "bad.conf") << "output_dir = out\n";
  EXPECT_EQ(run_cli("pipeline --config " + (tmp.path / "bad.conf").string()), 1);
}
