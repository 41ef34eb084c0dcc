#include "fuse/semantics.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>
#include <thread>

namespace fuse {
namespace {

namespace fs = std::filesystem;

NormalizedText N(std::string_view s) { return normalize(s); }

fs::path temp_file(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "fuse_test_semantics";
  fs::create_directories(dir);
  return dir / name;
}

TEST(Cosine, Examples) {
  EXPECT_DOUBLE_EQ(cosine({{0.6, 0.8}}, {{0.6, 0.8}}), 1.0);
  EXPECT_DOUBLE_EQ(cosine({{1, 0}}, {{0, 1}}), 0.0);
  EXPECT_NEAR(cosine({{1, 0}}, {{1, 1}}), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(cosine({{1, 2}}, {{-1, -2}}), -1.0);
}

TEST(Cosine, Errors) {
  EXPECT_THROW(cosine({{1, 0}}, {{1, 0, 0}}), DataError);
  EXPECT_THROW(cosine({{0, 0}}, {{1, 0}}), DataError);
}

TEST(HashedEmbedding, UnitNormAndDeterministic) {
  const auto a = hashed_ngram_embed(N("ñande ru yvágape"), 128, 3);
  const auto b = hashed_ngram_embed(N("ñande ru yvágape"), 128, 3);
  EXPECT_EQ(a, b);
  double norm = 0;
  for (double x : a.values) norm += x * x;
  EXPECT_NEAR(norm, 1.0, 1e-12);
}

TEST(HashedEmbedding, SingleGramHasSingleSupport) {
  // Oracle (tests/oracles/hashed_embedding.py): "abc" lands in bucket 0 at dim 64.
  const auto v = hashed_ngram_embed(N("abc"), 64, 3);
  int support = 0;
  for (double x : v.values) support += x != 0.0;
  EXPECT_EQ(support, 1);
  EXPECT_EQ(v.values[0], 1.0);
  // A text shorter than n is a single gram too.
  EXPECT_EQ(hashed_ngram_embed(N("ab"), 64, 3).values[35], 1.0);
}

TEST(HashedEmbedding, Errors) {
  EXPECT_THROW(hashed_ngram_embed(N(""), 64, 3), DataError);
  EXPECT_THROW(hashed_ngram_embed(N("abc"), 8, 3), UsageError);
}

TEST(SemanticSimilarity, MatchesDotProductOracle) {
  // Values from tests/oracles/hashed_embedding.py.
  EXPECT_NEAR(semantic_similarity(N("abcd"), N("abce"), HashedNgramProvider(64, 3)), 0.4999999999999999, 1e-12);
  EXPECT_NEAR(semantic_similarity(N("abcd"), N("abce"), HashedNgramProvider(1024, 3)), 0.4999999999999999, 1e-12);
  EXPECT_NEAR(semantic_similarity(N("ñande ru"), N("nande ru"), HashedNgramProvider(1024, 3)), 0.8333333333333336,
              1e-12);
  EXPECT_NEAR(semantic_similarity(N("hola mundo"), N("mundo hola"), HashedNgramProvider(256, 3)), 0.7, 1e-12);
}

TEST(SemanticSimilarity, IdentityEmptyAndClamping) {
  HashedNgramProvider hashed(64, 3);
  EXPECT_EQ(semantic_similarity(N("abc def"), N("abc def"), hashed), 1.0);
  EXPECT_EQ(semantic_similarity(N(""), N(""), hashed), 1.0);
  EXPECT_EQ(semantic_similarity(N("abc"), N(""), hashed), 0.0);

  auto store = std::make_shared<EmbeddingStore>("test");
  store->insert(N("up"), {{0, 1}});
  store->insert(N("right"), {{1, 0}});
  store->insert(N("down"), {{0, -1}});
  StoreProvider provider(store);
  EXPECT_EQ(semantic_similarity(N("up"), N("right"), provider), 0.0);
  EXPECT_EQ(semantic_similarity(N("up"), N("down"), provider), 0.0);  // cosine -1 clamps to 0
  EXPECT_EQ(semantic_similarity(N("up"), N("up"), provider), 1.0);
}

TEST(SemanticSimilarity, StoreMissNamesText) {
  auto store = std::make_shared<EmbeddingStore>("test");
  store->insert(N("known"), {{1, 0}});
  StoreProvider provider(store);
  try {
    semantic_similarity(N("known"), N("unknown text"), provider);
    FAIL() << "expected a miss";
  } catch (const ProviderMiss& miss) {
    EXPECT_EQ(miss.text(), "unknown text");
  }
}

TEST(SemanticSimilarity, SymmetricAndBounded) {
  HashedNgramProvider hashed(256, 3);
  const std::vector<std::string> corpus{"che ru", "ñande ru", "the cat sat", "a cat sat", "xochitl", "z"};
  for (const auto& a : corpus) {
    for (const auto& b : corpus) {
      const double ab = semantic_similarity(N(a), N(b), hashed);
      EXPECT_EQ(ab, semantic_similarity(N(b), N(a), hashed));
      EXPECT_GE(ab, 0.0);
      EXPECT_LE(ab, 1.0);
    }
  }
}

TEST(EmbeddingStore, RejectsMixedDims) {
  EmbeddingStore store("t");
  store.insert(N("a"), {{1, 2, 3}});
  EXPECT_EQ(store.dim(), 3u);
  EXPECT_THROW(store.insert(N("b"), {{1, 2}}), DataError);
  EXPECT_THROW(store.insert(N("c"), {{1, NAN, 2}}), DataError);
}

TEST(EmbeddingStore, EmptyFileGivesEmptyStore) {
  const auto path = temp_file("empty.store");
  { std::ofstream out(path); }
  const auto store = load_store(path);
  EXPECT_TRUE(store.empty());
  EXPECT_EQ(store.dim(), 0u);
}

TEST(EmbeddingStore, MalformedRecordsReportLineNumbers) {
  auto expect_error = [](const std::string& content, const std::string& needle) {
    std::istringstream in(content);
    try {
      parse_store(in);
      ADD_FAILURE() << "no error for: " << content;
    } catch (const DataError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_error("#dim=2 source=x\nhola\t1 2\nmundo\t1 2 3\n", "line 3");
  expect_error("#dim=2 source=x\nhola 1 2\n", "line 2: missing tab");
  expect_error("#dim=2 source=x\nhola\t1 zz\n", "line 2: malformed number");
  expect_error("#dim=2 source=x\nHola\t1 2\n", "line 2: text is not normalized");
  expect_error("hola\t1 2\n", "line 1");
}

TEST(EmbeddingStore, RoundTripIsExact) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  EmbeddingStore store("LaBSE");
  for (std::string text : {"ñande ru", "hola mundo", "xochitl in cuicatl", "a", "the cat sat"}) {
    EmbeddingVector v;
    for (int i = 0; i < 24; ++i) v.values.push_back(g(rng) * std::pow(10.0, static_cast<int>(rng() % 7) - 3));
    store.insert(N(text), v);
  }
  const auto path = temp_file("roundtrip.store");
  save_store(store, path);
  const auto loaded = load_store(path);
  EXPECT_EQ(loaded.dim(), 24u);
  EXPECT_EQ(loaded.source_tag(), "LaBSE");
  ASSERT_EQ(loaded.size(), store.size());
  for (const auto& [text, v] : store.entries()) {
    const auto* w = loaded.find(N(text));
    ASSERT_NE(w, nullptr);
    ASSERT_EQ(w->values.size(), v.values.size());
    for (size_t i = 0; i < v.values.size(); ++i) {
      EXPECT_EQ(std::memcmp(&w->values[i], &v.values[i], sizeof(double)), 0);
    }
  }
  // Saving again reproduces the file byte for byte.
  const auto path2 = temp_file("roundtrip2.store");
  save_store(loaded, path2);
  std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
  EXPECT_EQ(std::string(std::istreambuf_iterator<char>(a), {}), std::string(std::istreambuf_iterator<char>(b), {}));
}

// Encoder service stub on localhost answering with hashed embeddings.
class StubEncoder {
 public:
  explicit StubEncoder(int failures_before_success = 0) : failures_left_(failures_before_success) {
    server_.Post("/embed", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      if (failures_left_ > 0) {
        --failures_left_;
        res.status = 503;
        return;
      }
      std::istringstream in(req.body);
      std::string line, body;
      while (std::getline(in, line)) {
        ++texts_;
        const auto v = hashed_ngram_embed(NormalizedText(line), 32, 3);
        for (size_t i = 0; i < v.values.size(); ++i) body += (i ? " " : "") + detail::format_double(v.values[i]);
        body += "\n";
      }
      res.set_content(body, "text/plain");
    });
    server_.Post("/broken", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("1 2\n", "text/plain");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubEncoder() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint(const std::string& path = "/embed") const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }
  int requests() const { return requests_; }
  int texts() const { return texts_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> failures_left_;
  std::atomic<int> requests_{0};
  std::atomic<int> texts_{0};
};

RemoteOptions fast_options() {
  RemoteOptions o;
  o.timeout = std::chrono::milliseconds(2000);
  o.retry_delay = std::chrono::milliseconds(1);
  o.batch_size = 2;
  return o;
}

TEST(RemoteEncoder, BatchesInOrderAndCaches) {
  StubEncoder stub;
  RemoteEncoderProvider remote(stub.endpoint(), fast_options());
  const std::vector<NormalizedText> texts{N("ñande ru"), N("hola mundo"), N("che"), N("ñande ru"), N("xochitl")};
  const auto vectors = remote.embed_batch(texts);
  ASSERT_EQ(vectors.size(), texts.size());
  for (size_t i = 0; i < texts.size(); ++i) EXPECT_EQ(vectors[i], hashed_ngram_embed(texts[i], 32, 3));
  // Four distinct texts in batches of two.
  EXPECT_EQ(stub.requests(), 2);
  remote.embed_batch(texts);
  EXPECT_EQ(stub.requests(), 2);
  EXPECT_NEAR(semantic_similarity(N("abcd"), N("abce"), remote),
              semantic_similarity(N("abcd"), N("abce"), HashedNgramProvider(32, 3)), 1e-15);
}

TEST(RemoteEncoder, RetriesThenSucceeds) {
  StubEncoder stub(2);
  RemoteEncoderProvider remote(stub.endpoint(), fast_options());
  EXPECT_EQ(remote.embed(N("hola")), hashed_ngram_embed(N("hola"), 32, 3));
  EXPECT_EQ(stub.requests(), 3);
}

TEST(RemoteEncoder, NonSuccessIsRetriableErrorWithStatus) {
  StubEncoder stub(100);
  auto options = fast_options();
  options.retries = 1;
  RemoteEncoderProvider remote(stub.endpoint(), options);
  try {
    remote.embed(N("hola"));
    FAIL() << "expected RemoteError";
  } catch (const RemoteError& e) {
    EXPECT_EQ(e.status(), 503);
  }
  EXPECT_EQ(stub.requests(), 2);
}

TEST(RemoteEncoder, WrongVectorCountIsDataError) {
  StubEncoder stub;
  RemoteEncoderProvider remote(stub.endpoint("/broken"), fast_options());
  EXPECT_THROW(remote.embed_batch({N("a"), N("b")}), DataError);
}

TEST(RemoteEncoder, ConcurrentCallersShareCache) {
  StubEncoder stub;
  auto options = fast_options();
  options.batch_size = 64;
  RemoteEncoderProvider remote(stub.endpoint(), options);
  std::vector<std::thread> workers;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 4; ++t) {
    workers.emplace_back([&, t] {
      for (int i = 0; i < 20; ++i) {
        const auto text = N("text number " + std::to_string((i * 7 + t) % 10));
        if (remote.embed(text) != hashed_ngram_embed(text, 32, 3)) ++mismatches;
      }
    });
  }
  for (auto& w : workers) w.join();
  EXPECT_EQ(mismatches.load(), 0);
}

TEST(RemoteEncoder, BadEndpoint) {
  EXPECT_THROW(RemoteEncoderProvider("https://example.org/embed"), UsageError);
  EXPECT_THROW(RemoteEncoderProvider("http:///embed"), UsageError);
}

}  // namespace
}  // namespace fuse
