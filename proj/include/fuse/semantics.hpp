#pragma once

// Sentence-embedding similarity S(r,h) and the embedding providers behind it.
//
// Three backends resolve a normalized text to a vector:
//   StoreProvider        precomputed vectors loaded from an embedding store file
//   RemoteEncoderProvider  an HTTP encoder service, cached in memory
//   HashedNgramProvider  deterministic character n-gram hashing, needs no model
//
// Store file (UTF-8):
//   #dim=<d> source=<tag>
//   <normalized text>\t<d space-separated decimal floats>
//   ...

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>

#include "fuse/errors.hpp"
#include "fuse/textsim.hpp"

namespace fuse {

struct EmbeddingVector {
  std::vector<double> values;

  size_t dim() const noexcept { return values.size(); }
  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

inline double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dim() != v.dim()) {
    throw DataError("cosine: dimension mismatch (" + std::to_string(u.dim()) + " vs " + std::to_string(v.dim()) + ")");
  }
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (size_t i = 0; i < u.dim(); ++i) {
    dot += u.values[i] * v.values[i];
    uu += u.values[i] * u.values[i];
    vv += v.values[i] * v.values[i];
  }
  if (uu == 0.0 || vv == 0.0) throw DataError("cosine: zero vector (corrupt embedding?)");
  return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

// Hashing parameters of the offline fallback embedding. Each character n-gram
// (UTF-8 bytes) is hashed with 64-bit FNV-1a whose offset basis is XORed with
// kHashSeed; the bucket is hash % dim. Bucket counts are then L2-normalized.
inline constexpr uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr uint64_t kFnvPrime = 0x100000001b3ULL;
inline constexpr uint64_t kHashSeed = 0x46555345ULL;  // "FUSE"

inline uint64_t fnv1a64(std::string_view bytes, uint64_t basis = kFnvOffsetBasis ^ kHashSeed) {
  uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

// Counts every occurrence of every character n-gram (a text shorter than n is
// one gram). Empty text has no grams and is rejected.
inline EmbeddingVector hashed_ngram_embed(const NormalizedText& t, size_t dim, size_t n) {
  if (dim < 16) throw UsageError("hashed_ngram_embed: dim must be at least 16");
  if (n == 0) throw UsageError("hashed_ngram_embed: n must be positive");
  if (t.empty()) throw DataError("hashed_ngram_embed: cannot embed empty text");
  const std::u32string cps = unicode::to_u32(t.str());
  std::vector<double> counts(dim, 0.0);
  const size_t width = std::min(n, cps.size());
  for (size_t i = 0; i + width <= cps.size(); ++i) {
    const std::string gram = unicode::to_utf8(std::u32string_view(cps).substr(i, width));
    counts[fnv1a64(gram) % dim] += 1.0;
  }
  double norm = 0.0;
  for (double c : counts) norm += c * c;
  norm = std::sqrt(norm);
  for (double& c : counts) c /= norm;
  return {std::move(counts)};
}

class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  explicit EmbeddingStore(std::string source_tag, size_t dim = 0) : dim_(dim), source_tag_(std::move(source_tag)) {}

  size_t dim() const noexcept { return dim_; }
  size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::string& source_tag() const noexcept { return source_tag_; }
  const std::map<std::string, EmbeddingVector>& entries() const noexcept { return entries_; }

  // The first insert fixes the dimension of an undimensioned store.
  void insert(const NormalizedText& text, EmbeddingVector v) {
    if (v.dim() == 0) throw DataError("embedding for \"" + text.str() + "\" is empty");
    if (dim_ == 0) dim_ = v.dim();
    if (v.dim() != dim_) {
      throw DataError("embedding for \"" + text.str() + "\" has dim " + std::to_string(v.dim()) + ", store has " +
                      std::to_string(dim_));
    }
    for (double x : v.values) {
      if (!std::isfinite(x)) throw DataError("embedding for \"" + text.str() + "\" has a non-finite component");
    }
    entries_.insert_or_assign(text.str(), std::move(v));
  }

  const EmbeddingVector* find(const NormalizedText& text) const {
    auto it = entries_.find(text.str());
    return it == entries_.end() ? nullptr : &it->second;
  }

 private:
  size_t dim_ = 0;
  std::string source_tag_;
  std::map<std::string, EmbeddingVector> entries_;
};

namespace detail {

inline std::vector<double> parse_floats(std::string_view s, size_t line_no) {
  std::vector<double> out;
  const char* p = s.data();
  const char* end = s.data() + s.size();
  while (p < end) {
    while (p < end && *p == ' ') ++p;
    if (p == end) break;
    double x = 0.0;
    auto [next, ec] = std::from_chars(p, end, x);
    if (ec != std::errc() || (next < end && *next != ' ')) {
      throw DataError("line " + std::to_string(line_no) + ": malformed number");
    }
    out.push_back(x);
    p = next;
  }
  return out;
}

inline std::string format_double(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

}  // namespace detail

inline EmbeddingStore parse_store(std::istream& in) {
  std::string line;
  size_t line_no = 0;
  if (!std::getline(in, line)) return EmbeddingStore();
  ++line_no;
  if (!line.starts_with("#dim=")) throw DataError("line 1: expected header \"#dim=<d> source=<tag>\"");
  const size_t space = line.find(' ');
  const std::string dim_text = line.substr(5, space == std::string::npos ? std::string::npos : space - 5);
  size_t dim = 0;
  auto [p, ec] = std::from_chars(dim_text.data(), dim_text.data() + dim_text.size(), dim);
  if (ec != std::errc() || p != dim_text.data() + dim_text.size()) throw DataError("line 1: malformed dim");
  std::string tag;
  if (space != std::string::npos) {
    const std::string_view rest = std::string_view(line).substr(space + 1);
    if (!rest.starts_with("source=")) throw DataError("line 1: expected source=<tag>");
    tag = std::string(rest.substr(7));
  }
  EmbeddingStore store(tag, dim);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) throw DataError("line " + std::to_string(line_no) + ": missing tab separator");
    const std::string text = line.substr(0, tab);
    const NormalizedText key(text);
    if (key.str() != text) throw DataError("line " + std::to_string(line_no) + ": text is not normalized");
    EmbeddingVector v{detail::parse_floats(std::string_view(line).substr(tab + 1), line_no)};
    try {
      store.insert(key, std::move(v));
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return store;
}

inline EmbeddingStore load_store(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embedding store " + path.string());
  try {
    return parse_store(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

inline void write_store(const EmbeddingStore& store, std::ostream& out) {
  out << "#dim=" << store.dim() << " source=" << store.source_tag() << '\n';
  for (const auto& [text, v] : store.entries()) {
    out << text << '\t';
    for (size_t i = 0; i < v.values.size(); ++i) {
      if (i) out << ' ';
      out << detail::format_double(v.values[i]);
    }
    out << '\n';
  }
}

inline void save_store(const EmbeddingStore& store, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write embedding store " + path.string());
  write_store(store, out);
}

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  // Throws ProviderMiss when the text cannot be resolved.
  virtual EmbeddingVector embed(const NormalizedText& text) const = 0;

  virtual std::vector<EmbeddingVector> embed_batch(const std::vector<NormalizedText>& texts) const {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed(t));
    return out;
  }

  // Hint that these texts are about to be embedded. Remote backends fetch them
  // in batches up front; local ones ignore it.
  virtual void prefetch(const std::vector<NormalizedText>& /*texts*/) const {}

  virtual std::string source_tag() const = 0;
};

class StoreProvider final : public EmbeddingProvider {
 public:
  explicit StoreProvider(std::shared_ptr<const EmbeddingStore> store) : store_(std::move(store)) {}

  EmbeddingVector embed(const NormalizedText& text) const override {
    if (const auto* v = store_->find(text)) return *v;
    throw ProviderMiss(text.str());
  }
  std::string source_tag() const override { return store_->source_tag(); }
  const EmbeddingStore& store() const { return *store_; }

 private:
  std::shared_ptr<const EmbeddingStore> store_;
};

class HashedNgramProvider final : public EmbeddingProvider {
 public:
  HashedNgramProvider(size_t dim = 1024, size_t n = 3) : dim_(dim), n_(n) {
    if (dim < 16) throw UsageError("hashed n-gram provider: dim must be at least 16");
    if (n == 0) throw UsageError("hashed n-gram provider: n must be positive");
  }

  EmbeddingVector embed(const NormalizedText& text) const override {
    if (text.empty()) throw ProviderMiss(text.str());
    return hashed_ngram_embed(text, dim_, n_);
  }
  std::string source_tag() const override {
    return "hashed-ngram(dim=" + std::to_string(dim_) + ",n=" + std::to_string(n_) + ")";
  }

 private:
  size_t dim_;
  size_t n_;
};

struct RemoteOptions {
  std::chrono::milliseconds timeout{10000};
  int retries = 2;  // attempts after the first
  std::chrono::milliseconds retry_delay{200};
  size_t batch_size = 64;
  std::string source_tag = "remote";
};

// Client for an encoder service. A batch is POSTed as newline-separated texts;
// the reply carries one line of space-separated floats per text, in order.
class RemoteEncoderProvider final : public EmbeddingProvider {
 public:
  explicit RemoteEncoderProvider(const std::string& endpoint, RemoteOptions options = {})
      : options_(std::move(options)) {
    // http://host[:port][/path]
    constexpr std::string_view kScheme = "http://";
    if (!endpoint.starts_with(kScheme)) throw UsageError("remote encoder endpoint must start with http://");
    const std::string rest = endpoint.substr(kScheme.size());
    const size_t slash = rest.find('/');
    host_port_ = std::string(kScheme) + rest.substr(0, slash);
    path_ = slash == std::string::npos ? "/" : rest.substr(slash);
    if (rest.empty() || slash == 0) throw UsageError("remote encoder endpoint has no host: " + endpoint);
  }

  void prefetch(const std::vector<NormalizedText>& texts) const override {
    std::vector<NormalizedText> present;
    for (const auto& t : texts) {
      if (!t.empty()) present.push_back(t);
    }
    embed_batch(present);
  }

  EmbeddingVector embed(const NormalizedText& text) const override { return embed_batch({text}).front(); }

  std::vector<EmbeddingVector> embed_batch(const std::vector<NormalizedText>& texts) const override {
    std::vector<NormalizedText> missing;
    {
      std::lock_guard lock(mutex_);
      std::set<std::string> seen;
      for (const auto& t : texts) {
        if (t.empty()) throw ProviderMiss(t.str());
        if (!cache_.count(t.str()) && seen.insert(t.str()).second) missing.push_back(t);
      }
    }
    for (size_t begin = 0; begin < missing.size(); begin += options_.batch_size) {
      const size_t end = std::min(missing.size(), begin + options_.batch_size);
      std::vector<NormalizedText> chunk(missing.begin() + static_cast<std::ptrdiff_t>(begin),
                                        missing.begin() + static_cast<std::ptrdiff_t>(end));
      auto vectors = fetch(chunk);
      std::lock_guard lock(mutex_);
      for (size_t i = 0; i < chunk.size(); ++i) cache_.insert_or_assign(chunk[i].str(), std::move(vectors[i]));
    }
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    std::lock_guard lock(mutex_);
    for (const auto& t : texts) out.push_back(cache_.at(t.str()));
    return out;
  }

  // One round trip (with retries) for a batch; bypasses the cache.
  std::vector<EmbeddingVector> fetch(const std::vector<NormalizedText>& texts) const {
    std::string body;
    for (const auto& t : texts) {
      body += t.str();
      body.push_back('\n');
    }
    int status = 0;
    std::string reason;
    for (int attempt = 0; attempt <= options_.retries; ++attempt) {
      if (attempt > 0) std::this_thread::sleep_for(options_.retry_delay);
      httplib::Client client(host_port_);
      const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
      const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - seconds);
      client.set_connection_timeout(seconds.count(), micros.count());
      client.set_read_timeout(seconds.count(), micros.count());
      auto res = client.Post(path_, body, "text/plain; charset=utf-8");
      if (!res) {
        status = 0;
        reason = httplib::to_string(res.error());
        continue;
      }
      status = res->status;
      if (status < 200 || status >= 300) {
        reason = "HTTP " + std::to_string(status);
        continue;
      }
      return parse_reply(res->body, texts.size());
    }
    throw RemoteError(status, "remote encoder " + host_port_ + path_ + " failed after " +
                                  std::to_string(options_.retries + 1) + " attempts: " + reason);
  }

  std::string source_tag() const override { return options_.source_tag; }

 private:
  std::vector<EmbeddingVector> parse_reply(const std::string& body, size_t expected) const {
    std::vector<EmbeddingVector> out;
    std::istringstream in(body);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      EmbeddingVector v{detail::parse_floats(line, line_no)};
      if (!out.empty() && v.dim() != out.front().dim()) {
        throw DataError("remote encoder reply line " + std::to_string(line_no) + ": inconsistent dimension");
      }
      for (double x : v.values) {
        if (!std::isfinite(x)) throw DataError("remote encoder reply line " + std::to_string(line_no) + ": non-finite value");
      }
      out.push_back(std::move(v));
    }
    if (out.size() != expected) {
      throw DataError("remote encoder returned " + std::to_string(out.size()) + " vectors for " +
                      std::to_string(expected) + " texts");
    }
    return out;
  }

  RemoteOptions options_;
  std::string host_port_;
  std::string path_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, EmbeddingVector> cache_;
};

// S(r,h) = max(0, cosine). Identical texts score 1.0 and an empty text against a
// non-empty one scores 0.0; both are decided without querying the provider.
inline double semantic_similarity(const NormalizedText& r, const NormalizedText& h, const EmbeddingProvider& p) {
  if (r == h) return 1.0;
  if (r.empty() || h.empty()) return 0.0;
  const auto vectors = p.embed_batch({r, h});
  return std::max(0.0, cosine(vectors[0], vectors[1]));
}

}  // namespace fuse
