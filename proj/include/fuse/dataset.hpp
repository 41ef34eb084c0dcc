#pragma once

// Annotated dataset files and segment score files.
//
// Dataset: UTF-8 TSV with a header row naming the columns
//   id  source  reference  hypothesis  semantic  fluency  [overall]
// Columns may appear in any order. semantic and fluency may be left out for
// unannotated sets; such a set can be scored but not trained or evaluated on.
// Texts are normalized on load.
//
// Score file: one `<id>\t<score>` line per segment, score with 4 decimals.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fuse/errors.hpp"
#include "fuse/textsim.hpp"

namespace fuse {

enum class Split { kDev, kTest, kOther };

inline const char* to_string(Split s) { return s == Split::kDev ? "dev" : s == Split::kTest ? "test" : "other"; }

// Row counts of the shared-task splits; other counts load with a warning.
inline constexpr size_t kExpectedDevRows = 100;
inline constexpr size_t kExpectedTestRows = 200;

struct DatasetRow {
  std::string id;
  std::string source;
  NormalizedText reference;
  NormalizedText hypothesis;
  std::optional<double> semantic;
  std::optional<double> fluency;
  std::optional<double> overall;
};

struct AnnotatedDataset {
  std::string language_tag;
  Split split = Split::kOther;
  std::vector<DatasetRow> rows;
  std::vector<std::string> warnings;

  bool annotated() const {
    for (const auto& r : rows) {
      if (!r.semantic || !r.fluency) return false;
    }
    return !rows.empty();
  }
};

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(x)) return std::nullopt;
  return x;
}

inline std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace detail

inline std::optional<std::string> shape_warning(size_t rows, Split split) {
  const size_t expected = split == Split::kDev ? kExpectedDevRows : split == Split::kTest ? kExpectedTestRows : 0;
  if (expected == 0 || rows == expected) return std::nullopt;
  return std::string(to_string(split)) + " set has " + std::to_string(rows) + " rows, expected " +
         std::to_string(expected);
}

inline AnnotatedDataset parse_dataset(std::istream& in, const std::string& language_tag, Split split,
                                      const std::string& origin = "dataset") {
  AnnotatedDataset ds;
  ds.language_tag = language_tag;
  ds.split = split;
  std::string line;
  if (!std::getline(in, line)) throw DataError(origin + ": empty file, expected a header row");
  line = detail::strip_cr(line);
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);

  std::map<std::string, size_t> column;
  const auto header = detail::split_tabs(line);
  for (size_t i = 0; i < header.size(); ++i) {
    if (!column.emplace(std::string(header[i]), i).second) {
      throw DataError(origin + ": duplicate column '" + std::string(header[i]) + "'");
    }
  }
  for (const char* required : {"id", "source", "reference", "hypothesis"}) {
    if (!column.count(required)) throw DataError(origin + ": missing column '" + required + "'");
  }
  const bool has_semantic = column.count("semantic") > 0;
  const bool has_fluency = column.count("fluency") > 0;
  if (has_semantic != has_fluency) throw DataError(origin + ": columns 'semantic' and 'fluency' must appear together");
  const bool has_overall = column.count("overall") > 0;

  std::set<std::string> seen;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    const auto fields = detail::split_tabs(line);
    if (fields.size() != header.size()) {
      throw DataError(origin + ": line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(fields.size()));
    }
    auto score = [&](const char* name) -> std::optional<double> {
      const auto v = detail::parse_double(fields[column.at(name)]);
      if (!v) {
        throw DataError(origin + ": line " + std::to_string(line_no) + ": unparsable " + name + " score '" +
                        std::string(fields[column.at(name)]) + "'");
      }
      return v;
    };
    DatasetRow row;
    row.id = std::string(fields[column.at("id")]);
    if (row.id.empty()) throw DataError(origin + ": line " + std::to_string(line_no) + ": empty id");
    if (!seen.insert(row.id).second) {
      throw DataError(origin + ": line " + std::to_string(line_no) + ": duplicate id '" + row.id + "'");
    }
    row.source = std::string(fields[column.at("source")]);
    row.reference = normalize(fields[column.at("reference")]);
    row.hypothesis = normalize(fields[column.at("hypothesis")]);
    if (has_semantic) {
      row.semantic = score("semantic");
      row.fluency = score("fluency");
    }
    if (has_overall) row.overall = score("overall");
    ds.rows.push_back(std::move(row));
  }
  if (auto w = shape_warning(ds.rows.size(), split)) ds.warnings.push_back(origin + ": " + *w);
  return ds;
}

inline AnnotatedDataset load_dataset(const std::filesystem::path& path, const std::string& language_tag,
                                     Split split = Split::kOther) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read dataset " + path.string());
  return parse_dataset(in, language_tag, split, path.string());
}

struct SegmentScore {
  std::string id;
  double score = 0.0;
};

inline std::string format_score(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

inline void write_scores(const std::vector<SegmentScore>& scores, std::ostream& out) {
  for (const auto& s : scores) out << s.id << '\t' << format_score(s.score) << '\n';
}

inline void save_scores(const std::vector<SegmentScore>& scores, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write score file " + path.string());
  write_scores(scores, out);
  if (!out) throw DataError("failed writing score file " + path.string());
}

inline std::vector<SegmentScore> parse_scores(std::istream& in, const std::string& origin = "score file") {
  std::vector<SegmentScore> out;
  std::set<std::string> seen;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    const auto fields = detail::split_tabs(line);
    const auto value = fields.size() == 2 ? detail::parse_double(fields[1]) : std::nullopt;
    if (!value) throw DataError(origin + ": line " + std::to_string(line_no) + ": expected '<id>\\t<score>'");
    std::string id(fields[0]);
    if (!seen.insert(id).second) throw DataError(origin + ": line " + std::to_string(line_no) + ": duplicate id '" + id + "'");
    out.push_back({std::move(id), *value});
  }
  return out;
}

inline std::vector<SegmentScore> load_scores(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read score file " + path.string());
  return parse_scores(in, path.string());
}

}  // namespace fuse
