#pragma once

// Argument corpus ingestion, claim/premise labeling and test-set sampling.

#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "backends.hpp"
#include "errors.hpp"
#include "lexicon.hpp"
#include "parallel.hpp"
#include "text.hpp"
#include "types.hpp"

namespace argreframe {

struct ArgumentRecord {
  std::string id;
  std::string text;
  std::string source;
  std::optional<ArgumentLabel> label;

  friend bool operator==(const ArgumentRecord&, const ArgumentRecord&) = default;
};

/// Parses corpus JSONL: required `id` and `text`, optional `source` and
/// `label`. Whitespace inside text collapses to single spaces. Blank lines are
/// skipped.
inline std::vector<ArgumentRecord> parse_corpus(std::string_view content) {
  std::vector<ArgumentRecord> out;
  std::unordered_set<std::string> seen;
  auto lines = split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (text::trim(lines[i]).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::exception&) {
      throw DataError(at_line("malformed JSON", lineno));
    }
    if (!j.is_object()) throw DataError(at_line("corpus line is not a JSON object", lineno));
    auto field = [&](const char* name, bool required) -> std::optional<std::string> {
      auto it = j.find(name);
      if (it == j.end() || it->is_null()) {
        if (required) throw DataError(at_line(std::string("missing \"") + name + "\"", lineno));
        return std::nullopt;
      }
      if (!it->is_string()) throw DataError(at_line(std::string("\"") + name + "\" must be a string", lineno));
      return it->get<std::string>();
    };
    ArgumentRecord r;
    r.id = *field("id", true);
    r.text = text::normalize_spaces(*field("text", true));
    r.source = field("source", false).value_or("");
    if (auto label = field("label", false)) {
      r.label = parse_argument_label(*label);
      if (!r.label) throw DataError(at_line("unknown label '" + *label + "'", lineno));
    }
    if (r.id.empty()) throw DataError(at_line("empty id", lineno));
    if (r.text.empty()) throw DataError(at_line("empty text", lineno));
    if (!seen.insert(r.id).second) throw DataError(at_line("duplicate id '" + r.id + "'", lineno));
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<ArgumentRecord> ingest(const std::string& path) {
  try {
    return parse_corpus(read_file(path));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

struct ClassifyResult {
  std::vector<ArgumentRecord> records;
  std::size_t warnings = 0;  // items the classifier failed on
};

/// Labels every record. A classifier exception on one item labels it
/// non_argument and bumps the warning tally.
inline ClassifyResult classify_arguments(std::vector<ArgumentRecord> records,
                                         const ArgumentClassifier& classifier,
                                         std::size_t workers = 1) {
  if (!classifier.reentrant()) workers = 1;
  std::vector<char> failed(records.size(), 0);
  parallel_for(records.size(), workers, [&](std::size_t i) {
    try {
      records[i].label = classifier.classify(records[i].text);
    } catch (const std::exception&) {
      records[i].label = ArgumentLabel::non_argument;
      failed[i] = 1;
    }
  });
  ClassifyResult out;
  for (char f : failed) out.warnings += static_cast<std::size_t>(f);
  out.records = std::move(records);
  return out;
}

inline std::vector<ArgumentRecord> filter_premises(const std::vector<ArgumentRecord>& records) {
  std::vector<ArgumentRecord> out;
  for (const auto& r : records) {
    if (!r.label) throw DataError("record '" + r.id + "' is unlabeled");
    if (*r.label == ArgumentLabel::premise) out.push_back(r);
  }
  return out;
}

enum class TestTask { partisan, fear };

inline std::string_view to_string(TestTask t) { return t == TestTask::partisan ? "partisan" : "fear"; }

inline std::optional<TestTask> parse_test_task(std::string_view s) {
  if (s == "partisan") return TestTask::partisan;
  if (s == "fear") return TestTask::fear;
  return std::nullopt;
}

struct SampledTestSet {
  TestTask task = TestTask::partisan;
  std::vector<ArgumentRecord> records;
  std::vector<std::vector<TokenSpan>> spans;  // parallel to records
  std::uint64_t seed = 0;
};

/// Lexical resources the span finders need; only the one for the task is used.
struct TestSetResources {
  const CollocationList* collocations = nullptr;
  const EmotionLexicon* emotions = nullptr;
};

inline std::vector<TokenSpan> find_task_spans(std::string_view text, TestTask task,
                                              const TestSetResources& res) {
  if (task == TestTask::partisan) {
    if (!res.collocations) throw ConfigError("partisan task needs a collocation list");
    return find_collocations(text, *res.collocations);
  }
  if (!res.emotions) throw ConfigError("fear task needs an emotion lexicon");
  return find_emotion_words(text, *res.emotions, EmotionLabel::fear);
}

/// Keeps records with at least one target span, then draws `n` of them
/// uniformly without replacement. The sample keeps corpus order.
inline SampledTestSet build_test_set(const std::vector<ArgumentRecord>& records, TestTask task,
                                     const TestSetResources& res, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("sample size must be at least 1");
  std::vector<std::size_t> pool;
  std::vector<std::vector<TokenSpan>> pool_spans;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto spans = find_task_spans(records[i].text, task, res);
    if (!spans.empty()) {
      pool.push_back(i);
      pool_spans.push_back(std::move(spans));
    }
  }
  if (pool.empty()) throw DataError("no matching arguments");
  SampledTestSet out;
  out.task = task;
  out.seed = seed;
  for (std::size_t k : sample_indices(pool.size(), n, derive_seed({seed, fnv1a64(to_string(task))}))) {
    out.records.push_back(records[pool[k]]);
    out.spans.push_back(pool_spans[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSONL

inline nlohmann::json spans_to_json(const std::vector<TokenSpan>& spans) {
  auto arr = nlohmann::json::array();
  for (const auto& s : spans) arr.push_back({{"start", s.start_char}, {"end", s.end_char}, {"surface", s.surface}});
  return arr;
}

inline nlohmann::json record_to_json(const ArgumentRecord& r) {
  nlohmann::json j = {{"id", r.id}, {"text", r.text}};
  if (!r.source.empty()) j["source"] = r.source;
  if (r.label) j["label"] = std::string(to_string(*r.label));
  return j;
}

inline std::string test_set_to_jsonl(const SampledTestSet& ts) {
  std::string out;
  for (std::size_t i = 0; i < ts.records.size(); ++i) {
    auto j = record_to_json(ts.records[i]);
    j["spans"] = spans_to_json(ts.spans[i]);
    out += j.dump() + "\n";
  }
  return out;
}

struct TestItem {
  ArgumentRecord record;
  std::vector<TokenSpan> spans;
};

/// Reads test-set JSONL back; every span's surface must match its text slice.
inline std::vector<TestItem> parse_test_set(std::string_view content) {
  auto records = parse_corpus(content);
  std::vector<TestItem> out;
  std::size_t r = 0;
  auto lines = split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    auto j = nlohmann::json::parse(lines[i]);
    TestItem item{records[r++], {}};
    try {
      for (const auto& s : j.value("spans", nlohmann::json::array())) {
        auto span = span_from_chars(item.record.text, s.at("start").get<std::size_t>(),
                                    s.at("end").get<std::size_t>());
        if (s.contains("surface") && s.at("surface").get<std::string>() != span.surface) {
          throw DataError("span surface does not match text");
        }
        item.spans.push_back(std::move(span));
      }
    } catch (const nlohmann::json::exception&) {
      throw DataError(at_line("malformed span", i + 1));
    } catch (const DataError& e) {
      throw DataError(at_line(e.what(), i + 1));
    }
    out.push_back(std::move(item));
  }
  return out;
}

inline std::vector<TestItem> load_test_set(const std::string& path) {
  try {
    return parse_test_set(read_file(path));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace argreframe
