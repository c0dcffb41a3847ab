#pragma once

// Pluggable model interfaces and the deterministic mock implementations that
// let the whole pipeline run without pretrained weights.
//
// Backends are selected by spec strings: `mock:<fixture-path>` loads a mock
// from a JSON fixture, `model:<identifier>` resolves an adapter registered in
// BackendRegistry at startup.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "text.hpp"
#include "types.hpp"

namespace argreframe {

struct ScoredToken {
  std::string token;
  double score = 0.0;

  friend bool operator==(const ScoredToken&, const ScoredToken&) = default;
};

/// Fills exactly one `[MASK]` placeholder.
class MaskedInfiller {
 public:
  virtual ~MaskedInfiller() = default;
  /// At most `top_n` candidates, descending by score.
  virtual std::vector<ScoredToken> predict(std::string_view text_with_mask,
                                           std::size_t top_n) const = 0;
  virtual bool reentrant() const { return true; }
};

class Seq2SeqGenerator {
 public:
  virtual ~Seq2SeqGenerator() = default;
  /// Runs one training epoch and evaluates validation perplexity.
  virtual Checkpoint train_epoch(std::span<const TrainingPair> train,
                                 std::span<const TrainingPair> val, int epoch,
                                 const TrainConfig& cfg) = 0;
  /// One top-k sample. Must be deterministic for fixed (checkpoint, source, k, seed).
  virtual std::string sample(const Checkpoint& checkpoint, std::string_view source, int k,
                             std::uint64_t seed, std::size_t max_len) const = 0;
  virtual bool reentrant() const { return true; }
};

class EntailmentScorer {
 public:
  virtual ~EntailmentScorer() = default;
  virtual NliScores score(std::string_view premise, std::string_view hypothesis) const = 0;
  virtual bool reentrant() const { return true; }
};

class SentenceEncoder {
 public:
  virtual ~SentenceEncoder() = default;
  virtual std::vector<double> encode(std::string_view text) const = 0;
  virtual std::size_t dim() const = 0;
  virtual bool reentrant() const { return true; }
};

class ArgumentClassifier {
 public:
  virtual ~ArgumentClassifier() = default;
  virtual ArgumentLabel classify(std::string_view text) const = 0;
  virtual bool reentrant() const { return true; }
};

inline constexpr double kSimplexTolerance = 1e-6;

inline bool is_simplex(const NliScores& s) {
  const double sum = s.entailment + s.neutral + s.contradiction;
  return std::isfinite(sum) && s.entailment >= 0 && s.neutral >= 0 && s.contradiction >= 0 &&
         std::abs(sum - 1.0) <= kSimplexTolerance;
}

/// Scores through the interface boundary, rejecting anything off the simplex.
inline NliScores checked_score(const EntailmentScorer& scorer, std::string_view premise,
                               std::string_view hypothesis) {
  NliScores s = scorer.score(premise, hypothesis);
  if (!is_simplex(s)) throw BackendError("entailment scorer returned a non-probability triple");
  return s;
}

// ---------------------------------------------------------------------------
// Mocks

class MockInfiller final : public MaskedInfiller {
 public:
  using Table = std::unordered_map<std::string, std::vector<ScoredToken>>;

  explicit MockInfiller(Table table) : table_(std::move(table)) {
    for (auto& [key, row] : table_) {
      for (const auto& c : row) {
        if (!std::isfinite(c.score)) throw ConfigError("non-finite infiller score for '" + key + "'");
      }
      std::stable_sort(row.begin(), row.end(),
                       [](const ScoredToken& a, const ScoredToken& b) { return a.score > b.score; });
    }
  }

  /// {"<sentence with [MASK]>": [["token", score], ...], ...}
  static MockInfiller from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("infiller fixture must be a JSON object");
    Table table;
    for (const auto& [key, row] : j.items()) {
      std::vector<ScoredToken> cands;
      for (const auto& item : row) cands.push_back({item.at(0).get<std::string>(), item.at(1).get<double>()});
      table.emplace(key, std::move(cands));
    }
    return MockInfiller(std::move(table));
  }

  std::vector<ScoredToken> predict(std::string_view text_with_mask, std::size_t top_n) const override {
    auto it = table_.find(std::string(text_with_mask));
    if (it == table_.end() || top_n == 0) return {};
    const auto& row = it->second;
    return {row.begin(), row.begin() + static_cast<std::ptrdiff_t>(std::min(top_n, row.size()))};
  }

 private:
  Table table_;
};

/// Removes leading control codes and every marker token from a source string.
inline std::string strip_source_markers(std::string_view source) {
  auto toks = text::split(text::normalize_spaces(source), ' ');
  std::size_t i = 0;
  if (!toks.empty() && toks[0] != "" && parse_emotion(toks[0])) {
    i = 1;
    while (i + 1 < toks.size() && toks[i] == kDelimToken && parse_emotion(toks[i + 1])) i += 2;
  }
  std::vector<std::string> body;
  for (; i < toks.size(); ++i) {
    if (toks[i] != kSepToken && toks[i] != kDelimToken && !toks[i].empty()) body.push_back(toks[i]);
  }
  return text::join(body, " ");
}

/// Rule-driven generator. Without a matching rule it echoes the source body
/// with control codes and markers removed.
class MockGenerator final : public Seq2SeqGenerator {
 public:
  struct Rule {
    std::string source;    // exact match, if non-empty
    std::string contains;  // substring match, if non-empty
    int k = 0;             // 0 = any k
    std::string output;
    bool fail = false;     // simulate a backend failure
  };

  MockGenerator() = default;
  explicit MockGenerator(std::vector<Rule> rules, std::vector<double> perplexities = {})
      : rules_(std::move(rules)), perplexities_(std::move(perplexities)) {}

  /// {"rules": [{"source"|"contains": ..., "k": 10, "output": ..., "fail": false}],
  ///  "perplexities": [per-epoch validation perplexity]}
  static MockGenerator from_json(const nlohmann::json& j) {
    std::vector<Rule> rules;
    for (const auto& r : j.value("rules", nlohmann::json::array())) {
      Rule rule;
      rule.source = r.value("source", "");
      rule.contains = r.value("contains", "");
      rule.k = r.value("k", 0);
      rule.output = r.value("output", "");
      rule.fail = r.value("fail", false);
      if (rule.source.empty() == rule.contains.empty()) {
        throw ConfigError("generator rule needs exactly one of 'source' or 'contains'");
      }
      rules.push_back(std::move(rule));
    }
    return MockGenerator(std::move(rules), j.value("perplexities", std::vector<double>{}));
  }

  Checkpoint train_epoch(std::span<const TrainingPair> train, std::span<const TrainingPair> val,
                         int epoch, const TrainConfig&) override {
    trained_pairs_ = train.size();
    validation_pairs_ = val.size();
    ++epochs_run_;
    double ppl;
    if (!perplexities_.empty()) {
      ppl = perplexities_[static_cast<std::size_t>(epoch - 1) % perplexities_.size()];
    } else {
      // Falls, then rises again as the mock "overfits"; the minimum sits at epoch 6.
      ppl = 2.0 + 8.0 / epoch + 0.2 * epoch;
    }
    return Checkpoint{"mock-epoch-" + std::to_string(epoch), epoch, ppl};
  }

  std::string sample(const Checkpoint&, std::string_view source, int k, std::uint64_t,
                     std::size_t max_len) const override {
    const Rule* hit = match(source, k);
    std::string out;
    if (hit) {
      if (hit->fail) throw BackendError("mock generator failure for k=" + std::to_string(k));
      out = hit->output;
    } else {
      out = strip_source_markers(source);
    }
    if (max_len > 0) {
      auto words = text::split(out, ' ');
      if (words.size() > max_len) {
        words.resize(max_len);
        out = text::join(words, " ");
      }
    }
    return out;
  }

  std::size_t trained_pairs() const { return trained_pairs_; }
  std::size_t validation_pairs() const { return validation_pairs_; }
  int epochs_run() const { return epochs_run_; }

 private:
  const Rule* match(std::string_view source, int k) const {
    auto pick = [&](auto pred) -> const Rule* {
      for (const auto& r : rules_) {
        if (pred(r)) return &r;
      }
      return nullptr;
    };
    if (auto r = pick([&](const Rule& r) { return !r.source.empty() && r.source == source && r.k == k; })) return r;
    if (auto r = pick([&](const Rule& r) { return !r.source.empty() && r.source == source && r.k == 0; })) return r;
    if (auto r = pick([&](const Rule& r) {
          return !r.contains.empty() && source.find(r.contains) != std::string_view::npos && r.k == k;
        }))
      return r;
    return pick([&](const Rule& r) {
      return !r.contains.empty() && source.find(r.contains) != std::string_view::npos && r.k == 0;
    });
  }

  std::vector<Rule> rules_;
  std::vector<double> perplexities_;
  std::size_t trained_pairs_ = 0;
  std::size_t validation_pairs_ = 0;
  int epochs_run_ = 0;
};

/// Table-driven scorer. Unknown pairs score uniformly. A premise of "*"
/// matches any premise for that hypothesis.
class MockScorer final : public EntailmentScorer {
 public:
  using Key = std::pair<std::string, std::string>;

  MockScorer() = default;
  explicit MockScorer(std::map<Key, NliScores> table) : table_(std::move(table)) {
    for (const auto& [key, s] : table_) {
      if (!is_simplex(s)) {
        throw ConfigError("scorer fixture row for hypothesis '" + key.second +
                          "' does not sum to 1");
      }
    }
  }

  /// {"pairs": [{"premise": ..., "hypothesis": ..., "scores": [e, n, c]}]}
  static MockScorer from_json(const nlohmann::json& j) {
    std::map<Key, NliScores> table;
    for (const auto& row : j.value("pairs", nlohmann::json::array())) {
      const auto& s = row.at("scores");
      if (!s.is_array() || s.size() != 3) throw ConfigError("scores must be a 3-element array");
      table[{row.at("premise").get<std::string>(), row.at("hypothesis").get<std::string>()}] =
          NliScores{s[0].get<double>(), s[1].get<double>(), s[2].get<double>()};
    }
    return MockScorer(std::move(table));
  }

  NliScores score(std::string_view premise, std::string_view hypothesis) const override {
    auto it = table_.find({std::string(premise), std::string(hypothesis)});
    if (it == table_.end()) it = table_.find({"*", std::string(hypothesis)});
    if (it != table_.end()) return it->second;
    return NliScores{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  }

 private:
  std::map<Key, NliScores> table_;
};

/// Bag-of-tokens counts hashed into `dim` buckets with FNV-1a.
class HashEncoder final : public SentenceEncoder {
 public:
  explicit HashEncoder(std::size_t dim) : dim_(dim) {
    if (dim < 8) throw ConfigError("hash encoder dimension must be at least 8");
  }

  std::size_t bucket_of(std::string_view token) const { return fnv1a64(text::to_lower(token)) % dim_; }

  std::vector<double> encode(std::string_view s) const override {
    std::vector<double> v(dim_, 0.0);
    // Punctuation counts as a token so no non-blank input maps to the zero vector.
    for (const auto& t : text::split(text::space_tokens(s), ' ')) {
      if (!t.empty()) v[bucket_of(t)] += 1.0;
    }
    return v;
  }

  std::size_t dim() const override { return dim_; }

 private:
  std::size_t dim_;
};

/// Discourse-marker heuristic standing in for a trained claim/premise model.
class RuleClassifier final : public ArgumentClassifier {
 public:
  RuleClassifier() = default;
  explicit RuleClassifier(std::unordered_map<std::string, ArgumentLabel> overrides)
      : overrides_(std::move(overrides)) {}

  ArgumentLabel classify(std::string_view raw) const override {
    if (auto it = overrides_.find(std::string(raw)); it != overrides_.end()) return it->second;
    const std::string s = text::to_lower(text::trim(raw));
    auto toks = text::tokenize(s);
    if (toks.empty()) return ArgumentLabel::non_argument;
    static constexpr std::string_view kQuestionStarts[] = {
        "is", "are", "was", "were", "do", "does", "did", "can", "could", "would", "should",
        "will", "what", "why", "how", "who", "when", "where", "which"};
    const bool question_mark = !s.empty() && s.back() == '?';
    const bool question_start =
        std::find(std::begin(kQuestionStarts), std::end(kQuestionStarts), toks[0].text) !=
        std::end(kQuestionStarts);
    if (question_mark || (question_start && toks.size() <= 8 && !has_any(toks, kPremiseMarkers))) {
      return ArgumentLabel::non_argument;
    }
    if (has_any(toks, kPremiseMarkers)) return ArgumentLabel::premise;
    if (has_any(toks, kClaimMarkers)) return ArgumentLabel::claim;
    if (toks.size() < 4) return ArgumentLabel::non_argument;
    return ArgumentLabel::premise;
  }

 private:
  static constexpr std::string_view kPremiseMarkers[] = {"because", "since", "given", "evidence",
                                                         "shows", "due", "example", "studies"};
  static constexpr std::string_view kClaimMarkers[] = {"should", "must", "ought", "therefore",
                                                       "thus", "believe", "think"};

  template <std::size_t N>
  static bool has_any(const std::vector<Token>& toks, const std::string_view (&markers)[N]) {
    for (const auto& t : toks) {
      for (auto m : markers) {
        if (t.text == m) return true;
      }
    }
    return false;
  }

  std::unordered_map<std::string, ArgumentLabel> overrides_;
};

// ---------------------------------------------------------------------------
// Backend selection

struct BackendSpec {
  enum class Kind { mock, model } kind = Kind::mock;
  std::string target;  // fixture path (may be empty for defaults) or model identifier
};

inline BackendSpec parse_backend_spec(const std::string& spec) {
  if (spec.rfind("mock:", 0) == 0) return {BackendSpec::Kind::mock, spec.substr(5)};
  if (spec.rfind("model:", 0) == 0) {
    if (spec.size() == 6) throw ConfigError("empty model identifier in '" + spec + "'");
    return {BackendSpec::Kind::model, spec.substr(6)};
  }
  throw ConfigError("backend spec must be mock:<fixture-path> or model:<identifier>, got '" + spec + "'");
}

/// Process-wide registry where real-model adapters are installed by name.
class BackendRegistry {
 public:
  template <class T>
  using Factory = std::function<std::unique_ptr<T>(const std::string& identifier)>;

  static BackendRegistry& instance() {
    static BackendRegistry registry;
    return registry;
  }

  void register_infiller(std::string name, Factory<MaskedInfiller> f) { put(infillers_, std::move(name), std::move(f)); }
  void register_generator(std::string name, Factory<Seq2SeqGenerator> f) { put(generators_, std::move(name), std::move(f)); }
  void register_scorer(std::string name, Factory<EntailmentScorer> f) { put(scorers_, std::move(name), std::move(f)); }
  void register_encoder(std::string name, Factory<SentenceEncoder> f) { put(encoders_, std::move(name), std::move(f)); }
  void register_classifier(std::string name, Factory<ArgumentClassifier> f) { put(classifiers_, std::move(name), std::move(f)); }

  std::unique_ptr<MaskedInfiller> infiller(const std::string& id) const { return make(infillers_, id, "infiller"); }
  std::unique_ptr<Seq2SeqGenerator> generator(const std::string& id) const { return make(generators_, id, "generator"); }
  std::unique_ptr<EntailmentScorer> scorer(const std::string& id) const { return make(scorers_, id, "scorer"); }
  std::unique_ptr<SentenceEncoder> encoder(const std::string& id) const { return make(encoders_, id, "encoder"); }
  std::unique_ptr<ArgumentClassifier> classifier(const std::string& id) const { return make(classifiers_, id, "classifier"); }

  bool has_any_model() const {
    std::lock_guard lock(mu_);
    return !infillers_.empty() || !generators_.empty() || !scorers_.empty() || !encoders_.empty() ||
           !classifiers_.empty();
  }

 private:
  template <class T>
  void put(std::map<std::string, Factory<T>>& m, std::string name, Factory<T> f) {
    std::lock_guard lock(mu_);
    m[std::move(name)] = std::move(f);
  }

  // Identifiers may carry a suffix ("nli:roberta-large-mnli"); the registry
  // key is the part before the first ':' when no exact entry exists.
  template <class T>
  std::unique_ptr<T> make(const std::map<std::string, Factory<T>>& m, const std::string& id,
                          const char* kind) const {
    std::lock_guard lock(mu_);
    auto it = m.find(id);
    if (it == m.end()) it = m.find(id.substr(0, id.find(':')));
    if (it == m.end()) {
      throw BackendError(std::string("no ") + kind + " adapter registered for model:" + id);
    }
    auto made = it->second(id);
    if (!made) throw BackendError(std::string(kind) + " adapter for model:" + id + " failed to load");
    return made;
  }

  mutable std::mutex mu_;
  std::map<std::string, Factory<MaskedInfiller>> infillers_;
  std::map<std::string, Factory<Seq2SeqGenerator>> generators_;
  std::map<std::string, Factory<EntailmentScorer>> scorers_;
  std::map<std::string, Factory<SentenceEncoder>> encoders_;
  std::map<std::string, Factory<ArgumentClassifier>> classifiers_;
};

namespace detail {

inline nlohmann::json load_fixture(const std::string& path) {
  std::string content;
  try {
    content = read_file(path);
  } catch (const DataError&) {
    throw ConfigError("cannot open backend fixture " + path);
  }
  try {
    return nlohmann::json::parse(content);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid JSON in backend fixture " + path + ": " + e.what());
  }
}

template <class F>
auto with_fixture_errors(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed backend fixture " + path + ": " + e.what());
  }
}

}  // namespace detail

inline std::unique_ptr<MaskedInfiller> make_infiller(const std::string& spec) {
  auto s = parse_backend_spec(spec);
  if (s.kind == BackendSpec::Kind::model) return BackendRegistry::instance().infiller(s.target);
  if (s.target.empty()) return std::make_unique<MockInfiller>(MockInfiller::Table{});
  auto j = detail::load_fixture(s.target);
  return detail::with_fixture_errors(s.target, [&] { return std::make_unique<MockInfiller>(MockInfiller::from_json(j)); });
}

inline std::unique_ptr<Seq2SeqGenerator> make_generator(const std::string& spec) {
  auto s = parse_backend_spec(spec);
  if (s.kind == BackendSpec::Kind::model) return BackendRegistry::instance().generator(s.target);
  if (s.target.empty()) return std::make_unique<MockGenerator>();
  auto j = detail::load_fixture(s.target);
  return detail::with_fixture_errors(s.target, [&] { return std::make_unique<MockGenerator>(MockGenerator::from_json(j)); });
}

inline std::unique_ptr<EntailmentScorer> make_scorer(const std::string& spec) {
  auto s = parse_backend_spec(spec);
  if (s.kind == BackendSpec::Kind::model) return BackendRegistry::instance().scorer(s.target);
  if (s.target.empty()) return std::make_unique<MockScorer>();
  auto j = detail::load_fixture(s.target);
  return detail::with_fixture_errors(s.target, [&] { return std::make_unique<MockScorer>(MockScorer::from_json(j)); });
}

/// `mock:` alone gives a 256-bucket hash encoder; a fixture may set {"dim": N}.
inline std::unique_ptr<SentenceEncoder> make_encoder(const std::string& spec) {
  auto s = parse_backend_spec(spec);
  if (s.kind == BackendSpec::Kind::model) return BackendRegistry::instance().encoder(s.target);
  if (s.target.empty()) return std::make_unique<HashEncoder>(256);
  auto j = detail::load_fixture(s.target);
  return detail::with_fixture_errors(s.target, [&] {
    return std::make_unique<HashEncoder>(j.value("dim", std::size_t{256}));
  });
}

/// `mock:` alone gives the rule classifier; a fixture may pin labels with
/// {"labels": {"<text>": "premise", ...}}.
inline std::unique_ptr<ArgumentClassifier> make_classifier(const std::string& spec) {
  auto s = parse_backend_spec(spec);
  if (s.kind == BackendSpec::Kind::model) return BackendRegistry::instance().classifier(s.target);
  if (s.target.empty()) return std::make_unique<RuleClassifier>();
  auto j = detail::load_fixture(s.target);
  return detail::with_fixture_errors(s.target, [&] {
    std::unordered_map<std::string, ArgumentLabel> overrides;
    const auto labels = j.value("labels", nlohmann::json::object());
    for (const auto& [text, label] : labels.items()) {
      auto l = parse_argument_label(label.get<std::string>());
      if (!l) throw ConfigError("unknown argument label in classifier fixture " + s.target);
      overrides.emplace(text, *l);
    }
    return std::make_unique<RuleClassifier>(std::move(overrides));
  });
}

}  // namespace argreframe
