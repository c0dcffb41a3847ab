#pragma once

// Generator fine-tuning, the top-k sampling sweep and entailment reranking.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "backends.hpp"
#include "corpus.hpp"
#include "errors.hpp"
#include "lexicon.hpp"
#include "pairformat.hpp"
#include "text.hpp"
#include "types.hpp"

namespace argreframe {

struct EpochLog {
  int epoch = 0;
  double val_perplexity = 0.0;
  std::string checkpoint;
};

/// A fine-tuned generator: the backend plus the checkpoint with the lowest
/// validation perplexity.
struct TrainedGenerator {
  const Seq2SeqGenerator* generator = nullptr;
  Checkpoint best;
  std::vector<EpochLog> log;
  std::size_t train_pairs = 0;
  std::size_t val_pairs = 0;
};

inline TrainedGenerator fine_tune(std::span<const TrainingPair> train, std::span<const TrainingPair> val,
                                  Seq2SeqGenerator& gen, const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw ConfigError("epochs must be at least 1");
  if (train.empty()) throw DataError("empty training set");
  TrainedGenerator out;
  out.generator = &gen;
  out.train_pairs = train.size();
  out.val_pairs = val.size();
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Checkpoint cp = gen.train_epoch(train, val, epoch, cfg);
    out.log.push_back({epoch, cp.val_perplexity, cp.id});
    if (epoch == 1 || cp.val_perplexity < out.best.val_perplexity) out.best = cp;
  }
  return out;
}

struct SweepConfig {
  std::vector<int> k_values = {5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
  int samples_per_k = 1;
  std::uint64_t seed = 0;
  std::size_t max_len = 128;

  void validate() const {
    if (k_values.empty()) throw ConfigError("k_values must not be empty");
    for (int k : k_values) {
      if (k < 1) throw ConfigError("every k must be at least 1");
    }
    if (samples_per_k < 1) throw ConfigError("samples_per_k must be at least 1");
  }
};

struct Candidate {
  std::string text;
  int k = 0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct GenerationStats {
  std::vector<int> failed_k;
};

/// Samples `samples_per_k` outputs per k with seeds derived from (seed, k, i).
/// Exact duplicates keep their first occurrence; order follows the sweep.
inline std::vector<Candidate> generate_candidates(std::string_view source, const TrainedGenerator& gen,
                                                  const SweepConfig& sweep,
                                                  GenerationStats* stats = nullptr) {
  sweep.validate();
  if (!gen.generator) throw BackendError("generator not trained");
  std::vector<Candidate> out;
  std::unordered_set<std::string> seen;
  std::size_t failures = 0;
  for (int k : sweep.k_values) {
    bool failed = false;
    for (int i = 0; i < sweep.samples_per_k; ++i) {
      std::string text;
      try {
        text = gen.generator->sample(gen.best, source, k,
                                     derive_seed({sweep.seed, static_cast<std::uint64_t>(k),
                                                  static_cast<std::uint64_t>(i)}),
                                     sweep.max_len);
      } catch (const std::exception&) {
        failed = true;
        break;
      }
      if (seen.insert(text).second) out.push_back({std::move(text), k});
    }
    if (failed) {
      ++failures;
      if (stats) stats->failed_k.push_back(k);
    }
  }
  if (failures == sweep.k_values.size()) throw BackendError("generator failed for every k");
  return out;
}

enum class NliDirection { forward, backward, min };

inline std::string_view to_string(NliDirection d) {
  switch (d) {
    case NliDirection::forward: return "fwd";
    case NliDirection::backward: return "bwd";
    case NliDirection::min: return "min";
  }
  return "fwd";
}

inline std::optional<NliDirection> parse_nli_direction(std::string_view s) {
  if (s == "fwd") return NliDirection::forward;
  if (s == "bwd") return NliDirection::backward;
  if (s == "min") return NliDirection::min;
  return std::nullopt;
}

struct RankedCandidate {
  std::string text;
  int k = 0;
  double entail_prob = 0.0;
  NliScores scores;
};

struct RerankResult {
  RankedCandidate best;
  std::vector<RankedCandidate> all;  // descending by entailment, then ascending k, then text
};

/// Strict ranking order: higher entailment first, then smaller k, then text.
inline bool ranks_before(const RankedCandidate& a, const RankedCandidate& b) {
  if (a.entail_prob != b.entail_prob) return a.entail_prob > b.entail_prob;
  if (a.k != b.k) return a.k < b.k;
  return a.text < b.text;
}

/// Scores every candidate against the input (premise = input by default) and
/// picks the one with the highest entailment probability.
inline RerankResult rerank(std::string_view input_text, const std::vector<Candidate>& candidates,
                           const EntailmentScorer& scorer, NliDirection direction = NliDirection::forward,
                           std::size_t workers = 1) {
  if (candidates.empty()) throw DataError("no candidates to rerank");
  if (!scorer.reentrant()) workers = 1;
  std::vector<RankedCandidate> all(candidates.size());
  parallel_for(candidates.size(), workers, [&](std::size_t i) {
    const auto& c = candidates[i];
    NliScores s;
    switch (direction) {
      case NliDirection::forward: s = checked_score(scorer, input_text, c.text); break;
      case NliDirection::backward: s = checked_score(scorer, c.text, input_text); break;
      case NliDirection::min: {
        auto f = checked_score(scorer, input_text, c.text);
        auto b = checked_score(scorer, c.text, input_text);
        s = b.entailment < f.entailment ? b : f;
        break;
      }
    }
    all[i] = RankedCandidate{c.text, c.k, s.entailment, s};
  });
  std::sort(all.begin(), all.end(), ranks_before);
  return RerankResult{all.front(), std::move(all)};
}

struct ReframeConfig {
  bool use_demarcators = true;
  bool use_entailment = true;
  EmotionLabel control_code = EmotionLabel::trust;
  NliDirection nli_direction = NliDirection::forward;

  /// entrust (full), bart_no_en (no entailment), bart_no_d_en (neither).
  std::string system_name() const {
    if (use_demarcators && use_entailment) return "entrust";
    if (use_demarcators) return "bart_no_en";
    if (!use_entailment) return "bart_no_d_en";
    return "bart_no_d";
  }

  static ReframeConfig for_system(std::string_view name) {
    ReframeConfig c;
    if (name == "entrust") return c;
    if (name == "bart_no_en") {
      c.use_entailment = false;
      return c;
    }
    if (name == "bart_no_d_en") {
      c.use_demarcators = false;
      c.use_entailment = false;
      return c;
    }
    throw ConfigError("unknown system '" + std::string(name) + "'");
  }

  nlohmann::json to_json() const {
    return {{"system", system_name()},
            {"use_demarcators", use_demarcators},
            {"use_entailment", use_entailment},
            {"control_code", std::string(to_string(control_code))},
            {"nli_direction", std::string(to_string(nli_direction))}};
  }
};

struct OutputCandidate {
  std::string text;
  int k = 0;
  std::optional<double> entail_prob;  // absent when entailment is off
};

struct ReframeOutput {
  std::string id;
  std::string input;
  std::string output;
  ReframeConfig config;
  std::vector<OutputCandidate> candidates;
  std::vector<int> failed_k;
};

/// Full reframing of one record: source assembly, the k sweep, then either
/// entailment reranking or the first candidate of the smallest k.
inline ReframeOutput reframe(const ArgumentRecord& record, const std::vector<TokenSpan>& spans,
                             const ReframeConfig& cfg, const TrainedGenerator& gen,
                             const EntailmentScorer& scorer, const SweepConfig& sweep) {
  if (cfg.use_demarcators && spans.empty()) {
    throw DataError("record '" + record.id + "' has no spans to demarcate");
  }
  const std::string source = cfg.use_demarcators
                                 ? build_inference_source(record.text, spans, cfg.control_code)
                                 : build_plain_source(record.text, cfg.control_code);
  SweepConfig record_sweep = sweep;
  record_sweep.seed = derive_seed({sweep.seed, fnv1a64(record.id)});
  GenerationStats gstats;
  auto candidates = generate_candidates(source, gen, record_sweep, &gstats);

  ReframeOutput out;
  out.id = record.id;
  out.input = record.text;
  out.config = cfg;
  out.failed_k = gstats.failed_k;
  if (cfg.use_entailment) {
    auto ranked = rerank(record.text, candidates, scorer, cfg.nli_direction);
    out.output = ranked.best.text;
    for (const auto& c : ranked.all) out.candidates.push_back({c.text, c.k, c.entail_prob});
  } else {
    const Candidate* pick = &candidates.front();
    for (const auto& c : candidates) {
      if (c.k < pick->k) pick = &c;
    }
    out.output = pick->text;
    for (const auto& c : candidates) out.candidates.push_back({c.text, c.k, std::nullopt});
  }
  return out;
}

inline nlohmann::json to_json(const ReframeOutput& o) {
  auto cands = nlohmann::json::array();
  for (const auto& c : o.candidates) {
    nlohmann::json j = {{"text", c.text}, {"k", c.k}};
    j["entail_prob"] = c.entail_prob ? nlohmann::json(*c.entail_prob) : nlohmann::json(nullptr);
    cands.push_back(std::move(j));
  }
  nlohmann::json j = {{"id", o.id},
                      {"input", o.input},
                      {"output", o.output},
                      {"system", o.config.system_name()},
                      {"config", o.config.to_json()},
                      {"candidates", std::move(cands)}};
  if (!o.failed_k.empty()) j["failed_k"] = o.failed_k;
  return j;
}

}  // namespace argreframe
