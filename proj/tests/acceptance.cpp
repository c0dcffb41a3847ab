// Acceptance checks: one PASS/FAIL/SKIP line per criterion.
// Exit status is non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "argreframe/backends.hpp"
#include "argreframe/corpus.hpp"
#include "argreframe/evaluate.hpp"
#include "argreframe/lexicon.hpp"
#include "argreframe/pairformat.hpp"
#include "argreframe/reframe.hpp"
#include "argreframe/rewrite.hpp"
#include "test_support.hpp"

using namespace argreframe;
using testing_support::fixture;
using testing_support::run_cli;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kBuildDataSeconds = 10.0;
constexpr double kStatsSeconds = 30.0;
constexpr double kApproxTolerance = 0.02;
constexpr std::size_t kApproxIterations = 10000;
constexpr int kRoundTripCases = 1000;
constexpr int kRerankCases = 100;

struct Outcome {
  enum Kind { pass, fail, skip } kind = pass;
  std::string detail;
};

Outcome fail(std::string why) { return {Outcome::fail, std::move(why)}; }
Outcome skip(std::string why) { return {Outcome::skip, std::move(why)}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string conf() { return "--config " + fixture("toy.conf"); }

std::vector<std::string> words_of(const std::string& s) {
  std::vector<std::string> out;
  for (auto& w : text::split(s, ' ')) {
    if (!w.empty()) out.push_back(w);
  }
  return out;
}

// ---------------------------------------------------------------------------

Outcome data_creation(const fs::path& scratch) {
  const auto out = (scratch / "ac1").string();
  const auto t0 = std::chrono::steady_clock::now();
  if (int rc = run_cli("build-data " + conf() + " --out " + out); rc != 0) {
    return fail("build-data exited " + std::to_string(rc));
  }
  const double secs = seconds_since(t0);
  auto lex = ConnotationLexicon::load(fixture("connotation.csv"));
  auto pairs = read_tsv(out + "/train.tsv");
  auto val = read_tsv(out + "/val.tsv");
  pairs.insert(pairs.end(), val.begin(), val.end());
  if (pairs.empty()) return fail("no pairs");
  std::size_t spans = 0;
  for (const auto& p : pairs) {
    const auto parsed = parse_source(p.source);
    const auto tgt = words_of(p.target);
    // Walk the source tokens; each marked span aligns with one target token.
    auto marked = words_of(p.source);
    if (parsed.codes.empty()) return fail("pair without control codes: " + p.source);
    marked.erase(marked.begin(), marked.begin() + static_cast<std::ptrdiff_t>(2 * parsed.codes.size() - 1));
    std::size_t ti = 0;
    bool in_span = false;
    std::vector<std::string> span_words;
    for (const auto& w : marked) {
      if (w == "[SEP]") {
        if (in_span) {
          if (ti >= tgt.size()) return fail("span past end of target: " + p.source);
          const auto rep = text::join(span_words, " ");
          if (!has_different_connotation(lex.lookup(rep), lex.lookup(tgt[ti]))) {
            return fail("same emotion set for '" + rep + "' vs '" + tgt[ti] + "'");
          }
          ++ti;
          ++spans;
          span_words.clear();
        }
        in_span = !in_span;
        continue;
      }
      if (in_span) {
        span_words.push_back(w);
      } else {
        if (ti >= tgt.size() || tgt[ti] != w) return fail("outside-span text differs: " + p.source);
        ++ti;
      }
    }
    if (ti != tgt.size()) return fail("target has trailing text: " + p.target);
  }
  if (secs >= kBuildDataSeconds) return fail("runtime " + std::to_string(secs) + " s");
  return {Outcome::pass, std::to_string(pairs.size()) + " pairs, " + std::to_string(spans) + " spans, " +
                             std::to_string(secs).substr(0, 5) + " s"};
}

RewriteResult random_result(std::mt19937_64& rng) {
  static const std::vector<std::string> vocab = {"cities", "must", "prepare", ",", "since", "real", "defense",
                                                 "starts", "at", "home", ".", "soft", "power", "anti-war",
                                                 "(", ")", "caf\xC3\xA9", "100", "?"};
  static const std::vector<std::string> subs = {"plan", "your", "safety", "moral standing", "re-think", "x"};
  std::vector<std::string> words;
  const std::size_t n = 1 + rng() % 14;
  for (std::size_t i = 0; i < n; ++i) words.push_back(vocab[rng() % vocab.size()]);
  RewriteResult r;
  r.original = text::join(words, " ");
  std::size_t pos = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!text::tokenize(words[i]).empty() && rng() % 3 == 0) {
      Replacement rep;
      rep.span = span_from_chars(r.original, pos, pos + words[i].size());
      rep.original = words[i];
      rep.replacement = subs[rng() % subs.size()];
      rep.original_emotions = EmotionSet::from_bits(static_cast<std::uint16_t>(1 + rng() % 255));
      rep.replacement_emotions = EmotionSet::neutral();
      r.replacements.push_back(rep);
    }
    pos += words[i].size() + 1;
  }
  r.rewritten = apply_replacements(r.original, r.replacements);
  return r;
}

Outcome round_trips(const fs::path& scratch) {
  std::mt19937_64 rng(20240);
  std::vector<TrainingPair> pairs;
  for (int c = 0; c < kRoundTripCases; ++c) {
    auto r = random_result(rng);
    auto p = serialize_pair(r);
    auto parsed = parse_source(p.source);
    if (parsed.plain_text != r.rewritten || parsed.spans.size() != r.replacements.size()) {
      return fail("parse mismatch: " + p.source);
    }
    for (std::size_t i = 0; i < parsed.spans.size(); ++i) {
      if (parsed.spans[i].surface != r.replacements[i].replacement) return fail("span mismatch: " + p.source);
    }
    if (serialize_pair(r) != p) return fail("serialization not stable");
    pairs.push_back(std::move(p));
  }
  const auto path = (scratch / "ac2.tsv").string();
  write_tsv(pairs, path);
  if (read_tsv(path) != pairs) return fail("TSV write/read mismatch");
  return {Outcome::pass, std::to_string(kRoundTripCases) + " cases"};
}

std::vector<TrainingPair> dummy_pairs() { return {{"trust [SEP] a [SEP]", "b", {EmotionLabel::trust}, 1}}; }

Outcome reranker() {
  std::mt19937_64 rng(777);
  for (int round = 0; round < kRerankCases; ++round) {
    const std::size_t n = 1 + rng() % 10;
    std::map<MockScorer::Key, NliScores> table;
    std::vector<Candidate> cands;
    std::vector<double> ent(n);
    for (std::size_t i = 0; i < n; ++i) {
      ent[i] = static_cast<double>(rng() % 5) / 4.0;
      cands.push_back({"c" + std::to_string(rng() % 50) + "-" + std::to_string(i), static_cast<int>(5 * (1 + rng() % 4))});
      table[{"input", cands.back().text}] = {ent[i], (1 - ent[i]) / 2, (1 - ent[i]) / 2};
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (ent[i] > ent[best] || (ent[i] == ent[best] && (cands[i].k < cands[best].k ||
                                                         (cands[i].k == cands[best].k && cands[i].text < cands[best].text)))) {
        best = i;
      }
    }
    if (rerank("input", cands, MockScorer(table)).best.text != cands[best].text) {
      return fail("disagreement in case " + std::to_string(round));
    }
  }
  auto gen = make_generator("mock:" + fixture("generator.json"));
  auto scorer = make_scorer("mock:" + fixture("scorer.json"));
  auto pairs = dummy_pairs();
  auto trained = fine_tune(pairs, {}, *gen, TrainConfig{1});
  for (const auto& it : load_test_set(fixture("partisan_testset.jsonl"))) {
    if (it.record.id != "ts-contradict") continue;
    auto no_en = reframe(it.record, it.spans, ReframeConfig::for_system("bart_no_en"), trained, *scorer, SweepConfig{});
    auto full = reframe(it.record, it.spans, ReframeConfig::for_system("entrust"), trained, *scorer, SweepConfig{});
    if (no_en.output.find("military strength") == std::string::npos) return fail("unranked pick: " + no_en.output);
    if (full.output.find("diplomatic communication") == std::string::npos) return fail("ranked pick: " + full.output);
    return {Outcome::pass, std::to_string(kRerankCases) + "/" + std::to_string(kRerankCases) + " agree; flip reproduced"};
  }
  return fail("fixture item missing");
}

Outcome statistics() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> a = {0.2, 0.4, 0.9, 0.5, 0.7};
  if (randomization_test(a, a).p_value != 1.0) return fail("identical lists");
  RandomizationOptions approx;
  approx.mode = RandomizationMode::approximate;
  if (randomization_test(a, a, approx).p_value != 1.0) return fail("identical lists (approximate)");
  std::vector<double> ones(10, 1.0), zeros(10, 0.0);
  RandomizationOptions exact;
  exact.mode = RandomizationMode::exact;
  if (randomization_test(ones, zeros, exact).p_value != 2.0 / 1024.0) return fail("ten 1s vs ten 0s");
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0;
  for (int round = 0; round < 20; ++round) {
    std::vector<double> x(12), y(12);
    for (std::size_t i = 0; i < 12; ++i) {
      x[i] = u(rng);
      y[i] = u(rng) * 0.85;
    }
    RandomizationOptions o;
    o.mode = RandomizationMode::approximate;
    o.iterations = kApproxIterations;
    o.seed = static_cast<std::uint64_t>(round);
    const double diff =
        std::abs(randomization_test(x, y, o).p_value - randomization_test(x, y, exact).p_value);
    worst = std::max(worst, diff);
  }
  const double secs = seconds_since(t0);
  if (worst > kApproxTolerance) return fail("max |approx - exact| = " + std::to_string(worst));
  if (secs >= kStatsSeconds) return fail("runtime " + std::to_string(secs) + " s");
  return {Outcome::pass, "max |approx - exact| = " + std::to_string(worst).substr(0, 6)};
}

Outcome similarity() {
  HashEncoder enc(256);
  std::mt19937_64 rng(50);
  static const std::vector<std::string> vocab = {"soft", "power", "tax", "war", "cities", "trust", "plan", ".", "?"};
  for (int i = 0; i < 50; ++i) {
    std::string s;
    const std::size_t n = 1 + rng() % 12;
    for (std::size_t j = 0; j < n; ++j) s += (j ? " " : "") + vocab[rng() % vocab.size()];
    if (semantic_similarity(s, s, enc).reported != 100.0) return fail("not 100.0 for '" + s + "'");
  }
  const auto disjoint = semantic_similarity("soft power works", "diplomatic credibility helps", enc).reported;
  if (disjoint != 0.0) return fail("disjoint fixture reports " + std::to_string(disjoint));
  return {Outcome::pass, "50 strings at 100.0; disjoint 0.0"};
}

Outcome determinism(const fs::path& scratch) {
  auto same = [](const fs::path& a, const fs::path& b) -> std::string {
    for (const auto& e : fs::directory_iterator(a)) {
      const auto other = b / e.path().filename();
      if (!fs::exists(other) || read_file(e.path().string()) != read_file(other.string())) {
        return e.path().filename().string();
      }
    }
    return "";
  };
  const auto d = scratch.string();
  for (const auto* run : {"run1", "run2"}) {
    const auto r = d + "/" + run;
    if (run_cli("build-data " + conf() + " --out " + r + "/data") != 0) return fail("build-data failed");
    if (run_cli("train " + conf() + " --set train_tsv=" + r + "/data/train.tsv --out " + r + "/train") != 0) {
      return fail("train failed");
    }
    if (run_cli("reframe " + conf() + " --set system=all --set checkpoint=" + d + "/run1/train/checkpoint.json --out " +
                r + "/reframe") != 0) {
      return fail("reframe failed");
    }
    if (run_cli("evaluate " + conf() + " --out " + r + "/eval " + d + "/run1/reframe/reframe.entrust.jsonl " + d +
                "/run1/reframe/reframe.bart_no_en.jsonl " + d + "/run1/reframe/reframe.bart_no_d_en.jsonl") != 0) {
      return fail("evaluate failed");
    }
  }
  for (const auto* step : {"data", "reframe", "eval"}) {
    auto diff = same(d + "/run1/" + step, d + "/run2/" + step);
    if (!diff.empty()) return fail(std::string(step) + "/" + diff + " differs");
  }
  return {Outcome::pass, "build-data, reframe, evaluate byte-identical"};
}

Outcome ablation() {
  auto gen = make_generator("mock:" + fixture("generator.json"));
  auto scorer = make_scorer("mock:" + fixture("scorer.json"));
  auto pairs = dummy_pairs();
  auto trained = fine_tune(pairs, {}, *gen, TrainConfig{2});
  std::size_t checked = 0;
  for (const auto& it : load_test_set(fixture("partisan_testset.jsonl"))) {
    auto plain = reframe(it.record, it.spans, ReframeConfig::for_system("bart_no_d_en"), trained, *scorer, SweepConfig{});
    if (plain.output != it.record.text) return fail("no-demarcator output is not the input for " + it.record.id);
    auto full = reframe(it.record, it.spans, ReframeConfig::for_system("entrust"), trained, *scorer, SweepConfig{});
    double best = -1;
    for (const auto& c : full.candidates) best = std::max(best, *c.entail_prob);
    if (full.candidates.front().text != full.output || *full.candidates.front().entail_prob != best) {
      return fail("full config did not select max entailment for " + it.record.id);
    }
    auto no_en = reframe(it.record, it.spans, ReframeConfig::for_system("bart_no_en"), trained, *scorer, SweepConfig{});
    for (const auto& c : no_en.candidates) {
      if (c.entail_prob) return fail("no-entailment config scored candidates");
    }
    ++checked;
  }
  return {Outcome::pass, std::to_string(checked) + " items x 3 configurations from one checkpoint"};
}

Outcome real_backends() {
  if (!BackendRegistry::instance().has_any_model()) return skip("no real model adapters registered");
  return fail("real-backend smoke run is not wired up");
}

}  // namespace

int main() {
  const auto scratch = testing_support::scratch_dir("acceptance");
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 data-creation soundness", [&] { return data_creation(scratch); }},
      {"2 format round-trips", [&] { return round_trips(scratch); }},
      {"3 reranker oracle", reranker},
      {"4 statistics", statistics},
      {"5 similarity sanity", similarity},
      {"6 determinism", [&] { return determinism(scratch / "ac6"); }},
      {"7 ablation matrix", ablation},
      {"8 real-backend smoke run", real_backends},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const char* tag = o.kind == Outcome::pass ? "PASS" : o.kind == Outcome::skip ? "SKIP" : "FAIL";
    if (o.kind == Outcome::fail) ++failures;
    std::cout << "[" << tag << "] AC" << name << " - " << o.detail << "\n";
  }
  fs::remove_all(scratch);
  return failures == 0 ? 0 : 1;
}
