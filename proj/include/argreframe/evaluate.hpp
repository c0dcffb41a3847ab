#pragma once

// Semantic-similarity scoring of reframings and paired approximate
// randomization (sign-flip) significance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "backends.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "text.hpp"

namespace argreframe {

/// Rounds to one decimal, half away from zero.
inline double round1(double v) { return std::round(v * 10.0) / 10.0; }

struct SimilarityScore {
  double value = 0.0;     // cosine, [-1, 1]
  double reported = 0.0;  // value x 100, one decimal
};

inline double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("vector dimensions differ");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

inline SimilarityScore semantic_similarity(std::string_view a, std::string_view b, const SentenceEncoder& enc) {
  if (a.empty() || b.empty()) throw std::invalid_argument("semantic_similarity needs non-empty strings");
  const auto va = enc.encode(a);
  const auto vb = enc.encode(b);
  const double c = cosine(va, vb);
  return {c, round1(c * 100.0)};
}

// ---------------------------------------------------------------------------
// Randomization test

enum class RandomizationMode { automatic, exact, approximate };

struct RandomizationOptions {
  std::size_t iterations = 10000;
  std::uint64_t seed = 0;
  RandomizationMode mode = RandomizationMode::automatic;
};

/// Largest n enumerated exhaustively in automatic mode.
inline constexpr std::size_t kExactMaxItems = 20;

struct RandomizationResult {
  double p_value = 1.0;
  double observed = 0.0;  // |mean(A) - mean(B)|
  bool exact = false;
};

namespace detail {

// Shuffled statistics equal to the observed one up to rounding count as ">=".
inline bool at_least(double stat, double observed) {
  return stat >= observed - 1e-12 * std::max(1.0, std::abs(observed));
}

}  // namespace detail

/// Two-sided paired sign-flip test on |mean(A) - mean(B)|. Exact mode
/// enumerates all 2^n assignments; approximate mode draws `iterations` random
/// assignments and returns (hits + 1) / (iterations + 1).
inline RandomizationResult randomization_test(std::span<const double> a, std::span<const double> b,
                                              const RandomizationOptions& opt = {}) {
  if (a.size() != b.size()) throw std::invalid_argument("score lists differ in length");
  if (a.empty()) throw std::invalid_argument("score lists are empty");
  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  auto stat_of = [&](auto&& flipped) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += flipped(i) ? -d[i] : d[i];
    return std::abs(s) / static_cast<double>(n);
  };

  RandomizationResult out;
  out.observed = stat_of([](std::size_t) { return false; });
  bool exact = opt.mode == RandomizationMode::exact ||
               (opt.mode == RandomizationMode::automatic && n <= kExactMaxItems);
  if (exact && n > 30) throw std::invalid_argument("exact mode supports at most 30 items");

  if (exact) {
    const std::uint64_t total = std::uint64_t{1} << n;
    std::uint64_t hits = 0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      if (detail::at_least(stat_of([mask](std::size_t i) { return (mask >> i) & 1u; }), out.observed)) ++hits;
    }
    out.p_value = static_cast<double>(hits) / static_cast<double>(total);
    out.exact = true;
    return out;
  }

  if (opt.iterations < 1) throw std::invalid_argument("iterations must be at least 1");
  std::mt19937_64 rng(derive_seed({opt.seed, 0x72616e646f6dULL}));
  std::vector<char> flip(n);
  std::uint64_t hits = 0;
  for (std::size_t r = 0; r < opt.iterations; ++r) {
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 64 == 0) bits = rng();
      flip[i] = static_cast<char>(bits & 1u);
      bits >>= 1;
    }
    if (detail::at_least(stat_of([&](std::size_t i) { return flip[i] != 0; }), out.observed)) ++hits;
  }
  out.p_value = static_cast<double>(hits + 1) / static_cast<double>(opt.iterations + 1);
  return out;
}

// ---------------------------------------------------------------------------
// Report

struct EvalItem {
  std::string id;
  std::string text;
};

struct SystemScores {
  std::vector<double> values;    // raw cosine per item
  std::vector<double> reported;  // per item, x100 rounded
  double mean = 0.0;             // arithmetic mean of values x 100
  double reported_mean = 0.0;    // mean rounded to one decimal
};

struct PairwiseTest {
  std::string system_a;
  std::string system_b;
  double p_value = 1.0;
  bool exact = false;
};

struct EvaluationReport {
  std::string task;
  std::vector<std::string> item_ids;
  std::map<std::string, SystemScores> per_system;
  std::vector<PairwiseTest> significance;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  std::size_t n_items() const { return item_ids.size(); }
};

struct ReportOptions {
  std::string task = "default";
  RandomizationOptions test;
  std::size_t workers = 1;
};

/// Similarity of every system's output with the input, per-system means and
/// every pairwise randomization test (systems in name order).
inline EvaluationReport build_report(const std::vector<EvalItem>& inputs,
                                     const std::map<std::string, std::map<std::string, std::string>>& outputs_by_system,
                                     const SentenceEncoder& enc, const ReportOptions& opt = {}) {
  if (inputs.empty()) throw DataError("no evaluation items");
  EvaluationReport rep;
  rep.task = opt.task;
  rep.seed = opt.test.seed;
  rep.iterations = opt.test.iterations;
  for (const auto& it : inputs) rep.item_ids.push_back(it.id);

  const std::size_t workers = enc.reentrant() ? opt.workers : 1;
  for (const auto& [system, outputs] : outputs_by_system) {
    for (const auto& [id, text] : outputs) {
      if (std::none_of(inputs.begin(), inputs.end(), [&](const EvalItem& e) { return e.id == id; })) {
        throw DataError("system '" + system + "' has output for unknown id '" + id + "'");
      }
    }
    SystemScores s;
    s.values.resize(inputs.size());
    s.reported.resize(inputs.size());
    for (const auto& item : inputs) {
      if (!outputs.count(item.id)) {
        throw DataError("system '" + system + "' is missing item '" + item.id + "'");
      }
    }
    parallel_for(inputs.size(), workers, [&](std::size_t i) {
      auto sim = semantic_similarity(inputs[i].text, outputs.at(inputs[i].id), enc);
      s.values[i] = sim.value;
      s.reported[i] = sim.reported;
    });
    double sum = 0;
    for (double v : s.values) sum += v * 100.0;
    s.mean = sum / static_cast<double>(s.values.size());
    s.reported_mean = round1(s.mean);
    rep.per_system.emplace(system, std::move(s));
  }

  for (auto a = rep.per_system.begin(); a != rep.per_system.end(); ++a) {
    for (auto b = std::next(a); b != rep.per_system.end(); ++b) {
      auto r = randomization_test(a->second.values, b->second.values, opt.test);
      rep.significance.push_back({a->first, b->first, r.p_value, r.exact});
    }
  }
  return rep;
}

inline constexpr int kReportSchemaVersion = 1;

inline nlohmann::json to_json(const EvaluationReport& rep) {
  nlohmann::json systems = nlohmann::json::object();
  for (const auto& [name, s] : rep.per_system) {
    systems[name] = {{"mean", s.mean},
                     {"reported_mean", s.reported_mean},
                     {"scores", s.values},
                     {"reported_scores", s.reported}};
  }
  auto sig = nlohmann::json::array();
  for (const auto& t : rep.significance) {
    sig.push_back({{"system_a", t.system_a}, {"system_b", t.system_b}, {"p_value", t.p_value}, {"exact", t.exact}});
  }
  return {{"schema_version", kReportSchemaVersion},
          {"task", rep.task},
          {"n_items", rep.n_items()},
          {"item_ids", rep.item_ids},
          {"seed", rep.seed},
          {"iterations", rep.iterations},
          {"systems", std::move(systems)},
          {"significance", std::move(sig)}};
}

/// System x task table of reported mean similarities. Reports may cover
/// different tasks; a system absent from a task shows "-".
inline std::string render_table(const std::vector<EvaluationReport>& reports) {
  std::vector<std::string> systems;
  for (const auto& r : reports) {
    for (const auto& [name, _] : r.per_system) {
      if (std::find(systems.begin(), systems.end(), name) == systems.end()) systems.push_back(name);
    }
  }
  std::size_t w0 = 6;
  for (const auto& s : systems) w0 = std::max(w0, s.size());
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(w0)) << "System";
  for (const auto& r : reports) os << " | " << std::setw(static_cast<int>(std::max<std::size_t>(r.task.size(), 6))) << r.task;
  os << "\n" << std::string(w0, '-');
  for (const auto& r : reports) os << "-+-" << std::string(std::max<std::size_t>(r.task.size(), 6), '-');
  os << "\n";
  for (const auto& s : systems) {
    os << std::left << std::setw(static_cast<int>(w0)) << s;
    for (const auto& r : reports) {
      const int w = static_cast<int>(std::max<std::size_t>(r.task.size(), 6));
      auto it = r.per_system.find(s);
      std::ostringstream cell;
      if (it == r.per_system.end()) {
        cell << "-";
      } else {
        cell << std::fixed << std::setprecision(1) << it->second.reported_mean;
      }
      os << " | " << std::right << std::setw(w) << cell.str() << std::left;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace argreframe
