#pragma once

// Connotation-constrained masked rewriting. Builds the parallel corpus
// (DIFFERENT mode) and the lexical-replacement baseline (PREFER trust mode).

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "backends.hpp"
#include "emotion.hpp"
#include "errors.hpp"
#include "lexicon.hpp"
#include "text.hpp"
#include "types.hpp"

namespace argreframe {

struct Replacement {
  TokenSpan span;  // in the original sentence
  std::string original;
  std::string replacement;
  EmotionSet original_emotions = EmotionSet::neutral();
  EmotionSet replacement_emotions = EmotionSet::neutral();

  friend bool operator==(const Replacement&, const Replacement&) = default;
};

struct RewriteResult {
  std::string original;
  std::string rewritten;
  std::vector<Replacement> replacements;  // left to right, non-overlapping

  friend bool operator==(const RewriteResult&, const RewriteResult&) = default;
};

class RewriteMode {
 public:
  enum class Kind { different, prefer };

  /// Accept only candidates whose emotion set differs from the original's.
  static RewriteMode different() { return RewriteMode(Kind::different, EmotionLabel::neutral); }

  /// Favor candidates carrying `target`; otherwise take the top candidate.
  static RewriteMode prefer(EmotionLabel target) {
    if (target == EmotionLabel::neutral) throw std::invalid_argument("prefer target must not be neutral");
    return RewriteMode(Kind::prefer, target);
  }

  Kind kind() const { return kind_; }
  EmotionLabel target() const { return target_; }

 private:
  RewriteMode(Kind k, EmotionLabel t) : kind_(k), target_(t) {}
  Kind kind_;
  EmotionLabel target_;
};

struct RewriteConfig {
  std::size_t top_n = 20;
  std::optional<std::size_t> max_spans;  // unset = every candidate
};

struct RewriteStats {
  std::size_t candidates = 0;
  std::size_t accepted = 0;
  std::size_t skipped = 0;
  std::size_t fallback_used = 0;
  std::size_t infiller_failures = 0;

  RewriteStats& operator+=(const RewriteStats& o) {
    candidates += o.candidates;
    accepted += o.accepted;
    skipped += o.skipped;
    fallback_used += o.fallback_used;
    infiller_failures += o.infiller_failures;
    return *this;
  }

  nlohmann::json to_json() const {
    return {{"candidates", candidates},
            {"accepted", accepted},
            {"skipped", skipped},
            {"fallback_used", fallback_used},
            {"infiller_failures", infiller_failures}};
  }
};

/// Word tokens with a non-neutral connotation, capped at `max_spans`.
inline std::vector<TokenSpan> select_candidates(std::string_view text, const ConnotationLexicon& lex,
                                                std::optional<std::size_t> max_spans = std::nullopt) {
  auto tokens = text::tokenize(text);
  std::vector<TokenSpan> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (max_spans && out.size() >= *max_spans) break;
    if (!lex.lookup(tokens[i].text).is_neutral()) out.push_back(make_span(text, tokens, i, i + 1));
  }
  return out;
}

inline std::string mask_span(std::string_view text, const TokenSpan& span) {
  std::string out(text.substr(0, span.start_char));
  out.append(kMaskToken);
  out.append(text.substr(span.end_char));
  return out;
}

namespace detail {

// Drops echoes of the original, pure punctuation and sub-word fragments
// (anything not starting with a letter, e.g. "##ing" or "'s").
inline bool usable_candidate(std::string_view cand, std::string_view original) {
  if (cand.empty()) return false;
  if (text::iequals(cand, original)) return false;
  if (!text::has_alnum(cand)) return false;
  return text::is_alpha_byte(static_cast<unsigned char>(cand.front()));
}

}  // namespace detail

/// Masks `span`, asks the infiller for `top_n` candidates and picks one under
/// the mode's connotation constraint. Returns nullopt when nothing qualifies
/// or the infiller throws.
inline std::optional<Replacement> infill(std::string_view text, const TokenSpan& span,
                                         const RewriteMode& mode, const MaskedInfiller& infiller,
                                         const ConnotationLexicon& lex, std::size_t top_n,
                                         RewriteStats* stats = nullptr) {
  if (!(span.start_char < span.end_char && span.end_char <= text.size())) {
    throw std::invalid_argument("span outside text");
  }
  if (top_n < 1) throw std::invalid_argument("top_n must be at least 1");
  const std::string original(text.substr(span.start_char, span.end_char - span.start_char));

  std::vector<ScoredToken> predicted;
  try {
    predicted = infiller.predict(mask_span(text, span), top_n);
  } catch (const std::exception&) {
    if (stats) ++stats->infiller_failures;
    return std::nullopt;
  }
  std::stable_sort(predicted.begin(), predicted.end(),
                   [](const ScoredToken& a, const ScoredToken& b) { return a.score > b.score; });
  if (predicted.size() > top_n) predicted.resize(top_n);

  std::vector<std::string> survivors;
  for (const auto& p : predicted) {
    std::string cand = text::trim(p.token);
    if (detail::usable_candidate(cand, original)) survivors.push_back(std::move(cand));
  }

  const EmotionSet orig_set = lex.lookup(original);
  auto make = [&](const std::string& cand) {
    Replacement r;
    r.span = span;
    r.original = original;
    r.replacement = cand;
    r.original_emotions = orig_set;
    r.replacement_emotions = lex.lookup(cand);
    return r;
  };

  if (mode.kind() == RewriteMode::Kind::different) {
    for (const auto& c : survivors) {
      if (has_different_connotation(orig_set, lex.lookup(c))) return make(c);
    }
    return std::nullopt;
  }
  for (const auto& c : survivors) {
    if (lex.lookup(c).contains(mode.target())) return make(c);
  }
  if (survivors.empty()) return std::nullopt;
  if (stats) ++stats->fallback_used;
  return make(survivors.front());
}

/// Splices recorded replacements into `original`.
inline std::string apply_replacements(std::string_view original, const std::vector<Replacement>& reps) {
  std::string out;
  std::size_t pos = 0;
  for (const auto& r : reps) {
    out.append(original.substr(pos, r.span.start_char - pos));
    out.append(r.replacement);
    pos = r.span.end_char;
  }
  out.append(original.substr(pos));
  return out;
}

/// Rewrites the given spans left to right. Each mask is applied to the
/// partially rewritten sentence; spans without an acceptable candidate stay.
inline RewriteResult rewrite_spans(std::string_view text, std::vector<TokenSpan> spans,
                                   const RewriteMode& mode, const MaskedInfiller& infiller,
                                   const ConnotationLexicon& lex, std::size_t top_n,
                                   RewriteStats* stats = nullptr) {
  std::sort(spans.begin(), spans.end(),
            [](const TokenSpan& a, const TokenSpan& b) { return a.start_char < b.start_char; });
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].start_char < spans[i - 1].end_char) throw DataError("overlapping rewrite spans");
  }
  RewriteResult result;
  result.original = std::string(text);
  std::string current(text);
  std::ptrdiff_t delta = 0;
  for (const auto& span : spans) {
    if (stats) ++stats->candidates;
    TokenSpan shifted = span;
    shifted.start_char = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(span.start_char) + delta);
    shifted.end_char = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(span.end_char) + delta);
    auto rep = infill(current, shifted, mode, infiller, lex, top_n, stats);
    if (!rep) {
      if (stats) ++stats->skipped;
      continue;
    }
    if (stats) ++stats->accepted;
    current.replace(shifted.start_char, shifted.end_char - shifted.start_char, rep->replacement);
    delta += static_cast<std::ptrdiff_t>(rep->replacement.size()) -
             static_cast<std::ptrdiff_t>(rep->original.size());
    rep->span = span;
    result.replacements.push_back(std::move(*rep));
  }
  result.rewritten = std::move(current);
  return result;
}

inline RewriteResult rewrite_sentence(std::string_view text, const RewriteMode& mode,
                                      const MaskedInfiller& infiller, const ConnotationLexicon& lex,
                                      const RewriteConfig& cfg = {}, RewriteStats* stats = nullptr) {
  return rewrite_spans(text, select_candidates(text, lex, cfg.max_spans), mode, infiller, lex,
                       cfg.top_n, stats);
}

/// Lexical-replacement baseline: each target span (a multi-token collocation
/// is masked as one unit) takes the best trust-bearing candidate, or the top
/// candidate when none carries trust.
inline RewriteResult lexrep_reframe(std::string_view text, const std::vector<TokenSpan>& target_spans,
                                    const MaskedInfiller& infiller, const ConnotationLexicon& lex,
                                    std::size_t top_n = 20, RewriteStats* stats = nullptr) {
  return rewrite_spans(text, target_spans, RewriteMode::prefer(EmotionLabel::trust), infiller, lex,
                       top_n, stats);
}

}  // namespace argreframe
