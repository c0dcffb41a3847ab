#pragma once

// Connotation lexicon, NRC-style emotion lexicon and partisan collocation
// list, plus the span finders that run over them.

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "emotion.hpp"
#include "errors.hpp"
#include "text.hpp"

namespace argreframe {

/// A contiguous run of word tokens in a sentence. Char offsets are byte
/// offsets, end-exclusive; token indices are end-exclusive as well.
struct TokenSpan {
  std::size_t start_char = 0;
  std::size_t end_char = 0;
  std::size_t token_start = 0;
  std::size_t token_end = 0;
  std::string surface;

  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

inline TokenSpan make_span(std::string_view text, const std::vector<Token>& tokens,
                           std::size_t token_start, std::size_t token_end) {
  TokenSpan s;
  s.token_start = token_start;
  s.token_end = token_end;
  s.start_char = tokens[token_start].begin;
  s.end_char = tokens[token_end - 1].end;
  s.surface = std::string(text.substr(s.start_char, s.end_char - s.start_char));
  return s;
}

/// Rebuilds token indices for a char range, e.g. after reading spans back from
/// JSON. Throws DataError if the range is out of bounds or covers no token.
inline TokenSpan span_from_chars(std::string_view text, std::size_t start, std::size_t end) {
  if (!(start < end && end <= text.size())) {
    throw DataError("span [" + std::to_string(start) + "," + std::to_string(end) +
                    ") outside text of length " + std::to_string(text.size()));
  }
  auto tokens = text::tokenize(text);
  std::size_t first = tokens.size(), last = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].end > start && tokens[i].begin < end) {
      first = std::min(first, i);
      last = i + 1;
    }
  }
  if (first >= last) throw DataError("span covers no word token");
  TokenSpan s;
  s.start_char = start;
  s.end_char = end;
  s.token_start = first;
  s.token_end = last;
  s.surface = std::string(text.substr(start, end - start));
  return s;
}

struct LexiconLoadStats {
  std::size_t rows = 0;
  std::size_t duplicate_rows = 0;
  std::size_t multi_token_rows = 0;  // skipped: only single tokens are matched
  std::size_t ignored_label_rows = 0;  // NRC positive/negative sentiment rows
  std::size_t zero_flag_rows = 0;
};

namespace detail {

class WordEmotionMap {
 public:
  /// Absent words are neutral. `token` must be non-empty.
  EmotionSet lookup(std::string_view token) const {
    if (token.empty()) throw std::invalid_argument("lookup of empty token");
    auto it = entries_.find(text::to_lower(token));
    return it == entries_.end() ? EmotionSet::neutral() : it->second;
  }

  bool contains(std::string_view token) const {
    return entries_.count(text::to_lower(token)) != 0;
  }

  void add(const std::string& word, EmotionSet set) {
    auto [it, inserted] = entries_.emplace(word, set);
    if (!inserted) {
      it->second = it->second.merged_with(set);
      ++stats_.duplicate_rows;
    }
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::unordered_map<std::string, EmotionSet>& entries() const { return entries_; }
  const std::string& source_path() const { return source_path_; }
  const LexiconLoadStats& stats() const { return stats_; }

 protected:
  std::unordered_map<std::string, EmotionSet> entries_;
  std::string source_path_;
  LexiconLoadStats stats_;
};

inline bool is_single_token(std::string_view word) {
  auto toks = text::tokenize(word);
  return toks.size() == 1 && toks[0].begin == 0 && toks[0].end == word.size();
}

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace detail

class ConnotationLexicon : public detail::WordEmotionMap {
 public:
  ConnotationLexicon() = default;

  /// Builds from in-memory entries; words are lowercased and trimmed.
  static ConnotationLexicon from_entries(
      const std::vector<std::pair<std::string, EmotionSet>>& entries) {
    ConnotationLexicon lex;
    for (const auto& [w, s] : entries) {
      lex.add(text::to_lower(text::trim(w)), s);
      ++lex.stats_.rows;
    }
    if (lex.empty()) throw DataError("empty lexicon");
    return lex;
  }

  /// Parses the `word,emotions` CSV. Duplicate words union their sets;
  /// multi-token words are counted and skipped.
  static ConnotationLexicon parse(std::string_view content, std::string source_path = {}) {
    ConnotationLexicon lex;
    lex.source_path_ = std::move(source_path);
    auto lines = split_lines(content);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const std::size_t lineno = i + 1;
      std::string line = text::trim(detail::strip_cr(lines[i]));
      if (line.empty()) continue;
      if (i == 0 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      if (i == 0 && line == "word,emotions") continue;
      auto fields = text::split(line, ',');
      if (fields.size() != 2) throw DataError(at_line("malformed lexicon row", lineno));
      std::string word = text::to_lower(text::trim(fields[0]));
      std::string labels = text::trim(fields[1]);
      if (word.empty() || labels.empty()) {
        throw DataError(at_line("malformed lexicon row", lineno));
      }
      std::vector<EmotionLabel> parsed;
      for (const auto& raw : text::split(labels, ';')) {
        std::string label = text::trim(raw);
        if (label.empty()) throw DataError(at_line("malformed lexicon row", lineno));
        auto e = parse_emotion(label);
        if (!e) throw DataError(at_line("unknown emotion label '" + label + "'", lineno));
        parsed.push_back(*e);
      }
      EmotionSet set = EmotionSet::neutral();
      try {
        set = EmotionSet::of(parsed);
      } catch (const std::invalid_argument& e) {
        throw DataError(at_line(std::string("malformed lexicon row: ") + e.what(), lineno));
      }
      ++lex.stats_.rows;
      if (!detail::is_single_token(word)) {
        ++lex.stats_.multi_token_rows;
        continue;
      }
      lex.add(word, set);
    }
    if (lex.empty()) throw DataError("empty lexicon");
    return lex;
  }

  static ConnotationLexicon load(const std::string& path) { return parse(read_file(path), path); }
};

/// NRC layout: `word<TAB>emotion<TAB>flag`. Flag 1 adds membership; the
/// positive/negative sentiment rows are ignored.
class EmotionLexicon : public detail::WordEmotionMap {
 public:
  static EmotionLexicon from_entries(const std::vector<std::pair<std::string, EmotionSet>>& entries) {
    EmotionLexicon lex;
    for (const auto& [w, s] : entries) {
      lex.add(text::to_lower(text::trim(w)), s);
      ++lex.stats_.rows;
    }
    if (lex.empty()) throw DataError("empty lexicon");
    return lex;
  }

  static EmotionLexicon parse(std::string_view content, std::string source_path = {}) {
    EmotionLexicon lex;
    lex.source_path_ = std::move(source_path);
    auto lines = split_lines(content);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const std::size_t lineno = i + 1;
      std::string line = detail::strip_cr(lines[i]);
      if (text::trim(line).empty()) continue;
      auto fields = text::split(line, '\t');
      if (fields.size() != 3) throw DataError(at_line("malformed emotion lexicon row", lineno));
      std::string word = text::to_lower(text::trim(fields[0]));
      std::string label = text::trim(fields[1]);
      std::string flag = text::trim(fields[2]);
      if (word.empty()) throw DataError(at_line("malformed emotion lexicon row", lineno));
      if (flag != "0" && flag != "1") {
        throw DataError(at_line("association flag must be 0 or 1, got '" + flag + "'", lineno));
      }
      ++lex.stats_.rows;
      if (label == "positive" || label == "negative") {
        ++lex.stats_.ignored_label_rows;
        continue;
      }
      auto e = parse_emotion(label);
      if (!e) throw DataError(at_line("unknown emotion label '" + label + "'", lineno));
      if (flag == "0") {
        ++lex.stats_.zero_flag_rows;
        continue;
      }
      if (!detail::is_single_token(word)) {
        ++lex.stats_.multi_token_rows;
        continue;
      }
      // NRC lists one row per (word, emotion); that is not a duplicate.
      auto [it, inserted] = lex.entries_.emplace(word, EmotionSet::of({*e}));
      if (!inserted) it->second = it->second.merged_with(EmotionSet::of({*e}));
    }
    if (lex.empty()) throw DataError("empty lexicon");
    return lex;
  }

  static EmotionLexicon load(const std::string& path) { return parse(read_file(path), path); }
};

inline EmotionSet lookup(const ConnotationLexicon& lex, std::string_view token) {
  return lex.lookup(token);
}
inline EmotionSet lookup(const EmotionLexicon& lex, std::string_view token) {
  return lex.lookup(token);
}

/// Lowercase multi-word phrases, stored as space-joined token sequences.
class CollocationList {
 public:
  static CollocationList from_phrases(const std::vector<std::string>& phrases) {
    CollocationList list;
    for (const auto& p : phrases) {
      if (!list.add(p)) throw DataError("collocation '" + p + "' has no word tokens");
    }
    return list;
  }

  /// One phrase per line; blank lines and `#` comments are skipped.
  static CollocationList parse(std::string_view content) {
    CollocationList list;
    auto lines = split_lines(content);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      std::string line = text::trim(detail::strip_cr(lines[i]));
      if (line.empty() || line[0] == '#') continue;
      if (!list.add(line)) throw DataError(at_line("collocation has no word tokens", i + 1));
    }
    return list;
  }

  static CollocationList load(const std::string& path) { return parse(read_file(path)); }

  bool contains(const std::string& normalized_phrase) const {
    return phrases_.count(normalized_phrase) != 0;
  }
  const std::unordered_set<std::string>& phrases() const { return phrases_; }
  std::size_t max_len() const { return max_len_; }
  std::size_t size() const { return phrases_.size(); }

 private:
  bool add(std::string_view phrase) {
    auto toks = text::tokenize(phrase);
    if (toks.empty()) return false;
    std::vector<std::string> words;
    for (const auto& t : toks) words.push_back(text::to_lower(t.text));
    phrases_.insert(text::join(words, " "));
    max_len_ = std::max(max_len_, words.size());
    return true;
  }

  std::unordered_set<std::string> phrases_;
  std::size_t max_len_ = 0;
};

/// Spans of tokens whose emotion set contains `target`, left to right.
inline std::vector<TokenSpan> find_emotion_words(std::string_view text, const EmotionLexicon& lex,
                                                 EmotionLabel target) {
  if (target == EmotionLabel::neutral) {
    throw std::invalid_argument("find_emotion_words target must not be neutral");
  }
  auto tokens = text::tokenize(text);
  std::vector<TokenSpan> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (lex.lookup(tokens[i].text).contains(target)) out.push_back(make_span(text, tokens, i, i + 1));
  }
  return out;
}

/// Greedy leftmost-longest phrase matching over lowercased tokens.
inline std::vector<TokenSpan> find_collocations(std::string_view text, const CollocationList& coll) {
  auto tokens = text::tokenize(text);
  std::vector<std::string> lowered;
  lowered.reserve(tokens.size());
  for (const auto& t : tokens) lowered.push_back(text::to_lower(t.text));

  std::vector<TokenSpan> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t matched = 0;
    for (std::size_t len = std::min(coll.max_len(), tokens.size() - i); len >= 1; --len) {
      std::string key = lowered[i];
      for (std::size_t j = i + 1; j < i + len; ++j) key += " " + lowered[j];
      if (coll.contains(key)) {
        matched = len;
        break;
      }
    }
    if (matched) {
      out.push_back(make_span(text, tokens, i, i + matched));
      i += matched;
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace argreframe
