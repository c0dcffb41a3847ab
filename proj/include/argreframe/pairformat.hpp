#pragma once

// Training/inference text format.
//
//   source := codes " " body
//   codes  := label (" [DELIM] " label)*
//   body   := sentence with each rewritten span wrapped as " [SEP] w [SEP] "
//
// followed by single-space normalization. The target is the original sentence.
// Parsing is an exact inverse when every wrapped span is bounded by spaces or
// the string edges, which holds for space-tokenized text (text::space_tokens).

#include <algorithm>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "emotion.hpp"
#include "errors.hpp"
#include "lexicon.hpp"
#include "rewrite.hpp"
#include "text.hpp"
#include "types.hpp"

namespace argreframe {

namespace detail {

using CharRange = std::pair<std::size_t, std::size_t>;

inline std::string wrap_ranges(std::string_view text, const std::vector<CharRange>& ranges) {
  std::string out;
  std::size_t pos = 0;
  for (const auto& [b, e] : ranges) {
    out.append(text.substr(pos, b - pos));
    out.append(" ").append(kSepToken).append(" ");
    out.append(text.substr(b, e - b));
    out.append(" ").append(kSepToken).append(" ");
    pos = e;
  }
  out.append(text.substr(pos));
  return out;
}

inline std::string assemble_source(const std::vector<EmotionLabel>& codes, const std::string& body) {
  std::vector<std::string> names;
  for (auto c : codes) names.emplace_back(to_string(c));
  std::string joined = text::join(names, std::string(" ") + std::string(kDelimToken) + " ");
  return text::normalize_spaces(joined + " " + body);
}

}  // namespace detail

/// Control codes are the original words' emotions, flattened in first
/// occurrence order without duplicates.
inline TrainingPair serialize_pair(const RewriteResult& r) {
  TrainingPair pair;
  pair.target = r.original;
  pair.span_count = r.replacements.size();
  for (const auto& rep : r.replacements) {
    for (auto e : rep.original_emotions.labels()) {
      if (std::find(pair.control_codes.begin(), pair.control_codes.end(), e) == pair.control_codes.end()) {
        pair.control_codes.push_back(e);
      }
    }
  }
  std::vector<detail::CharRange> ranges;
  std::ptrdiff_t delta = 0;
  for (const auto& rep : r.replacements) {
    const auto b = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(rep.span.start_char) + delta);
    ranges.emplace_back(b, b + rep.replacement.size());
    delta += static_cast<std::ptrdiff_t>(rep.replacement.size()) -
             static_cast<std::ptrdiff_t>(rep.span.end_char - rep.span.start_char);
  }
  pair.source = detail::assemble_source(pair.control_codes, detail::wrap_ranges(r.rewritten, ranges));
  return pair;
}

struct ParsedSource {
  std::vector<EmotionLabel> codes;
  std::string plain_text;
  std::vector<TokenSpan> spans;  // indexed against plain_text
};

/// Inverse of the source assembly. A leading emotion label (or any token
/// followed by [DELIM]) starts the control-code prefix.
inline ParsedSource parse_source(std::string_view source) {
  auto toks = text::split(text::normalize_spaces(source), ' ');
  if (toks.size() == 1 && toks[0].empty()) toks.clear();
  if (text::count_occurrences(source, kSepToken) % 2 != 0) {
    throw FormatError("odd number of [SEP] markers");
  }
  ParsedSource out;
  std::size_t i = 0;
  const bool has_codes =
      !toks.empty() && (parse_emotion(toks[0]) || (toks.size() > 1 && toks[1] == kDelimToken));
  if (has_codes) {
    while (true) {
      auto label = parse_emotion(toks[i]);
      if (!label) throw FormatError("unknown control code '" + toks[i] + "'");
      out.codes.push_back(*label);
      ++i;
      if (i < toks.size() && toks[i] == kDelimToken) {
        ++i;
        if (i >= toks.size()) throw FormatError("dangling [DELIM]");
        continue;
      }
      break;
    }
  }
  bool open = false;
  bool open_has_token = false;
  std::size_t span_start = 0;
  std::vector<detail::CharRange> ranges;
  for (; i < toks.size(); ++i) {
    const auto& t = toks[i];
    if (t == kDelimToken) throw FormatError("[DELIM] after the control-code prefix");
    if (t == kSepToken) {
      if (!open) {
        open = true;
        open_has_token = false;
      } else {
        if (!open_has_token) throw FormatError("empty [SEP] span");
        ranges.emplace_back(span_start, out.plain_text.size());
        open = false;
      }
      continue;
    }
    if (!out.plain_text.empty()) out.plain_text.push_back(' ');
    if (open && !open_has_token) {
      span_start = out.plain_text.size();
      open_has_token = true;
    }
    out.plain_text.append(t);
  }
  if (open) throw FormatError("unterminated [SEP] span");
  for (const auto& [b, e] : ranges) {
    TokenSpan s;
    s.start_char = b;
    s.end_char = e;
    s.surface = out.plain_text.substr(b, e - b);
    auto toks_plain = text::tokenize(out.plain_text);
    s.token_start = toks_plain.size();
    s.token_end = 0;
    for (std::size_t k = 0; k < toks_plain.size(); ++k) {
      if (toks_plain[k].end > b && toks_plain[k].begin < e) {
        s.token_start = std::min(s.token_start, k);
        s.token_end = k + 1;
      }
    }
    if (s.token_end == 0) s.token_start = 0;
    out.spans.push_back(std::move(s));
  }
  return out;
}

/// Inference source: one control code, target spans wrapped in [SEP].
inline std::string build_inference_source(std::string_view text, std::vector<TokenSpan> spans,
                                          EmotionLabel code) {
  std::sort(spans.begin(), spans.end(),
            [](const TokenSpan& a, const TokenSpan& b) { return a.start_char < b.start_char; });
  std::vector<detail::CharRange> ranges;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const auto& s = spans[i];
    if (!(s.start_char < s.end_char && s.end_char <= text.size())) throw DataError("span outside text");
    if (i > 0 && s.start_char < spans[i - 1].end_char) throw DataError("overlapping spans");
    ranges.emplace_back(s.start_char, s.end_char);
  }
  return detail::assemble_source({code}, detail::wrap_ranges(text, ranges));
}

/// Source without demarcators: control code plus the plain sentence.
inline std::string build_plain_source(std::string_view text, EmotionLabel code) {
  return detail::assemble_source({code}, std::string(text));
}

// ---------------------------------------------------------------------------
// TSV: `source<TAB>target`, one pair per line, LF endings.

inline std::string to_tsv(const std::vector<TrainingPair>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    for (const auto* field : {&p.source, &p.target}) {
      if (field->find_first_of("\t\n\r") != std::string::npos) {
        throw DataError("pair field contains a tab or newline");
      }
    }
    if (p.target.find(kSepToken) != std::string::npos || p.target.find(kDelimToken) != std::string::npos) {
      throw DataError("target contains a marker token");
    }
    out += p.source;
    out += '\t';
    out += p.target;
    out += '\n';
  }
  return out;
}

inline std::vector<TrainingPair> parse_tsv(std::string_view content) {
  std::vector<TrainingPair> out;
  auto lines = split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (text::count_occurrences(line, "\t") != 1) {
      throw DataError(at_line("expected exactly one tab", i + 1));
    }
    const auto tab = line.find('\t');
    TrainingPair p;
    p.source = line.substr(0, tab);
    p.target = line.substr(tab + 1);
    try {
      auto parsed = parse_source(p.source);
      p.control_codes = std::move(parsed.codes);
      p.span_count = parsed.spans.size();
    } catch (const FormatError& e) {
      throw DataError(at_line(e.what(), i + 1));
    }
    out.push_back(std::move(p));
  }
  return out;
}

inline void write_tsv(const std::vector<TrainingPair>& pairs, const std::string& path) {
  write_file(path, to_tsv(pairs));
}

inline std::vector<TrainingPair> read_tsv(const std::string& path) {
  try {
    return parse_tsv(read_file(path));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace argreframe
