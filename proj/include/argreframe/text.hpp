#pragma once

// Low-level text utilities shared by every stage: tokenization with byte
// offsets, case folding, whitespace canonicalization, stable hashing and
// seeded sampling.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace argreframe {

/// A word token located in a sentence by byte offsets, [begin, end).
struct Token {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string_view text;
};

namespace text {

// Bytes >= 0x80 are treated as word characters so UTF-8 words stay intact.
constexpr bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         c >= 0x80;
}

constexpr bool is_alpha_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

constexpr bool is_space_byte(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Apostrophes and hyphens join two word characters ("America's", "anti-semitic").
constexpr bool is_joiner_byte(unsigned char c) { return c == '\'' || c == '-'; }

/// Splits `s` into word tokens. Whitespace and punctuation separate tokens and
/// are never part of one.
inline std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    if (!is_word_byte(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < n) {
      const auto c = static_cast<unsigned char>(s[j]);
      if (is_word_byte(c)) {
        ++j;
      } else if (is_joiner_byte(c) && j + 1 < n &&
                 is_word_byte(static_cast<unsigned char>(s[j + 1]))) {
        j += 2;
      } else {
        break;
      }
    }
    out.push_back(Token{i, j, s.substr(i, j - i)});
    i = j;
  }
  return out;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space_byte(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space_byte(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

/// Collapses every whitespace run (tabs and newlines included) to one space
/// and trims both ends.
inline std::string normalize_spaces(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (is_space_byte(static_cast<unsigned char>(c))) {
      pending = !out.empty();
    } else {
      if (pending) out.push_back(' ');
      pending = false;
      out.push_back(c);
    }
  }
  return out;
}

/// Rewrites `s` so every word token and every punctuation mark is a separate
/// space-delimited unit: "defense." -> "defense .". Word tokens keep their
/// internal apostrophes and hyphens.
inline std::string space_tokens(std::string_view s) {
  std::vector<std::string_view> units;
  std::size_t i = 0;
  const std::size_t n = s.size();
  auto words = tokenize(s);
  std::size_t w = 0;
  while (i < n) {
    if (w < words.size() && words[w].begin == i) {
      units.push_back(words[w].text);
      i = words[w].end;
      ++w;
    } else if (is_space_byte(static_cast<unsigned char>(s[i]))) {
      ++i;
    } else {
      units.push_back(s.substr(i, 1));
      ++i;
    }
  }
  std::string out;
  for (std::size_t u = 0; u < units.size(); ++u) {
    if (u) out.push_back(' ');
    out.append(units[u]);
  }
  return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && to_lower(a) == to_lower(b);
}

inline bool has_alnum(std::string_view s) {
  return std::any_of(s.begin(), s.end(),
                     [](char c) { return is_word_byte(static_cast<unsigned char>(c)); });
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

inline std::size_t count_occurrences(std::string_view hay, std::string_view needle) {
  if (needle.empty()) return 0;
  std::size_t count = 0;
  for (std::size_t pos = hay.find(needle); pos != std::string_view::npos;
       pos = hay.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

}  // namespace text

// ---------------------------------------------------------------------------
// Stable hashing and seed derivation. These must not depend on the standard
// library implementation, since artifacts are compared byte for byte.

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (auto p : parts) h = mix64(h ^ mix64(p));
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

/// Uniform integer in [0, bound) by rejection; std::uniform_int_distribution
/// is implementation-defined and would break cross-platform reproducibility.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

/// Chooses min(n, pool) distinct indices from [0, pool), returned ascending.
inline std::vector<std::size_t> sample_indices(std::size_t pool, std::size_t n,
                                               std::uint64_t seed) {
  std::vector<std::size_t> idx(pool);
  for (std::size_t i = 0; i < pool; ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  const std::size_t take = std::min(n, pool);
  for (std::size_t i = 0; i < take; ++i) {
    auto j = i + static_cast<std::size_t>(uniform_below(rng, pool - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(take);
  std::sort(idx.begin(), idx.end());
  return idx;
}

// ---------------------------------------------------------------------------
// File helpers.

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw DataError("write failed for " + path);
}

/// Splits file content into lines on LF. A trailing newline does not yield an
/// extra empty line; a trailing CR on each line is kept for the caller to judge.
inline std::vector<std::string> split_lines(std::string_view content) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  for (std::size_t i = 0; i < content.size(); ++i) {
    if (content[i] == '\n') {
      lines.emplace_back(content.substr(start, i - start));
      start = i + 1;
    }
  }
  if (start < content.size()) lines.emplace_back(content.substr(start));
  return lines;
}

}  // namespace argreframe
