#pragma once

// Flat `key = value` pipeline configuration. `#` starts a comment line.
// Relative paths resolve against the config file's directory; values set on
// the command line resolve against the working directory.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "errors.hpp"
#include "text.hpp"

namespace argreframe {

class PipelineConfig {
 public:
  static const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        // paths
        "corpus", "connotation_lexicon", "emotion_lexicon", "collocations", "train_tsv", "val_tsv",
        "checkpoint", "test_set",
        // backends
        "infiller", "generator", "scorer", "encoder", "classifier",
        // build-data / rewriting
        "top_n", "max_spans", "split_ratio",
        // test sets
        "task", "sample_size", "premises_only",
        // training
        "epochs", "max_tokens_per_batch",
        // decoding
        "system", "k_values", "samples_per_k", "max_len", "control_code", "nli_direction",
        // evaluation
        "iterations", "significance_mode",
        // global
        "seed", "workers", "out"};
    return keys;
  }

  static bool is_path_key(const std::string& key) {
    static const std::set<std::string> keys = {"corpus",   "connotation_lexicon", "emotion_lexicon",
                                               "collocations", "train_tsv", "val_tsv",
                                               "checkpoint", "test_set", "out"};
    return keys.count(key) != 0;
  }

  static bool is_backend_key(const std::string& key) {
    return key == "infiller" || key == "generator" || key == "scorer" || key == "encoder" ||
           key == "classifier";
  }

  static PipelineConfig parse(std::string_view content, const std::filesystem::path& base_dir = {}) {
    PipelineConfig cfg;
    auto lines = split_lines(content);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      std::string line = text::trim(lines[i]);
      if (line.empty() || line[0] == '#') continue;
      auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError(at_line("expected key = value", i + 1));
      cfg.set(text::trim(line.substr(0, eq)), text::trim(line.substr(eq + 1)), base_dir);
    }
    return cfg;
  }

  static PipelineConfig load(const std::string& path) {
    std::string content;
    try {
      content = read_file(path);
    } catch (const DataError&) {
      throw ConfigError("cannot read config " + path);
    }
    return parse(content, std::filesystem::absolute(path).parent_path());
  }

  /// Sets `key`, resolving relative paths (and mock fixture paths) against `base_dir`.
  void set(const std::string& key, std::string value, const std::filesystem::path& base_dir = {}) {
    if (!known_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");
    if (!base_dir.empty() && !value.empty()) {
      if (is_path_key(key)) {
        value = resolve(value, base_dir);
      } else if (is_backend_key(key) && value.rfind("mock:", 0) == 0 && value.size() > 5) {
        value = "mock:" + resolve(value.substr(5), base_dir);
      }
    }
    values_[key] = std::move(value);
  }

  /// Applies a `key=value` override string.
  void apply_override(const std::string& kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("override must be key=value, got '" + kv + "'");
    set(text::trim(kv.substr(0, eq)), text::trim(kv.substr(eq + 1)));
  }

  bool has(const std::string& key) const { return values_.count(key) != 0 && !values_.at(key).empty(); }

  std::string get(const std::string& key) const {
    if (!has(key)) throw ConfigError("missing config key '" + key + "'");
    return values_.at(key);
  }

  std::string get_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? values_.at(key) : fallback;
  }

  /// Path that must exist.
  std::string existing_path(const std::string& key) const {
    auto p = get(key);
    if (!std::filesystem::exists(p)) throw ConfigError("path for '" + key + "' does not exist: " + p);
    return p;
  }

  long long get_int(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    return parse_int(key, values_.at(key));
  }

  double get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    try {
      std::size_t used = 0;
      double v = std::stod(values_.at(key), &used);
      if (used != values_.at(key).size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' is not a number");
    }
  }

  bool get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto v = text::to_lower(values_.at(key));
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key '" + key + "' is not a boolean");
  }

  std::vector<long long> get_int_list(const std::string& key, std::vector<long long> fallback) const {
    if (!has(key)) return fallback;
    std::vector<long long> out;
    for (const auto& part : text::split(values_.at(key), ',')) out.push_back(parse_int(key, text::trim(part)));
    return out;
  }

  /// Stable hash of every setting that can affect artifact bytes; `out` and
  /// `workers` are excluded.
  std::string hash() const {
    std::string canon;
    for (const auto& [k, v] : values_) {
      if (k == "out" || k == "workers") continue;
      canon += k + "=" + v + "\n";
    }
    return hex64(fnv1a64(canon));
  }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  static std::string resolve(const std::string& value, const std::filesystem::path& base) {
    std::filesystem::path p(value);
    if (p.is_absolute()) return value;
    return (base / p).lexically_normal().string();
  }

  static long long parse_int(const std::string& key, const std::string& s) {
    try {
      std::size_t used = 0;
      long long v = std::stoll(s, &used);
      if (used != s.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' is not an integer");
    }
  }

  std::map<std::string, std::string> values_;
};

}  // namespace argreframe
