#pragma once

// Value types shared between the model interfaces and the pipeline stages.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emotion.hpp"

namespace argreframe {

inline constexpr std::string_view kMaskToken = "[MASK]";
inline constexpr std::string_view kSepToken = "[SEP]";
inline constexpr std::string_view kDelimToken = "[DELIM]";

enum class ArgumentLabel { claim, premise, non_argument };

inline constexpr std::string_view to_string(ArgumentLabel l) {
  switch (l) {
    case ArgumentLabel::claim: return "claim";
    case ArgumentLabel::premise: return "premise";
    case ArgumentLabel::non_argument: return "non_argument";
  }
  return "non_argument";
}

inline std::optional<ArgumentLabel> parse_argument_label(std::string_view s) {
  if (s == "claim") return ArgumentLabel::claim;
  if (s == "premise") return ArgumentLabel::premise;
  if (s == "non_argument") return ArgumentLabel::non_argument;
  return std::nullopt;
}

/// One line of the parallel corpus: marked-up rewritten sentence as source,
/// original sentence as target.
struct TrainingPair {
  std::string source;
  std::string target;
  std::vector<EmotionLabel> control_codes;
  std::size_t span_count = 0;

  friend bool operator==(const TrainingPair&, const TrainingPair&) = default;
};

struct TrainConfig {
  int epochs = 20;
  int max_tokens_per_batch = 1024;
  std::uint64_t seed = 0;
};

/// A saved generator state. Checkpoints are selected by validation perplexity.
struct Checkpoint {
  std::string id;
  int epoch = 0;
  double val_perplexity = 0.0;
};

/// Probabilities over {entailment, neutral, contradiction}.
struct NliScores {
  double entailment = 0.0;
  double neutral = 0.0;
  double contradiction = 0.0;
};

}  // namespace argreframe
