#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace argreframe {

// Canonical order. Sets iterate in this order and control codes inherit it
// within a single replacement.
enum class EmotionLabel : std::uint8_t {
  anticipation,
  anger,
  fear,
  joy,
  trust,
  sadness,
  disgust,
  surprise,
  neutral,
};

inline constexpr std::array<EmotionLabel, 9> kAllEmotions = {
    EmotionLabel::anticipation, EmotionLabel::anger,   EmotionLabel::fear,
    EmotionLabel::joy,          EmotionLabel::trust,   EmotionLabel::sadness,
    EmotionLabel::disgust,      EmotionLabel::surprise, EmotionLabel::neutral};

inline constexpr std::string_view to_string(EmotionLabel e) {
  constexpr std::array<std::string_view, 9> names = {
      "anticipation", "anger", "fear", "joy", "trust", "sadness", "disgust", "surprise", "neutral"};
  return names[static_cast<std::size_t>(e)];
}

/// Exact, lowercase match only.
inline std::optional<EmotionLabel> parse_emotion(std::string_view s) {
  for (auto e : kAllEmotions) {
    if (to_string(e) == s) return e;
  }
  return std::nullopt;
}

/// Non-empty set of labels in which `neutral` never coexists with another label.
class EmotionSet {
 public:
  /// Throws std::invalid_argument when the labels violate the invariant.
  static EmotionSet of(std::initializer_list<EmotionLabel> labels) {
    return from_bits(bits_of(labels));
  }

  static EmotionSet of(const std::vector<EmotionLabel>& labels) {
    std::uint16_t bits = 0;
    for (auto e : labels) bits |= bit(e);
    return from_bits(bits);
  }

  static EmotionSet neutral() { return EmotionSet(bit(EmotionLabel::neutral)); }

  static EmotionSet from_bits(std::uint16_t bits) {
    if (bits == 0) throw std::invalid_argument("emotion set must not be empty");
    if ((bits & bit(EmotionLabel::neutral)) && bits != bit(EmotionLabel::neutral)) {
      throw std::invalid_argument("neutral cannot be combined with other emotions");
    }
    if (bits >> kAllEmotions.size()) throw std::invalid_argument("unknown emotion bit");
    return EmotionSet(bits);
  }

  /// Union where neutral yields to any concrete emotion.
  EmotionSet merged_with(EmotionSet other) const {
    std::uint16_t bits = bits_ | other.bits_;
    if (bits != bit(EmotionLabel::neutral)) bits &= static_cast<std::uint16_t>(~bit(EmotionLabel::neutral));
    return EmotionSet(bits);
  }

  bool contains(EmotionLabel e) const { return (bits_ & bit(e)) != 0; }
  bool is_neutral() const { return bits_ == bit(EmotionLabel::neutral); }
  std::uint16_t bits() const { return bits_; }

  std::vector<EmotionLabel> labels() const {
    std::vector<EmotionLabel> out;
    for (auto e : kAllEmotions) {
      if (contains(e)) out.push_back(e);
    }
    return out;
  }

  /// "joy;trust"
  std::string str() const {
    std::string out;
    for (auto e : labels()) {
      if (!out.empty()) out.push_back(';');
      out.append(to_string(e));
    }
    return out;
  }

  friend bool operator==(EmotionSet a, EmotionSet b) { return a.bits_ == b.bits_; }
  friend bool operator!=(EmotionSet a, EmotionSet b) { return a.bits_ != b.bits_; }

 private:
  explicit EmotionSet(std::uint16_t bits) : bits_(bits) {}

  static constexpr std::uint16_t bit(EmotionLabel e) {
    return static_cast<std::uint16_t>(1u << static_cast<unsigned>(e));
  }
  static std::uint16_t bits_of(std::initializer_list<EmotionLabel> labels) {
    std::uint16_t bits = 0;
    for (auto e : labels) bits |= bit(e);
    return bits;
  }

  std::uint16_t bits_;
};

/// "Different connotation" is plain set inequality, not disjointness.
inline bool has_different_connotation(EmotionSet a, EmotionSet b) { return a != b; }

}  // namespace argreframe
