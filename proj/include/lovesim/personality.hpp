#pragma once

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lovesim {

inline constexpr std::size_t kProfileItemCount = 25;
inline constexpr std::size_t kScaleCount = 32;

// Canonical profile item names, in table order.
extern const std::array<std::string_view, kProfileItemCount> kProfileItemNames;
// Canonical psychological scale names, in table order.
extern const std::array<std::string_view, kScaleCount> kScaleNames;

struct ProfileItem {
  std::string name;
  std::string value;
  bool operator==(const ProfileItem&) const = default;
};

struct ScaleScores {
  std::string name;
  std::vector<double> scores;
  bool operator==(const ScaleScores&) const = default;
};

// One speaker's personality: 25 profile items plus 32 scale score vectors.
struct PersonalityProfile {
  std::string speaker_id;
  std::vector<ProfileItem> profile_items;
  std::vector<ScaleScores> scales;

  bool operator==(const PersonalityProfile&) const = default;

  // Throws ValidationError unless names match the canonical lists exactly
  // (same order, no duplicates) and every score is finite.
  void validate() const;

  const ScaleScores& scale(std::string_view name) const;
  const std::string& item(std::string_view name) const;
};

// Builds a profile with canonical names, empty values and empty score vectors.
PersonalityProfile make_blank_profile(std::string speaker_id);

// Renders `name: value` lines read row by row through the personality table:
// profile item i, then scale i; the last seven rows carry scales only.
// Scale scores are printed space separated with up to 6 significant digits.
std::string render_personality(const PersonalityProfile& profile);

std::string format_score(double value);

}  // namespace lovesim
