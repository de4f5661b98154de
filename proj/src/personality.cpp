#include "lovesim/personality.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "lovesim/error.hpp"

namespace lovesim {

const std::array<std::string_view, kProfileItemCount> kProfileItemNames = {
    "Age",
    "Final Education",
    "Department",
    "Residence",
    "Hometown",
    "Occupation",
    "Holiday",
    "Annual Income",
    "Family",
    "Living Situation",
    "Marital History",
    "Smoking",
    "Alcohol",
    "About Marriage",
    "Personality",
    "Recent Fad",
    "Favorite Type",
    "Special Skills",
    "Favorite Food",
    "Favorite Movie",
    "Favorite Music",
    "How to Spend Holidays",
    "Places to Go on a Date",
    "Topics to Talk About",
    "Self-Introduction",
};

const std::array<std::string_view, kScaleCount> kScaleNames = {
    "Rosenberg’s Self Esteem Scale (RSES)",
    "Self-Consciousness Scale",
    "Immersion Scale",
    "Big Five Scale",
    "Short Version of Egalitarian Sex Role Attitude Scale",
    "Gender Identity Scale",
    "Trait Shyness Scale",
    "Self-Monitoring Scale",
    "Clothing Interest Questionnaire",
    "Romantic love attitude Scale",
    "Lee's Love Type scale 2nd version (LETS-2)",
    "Interpersonal Trust Scale",
    "Family Functioning Scale (FACES III)",
    "Friendship Scale",
    "Kikuchi's Scale of Social Skills (KiSS-18)",
    "Value Orientation Scale",
    "Sense of Leisure Scale",
    "Purpose in Life Scale",
    "Way of Life Scale",
    "Privacy Orientation Scale",
    "Multidimensional Empathy Scale",
    "Goal Preference Scale in Friendship Situations",
    "Affinity Motivation Scale",
    "Loneliness Scale",
    "Divorce Feeling Scale",
    "Friendship Measurement Scale",
    "Love Image Scale",
    "Self-concealment Scale",
    "Communication Skills Scale ENDCOREs",
    "Daily Life Skills Scale",
    "Subjective Well-Being Inventory (SUBI)",
    "Situational Interpersonal Anxiety Scale",
};

void PersonalityProfile::validate() const {
  if (profile_items.size() != kProfileItemCount) {
    throw ValidationError("profile " + speaker_id + ": expected 25 profile items, got " +
                          std::to_string(profile_items.size()));
  }
  if (scales.size() != kScaleCount) {
    throw ValidationError("profile " + speaker_id + ": expected 32 scales, got " +
                          std::to_string(scales.size()));
  }
  std::set<std::string> seen;
  for (std::size_t i = 0; i < kProfileItemCount; ++i) {
    if (profile_items[i].name != kProfileItemNames[i]) {
      throw ValidationError("profile " + speaker_id + ": item " + std::to_string(i) + " is '" +
                            profile_items[i].name + "', expected '" +
                            std::string(kProfileItemNames[i]) + "'");
    }
    if (!seen.insert(profile_items[i].name).second) {
      throw ValidationError("profile " + speaker_id + ": duplicate item " + profile_items[i].name);
    }
  }
  for (std::size_t i = 0; i < kScaleCount; ++i) {
    const auto& s = scales[i];
    if (s.name != kScaleNames[i]) {
      throw ValidationError("profile " + speaker_id + ": scale " + std::to_string(i) + " is '" +
                            s.name + "', expected '" + std::string(kScaleNames[i]) + "'");
    }
    if (!seen.insert(s.name).second) {
      throw ValidationError("profile " + speaker_id + ": duplicate scale " + s.name);
    }
    for (double v : s.scores) {
      if (!std::isfinite(v)) {
        throw ValidationError("profile " + speaker_id + ": non-finite score in " + s.name);
      }
    }
  }
}

const ScaleScores& PersonalityProfile::scale(std::string_view name) const {
  for (const auto& s : scales) {
    if (s.name == name) return s;
  }
  throw ValidationError("profile " + speaker_id + " has no scale '" + std::string(name) + "'");
}

const std::string& PersonalityProfile::item(std::string_view name) const {
  for (const auto& it : profile_items) {
    if (it.name == name) return it.value;
  }
  throw ValidationError("profile " + speaker_id + " has no item '" + std::string(name) + "'");
}

PersonalityProfile make_blank_profile(std::string speaker_id) {
  PersonalityProfile p;
  p.speaker_id = std::move(speaker_id);
  p.profile_items.reserve(kProfileItemCount);
  for (auto name : kProfileItemNames) p.profile_items.push_back({std::string(name), {}});
  p.scales.reserve(kScaleCount);
  for (auto name : kScaleNames) p.scales.push_back({std::string(name), {}});
  return p;
}

std::string format_score(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

std::string render_personality(const PersonalityProfile& profile) {
  std::ostringstream out;
  const std::size_t rows = std::max(profile.profile_items.size(), profile.scales.size());
  for (std::size_t r = 0; r < rows; ++r) {
    if (r < profile.profile_items.size()) {
      const auto& it = profile.profile_items[r];
      out << it.name << ": " << it.value << '\n';
    }
    if (r < profile.scales.size()) {
      const auto& s = profile.scales[r];
      out << s.name << ':';
      for (double v : s.scores) out << ' ' << format_score(v);
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace lovesim
