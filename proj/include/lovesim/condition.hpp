#pragma once

#include <array>
#include <string>
#include <string_view>

namespace lovesim {

// Which context segments accompany the target utterance in the classifier
// input. P covers both personality segments at once.
enum class AblationCondition { PD, P_only, D_only, None_ };

inline constexpr std::array<AblationCondition, 4> kAllConditions = {
    AblationCondition::D_only, AblationCondition::P_only, AblationCondition::PD,
    AblationCondition::None_};

inline bool uses_personality(AblationCondition c) {
  return c == AblationCondition::PD || c == AblationCondition::P_only;
}
inline bool uses_history(AblationCondition c) {
  return c == AblationCondition::PD || c == AblationCondition::D_only;
}

// Short names used on the command line and in files: pd, p, d, none.
std::string to_string(AblationCondition c);
AblationCondition parse_condition(std::string_view s);

// Row label in the ablation table, e.g. "(c) P+D".
std::string table_label(AblationCondition c);

}  // namespace lovesim
