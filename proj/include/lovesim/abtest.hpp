#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lovesim/simulator.hpp"
#include "lovesim/synth.hpp"

namespace lovesim {

enum class Choice { First, Second, Absent };

std::string to_string(Choice c);  // "first", "second", "absent"
Choice parse_choice(const std::string& s);

struct DialogueRef {
  std::string method;  // "baseline", "vote-pd", "vote-d"
  std::string ref;     // where the dialogue lives, e.g. "pair-03/vote-pd"
  bool operator==(const DialogueRef&) const = default;
};

// One participant's dialogues, one per method.
struct ParticipantDialogues {
  std::string participant_id;
  std::vector<DialogueRef> dialogues;
};

struct ABItem {
  std::string item_id;
  std::string participant_id;
  DialogueRef first;
  DialogueRef second;
  Choice choice = Choice::Absent;
  bool operator==(const ABItem&) const = default;

  const std::string& winner() const;  // method name; requires a choice
  const std::string& loser() const;
};

// Every unordered pair of methods for every participant. Both the order of a
// participant's items and the order within each item are shuffled with the
// seed.
std::vector<ABItem> build_ab_items(std::span<const ParticipantDialogues> participants,
                                   std::uint64_t seed);

struct ChoiceRecord {
  std::string participant_id;
  std::string item_id;
  Choice choice = Choice::Absent;
};

std::vector<ChoiceRecord> read_choices_csv(const std::filesystem::path& path);
void write_choices_csv(const std::filesystem::path& path, std::span<const ChoiceRecord> choices);
std::vector<ChoiceRecord> parse_choices_csv(const std::string& text);
std::string format_choices_csv(std::span<const ChoiceRecord> choices);

// Copies recorded choices onto the matching items. Unknown item ids and
// participant mismatches are errors.
void apply_choices(std::vector<ABItem>& items, std::span<const ChoiceRecord> choices);

struct WinMatrix {
  std::vector<std::string> methods;
  std::vector<std::vector<std::size_t>> wins;  // wins[i][j]: i chosen over j
  std::vector<std::vector<std::size_t>> n;     // comparisons of i vs j

  std::optional<double> rate(std::size_t i, std::size_t j) const;
  double p_value(std::size_t i, std::size_t j) const;
  std::size_t index_of(const std::string& method) const;
};

// Methods appear in `methods` order; every item must carry a choice.
WinMatrix tally(std::span<const ABItem> items, std::span<const std::string> methods);

// Display name used in the report rows and columns.
std::string method_label(const std::string& method);

// Matrix of winning rates of the row method, starred when p < 0.05.
std::string render_ab_report(const WinMatrix& m);

// Ground-truth increases over the branch part of a simulated dialogue,
// counting Y's utterances as rated by X.
std::size_t ground_truth_increases(const SimulatedDialogue& d, const PersonalityProfile& profile_x,
                                   std::size_t common_turns, const SynthConfig& synth);

// Prefers the dialogue with more ground-truth increases; ties go to the first.
Choice scripted_choice(std::size_t first_increases, std::size_t second_increases);

void to_json(nlohmann::json& j, const ABItem& item);
void from_json(const nlohmann::json& j, ABItem& item);

std::vector<ABItem> read_ab_items_json(const std::filesystem::path& path);
void write_ab_items_json(const std::filesystem::path& path, std::span<const ABItem> items,
                         std::uint64_t seed);

}  // namespace lovesim
