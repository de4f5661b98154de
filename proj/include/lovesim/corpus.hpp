#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lovesim/personality.hpp"

namespace lovesim {

inline constexpr std::size_t kLoveItemCount = 13;
inline constexpr int kLikertMin = 1;
inline constexpr int kLikertMax = 9;
inline constexpr double kDefaultInitialScore = 5.0;
inline constexpr std::size_t kDefaultHistoryLen = 10;

struct Utterance {
  std::string speaker_id;
  std::string text;
  double t_start = 0.0;
  double t_end = 0.0;
  bool operator==(const Utterance&) const = default;
};

// A love-scale response recorded at time t. Built through make_love_event so
// that `mean` always agrees with `items`.
struct LoveScaleEvent {
  double t = 0.0;
  std::array<int, kLoveItemCount> items{};
  double mean = 0.0;
  bool operator==(const LoveScaleEvent&) const = default;
};

LoveScaleEvent make_love_event(double t, std::span<const int> items);

// events_x is X's impression of Y over time; events_y is Y's impression of X.
struct DialogueRecord {
  std::string pair_id;
  PersonalityProfile profile_x;
  PersonalityProfile profile_y;
  std::vector<Utterance> utterances;
  std::vector<LoveScaleEvent> events_x;
  std::vector<LoveScaleEvent> events_y;

  bool operator==(const DialogueRecord&) const = default;

  void validate() const;
  const PersonalityProfile& profile_of(const std::string& speaker_id) const;
  const PersonalityProfile& partner_of(const std::string& speaker_id) const;
};

enum class Delta { Increase, Decrease, Unchanged };

std::string to_string(Delta d);
Delta parse_delta(const std::string& s);

struct LabeledUtterance {
  std::size_t index = 0;  // position in DialogueRecord::utterances
  Utterance utterance;
  std::string rater_id;
  Delta delta = Delta::Unchanged;
  std::optional<double> score_after;
  std::size_t attached_events = 0;
};

// Labels for every utterance of a dialogue, as seen by one rater.
struct RaterLabels {
  std::string rater_id;
  std::string rated_id;
  std::vector<LabeledUtterance> labels;
};

struct HistoryTurn {
  std::string speaker_tag;  // "speaker" or "partner", relative to the target utterance
  std::string text;
  bool operator==(const HistoryTurn&) const = default;
};

inline constexpr const char* kSpeakerTag = "speaker";
inline constexpr const char* kPartnerTag = "partner";

struct TrainingExample {
  std::string pair_id;
  std::size_t utterance_index = 0;
  PersonalityProfile partner_profile;
  PersonalityProfile speaker_profile;
  std::string target_text;
  std::vector<HistoryTurn> history;  // oldest first, ends right before the target
  Delta delta = Delta::Unchanged;
  bool label = false;  // true iff delta == Increase

  bool operator==(const TrainingExample&) const = default;
};

double average_love_items(std::span<const int> items);

Delta label_delta(double prev_mean, double new_mean);

// Attaches every love-scale event to one utterance and labels the utterances
// of both rater streams. An utterance carrying several events is labelled by
// the net change across them.
std::vector<RaterLabels> attach_love_events(const DialogueRecord& dialogue,
                                            double initial_score = kDefaultInitialScore);

// One example per utterance spoken by the rated person of each stream.
std::vector<TrainingExample> build_examples(std::span<const DialogueRecord> corpus,
                                            std::size_t history_len = kDefaultHistoryLen,
                                            double initial_score = kDefaultInitialScore);

std::vector<TrainingExample> balance_dataset(std::span<const TrainingExample> examples,
                                             std::size_t target_pos, std::size_t target_neg,
                                             std::uint64_t seed);

// Each fold holds out two pairs. The examples of both held-out pairs are
// divided evenly between validation and test, so every pair shows up once
// on each side over the whole fold set.
struct Fold {
  std::vector<std::string> train_pairs;
  std::vector<std::string> val_pairs;
  std::vector<std::string> test_pairs;
  bool operator==(const Fold&) const = default;
};

std::vector<Fold> make_folds(std::span<const std::string> pair_ids, std::uint64_t seed);

struct HeldOutSplit {
  std::vector<TrainingExample> val;
  std::vector<TrainingExample> test;
};

// Deterministically halves each held-out pair's examples between val and test.
HeldOutSplit split_held_out(std::span<const TrainingExample> examples, const Fold& fold,
                            std::uint64_t seed);

std::vector<std::string> pair_ids_of(std::span<const DialogueRecord> corpus);

}  // namespace lovesim
