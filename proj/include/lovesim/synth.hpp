#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lovesim/corpus.hpp"

namespace lovesim {

enum class Style { Empathy, Humor, Brag, Question, TopicShift };

inline constexpr std::array<Style, 5> kAllStyles = {Style::Empathy, Style::Humor, Style::Brag,
                                                    Style::Question, Style::TopicShift};

std::string_view style_keyword(Style s);
const std::vector<std::string_view>& style_phrases(Style s);
const std::vector<std::string_view>& topic_words();

// "<keyword>: <phrase> <topic>"
std::string compose_utterance(Style style, std::string_view phrase, std::string_view topic);

// Style of an utterance produced by compose_utterance (leading keyword).
std::optional<Style> style_of(std::string_view text);

struct SynthConfig {
  std::size_t pairs = 50;
  // Per speaker and dialogue: empathy and humor turns plus neutral filler
  // turns drawn from brag / question / topic-shift.
  std::size_t empathy_per_speaker = 7;
  std::size_t humor_per_speaker = 7;
  std::size_t filler_per_speaker = 1;
  // Scales holding the two latent preferences (first score of each vector).
  std::string empathy_scale = "Rosenberg’s Self Esteem Scale (RSES)";
  std::string humor_scale = "Self-Consciousness Scale";
  double preference_threshold = 0.5;

  std::size_t utterances_per_speaker() const {
    return empathy_per_speaker + humor_per_speaker + filler_per_speaker;
  }
  void validate() const;
};

// Ground-truth rule: an utterance raises the listener's love score iff it is
// empathetic and the listener's empathy preference exceeds the threshold, or
// humorous and the listener's humor preference exceeds it.
bool ground_truth_increase(Style style, const PersonalityProfile& listener,
                           const SynthConfig& config);
bool ground_truth_increase(std::string_view text, const PersonalityProfile& listener,
                           const SynthConfig& config);

// Within a pair exactly one speaker has a high empathy preference and exactly
// one has a high humor preference, and both speakers get the same style
// counts. That pins P(Increase | empathy) = P(Increase | humor) = 0.5.
std::vector<DialogueRecord> synth_corpus(const SynthConfig& config, std::uint64_t seed);

}  // namespace lovesim
