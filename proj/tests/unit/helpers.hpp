#pragma once

#include <string>
#include <vector>

#include "lovesim/corpus.hpp"
#include "lovesim/synth.hpp"

namespace testing {

// Every item and scale filled; the two preference scales carry the given
// first scores.
lovesim::PersonalityProfile full_profile(const std::string& id, double empathy = 0.2,
                                         double humor = 0.2);

lovesim::Utterance utt(const std::string& speaker, const std::string& text, double t0, double t1);

lovesim::LoveScaleEvent event_with_mean(double t, int base, int bumped);

// Two speakers "A" and "B", no events.
lovesim::DialogueRecord empty_dialogue(const std::string& pair_id = "p");

lovesim::SynthConfig small_synth(std::size_t pairs);

}  // namespace testing
