#include "helpers.hpp"

#include <array>

#include "lovesim/personality.hpp"

namespace testing {

using namespace lovesim;

PersonalityProfile full_profile(const std::string& id, double empathy, double humor) {
  auto p = make_blank_profile(id);
  for (std::size_t i = 0; i < p.profile_items.size(); ++i) {
    p.profile_items[i].value = "value" + std::to_string(i);
  }
  for (auto& s : p.scales) s.scores = {0.3, 2.0};
  p.scales[0].scores[0] = empathy;
  p.scales[1].scores[0] = humor;
  return p;
}

Utterance utt(const std::string& speaker, const std::string& text, double t0, double t1) {
  Utterance u;
  u.speaker_id = speaker;
  u.text = text;
  u.t_start = t0;
  u.t_end = t1;
  return u;
}

LoveScaleEvent event_with_mean(double t, int base, int bumped) {
  std::array<int, kLoveItemCount> items;
  items.fill(base);
  for (int i = 0; i < bumped; ++i) items[static_cast<std::size_t>(i)] = base + 1;
  return make_love_event(t, items);
}

DialogueRecord empty_dialogue(const std::string& pair_id) {
  DialogueRecord d;
  d.pair_id = pair_id;
  d.profile_x = full_profile("A");
  d.profile_y = full_profile("B");
  return d;
}

SynthConfig small_synth(std::size_t pairs) {
  SynthConfig c;
  c.pairs = pairs;
  return c;
}

}  // namespace testing
