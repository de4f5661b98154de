#include "lovesim/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "lovesim/error.hpp"
#include "lovesim/rng.hpp"

namespace lovesim {

namespace {

const std::map<Style, std::vector<std::string_view>>& phrase_bank() {
  static const std::map<Style, std::vector<std::string_view>> bank = {
      {Style::Empathy, {"i hear you on", "that sounds tough with", "i feel the same about",
                        "i understand your", "you must love"}},
      {Style::Humor, {"ha that is hilarious", "what a joke about", "funny story on",
                      "i laughed at", "silly me and"}},
      {Style::Brag, {"i am the best at", "i earn a lot from", "i always win at",
                     "nobody beats me in", "i am famous for"}},
      {Style::Question, {"what do you think of", "where do you do", "how often do you do",
                         "why do you like", "when did you start"}},
      {Style::TopicShift, {"anyway let us discuss", "by the way", "changing subject to",
                           "forget that and", "on another note"}},
  };
  return bank;
}

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  std::uniform_int_distribution<std::size_t> dist(0, v.size() - 1);
  return v[dist(rng)];
}

const std::vector<std::string_view> kEducation = {"university", "graduate", "college",
                                                  "highschool"};
const std::vector<std::string_view> kDepartment = {"economics", "engineering", "literature",
                                                   "law", "medicine", "design"};
const std::vector<std::string_view> kCity = {"tokyo", "osaka", "kyoto", "nagoya", "sapporo",
                                             "fukuoka"};
const std::vector<std::string_view> kOccupation = {"engineer", "teacher", "nurse",
                                                   "designer", "clerk", "researcher"};
const std::vector<std::string_view> kGeneric = {"yes", "no", "sometimes", "often", "rarely"};
const std::vector<std::string_view> kTrait = {"calm", "cheerful", "shy", "curious", "kind",
                                              "serious"};

std::string profile_value(std::size_t item, Rng& rng) {
  switch (item) {
    case 0: return std::to_string(std::uniform_int_distribution<int>(22, 44)(rng));
    case 1: return std::string(pick(kEducation, rng));
    case 2: return std::string(pick(kDepartment, rng));
    case 3:
    case 4: return std::string(pick(kCity, rng));
    case 5: return std::string(pick(kOccupation, rng));
    case 14:
    case 16: return std::string(pick(kTrait, rng));
    case 15:
    case 17:
    case 18:
    case 19:
    case 20:
    case 21:
    case 22:
    case 23:
    case 24: return std::string(pick(topic_words(), rng));
    default: return std::string(pick(kGeneric, rng));
  }
}

double draw_preference(bool high, Rng& rng) {
  // Tenths away from the threshold: 0.1..0.4 or 0.6..0.9.
  const int k = std::uniform_int_distribution<int>(1, 4)(rng);
  return high ? (5 + k) / 10.0 : (5 - k) / 10.0;
}

PersonalityProfile synth_profile(const std::string& id, bool empathy_high, bool humor_high,
                                 const SynthConfig& cfg, Rng& rng) {
  auto p = make_blank_profile(id);
  for (std::size_t i = 0; i < p.profile_items.size(); ++i) {
    p.profile_items[i].value = profile_value(i, rng);
  }
  for (auto& s : p.scales) {
    if (s.name == cfg.empathy_scale) {
      s.scores = {draw_preference(empathy_high, rng)};
    } else if (s.name == cfg.humor_scale) {
      s.scores = {draw_preference(humor_high, rng)};
    } else {
      const int len = std::uniform_int_distribution<int>(1, 3)(rng);
      for (int k = 0; k < len; ++k) {
        s.scores.push_back(std::uniform_int_distribution<int>(0, 10)(rng) / 10.0);
      }
    }
  }
  return p;
}

std::vector<Style> style_plan(const SynthConfig& cfg, Rng& rng) {
  std::vector<Style> plan;
  plan.insert(plan.end(), cfg.empathy_per_speaker, Style::Empathy);
  plan.insert(plan.end(), cfg.humor_per_speaker, Style::Humor);
  static const std::vector<Style> fillers = {Style::Brag, Style::Question, Style::TopicShift};
  for (std::size_t i = 0; i < cfg.filler_per_speaker; ++i) plan.push_back(pick(fillers, rng));
  std::shuffle(plan.begin(), plan.end(), rng);
  return plan;
}

}  // namespace

std::string_view style_keyword(Style s) {
  switch (s) {
    case Style::Empathy: return "empathy";
    case Style::Humor: return "humor";
    case Style::Brag: return "brag";
    case Style::Question: return "question";
    case Style::TopicShift: return "topic-shift";
  }
  return "";
}

const std::vector<std::string_view>& style_phrases(Style s) { return phrase_bank().at(s); }

const std::vector<std::string_view>& topic_words() {
  static const std::vector<std::string_view> words = {
      "travel", "anime", "ramen", "sushi", "movies", "music",
      "hiking", "cooking", "games", "books", "camping", "karaoke"};
  return words;
}

std::string compose_utterance(Style style, std::string_view phrase, std::string_view topic) {
  std::string out(style_keyword(style));
  out += ": ";
  out += phrase;
  out += ' ';
  out += topic;
  return out;
}

std::optional<Style> style_of(std::string_view text) {
  for (auto s : kAllStyles) {
    const auto kw = style_keyword(s);
    if (text.size() > kw.size() && text.substr(0, kw.size()) == kw && text[kw.size()] == ':') {
      return s;
    }
  }
  return std::nullopt;
}

void SynthConfig::validate() const {
  if (pairs < 4) {
    throw ValidationError("synth: need at least 4 pairs, got " + std::to_string(pairs));
  }
  if (utterances_per_speaker() == 0) throw ValidationError("synth: empty dialogues requested");
  if (empathy_scale == humor_scale) {
    throw ValidationError("synth: preference scales must differ");
  }
  auto blank = make_blank_profile("check");
  (void)blank.scale(empathy_scale);
  (void)blank.scale(humor_scale);
}

bool ground_truth_increase(Style style, const PersonalityProfile& listener,
                           const SynthConfig& config) {
  auto pref = [&](const std::string& scale) {
    const auto& s = listener.scale(scale);
    return s.scores.empty() ? 0.0 : s.scores.front();
  };
  if (style == Style::Empathy) return pref(config.empathy_scale) > config.preference_threshold;
  if (style == Style::Humor) return pref(config.humor_scale) > config.preference_threshold;
  return false;
}

bool ground_truth_increase(std::string_view text, const PersonalityProfile& listener,
                           const SynthConfig& config) {
  const auto style = style_of(text);
  return style && ground_truth_increase(*style, listener, config);
}

std::vector<DialogueRecord> synth_corpus(const SynthConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  std::vector<DialogueRecord> corpus;
  corpus.reserve(config.pairs);
  for (std::size_t p = 0; p < config.pairs; ++p) {
    DialogueRecord d;
    d.pair_id = "pair" + std::to_string(p);
    const bool x_empathy_high = rng() & 1U;
    const bool x_humor_high = rng() & 1U;
    d.profile_x = synth_profile(d.pair_id + "-X", x_empathy_high, x_humor_high, config, rng);
    d.profile_y = synth_profile(d.pair_id + "-Y", !x_empathy_high, !x_humor_high, config, rng);

    auto plan_x = style_plan(config, rng);
    auto plan_y = style_plan(config, rng);
    const bool x_first = rng() & 1U;

    // Each rater's 13 items start at the scale midpoint and one item rises by
    // one point per increase.
    std::array<int, kLoveItemCount> items_x;
    std::array<int, kLoveItemCount> items_y;
    items_x.fill(5);
    items_y.fill(5);

    std::uniform_real_distribution<double> duration(2.0, 5.0);
    double t = 0.0;
    const std::size_t n = plan_x.size() + plan_y.size();
    std::size_t ix = 0;
    std::size_t iy = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const bool x_turn = (k % 2 == 0) == x_first;
      const auto& speaker = x_turn ? d.profile_x : d.profile_y;
      const auto& listener = x_turn ? d.profile_y : d.profile_x;
      const Style style = x_turn ? plan_x[ix++] : plan_y[iy++];
      Utterance u;
      u.speaker_id = speaker.speaker_id;
      u.text = compose_utterance(style, pick(style_phrases(style), rng), pick(topic_words(), rng));
      u.t_start = t;
      u.t_end = t + std::round(duration(rng) * 10.0) / 10.0;
      t = u.t_end + 0.5;
      if (ground_truth_increase(style, listener, config)) {
        auto& items = x_turn ? items_y : items_x;
        auto& events = x_turn ? d.events_y : d.events_x;
        std::vector<std::size_t> room;
        for (std::size_t i = 0; i < items.size(); ++i) {
          if (items[i] < kLikertMax) room.push_back(i);
        }
        if (room.empty()) throw ValidationError("synth: love scale saturated; dialogue too long");
        ++items[pick(room, rng)];
        events.push_back(make_love_event(0.5 * (u.t_start + u.t_end), items));
      }
      d.utterances.push_back(std::move(u));
    }
    corpus.push_back(std::move(d));
  }
  return corpus;
}

}  // namespace lovesim
