#include <doctest.h>

#include <algorithm>
#include <map>

#include "helpers.hpp"
#include "lovesim/error.hpp"
#include "lovesim/rng.hpp"
#include "lovesim/synth.hpp"

using namespace lovesim;

TEST_SUITE("synth") {

TEST_CASE("ground-truth rule") {
  const SynthConfig cfg;
  const auto warm = testing::full_profile("L", 0.9, 0.2);
  const auto funny = testing::full_profile("L", 0.2, 0.8);
  const auto cold = testing::full_profile("L", 0.1, 0.3);
  CHECK(ground_truth_increase(Style::Empathy, warm, cfg));
  CHECK_FALSE(ground_truth_increase(Style::Humor, warm, cfg));
  CHECK(ground_truth_increase(Style::Humor, funny, cfg));
  CHECK_FALSE(ground_truth_increase(Style::Empathy, funny, cfg));
  for (auto s : kAllStyles) CHECK_FALSE(ground_truth_increase(s, cold, cfg));
  for (auto s : {Style::Brag, Style::Question, Style::TopicShift}) {
    CHECK_FALSE(ground_truth_increase(s, warm, cfg));
    CHECK_FALSE(ground_truth_increase(s, funny, cfg));
  }
  const auto at = testing::full_profile("L", 0.5, 0.5);
  CHECK_FALSE(ground_truth_increase(Style::Empathy, at, cfg));
}

TEST_CASE("styles survive composition") {
  for (auto s : kAllStyles) {
    const auto text = compose_utterance(s, style_phrases(s).front(), topic_words().front());
    REQUIRE(style_of(text).has_value());
    CHECK(*style_of(text) == s);
    CHECK(ground_truth_increase(std::string_view(text), testing::full_profile("L", 0.9, 0.9),
                                SynthConfig{}) == (s == Style::Empathy || s == Style::Humor));
  }
  CHECK_FALSE(style_of("no keyword here").has_value());
}

TEST_CASE("labels follow the rule and nothing else") {
  const SynthConfig cfg = testing::small_synth(20);
  const auto corpus = synth_corpus(cfg, 17);
  const auto examples = build_examples(corpus);
  std::map<Style, std::pair<std::size_t, std::size_t>> by_style;  // (increase, total)
  for (const auto& e : examples) {
    const bool truth = ground_truth_increase(std::string_view(e.target_text), e.partner_profile, cfg);
    CHECK(e.label == truth);
    const auto s = style_of(e.target_text);
    REQUIRE(s.has_value());
    auto& [inc, tot] = by_style[*s];
    inc += e.label;
    ++tot;
  }
  for (auto s : {Style::Empathy, Style::Humor}) {
    const auto [inc, tot] = by_style[s];
    CHECK(tot >= 200);
    CHECK(std::abs(static_cast<double>(inc) / static_cast<double>(tot) - 0.5) <= 0.05);
  }
}

TEST_CASE("conditional probability holds on a large corpus") {
  const SynthConfig cfg = testing::small_synth(50);
  const auto examples = build_examples(synth_corpus(cfg, 2024));
  std::size_t inc = 0, tot = 0;
  for (const auto& e : examples) {
    const auto s = style_of(e.target_text);
    if (s != Style::Empathy && s != Style::Humor) continue;
    inc += e.label;
    ++tot;
  }
  CHECK(tot >= 1000);
  CHECK(std::abs(static_cast<double>(inc) / static_cast<double>(tot) - 0.5) <= 0.05);
}

TEST_CASE("label does not depend on history order") {
  const SynthConfig cfg = testing::small_synth(6);
  auto examples = build_examples(synth_corpus(cfg, 5));
  Rng rng(99);
  for (auto& e : examples) {
    std::shuffle(e.history.begin(), e.history.end(), rng);
    CHECK(ground_truth_increase(std::string_view(e.target_text), e.partner_profile, cfg) == e.label);
  }
}

TEST_CASE("corpus is deterministic and valid") {
  const SynthConfig cfg = testing::small_synth(5);
  const auto a = synth_corpus(cfg, 8);
  CHECK(a == synth_corpus(cfg, 8));
  CHECK(a != synth_corpus(cfg, 9));
  REQUIRE(a.size() == 5);
  for (const auto& d : a) {
    CHECK_NOTHROW(d.validate());
    CHECK(d.utterances.size() == 2 * cfg.utterances_per_speaker());
  }
}

TEST_CASE("invalid configs") {
  CHECK_THROWS_AS(synth_corpus(testing::small_synth(3), 1), ValidationError);
  auto cfg = testing::small_synth(4);
  cfg.humor_scale = cfg.empathy_scale;
  CHECK_THROWS_AS(synth_corpus(cfg, 1), ValidationError);
}

}
