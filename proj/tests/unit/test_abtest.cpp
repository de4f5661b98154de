#include <doctest.h>

#include <map>
#include <set>

#include "helpers.hpp"
#include "lovesim/abtest.hpp"
#include "lovesim/error.hpp"
#include "lovesim/stats.hpp"

using namespace lovesim;

namespace {

const std::vector<std::string> kMethods = {"vote-pd", "vote-d", "baseline"};

std::vector<ParticipantDialogues> participants(std::size_t n) {
  std::vector<ParticipantDialogues> out;
  for (std::size_t p = 0; p < n; ++p) {
    ParticipantDialogues pd;
    pd.participant_id = "p" + std::to_string(p);
    for (const auto& m : kMethods) pd.dialogues.push_back({m, pd.participant_id + "/" + m});
    out.push_back(pd);
  }
  return out;
}

// Items where `a` beats `b` in `wins` of `total` comparisons.
std::vector<ABItem> duel(const std::string& a, const std::string& b, std::size_t wins,
                         std::size_t total) {
  std::vector<ABItem> items;
  for (std::size_t k = 0; k < total; ++k) {
    ABItem it;
    it.item_id = a + b + std::to_string(k);
    it.participant_id = "p";
    it.first = {k % 2 ? a : b, "x"};
    it.second = {k % 2 ? b : a, "y"};
    const bool a_wins = k < wins;
    const bool a_first = k % 2 == 1;
    it.choice = a_wins == a_first ? Choice::First : Choice::Second;
    items.push_back(it);
  }
  return items;
}

}  // namespace

TEST_SUITE("abtest") {

TEST_CASE("three items per participant covering every method pair") {
  const auto parts = participants(20);
  const auto items = build_ab_items(parts, 4);
  CHECK(items.size() == 60);
  std::map<std::string, std::set<std::set<std::string>>> seen;
  std::set<std::string> ids;
  for (const auto& it : items) {
    CHECK(it.first.method != it.second.method);
    CHECK(it.choice == Choice::Absent);
    CHECK(seen[it.participant_id].insert({it.first.method, it.second.method}).second);
    CHECK(ids.insert(it.item_id).second);
    CHECK(it.first.ref.rfind(it.participant_id + "/", 0) == 0);
  }
  CHECK(seen.size() == 20);
  for (const auto& [p, pairs] : seen) CHECK(pairs.size() == 3);
  CHECK(build_ab_items(parts, 4) == items);
  CHECK(build_ab_items(parts, 5) != items);
}

TEST_CASE("presentation order is balanced") {
  const auto items = build_ab_items(participants(200), 1);
  std::size_t pd_first = 0, pd_items = 0;
  for (const auto& it : items) {
    if (it.first.method == "vote-pd" || it.second.method == "vote-pd") {
      ++pd_items;
      pd_first += it.first.method == "vote-pd";
    }
  }
  CHECK(binomial_significance(pd_first, pd_items) > 0.001);
}

TEST_CASE("duplicate participants and methods are rejected") {
  auto parts = participants(2);
  parts[1].participant_id = parts[0].participant_id;
  CHECK_THROWS_AS(build_ab_items(parts, 1), ValidationError);
  parts = participants(1);
  parts[0].dialogues[1].method = "vote-pd";
  CHECK_THROWS_AS(build_ab_items(parts, 1), ValidationError);
}

TEST_CASE("winning rates") {
  auto items = duel("vote-pd", "baseline", 15, 20);
  const auto more = duel("vote-d", "baseline", 13, 20);
  items.insert(items.end(), more.begin(), more.end());
  const auto m = tally(items, kMethods);
  const auto pd = m.index_of("vote-pd");
  const auto d = m.index_of("vote-d");
  const auto b = m.index_of("baseline");
  CHECK(m.rate(pd, b).value() == doctest::Approx(0.75));
  CHECK(m.rate(b, pd).value() == doctest::Approx(0.25));
  CHECK(m.rate(d, b).value() == doctest::Approx(0.65));
  CHECK(m.rate(d, b).value() + m.rate(b, d).value() == doctest::Approx(1.0));
  CHECK_FALSE(m.rate(pd, d).has_value());
  CHECK_FALSE(m.rate(pd, pd).has_value());
  CHECK(m.p_value(pd, b) == doctest::Approx(0.041389).epsilon(1e-4));

  const auto report = render_ab_report(m);
  CHECK(report.find("| P+D |") != std::string::npos);
  CHECK(report.find(" 75%* |") != std::string::npos);
  CHECK(report.find(" 65% |") != std::string::npos);
  CHECK(report.find(" 25%* |") != std::string::npos);
  CHECK(report.find(" -- |") != std::string::npos);
}

TEST_CASE("tally matches a hand count on random choices") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto items = build_ab_items(participants(15), seed);
    Rng rng(seed);
    std::map<std::pair<std::string, std::string>, std::size_t> wins, seen;
    for (auto& it : items) {
      it.choice = rng() & 1U ? Choice::First : Choice::Second;
      const auto& w = it.choice == Choice::First ? it.first.method : it.second.method;
      const auto& l = it.choice == Choice::First ? it.second.method : it.first.method;
      ++wins[{w, l}];
      ++seen[{w, l}];
      ++seen[{l, w}];
    }
    const auto m = tally(items, kMethods);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        if (i == j) continue;
        const auto key = std::make_pair(kMethods[i], kMethods[j]);
        CHECK(m.wins[i][j] == wins[key]);
        CHECK(m.n[i][j] == seen[key]);
        CHECK(m.n[i][j] == 15);
      }
    }
  }
}

TEST_CASE("absent choices and unknown methods are errors") {
  auto items = build_ab_items(participants(1), 1);
  CHECK_THROWS_AS(tally(items, kMethods), ValidationError);
  for (auto& it : items) it.choice = Choice::First;
  const std::vector<std::string> two = {"vote-pd", "baseline"};
  CHECK_THROWS_AS(tally(items, two), ValidationError);
}

TEST_CASE("choices csv round trip and application") {
  auto items = build_ab_items(participants(2), 9);
  std::vector<ChoiceRecord> choices;
  for (std::size_t k = 0; k < items.size(); ++k) {
    choices.push_back({items[k].participant_id, items[k].item_id, k % 2 ? Choice::First : Choice::Second});
  }
  const auto text = format_choices_csv(choices);
  CHECK(text.rfind("participant_id,item_id,choice\n", 0) == 0);
  const auto back = parse_choices_csv(text);
  REQUIRE(back.size() == choices.size());
  apply_choices(items, back);
  for (std::size_t k = 0; k < items.size(); ++k) CHECK(items[k].choice == choices[k].choice);

  CHECK_THROWS_AS(parse_choices_csv("who,what\n"), ValidationError);
  CHECK_THROWS_AS(parse_choices_csv("participant_id,item_id,choice\np0,p0-1,maybe\n"), ValidationError);
  const std::vector<ChoiceRecord> stray = {{"p0", "p9-1", Choice::First}};
  CHECK_THROWS_AS(apply_choices(items, stray), ValidationError);
  const std::vector<ChoiceRecord> wrong = {{"p1", items[0].item_id, Choice::First}};
  if (items[0].participant_id != "p1") CHECK_THROWS_AS(apply_choices(items, wrong), ValidationError);

  const auto json_items = nlohmann::json(items).get<std::vector<ABItem>>();
  CHECK(json_items == items);
}

TEST_CASE("scripted chooser") {
  CHECK(scripted_choice(3, 5) == Choice::Second);
  CHECK(scripted_choice(5, 3) == Choice::First);
  CHECK(scripted_choice(4, 4) == Choice::First);

  SimulatedDialogue d;
  d.speaker_x = "X";
  d.speaker_y = "Y";
  const auto x = testing::full_profile("X", 0.9, 0.1);
  const SynthConfig synth;
  for (int i = 0; i < 20; ++i) {
    const Style s = i % 4 == 0 ? Style::Empathy : Style::Humor;
    d.utterances.push_back(testing::utt(i % 2 ? "X" : "Y", compose_utterance(s, "well", "cats"), i, i + 1));
  }
  // Y speaks at even indices. From index 10 on, 12 and 16 are empathetic and
  // the rest humorous, which X does not reward.
  std::size_t expected = 0;
  for (std::size_t i = 10; i < 20; i += 2) expected += i % 4 == 0;
  CHECK(ground_truth_increases(d, x, 10, synth) == expected);
  CHECK(expected == 2);
}

}
