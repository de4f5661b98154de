#include <doctest.h>

#include <array>
#include <map>
#include <set>

#include "helpers.hpp"
#include "lovesim/corpus.hpp"
#include "lovesim/corpus_io.hpp"
#include "lovesim/error.hpp"
#include "lovesim/synth.hpp"

using namespace lovesim;
using testing::utt;

TEST_SUITE("corpus") {

TEST_CASE("average of love items") {
  const std::array<int, 13> fives{5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5};
  const std::array<int, 13> ones{1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  const std::array<int, 13> mixed{1, 2, 3, 4, 5, 6, 7, 8, 9, 1, 2, 3, 4};
  CHECK(average_love_items(fives) == 5.0);
  CHECK(average_love_items(ones) == 1.0);
  CHECK(average_love_items(mixed) == doctest::Approx(55.0 / 13.0).epsilon(1e-15));

  const std::array<int, 12> short_items{};
  CHECK_THROWS_AS(average_love_items(short_items), ValidationError);
  auto bad = fives;
  bad[4] = 10;
  CHECK_THROWS_AS(average_love_items(bad), ValidationError);
  bad[4] = 0;
  CHECK_THROWS_AS(average_love_items(bad), ValidationError);
}

TEST_CASE("love event mean agrees with its items") {
  const std::array<int, 13> mixed{1, 2, 3, 4, 5, 6, 7, 8, 9, 1, 2, 3, 4};
  const auto e = make_love_event(2.5, mixed);
  CHECK(std::abs(e.mean - 55.0 / 13.0) < 1e-12);
  CHECK(e.t == 2.5);
}

TEST_CASE("label_delta compares strictly") {
  CHECK(label_delta(5.0, 6.2) == Delta::Increase);
  CHECK(label_delta(5.0, 5.0) == Delta::Unchanged);
  CHECK(label_delta(4.2308, 4.1538) == Delta::Decrease);
  CHECK_THROWS_AS(label_delta(std::nan(""), 1.0), ValidationError);
  CHECK_THROWS_AS(label_delta(1.0, INFINITY), ValidationError);
}

TEST_CASE("event inside an utterance labels it") {
  auto d = testing::empty_dialogue();
  d.utterances = {utt("B", "hello there", 0, 5)};
  // mean 6.0: every item 6
  d.events_x = {testing::event_with_mean(3.0, 6, 0)};
  const auto streams = attach_love_events(d, 5.0);
  REQUIRE(streams.size() == 2);
  const auto& x = streams[0];
  CHECK(x.rater_id == "A");
  CHECK(x.rated_id == "B");
  CHECK(x.labels[0].delta == Delta::Increase);
  CHECK(x.labels[0].score_after.value() == doctest::Approx(6.0));
  CHECK(streams[1].labels[0].delta == Delta::Unchanged);
  CHECK_FALSE(streams[1].labels[0].score_after.has_value());
}

TEST_CASE("event in a gap goes to the most recently ended utterance") {
  auto d = testing::empty_dialogue();
  d.utterances = {utt("B", "first", 0, 5), utt("A", "second", 9, 12)};
  d.events_x = {testing::event_with_mean(7.0, 6, 0)};
  const auto x = attach_love_events(d)[0];
  CHECK(x.labels[0].delta == Delta::Increase);
  CHECK(x.labels[0].attached_events == 1);
  CHECK(x.labels[1].attached_events == 0);
}

TEST_CASE("event before the first utterance goes to the first") {
  auto d = testing::empty_dialogue();
  d.utterances = {utt("B", "first", 2, 5), utt("A", "second", 6, 8)};
  d.events_x = {testing::event_with_mean(1.0, 4, 0)};
  const auto x = attach_love_events(d)[0];
  CHECK(x.labels[0].delta == Delta::Decrease);
}

TEST_CASE("empty dialogue is rejected") {
  auto d = testing::empty_dialogue();
  CHECK_THROWS_AS(attach_love_events(d), ValidationError);
}

TEST_CASE("consecutive equal means are rejected at load") {
  auto d = testing::empty_dialogue();
  d.utterances = {utt("B", "a", 0, 1), utt("A", "b", 1, 2), utt("B", "c", 2, 3),
                  utt("A", "d", 3, 4)};
  // means 5 -> 6 -> 6 -> 4
  d.events_x = {testing::event_with_mean(0.5, 5, 0), testing::event_with_mean(1.5, 6, 0),
                testing::event_with_mean(2.5, 6, 0), testing::event_with_mean(3.5, 4, 0)};
  CHECK_THROWS_AS(d.validate(), ValidationError);
  const nlohmann::json j = d;
  CHECK_THROWS_AS((void)j.get<DialogueRecord>().validate(), ValidationError);
}

TEST_CASE("overlapping turns of one speaker are rejected") {
  auto d = testing::empty_dialogue();
  d.utterances = {utt("A", "a", 0, 4), utt("A", "b", 3, 5)};
  CHECK_THROWS_AS(d.validate(), ValidationError);
  d.utterances = {utt("A", "a", 0, 4), utt("B", "b", 3, 5)};
  CHECK_NOTHROW(d.validate());
}

TEST_CASE("every event attaches to exactly one utterance") {
  const auto corpus = synth_corpus(testing::small_synth(6), 3);
  for (const auto& d : corpus) {
    const auto streams = attach_love_events(d);
    std::size_t attached_x = 0;
    std::size_t changed_x = 0;
    for (const auto& l : streams[0].labels) {
      attached_x += l.attached_events;
      changed_x += l.delta != Delta::Unchanged ? 1 : 0;
    }
    CHECK(attached_x == d.events_x.size());
    // The synthetic corpus never puts two events on one utterance.
    CHECK(changed_x == d.events_x.size());
  }
}

TEST_CASE("history windows") {
  auto d = testing::empty_dialogue();
  for (int i = 0; i < 30; ++i) {
    d.utterances.push_back(utt(i % 2 ? "A" : "B", "u" + std::to_string(i), i, i + 0.5));
  }
  const std::vector<DialogueRecord> corpus = {d};
  const auto examples = build_examples(corpus, 10);
  auto find = [&](std::size_t idx, const std::string& speaker) -> const TrainingExample& {
    for (const auto& e : examples) {
      if (e.utterance_index == idx && e.speaker_profile.speaker_id == speaker) return e;
    }
    FAIL("missing example");
    return examples.front();
  };
  const auto& e3 = find(3, "A");
  CHECK(e3.history.size() == 3);
  const auto& e25 = find(25, "A");
  REQUIRE(e25.history.size() == 10);
  for (std::size_t k = 0; k < 10; ++k) CHECK(e25.history[k].text == "u" + std::to_string(15 + k));
  CHECK(e25.history.back().speaker_tag == kPartnerTag);
  CHECK(e25.history[8].speaker_tag == kSpeakerTag);
  CHECK(e25.partner_profile.speaker_id == "B");
}

TEST_CASE("examples keep only the rated speaker's turns and reproduce label counts") {
  const auto corpus = synth_corpus(testing::small_synth(8), 11);
  const auto examples = build_examples(corpus);
  std::map<Delta, std::size_t> from_examples;
  for (const auto& e : examples) {
    ++from_examples[e.delta];
    CHECK(e.label == (e.delta == Delta::Increase));
    CHECK(e.partner_profile.speaker_id != e.speaker_profile.speaker_id);
  }
  std::map<Delta, std::size_t> from_streams;
  for (const auto& d : corpus) {
    for (const auto& s : attach_love_events(d)) {
      for (const auto& l : s.labels) {
        if (l.utterance.speaker_id == s.rated_id) ++from_streams[l.delta];
      }
    }
  }
  CHECK(from_examples == from_streams);
  CHECK(examples.size() == 8 * 30);
}

TEST_CASE("balance_dataset") {
  const auto corpus = synth_corpus(testing::small_synth(8), 5);
  const auto examples = build_examples(corpus);
  const auto a = balance_dataset(examples, 40, 30, 9);
  const auto b = balance_dataset(examples, 40, 30, 9);
  CHECK(a == b);
  std::size_t pos = 0;
  for (const auto& e : a) pos += e.label ? 1 : 0;
  CHECK(pos == 40);
  CHECK(a.size() == 70);
  CHECK(balance_dataset(examples, 0, 0, 9).empty());
  CHECK(balance_dataset(examples, 40, 30, 10) != a);
  try {
    (void)balance_dataset(examples, 100000, 1, 9);
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("positive") != std::string::npos);
  }
}

TEST_CASE("folds partition the pairs") {
  std::vector<std::string> ids;
  for (int i = 0; i < 50; ++i) ids.push_back("pair-" + std::to_string(i));
  const auto folds = make_folds(ids, 4);
  REQUIRE(folds.size() == 25);
  std::map<std::string, int> as_test, as_val;
  for (const auto& f : folds) {
    CHECK(f.train_pairs.size() == 48);
    std::set<std::string> train(f.train_pairs.begin(), f.train_pairs.end());
    for (const auto& p : f.test_pairs) {
      CHECK_FALSE(train.count(p));
      ++as_test[p];
    }
    for (const auto& p : f.val_pairs) ++as_val[p];
  }
  CHECK(as_test.size() == 50);
  for (const auto& [p, n] : as_test) CHECK(n == 1);
  for (const auto& [p, n] : as_val) CHECK(n == 1);
  CHECK(make_folds(ids, 4) == folds);
  CHECK(make_folds(ids, 5) != folds);

  const std::vector<std::string> four = {"a", "b", "c", "d"};
  const auto small = make_folds(four, 1);
  REQUIRE(small.size() == 2);
  CHECK(small[0].train_pairs.size() == 2);

  const std::vector<std::string> odd = {"a", "b", "c", "d", "e"};
  CHECK_THROWS_AS(make_folds(odd, 1), ValidationError);
  const std::vector<std::string> two = {"a", "b"};
  CHECK_THROWS_AS(make_folds(two, 1), ValidationError);
}

TEST_CASE("held-out pairs are halved between validation and test") {
  const auto corpus = synth_corpus(testing::small_synth(4), 2);
  const auto examples = build_examples(corpus);
  const auto folds = make_folds(pair_ids_of(corpus), 2);
  for (const auto& f : folds) {
    const auto split = split_held_out(examples, f, 8);
    for (const auto& p : f.test_pairs) {
      std::size_t nv = 0, nt = 0, total = 0;
      for (const auto& e : split.val) nv += e.pair_id == p;
      for (const auto& e : split.test) nt += e.pair_id == p;
      for (const auto& e : examples) total += e.pair_id == p;
      CHECK(nv + nt == total);
      CHECK(nt - nv <= 1);
    }
    const auto again = split_held_out(examples, f, 8);
    CHECK(again.val == split.val);
    CHECK(again.test == split.test);
  }
}

TEST_CASE("corpus jsonl round trip") {
  const auto corpus = synth_corpus(testing::small_synth(4), 21);
  const auto dir = std::filesystem::temp_directory_path() / "lovesim_corpus_test";
  write_corpus_jsonl(dir / "c.jsonl", corpus);
  CHECK(read_corpus_jsonl(dir / "c.jsonl") == corpus);
  write_text_file(dir / "bad.jsonl", "{\"pair_id\": 1}\n");
  CHECK_THROWS(read_corpus_jsonl(dir / "bad.jsonl"));
  std::filesystem::remove_all(dir);
}

}
