#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "lovesim/error.hpp"
#include "lovesim/serialize.hpp"
#include "lovesim/vocab.hpp"

using namespace lovesim;

namespace {

struct Segments {
  std::vector<int> partner, speaker, target, history;
};

// Splits an id sequence on its five separators, checking their order.
Segments split(const std::vector<int>& ids) {
  REQUIRE(ids.size() >= 5);
  REQUIRE(ids.front() == kClsId);
  REQUIRE(ids.back() == kSepId);
  std::vector<std::size_t> seps;
  for (std::size_t i = 1; i + 1 < ids.size(); ++i) {
    if (ids[i] < kReservedTokenCount) seps.push_back(i);
  }
  REQUIRE(seps.size() == 3);
  CHECK(ids[seps[0]] == kPSepId);
  CHECK(ids[seps[1]] == kSepId);
  CHECK(ids[seps[2]] == kDSepId);
  auto slice = [&](std::size_t a, std::size_t b) {
    return std::vector<int>(ids.begin() + static_cast<std::ptrdiff_t>(a),
                            ids.begin() + static_cast<std::ptrdiff_t>(b));
  };
  return {slice(1, seps[0]), slice(seps[0] + 1, seps[1]), slice(seps[1] + 1, seps[2]),
          slice(seps[2] + 1, ids.size() - 1)};
}

TrainingExample sample_example() {
  TrainingExample e;
  e.pair_id = "p";
  e.partner_profile = testing::full_profile("A", 0.9, 0.1);
  e.speaker_profile = testing::full_profile("B", 0.2, 0.7);
  e.target_text = "empathy: that sounds hard about the trip";
  e.history = {{kPartnerTag, "i lost my bag"}, {kSpeakerTag, "oh no"}, {kPartnerTag, "yes 0.9 sad"}};
  return e;
}

}  // namespace

TEST_SUITE("serialize") {

TEST_CASE("tokenizer keeps decimals whole") {
  CHECK(tokenize("Hello, World! 0.9 and 2.") ==
        std::vector<std::string>{"hello", ",", "world", "!", "0.9", "and", "2", "."});
  CHECK(tokenize("   ").empty());
  CHECK(tokenize("a:b") == std::vector<std::string>{"a", ":", "b"});
}

TEST_CASE("fit_vocab orders by frequency then lexicographically") {
  const std::vector<std::string> texts = {"b a b", "c a b", "d"};
  const auto v = fit_vocab(texts, 100);
  REQUIRE(v.size() == kReservedTokenCount + 4);
  CHECK(v.token(6) == "b");
  CHECK(v.token(7) == "a");
  CHECK(v.token(8) == "c");
  CHECK(v.token(9) == "d");
  const auto capped = fit_vocab(texts, kReservedTokenCount + 2);
  CHECK(capped.size() == kReservedTokenCount + 2);
  CHECK(capped.id("c") == kUnkId);
  CHECK(capped.id("b") == 6);
  CHECK(v.token(kPadId) != v.token(kClsId));
  CHECK_THROWS_AS(fit_vocab(texts, 6), ValidationError);
  CHECK_THROWS_AS(fit_vocab(std::vector<std::string>{}, 10), ValidationError);
  const std::vector<std::string> own(v.tokens().begin() + kReservedTokenCount, v.tokens().end());
  CHECK(Vocab::from_tokens(own) == v);
}

TEST_CASE("segments per condition") {
  const auto e = sample_example();
  const auto vocab = fit_vocab(vocab_texts(std::span(&e, 1)), 4000);
  const auto partner = vocab.encode(render_personality(e.partner_profile));
  const auto target = vocab.encode(e.target_text);
  const auto history = vocab.encode(render_history(e.history));
  const std::size_t big = 100000;

  const auto pd = split(serialize_input(e, AblationCondition::PD, vocab, big));
  CHECK(pd.partner == partner);
  CHECK(pd.target == target);
  CHECK(pd.history == history);
  CHECK(!pd.speaker.empty());

  const auto p = split(serialize_input(e, AblationCondition::P_only, vocab, big));
  CHECK(p.partner == partner);
  CHECK(p.history.empty());

  const auto d = split(serialize_input(e, AblationCondition::D_only, vocab, big));
  CHECK(d.partner.empty());
  CHECK(d.speaker.empty());
  CHECK(d.history == history);

  const auto none = split(serialize_input(e, AblationCondition::None_, vocab, big));
  CHECK(none.partner.empty());
  CHECK(none.speaker.empty());
  CHECK(none.history.empty());
  CHECK(none.target == target);
}

TEST_CASE("truncation drops oldest history first, then long personality tails") {
  const auto e = sample_example();
  const auto vocab = fit_vocab(vocab_texts(std::span(&e, 1)), 4000);
  const auto partner = vocab.encode(render_personality(e.partner_profile));
  const auto speaker = vocab.encode(render_personality(e.speaker_profile));
  const auto target = vocab.encode(e.target_text);
  const auto history = vocab.encode(render_history(e.history));
  const std::size_t full = 5 + partner.size() + speaker.size() + target.size() + history.size();

  // Room for all but 3 history tokens.
  const auto a = split(serialize_input(e, AblationCondition::PD, vocab, full - 3));
  CHECK(a.history == std::vector<int>(history.begin() + 3, history.end()));
  CHECK(a.partner == partner);
  CHECK(a.speaker == speaker);

  // No history left; personalities are trimmed from their tails.
  const auto b_ids = serialize_input(e, AblationCondition::PD, vocab, 64);
  CHECK(b_ids.size() == 64);
  const auto b = split(b_ids);
  CHECK(b.history.empty());
  CHECK(b.target == target);
  CHECK(std::equal(b.partner.begin(), b.partner.end(), partner.begin()));
  CHECK(std::equal(b.speaker.begin(), b.speaker.end(), speaker.begin()));
  const auto diff = static_cast<long>(b.partner.size()) - static_cast<long>(b.speaker.size());
  CHECK(diff >= 0);
  CHECK(diff <= 1);

  CHECK_THROWS_AS(serialize_input(e, AblationCondition::PD, vocab, 5 + target.size() - 1),
                  ValidationError);
  CHECK(serialize_input(e, AblationCondition::PD, vocab, 5 + target.size()).size() ==
        5 + target.size());
}

TEST_CASE("personality tokens never break serialization") {
  const auto corpus = synth_corpus(testing::small_synth(4), 3);
  const auto examples = build_examples(corpus);
  const auto vocab = fit_vocab(vocab_texts(examples), 4000);
  for (const auto& e : examples) {
    for (auto c : kAllConditions) {
      const auto ids = serialize_input(e, c, vocab, 64);
      CHECK(ids.size() <= 64);
      (void)split(ids);
    }
  }
}

TEST_CASE("encode_plain") {
  const auto vocab = fit_vocab(std::vector<std::string>{"one two three"}, 100);
  CHECK(encode_plain("one two three", vocab, 64) ==
        std::vector<int>{kClsId, vocab.id("one"), vocab.id("two"), vocab.id("three"), kSepId});
  CHECK(encode_plain("one two three", vocab, 4).size() == 4);
  CHECK(encode_plain("zzz", vocab, 8)[1] == kUnkId);
}

}
