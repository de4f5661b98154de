#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lovesim/classifier.hpp"
#include "lovesim/condition.hpp"
#include "lovesim/corpus.hpp"
#include "lovesim/model.hpp"
#include "lovesim/vocab.hpp"

namespace lovesim {

inline constexpr std::size_t kMaxGeneratorRetries = 10;

// Produces n candidate replies for `persona` given the dialogue so far.
// Must be deterministic in (persona, history, n, seed).
class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::vector<std::string> generate(const PersonalityProfile& persona,
                                            std::span<const Utterance> history, std::size_t n,
                                            std::uint64_t seed) const = 0;
};

// Fills the synthetic style templates. Candidate i gets style i mod 5, so any
// n >= 5 covers every style. Topics come from the last history utterance,
// the persona's profile and the topic lexicon. A candidate that repeats an
// earlier one (after whitespace normalization) is redrawn with a perturbed
// seed up to kMaxGeneratorRetries times, then kept.
class TemplateGenerator : public Generator {
 public:
  std::vector<std::string> generate(const PersonalityProfile& persona,
                                    std::span<const Utterance> history, std::size_t n,
                                    std::uint64_t seed) const override;
};

// Last word token of the last utterance, if any.
std::optional<std::string> history_topic(std::span<const Utterance> history);

std::string normalize_whitespace(std::string_view text);

class CohesionScorer {
 public:
  virtual ~CohesionScorer() = default;
  virtual double score(const std::string& candidate, std::span<const Utterance> history) const = 0;
  virtual std::vector<double> score_all(std::span<const std::string> candidates,
                                        std::span<const Utterance> history) const;
};

inline constexpr std::size_t kCohesionContext = 3;

// Mean cosine similarity between the candidate's max-pooled encoding and the
// encodings of the last three history utterances. Empty history scores 0.
class EncoderCohesionScorer : public CohesionScorer {
 public:
  EncoderCohesionScorer(ModelParams params, Vocab vocab);

  double score(const std::string& candidate, std::span<const Utterance> history) const override;
  std::vector<double> score_all(std::span<const std::string> candidates,
                                std::span<const Utterance> history) const override;

  std::vector<double> embed(const std::string& text) const;
  const Vocab& vocab() const { return vocab_; }

 private:
  ModelParams params_;
  Vocab vocab_;
};

// Untrained encoder over a vocabulary fitted on the corpus text.
EncoderCohesionScorer make_default_scorer(std::span<const DialogueRecord> corpus,
                                          const EncoderConfig& config, std::uint64_t seed);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Argmax, lowest index on ties.
std::size_t select_baseline(std::span<const double> cohesion);
std::size_t select_baseline(std::span<const std::string> candidates,
                            std::span<const Utterance> history, const CohesionScorer& scorer);

struct VoteChoice {
  std::size_t chosen = 0;
  std::vector<int> votes;
  std::vector<double> cohesion;
  bool tie_break = false;
};

// Most votes wins; a tie at the maximum goes to the best cohesion score
// within the tied set (lowest index among equal scores).
VoteChoice choose_by_votes(std::span<const int> votes, std::span<const double> cohesion);

// The example a classifier sees when judging `candidate` as the next turn of
// `speaker`, rated by `listener`.
TrainingExample candidate_example(const PersonalityProfile& listener,
                                  const PersonalityProfile& speaker, const std::string& candidate,
                                  std::span<const Utterance> history,
                                  std::size_t history_len = kDefaultHistoryLen);

VoteChoice select_vote(std::span<const std::string> candidates, const PersonalityProfile& listener,
                       const PersonalityProfile& speaker, std::span<const Utterance> history,
                       std::span<const Classifier> ensemble, AblationCondition condition,
                       const CohesionScorer& scorer);

enum class MethodKind { Baseline, VotePD, VoteD };

std::string to_string(MethodKind m);  // "baseline", "vote-pd", "vote-d"
MethodKind parse_method(const std::string& s);

struct SelectionMethod {
  MethodKind kind = MethodKind::Baseline;
  std::shared_ptr<const std::vector<Classifier>> ensemble;  // null for Baseline

  AblationCondition condition() const;
  void validate() const;
};

SelectionMethod baseline_method();
SelectionMethod vote_method(MethodKind kind, std::vector<Classifier> ensemble);

struct SimConfig {
  PersonalityProfile profile_x;
  PersonalityProfile profile_y;
  std::shared_ptr<const Generator> generator_x;
  std::shared_ptr<const Generator> generator_y;
  std::uint64_t seed = 0;
  std::size_t candidates_per_turn = 20;
  std::size_t common_turns = 10;  // the seed utterance counts as the first
  std::size_t condition_turns = 10;
  std::string initial_utterance = "What is your hobby?";
  bool optimize_y_only = false;

  void validate() const;
};

struct TurnRecord {
  std::size_t index = 0;
  std::string speaker_id;
  std::string listener_id;
  std::string method;  // "seed", "baseline", "vote-pd", "vote-d"
  std::uint64_t generator_seed = 0;
  std::vector<std::string> candidates;
  std::vector<double> cohesion;
  std::vector<int> votes;  // empty for baseline turns
  std::size_t chosen = 0;
  bool tie_break = false;
  std::vector<std::string> warnings;

  bool operator==(const TurnRecord&) const = default;
};

struct SimulatedDialogue {
  std::string method;
  std::string speaker_x;
  std::string speaker_y;
  std::vector<Utterance> utterances;
  std::vector<TurnRecord> turns;

  bool operator==(const SimulatedDialogue&) const = default;
};

// The seed utterance is Y's; X answers first. The first common_turns
// utterances are chosen by the baseline and shared by every branch, then each
// method continues its own copy for condition_turns utterances.
std::vector<SimulatedDialogue> run_simulation(const SimConfig& config,
                                              std::span<const SelectionMethod> methods,
                                              const CohesionScorer& scorer);

void to_json(nlohmann::json& j, const TurnRecord& t);
void from_json(const nlohmann::json& j, TurnRecord& t);
void to_json(nlohmann::json& j, const SimulatedDialogue& d);
void from_json(const nlohmann::json& j, SimulatedDialogue& d);

// Table-style transcript: the shared prefix once, then each branch's tail.
std::string render_transcript(std::span<const SimulatedDialogue> dialogues,
                              std::size_t common_turns);

}  // namespace lovesim
