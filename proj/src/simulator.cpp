#include "lovesim/simulator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "lovesim/corpus_io.hpp"
#include "lovesim/error.hpp"
#include "lovesim/rng.hpp"
#include "lovesim/serialize.hpp"
#include "lovesim/synth.hpp"

namespace lovesim {

namespace {

bool is_word(const std::string& tok) {
  return std::any_of(tok.begin(), tok.end(), [](unsigned char c) {
    return std::isalnum(c) || c >= 0x80;
  });
}

std::vector<std::string> persona_keywords(const PersonalityProfile& persona) {
  std::vector<std::string> out;
  for (const char* name : {"Department", "Occupation", "Residence", "Hometown"}) {
    for (const auto& item : persona.profile_items) {
      if (item.name != name) continue;
      for (auto& tok : tokenize(item.value)) {
        if (is_word(tok)) out.push_back(tok);
      }
    }
  }
  return out;
}

std::string draw_candidate(Style style, const std::vector<std::string>& pool,
                           const std::optional<std::string>& topic, Rng& rng) {
  const auto& phrases = style_phrases(style);
  const auto phrase = phrases[std::uniform_int_distribution<std::size_t>(0, phrases.size() - 1)(rng)];
  std::string chosen;
  if (topic && std::bernoulli_distribution(0.5)(rng)) {
    chosen = *topic;
  } else {
    chosen = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
  }
  return compose_utterance(style, phrase, chosen);
}

}  // namespace

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::optional<std::string> history_topic(std::span<const Utterance> history) {
  if (history.empty()) return std::nullopt;
  const auto toks = tokenize(history.back().text);
  for (auto it = toks.rbegin(); it != toks.rend(); ++it) {
    if (is_word(*it)) return *it;
  }
  return std::nullopt;
}

std::vector<std::string> TemplateGenerator::generate(const PersonalityProfile& persona,
                                                     std::span<const Utterance> history,
                                                     std::size_t n, std::uint64_t seed) const {
  if (n == 0) throw ValidationError("generator: n must be at least 1");
  std::vector<std::string> pool;
  for (auto w : topic_words()) pool.emplace_back(w);
  for (auto& w : persona_keywords(persona)) pool.push_back(std::move(w));
  const auto topic = history_topic(history);

  std::vector<std::string> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < n; ++i) {
    const Style style = kAllStyles[i % kAllStyles.size()];
    std::string text;
    for (std::size_t attempt = 0; attempt <= kMaxGeneratorRetries; ++attempt) {
      Rng rng(derive_seed(seed, {i, attempt}));
      text = draw_candidate(style, pool, topic, rng);
      if (!seen.count(normalize_whitespace(text))) break;
    }
    seen.insert(normalize_whitespace(text));
    out.push_back(std::move(text));
  }
  return out;
}

std::vector<double> CohesionScorer::score_all(std::span<const std::string> candidates,
                                              std::span<const Utterance> history) const {
  std::vector<double> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) out.push_back(score(c, history));
  return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine: length mismatch");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

EncoderCohesionScorer::EncoderCohesionScorer(ModelParams params, Vocab vocab)
    : params_(std::move(params)), vocab_(std::move(vocab)) {
  if (params_.config.vocab_size != vocab_.size()) {
    throw ValidationError("cohesion scorer: model vocabulary size " +
                          std::to_string(params_.config.vocab_size) + " != " +
                          std::to_string(vocab_.size()));
  }
}

std::vector<double> EncoderCohesionScorer::embed(const std::string& text) const {
  const auto tokens = encode_plain(text, vocab_, params_.config.max_len);
  return forward(params_, tokens).pooled;
}

double EncoderCohesionScorer::score(const std::string& candidate,
                                    std::span<const Utterance> history) const {
  return score_all(std::span<const std::string>(&candidate, 1), history).front();
}

std::vector<double> EncoderCohesionScorer::score_all(std::span<const std::string> candidates,
                                                     std::span<const Utterance> history) const {
  std::vector<double> out(candidates.size(), 0.0);
  if (history.empty()) return out;
  const std::size_t k = std::min(kCohesionContext, history.size());
  std::vector<std::vector<double>> context;
  for (std::size_t i = history.size() - k; i < history.size(); ++i) {
    context.push_back(embed(history[i].text));
  }
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto v = embed(candidates[c]);
    double sum = 0.0;
    for (const auto& h : context) sum += cosine_similarity(v, h);
    out[c] = sum / static_cast<double>(k);
  }
  return out;
}

EncoderCohesionScorer make_default_scorer(std::span<const DialogueRecord> corpus,
                                          const EncoderConfig& config, std::uint64_t seed) {
  std::vector<std::string> texts;
  for (const auto& d : corpus) {
    for (const auto& u : d.utterances) texts.push_back(u.text);
  }
  texts.emplace_back("What is your hobby?");
  Vocab vocab = fit_vocab(texts, 4000);
  EncoderConfig cfg = config;
  cfg.vocab_size = vocab.size();
  cfg.seed = seed;
  return EncoderCohesionScorer(init_params(cfg), std::move(vocab));
}

std::size_t select_baseline(std::span<const double> cohesion) {
  if (cohesion.empty()) throw ValidationError("select_baseline: no candidates");
  std::size_t best = 0;
  for (std::size_t i = 1; i < cohesion.size(); ++i) {
    if (cohesion[i] > cohesion[best]) best = i;
  }
  return best;
}

std::size_t select_baseline(std::span<const std::string> candidates,
                            std::span<const Utterance> history, const CohesionScorer& scorer) {
  if (candidates.empty()) throw ValidationError("select_baseline: no candidates");
  const auto scores = scorer.score_all(candidates, history);
  return select_baseline(scores);
}

VoteChoice choose_by_votes(std::span<const int> votes, std::span<const double> cohesion) {
  if (votes.empty()) throw ValidationError("select_vote: no candidates");
  if (votes.size() != cohesion.size()) {
    throw ValidationError("select_vote: votes and cohesion scores differ in length");
  }
  VoteChoice out;
  out.votes.assign(votes.begin(), votes.end());
  out.cohesion.assign(cohesion.begin(), cohesion.end());
  const int top = *std::max_element(votes.begin(), votes.end());
  std::vector<std::size_t> tied;
  for (std::size_t i = 0; i < votes.size(); ++i) {
    if (votes[i] == top) tied.push_back(i);
  }
  out.chosen = tied.front();
  out.tie_break = tied.size() > 1;
  for (std::size_t i : tied) {
    if (cohesion[i] > cohesion[out.chosen]) out.chosen = i;
  }
  return out;
}

TrainingExample candidate_example(const PersonalityProfile& listener,
                                  const PersonalityProfile& speaker, const std::string& candidate,
                                  std::span<const Utterance> history, std::size_t history_len) {
  TrainingExample ex;
  ex.pair_id = "simulation";
  ex.utterance_index = history.size();
  ex.partner_profile = listener;
  ex.speaker_profile = speaker;
  ex.target_text = candidate;
  const std::size_t first = history.size() > history_len ? history.size() - history_len : 0;
  for (std::size_t i = first; i < history.size(); ++i) {
    ex.history.push_back(
        {history[i].speaker_id == speaker.speaker_id ? kSpeakerTag : kPartnerTag,
         history[i].text});
  }
  return ex;
}

VoteChoice select_vote(std::span<const std::string> candidates, const PersonalityProfile& listener,
                       const PersonalityProfile& speaker, std::span<const Utterance> history,
                       std::span<const Classifier> ensemble, AblationCondition condition,
                       const CohesionScorer& scorer) {
  if (candidates.empty()) throw ValidationError("select_vote: no candidates");
  if (ensemble.empty()) throw ValidationError("select_vote: empty ensemble");
  std::vector<int> votes(candidates.size(), 0);
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto ex = candidate_example(listener, speaker, candidates[c], history);
    for (const auto& model : ensemble) {
      if (predict(model.params, ex, condition, model.vocab, model.params.config.threshold).label) {
        ++votes[c];
      }
    }
  }
  const auto cohesion = scorer.score_all(candidates, history);
  return choose_by_votes(votes, cohesion);
}

std::string to_string(MethodKind m) {
  switch (m) {
    case MethodKind::Baseline: return "baseline";
    case MethodKind::VotePD: return "vote-pd";
    case MethodKind::VoteD: return "vote-d";
  }
  return "?";
}

MethodKind parse_method(const std::string& s) {
  if (s == "baseline") return MethodKind::Baseline;
  if (s == "vote-pd") return MethodKind::VotePD;
  if (s == "vote-d") return MethodKind::VoteD;
  throw ValidationError("unknown selection method '" + s + "' (expected baseline, vote-pd, vote-d)");
}

AblationCondition SelectionMethod::condition() const {
  return kind == MethodKind::VoteD ? AblationCondition::D_only : AblationCondition::PD;
}

void SelectionMethod::validate() const {
  if (kind == MethodKind::Baseline) return;
  if (!ensemble || ensemble->empty()) {
    throw ValidationError(to_string(kind) + ": empty ensemble");
  }
  for (const auto& m : *ensemble) {
    if (m.condition != condition()) {
      throw ValidationError(to_string(kind) + ": ensemble model trained under '" +
                            to_string(m.condition) + "', expected '" + to_string(condition()) +
                            "'");
    }
  }
}

SelectionMethod baseline_method() { return {}; }

SelectionMethod vote_method(MethodKind kind, std::vector<Classifier> ensemble) {
  SelectionMethod m;
  m.kind = kind;
  m.ensemble = std::make_shared<const std::vector<Classifier>>(std::move(ensemble));
  m.validate();
  return m;
}

void SimConfig::validate() const {
  profile_x.validate();
  profile_y.validate();
  if (profile_x.speaker_id == profile_y.speaker_id) {
    throw ValidationError("simulation: X and Y share speaker id " + profile_x.speaker_id);
  }
  if (!generator_x || !generator_y) throw ValidationError("simulation: missing generator");
  if (candidates_per_turn < 1) throw ValidationError("simulation: candidates_per_turn must be >= 1");
  if (common_turns < 1 || condition_turns < 1) {
    throw ValidationError("simulation: turn counts must be >= 1");
  }
  if (normalize_whitespace(initial_utterance).empty()) {
    throw ValidationError("simulation: empty initial utterance");
  }
}

namespace {

// Generates and selects utterance `index` (index >= 1) under `method`.
TurnRecord play_turn(const SimConfig& cfg, const SelectionMethod& method,
                     std::vector<Utterance>& utterances, const CohesionScorer& scorer) {
  const std::size_t index = utterances.size();
  const bool x_turn = index % 2 == 1;
  const auto& speaker = x_turn ? cfg.profile_x : cfg.profile_y;
  const auto& listener = x_turn ? cfg.profile_y : cfg.profile_x;
  const auto& gen = x_turn ? *cfg.generator_x : *cfg.generator_y;

  TurnRecord rec;
  rec.index = index;
  rec.speaker_id = speaker.speaker_id;
  rec.listener_id = listener.speaker_id;
  rec.generator_seed = derive_seed(cfg.seed, {index});
  try {
    rec.candidates = gen.generate(speaker, utterances, cfg.candidates_per_turn, rec.generator_seed);
  } catch (const std::exception& e) {
    throw std::runtime_error("simulation: generator failed at turn " + std::to_string(index) +
                             ": " + e.what());
  }
  if (rec.candidates.size() != cfg.candidates_per_turn) {
    throw std::runtime_error("simulation: generator returned " +
                             std::to_string(rec.candidates.size()) + " candidates at turn " +
                             std::to_string(index));
  }
  std::set<std::string> seen;
  for (const auto& c : rec.candidates) {
    if (normalize_whitespace(c).empty()) {
      throw std::runtime_error("simulation: generator returned an empty candidate at turn " +
                               std::to_string(index));
    }
    if (!seen.insert(normalize_whitespace(c)).second) {
      rec.warnings.push_back("duplicate candidate: " + c);
    }
  }

  const bool vote = method.kind != MethodKind::Baseline && !(cfg.optimize_y_only && x_turn);
  if (vote) {
    rec.method = to_string(method.kind);
    auto choice = select_vote(rec.candidates, listener, speaker, utterances, *method.ensemble,
                              method.condition(), scorer);
    rec.votes = std::move(choice.votes);
    rec.cohesion = std::move(choice.cohesion);
    rec.chosen = choice.chosen;
    rec.tie_break = choice.tie_break;
  } else {
    rec.method = to_string(MethodKind::Baseline);
    rec.cohesion = scorer.score_all(rec.candidates, utterances);
    rec.chosen = select_baseline(rec.cohesion);
  }
  Utterance u;
  u.speaker_id = speaker.speaker_id;
  u.text = rec.candidates[rec.chosen];
  u.t_start = static_cast<double>(index);
  u.t_end = static_cast<double>(index + 1);
  utterances.push_back(std::move(u));
  return rec;
}

}  // namespace

std::vector<SimulatedDialogue> run_simulation(const SimConfig& config,
                                              std::span<const SelectionMethod> methods,
                                              const CohesionScorer& scorer) {
  config.validate();
  if (methods.empty()) throw ValidationError("simulation: no selection methods");
  for (const auto& m : methods) m.validate();

  std::vector<Utterance> prefix;
  std::vector<TurnRecord> prefix_turns;
  {
    Utterance seed;
    seed.speaker_id = config.profile_y.speaker_id;
    seed.text = config.initial_utterance;
    seed.t_end = 1.0;
    prefix.push_back(seed);
    TurnRecord rec;
    rec.speaker_id = config.profile_y.speaker_id;
    rec.listener_id = config.profile_x.speaker_id;
    rec.method = "seed";
    rec.candidates = {config.initial_utterance};
    prefix_turns.push_back(std::move(rec));
  }
  const SelectionMethod base = baseline_method();
  while (prefix.size() < config.common_turns) {
    prefix_turns.push_back(play_turn(config, base, prefix, scorer));
  }

  std::vector<SimulatedDialogue> out;
  const std::size_t total = config.common_turns + config.condition_turns;
  for (const auto& m : methods) {
    SimulatedDialogue d;
    d.method = to_string(m.kind);
    d.speaker_x = config.profile_x.speaker_id;
    d.speaker_y = config.profile_y.speaker_id;
    d.utterances = prefix;
    d.turns = prefix_turns;
    while (d.utterances.size() < total) {
      d.turns.push_back(play_turn(config, m, d.utterances, scorer));
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::string render_transcript(std::span<const SimulatedDialogue> dialogues,
                              std::size_t common_turns) {
  if (dialogues.empty()) return {};
  const auto& first = dialogues.front();
  auto role = [&](const Utterance& u) { return u.speaker_id == first.speaker_x ? "X" : "Y"; };
  std::ostringstream os;
  os << "| | Simulated dialogues |\n|---|---|\n";
  const std::size_t shared = std::min(common_turns, first.utterances.size());
  for (std::size_t i = 0; i < shared; ++i) {
    os << "| " << (i == 0 ? "The first " + std::to_string(shared) + " utterances" : "") << " | "
       << role(first.utterances[i]) << ": " << first.utterances[i].text << " |\n";
  }
  for (const auto& d : dialogues) {
    const std::size_t tail = d.utterances.size() - std::min(common_turns, d.utterances.size());
    for (std::size_t i = common_turns; i < d.utterances.size(); ++i) {
      os << "| "
         << (i == common_turns ? "The last " + std::to_string(tail) + " utterances (" + d.method +
                                     ")"
                               : "")
         << " | " << role(d.utterances[i]) << ": " << d.utterances[i].text << " |\n";
    }
  }
  return os.str();
}

void to_json(nlohmann::json& j, const TurnRecord& t) {
  j = nlohmann::json{{"index", t.index},
                     {"speaker_id", t.speaker_id},
                     {"listener_id", t.listener_id},
                     {"method", t.method},
                     {"generator_seed", t.generator_seed},
                     {"candidates", t.candidates},
                     {"cohesion", t.cohesion},
                     {"votes", t.votes},
                     {"chosen", t.chosen},
                     {"tie_break", t.tie_break},
                     {"warnings", t.warnings}};
}

void from_json(const nlohmann::json& j, TurnRecord& t) {
  j.at("index").get_to(t.index);
  j.at("speaker_id").get_to(t.speaker_id);
  j.at("listener_id").get_to(t.listener_id);
  j.at("method").get_to(t.method);
  j.at("generator_seed").get_to(t.generator_seed);
  j.at("candidates").get_to(t.candidates);
  j.at("cohesion").get_to(t.cohesion);
  j.at("votes").get_to(t.votes);
  j.at("chosen").get_to(t.chosen);
  j.at("tie_break").get_to(t.tie_break);
  t.warnings = j.value("warnings", std::vector<std::string>{});
  if (t.chosen >= t.candidates.size()) {
    throw ValidationError("turn " + std::to_string(t.index) + ": chosen index out of range");
  }
}

void to_json(nlohmann::json& j, const SimulatedDialogue& d) {
  j = nlohmann::json{{"method", d.method},
                     {"speaker_x", d.speaker_x},
                     {"speaker_y", d.speaker_y},
                     {"utterances", d.utterances},
                     {"turns", d.turns}};
}

void from_json(const nlohmann::json& j, SimulatedDialogue& d) {
  j.at("method").get_to(d.method);
  j.at("speaker_x").get_to(d.speaker_x);
  j.at("speaker_y").get_to(d.speaker_y);
  j.at("utterances").get_to(d.utterances);
  j.at("turns").get_to(d.turns);
  if (d.turns.size() != d.utterances.size()) {
    throw ValidationError("dialogue " + d.method + ": " + std::to_string(d.turns.size()) +
                          " turn records for " + std::to_string(d.utterances.size()) +
                          " utterances");
  }
}

}  // namespace lovesim
