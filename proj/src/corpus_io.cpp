#include "lovesim/corpus_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "lovesim/error.hpp"

namespace lovesim {

using nlohmann::json;

void to_json(json& j, const PersonalityProfile& p) {
  json items = json::array();
  for (const auto& it : p.profile_items) items.push_back({{"name", it.name}, {"value", it.value}});
  json scales = json::array();
  for (const auto& s : p.scales) scales.push_back({{"name", s.name}, {"scores", s.scores}});
  j = {{"speaker_id", p.speaker_id}, {"profile_items", items}, {"scales", scales}};
}

void from_json(const json& j, PersonalityProfile& p) {
  p.speaker_id = j.at("speaker_id").get<std::string>();
  p.profile_items.clear();
  for (const auto& it : j.at("profile_items")) {
    p.profile_items.push_back({it.at("name").get<std::string>(), it.at("value").get<std::string>()});
  }
  p.scales.clear();
  for (const auto& s : j.at("scales")) {
    p.scales.push_back({s.at("name").get<std::string>(), s.at("scores").get<std::vector<double>>()});
  }
}

void to_json(json& j, const Utterance& u) {
  j = {{"speaker_id", u.speaker_id}, {"text", u.text}, {"t_start", u.t_start}, {"t_end", u.t_end}};
}

void from_json(const json& j, Utterance& u) {
  u.speaker_id = j.at("speaker_id").get<std::string>();
  u.text = j.at("text").get<std::string>();
  u.t_start = j.at("t_start").get<double>();
  u.t_end = j.at("t_end").get<double>();
}

void to_json(json& j, const LoveScaleEvent& e) {
  j = {{"t", e.t}, {"items", e.items}, {"mean", e.mean}};
}

void from_json(const json& j, LoveScaleEvent& e) {
  const auto items = j.at("items").get<std::vector<int>>();
  e = make_love_event(j.at("t").get<double>(), items);
  if (j.contains("mean") && std::abs(j.at("mean").get<double>() - e.mean) > 1e-12) {
    throw ValidationError("love scale event at t=" + std::to_string(e.t) +
                          ": stored mean disagrees with items");
  }
}

void to_json(json& j, const DialogueRecord& d) {
  j = {{"pair_id", d.pair_id},       {"profile_X", d.profile_x}, {"profile_Y", d.profile_y},
       {"utterances", d.utterances}, {"events_X", d.events_x},   {"events_Y", d.events_y}};
}

void from_json(const json& j, DialogueRecord& d) {
  d.pair_id = j.at("pair_id").get<std::string>();
  d.profile_x = j.at("profile_X").get<PersonalityProfile>();
  d.profile_y = j.at("profile_Y").get<PersonalityProfile>();
  d.utterances = j.at("utterances").get<std::vector<Utterance>>();
  d.events_x = j.at("events_X").get<std::vector<LoveScaleEvent>>();
  d.events_y = j.at("events_Y").get<std::vector<LoveScaleEvent>>();
}

void to_json(json& j, const TrainingExample& e) {
  json hist = json::array();
  for (const auto& h : e.history) hist.push_back({{"speaker_tag", h.speaker_tag}, {"text", h.text}});
  j = {{"pair_id", e.pair_id},
       {"utterance_index", e.utterance_index},
       {"partner_profile", e.partner_profile},
       {"speaker_profile", e.speaker_profile},
       {"target_text", e.target_text},
       {"history", hist},
       {"delta", to_string(e.delta)},
       {"label", e.label}};
}

void from_json(const json& j, TrainingExample& e) {
  e.pair_id = j.value("pair_id", "");
  e.utterance_index = j.value("utterance_index", std::size_t{0});
  e.partner_profile = j.at("partner_profile").get<PersonalityProfile>();
  e.speaker_profile = j.at("speaker_profile").get<PersonalityProfile>();
  e.target_text = j.at("target_text").get<std::string>();
  e.history.clear();
  for (const auto& h : j.at("history")) {
    e.history.push_back({h.at("speaker_tag").get<std::string>(), h.at("text").get<std::string>()});
  }
  e.label = j.at("label").get<bool>();
  e.delta = j.contains("delta") ? parse_delta(j.at("delta").get<std::string>())
                                : (e.label ? Delta::Increase : Delta::Unchanged);
  if (e.label != (e.delta == Delta::Increase)) {
    throw ValidationError("training example label disagrees with its delta");
  }
  if (e.history.size() > kDefaultHistoryLen) {
    throw ValidationError("training example history longer than 10 turns");
  }
}

void to_json(json& j, const Fold& f) {
  j = {{"train_pairs", f.train_pairs}, {"val_pairs", f.val_pairs}, {"test_pairs", f.test_pairs}};
}

void from_json(const json& j, Fold& f) {
  f.train_pairs = j.at("train_pairs").get<std::vector<std::string>>();
  f.val_pairs = j.at("val_pairs").get<std::vector<std::string>>();
  f.test_pairs = j.at("test_pairs").get<std::vector<std::string>>();
}

void to_json(json& j, const SynthConfig& c) {
  j = {{"pairs", c.pairs},
       {"empathy_per_speaker", c.empathy_per_speaker},
       {"humor_per_speaker", c.humor_per_speaker},
       {"filler_per_speaker", c.filler_per_speaker},
       {"empathy_scale", c.empathy_scale},
       {"humor_scale", c.humor_scale},
       {"preference_threshold", c.preference_threshold}};
}

void from_json(const json& j, SynthConfig& c) {
  const SynthConfig d;
  c.pairs = j.value("pairs", d.pairs);
  c.empathy_per_speaker = j.value("empathy_per_speaker", d.empathy_per_speaker);
  c.humor_per_speaker = j.value("humor_per_speaker", d.humor_per_speaker);
  c.filler_per_speaker = j.value("filler_per_speaker", d.filler_per_speaker);
  c.empathy_scale = j.value("empathy_scale", d.empathy_scale);
  c.humor_scale = j.value("humor_scale", d.humor_scale);
  c.preference_threshold = j.value("preference_threshold", d.preference_threshold);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

namespace {

template <typename T, typename Check>
std::vector<T> read_jsonl(const std::filesystem::path& path, Check check) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::vector<T> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      T rec = json::parse(line).get<T>();
      check(rec);
      out.push_back(std::move(rec));
    } catch (const json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

template <typename T>
void write_jsonl(const std::filesystem::path& path, const std::vector<T>& records) {
  std::string text;
  for (const auto& r : records) {
    text += json(r).dump();
    text += '\n';
  }
  write_text_file(path, text);
}

}  // namespace

std::vector<DialogueRecord> read_corpus_jsonl(const std::filesystem::path& path) {
  return read_jsonl<DialogueRecord>(path, [](const DialogueRecord& d) { d.validate(); });
}

void write_corpus_jsonl(const std::filesystem::path& path,
                        const std::vector<DialogueRecord>& corpus) {
  write_jsonl(path, corpus);
}

std::vector<TrainingExample> read_examples_jsonl(const std::filesystem::path& path) {
  return read_jsonl<TrainingExample>(path, [](const TrainingExample& e) {
    e.partner_profile.validate();
    e.speaker_profile.validate();
  });
}

void write_examples_jsonl(const std::filesystem::path& path,
                          const std::vector<TrainingExample>& examples) {
  write_jsonl(path, examples);
}

std::vector<Fold> read_folds_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_text_file(path)).get<std::vector<Fold>>();
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_folds_json(const std::filesystem::path& path, const std::vector<Fold>& folds) {
  write_text_file(path, json(folds).dump(2) + "\n");
}

}  // namespace lovesim
