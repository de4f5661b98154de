#include "lovesim/serialize.hpp"

#include <algorithm>

#include "lovesim/error.hpp"

namespace lovesim {

std::string to_string(AblationCondition c) {
  switch (c) {
    case AblationCondition::PD: return "pd";
    case AblationCondition::P_only: return "p";
    case AblationCondition::D_only: return "d";
    case AblationCondition::None_: return "none";
  }
  return "none";
}

AblationCondition parse_condition(std::string_view s) {
  if (s == "pd" || s == "PD" || s == "p+d") return AblationCondition::PD;
  if (s == "p" || s == "P" || s == "p_only") return AblationCondition::P_only;
  if (s == "d" || s == "D" || s == "d_only") return AblationCondition::D_only;
  if (s == "none" || s == "None") return AblationCondition::None_;
  throw ValidationError("unknown ablation condition '" + std::string(s) + "'");
}

std::string table_label(AblationCondition c) {
  switch (c) {
    case AblationCondition::D_only: return "(a) Only D: dialogue history";
    case AblationCondition::P_only: return "(b) Only P: personalities";
    case AblationCondition::PD: return "(c) P+D";
    case AblationCondition::None_: return "(d) None (baseline)";
  }
  return "";
}

std::string render_history(std::span<const HistoryTurn> history) {
  std::string out;
  for (const auto& h : history) {
    out += h.speaker_tag;
    out += ": ";
    out += h.text;
    out += '\n';
  }
  return out;
}

std::vector<std::string> vocab_texts(std::span<const TrainingExample> examples) {
  std::vector<std::string> texts;
  texts.reserve(examples.size() * 4);
  for (const auto& e : examples) {
    texts.push_back(render_personality(e.partner_profile));
    texts.push_back(render_personality(e.speaker_profile));
    texts.push_back(e.target_text);
    texts.push_back(render_history(e.history));
  }
  return texts;
}

std::vector<int> serialize_input(const TrainingExample& example, AblationCondition condition,
                                 const Vocab& vocab, std::size_t max_len) {
  std::vector<int> partner;
  std::vector<int> speaker;
  std::vector<int> history;
  if (uses_personality(condition)) {
    partner = vocab.encode(render_personality(example.partner_profile));
    speaker = vocab.encode(render_personality(example.speaker_profile));
  }
  if (uses_history(condition)) history = vocab.encode(render_history(example.history));
  const auto target = vocab.encode(example.target_text);

  constexpr std::size_t kSeparators = 5;
  auto total = [&] {
    return kSeparators + partner.size() + speaker.size() + target.size() + history.size();
  };
  if (total() > max_len) {
    const std::size_t excess = total() - max_len;
    const std::size_t drop = std::min(excess, history.size());
    history.erase(history.begin(), history.begin() + static_cast<std::ptrdiff_t>(drop));
  }
  while (total() > max_len && (!partner.empty() || !speaker.empty())) {
    // Ties trim the speaker segment so the rater's profile survives longest.
    if (speaker.size() >= partner.size()) {
      speaker.pop_back();
    } else {
      partner.pop_back();
    }
  }
  if (total() > max_len) {
    throw ValidationError("serialize_input: target utterance needs " + std::to_string(total()) +
                          " tokens, max_len is " + std::to_string(max_len));
  }

  std::vector<int> ids;
  ids.reserve(total());
  ids.push_back(kClsId);
  ids.insert(ids.end(), partner.begin(), partner.end());
  ids.push_back(kPSepId);
  ids.insert(ids.end(), speaker.begin(), speaker.end());
  ids.push_back(kSepId);
  ids.insert(ids.end(), target.begin(), target.end());
  ids.push_back(kDSepId);
  ids.insert(ids.end(), history.begin(), history.end());
  ids.push_back(kSepId);
  return ids;
}

std::vector<int> encode_plain(const std::string& text, const Vocab& vocab, std::size_t max_len) {
  if (max_len < 3) throw ValidationError("encode_plain: max_len must be at least 3");
  auto body = vocab.encode(text);
  if (body.size() + 2 > max_len) body.resize(max_len - 2);
  std::vector<int> ids;
  ids.reserve(body.size() + 2);
  ids.push_back(kClsId);
  ids.insert(ids.end(), body.begin(), body.end());
  ids.push_back(kSepId);
  return ids;
}

}  // namespace lovesim
