#include "lovesim/abtest.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "lovesim/corpus_io.hpp"
#include "lovesim/error.hpp"
#include "lovesim/rng.hpp"
#include "lovesim/stats.hpp"

namespace lovesim {

std::string to_string(Choice c) {
  switch (c) {
    case Choice::First: return "first";
    case Choice::Second: return "second";
    case Choice::Absent: return "absent";
  }
  return "?";
}

Choice parse_choice(const std::string& s) {
  if (s == "first") return Choice::First;
  if (s == "second") return Choice::Second;
  if (s == "absent" || s.empty()) return Choice::Absent;
  throw ValidationError("unknown choice '" + s + "' (expected first, second or absent)");
}

const std::string& ABItem::winner() const {
  if (choice == Choice::Absent) throw ValidationError("item " + item_id + " has no choice");
  return choice == Choice::First ? first.method : second.method;
}

const std::string& ABItem::loser() const {
  if (choice == Choice::Absent) throw ValidationError("item " + item_id + " has no choice");
  return choice == Choice::First ? second.method : first.method;
}

std::vector<ABItem> build_ab_items(std::span<const ParticipantDialogues> participants,
                                   std::uint64_t seed) {
  std::vector<ABItem> out;
  std::set<std::string> ids;
  for (std::size_t p = 0; p < participants.size(); ++p) {
    const auto& part = participants[p];
    if (!ids.insert(part.participant_id).second) {
      throw ValidationError("duplicate participant " + part.participant_id);
    }
    std::set<std::string> methods;
    for (const auto& d : part.dialogues) {
      if (!methods.insert(d.method).second) {
        throw ValidationError("participant " + part.participant_id + " has two " + d.method +
                              " dialogues");
      }
    }
    if (part.dialogues.size() < 2) {
      throw ValidationError("participant " + part.participant_id + " needs at least two dialogues");
    }
    Rng rng(derive_seed(seed, {p}));
    std::vector<ABItem> items;
    for (std::size_t i = 0; i < part.dialogues.size(); ++i) {
      for (std::size_t j = i + 1; j < part.dialogues.size(); ++j) {
        ABItem item;
        item.participant_id = part.participant_id;
        item.first = part.dialogues[i];
        item.second = part.dialogues[j];
        if (std::bernoulli_distribution(0.5)(rng)) std::swap(item.first, item.second);
        items.push_back(std::move(item));
      }
    }
    std::shuffle(items.begin(), items.end(), rng);
    for (std::size_t k = 0; k < items.size(); ++k) {
      items[k].item_id = part.participant_id + "-" + std::to_string(k + 1);
      out.push_back(std::move(items[k]));
    }
  }
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<ChoiceRecord> parse_choices_csv(const std::string& text) {
  std::vector<ChoiceRecord> out;
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (header) {
      header = false;
      if (fields == std::vector<std::string>{"participant_id", "item_id", "choice"}) continue;
      throw ValidationError("choices.csv line 1: expected header participant_id,item_id,choice");
    }
    if (fields.size() != 3) {
      throw ValidationError("choices.csv line " + std::to_string(line_no) + ": expected 3 fields");
    }
    try {
      out.push_back({fields[0], fields[1], parse_choice(fields[2])});
    } catch (const ValidationError& e) {
      throw ValidationError("choices.csv line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string format_choices_csv(std::span<const ChoiceRecord> choices) {
  std::string out = "participant_id,item_id,choice\n";
  for (const auto& c : choices) {
    out += c.participant_id + "," + c.item_id + "," + to_string(c.choice) + "\n";
  }
  return out;
}

std::vector<ChoiceRecord> read_choices_csv(const std::filesystem::path& path) {
  return parse_choices_csv(read_text_file(path));
}

void write_choices_csv(const std::filesystem::path& path, std::span<const ChoiceRecord> choices) {
  write_text_file(path, format_choices_csv(choices));
}

void apply_choices(std::vector<ABItem>& items, std::span<const ChoiceRecord> choices) {
  std::map<std::string, ABItem*> by_id;
  for (auto& item : items) by_id[item.item_id] = &item;
  for (const auto& c : choices) {
    auto it = by_id.find(c.item_id);
    if (it == by_id.end()) throw ValidationError("choice for unknown item " + c.item_id);
    if (it->second->participant_id != c.participant_id) {
      throw ValidationError("item " + c.item_id + " belongs to participant " +
                            it->second->participant_id + ", not " + c.participant_id);
    }
    it->second->choice = c.choice;
  }
}

std::optional<double> WinMatrix::rate(std::size_t i, std::size_t j) const {
  if (i == j || n[i][j] == 0) return std::nullopt;
  return static_cast<double>(wins[i][j]) / static_cast<double>(n[i][j]);
}

double WinMatrix::p_value(std::size_t i, std::size_t j) const {
  return binomial_significance(wins[i][j], n[i][j]);
}

std::size_t WinMatrix::index_of(const std::string& method) const {
  auto it = std::find(methods.begin(), methods.end(), method);
  if (it == methods.end()) throw ValidationError("method " + method + " not in the matrix");
  return static_cast<std::size_t>(it - methods.begin());
}

WinMatrix tally(std::span<const ABItem> items, std::span<const std::string> methods) {
  WinMatrix m;
  m.methods.assign(methods.begin(), methods.end());
  const std::size_t k = methods.size();
  m.wins.assign(k, std::vector<std::size_t>(k, 0));
  m.n.assign(k, std::vector<std::size_t>(k, 0));
  for (const auto& item : items) {
    if (item.choice == Choice::Absent) {
      throw ValidationError("item " + item.item_id + " has no recorded choice");
    }
    if (item.first.method == item.second.method) {
      throw ValidationError("item " + item.item_id + " compares " + item.first.method +
                            " with itself");
    }
    const std::size_t w = m.index_of(item.winner());
    const std::size_t l = m.index_of(item.loser());
    ++m.wins[w][l];
    ++m.n[w][l];
    ++m.n[l][w];
  }
  return m;
}

std::string method_label(const std::string& method) {
  if (method == "vote-pd") return "P+D";
  if (method == "vote-d") return "D";
  if (method == "baseline") return "Baseline";
  return method;
}

std::string render_ab_report(const WinMatrix& m) {
  std::ostringstream os;
  os << "| |";
  for (const auto& c : m.methods) os << " " << method_label(c) << " |";
  os << "\n|---|";
  for (std::size_t j = 0; j < m.methods.size(); ++j) os << "---|";
  os << "\n";
  for (std::size_t i = 0; i < m.methods.size(); ++i) {
    os << "| " << method_label(m.methods[i]) << " |";
    for (std::size_t j = 0; j < m.methods.size(); ++j) {
      const auto r = m.rate(i, j);
      if (!r) {
        os << " -- |";
        continue;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.0f%%", *r * 100.0);
      os << " " << buf << (m.p_value(i, j) < kSignificanceLevel ? "*" : "") << " |";
    }
    os << "\n";
  }
  os << "\nEach value is the winning rate of the row method over the column method. "
        "* marks p < 0.05 (two-sided exact binomial test).\n";
  return os.str();
}

std::size_t ground_truth_increases(const SimulatedDialogue& d, const PersonalityProfile& profile_x,
                                   std::size_t common_turns, const SynthConfig& synth) {
  std::size_t count = 0;
  for (std::size_t i = common_turns; i < d.utterances.size(); ++i) {
    if (d.utterances[i].speaker_id != d.speaker_y) continue;
    if (ground_truth_increase(std::string_view(d.utterances[i].text), profile_x, synth)) ++count;
  }
  return count;
}

Choice scripted_choice(std::size_t first_increases, std::size_t second_increases) {
  return second_increases > first_increases ? Choice::Second : Choice::First;
}

void to_json(nlohmann::json& j, const ABItem& item) {
  j = nlohmann::json{{"item_id", item.item_id},
                     {"participant_id", item.participant_id},
                     {"first", {{"method", item.first.method}, {"ref", item.first.ref}}},
                     {"second", {{"method", item.second.method}, {"ref", item.second.ref}}},
                     {"choice", to_string(item.choice)}};
}

void from_json(const nlohmann::json& j, ABItem& item) {
  j.at("item_id").get_to(item.item_id);
  j.at("participant_id").get_to(item.participant_id);
  j.at("first").at("method").get_to(item.first.method);
  j.at("first").at("ref").get_to(item.first.ref);
  j.at("second").at("method").get_to(item.second.method);
  j.at("second").at("ref").get_to(item.second.ref);
  item.choice = parse_choice(j.value("choice", std::string("absent")));
  if (item.first.method == item.second.method) {
    throw ValidationError("item " + item.item_id + " compares " + item.first.method +
                          " with itself");
  }
}

std::vector<ABItem> read_ab_items_json(const std::filesystem::path& path) {
  const auto j = nlohmann::json::parse(read_text_file(path));
  return j.at("items").get<std::vector<ABItem>>();
}

void write_ab_items_json(const std::filesystem::path& path, std::span<const ABItem> items,
                         std::uint64_t seed) {
  nlohmann::json j;
  j["seed"] = seed;
  j["items"] = std::vector<ABItem>(items.begin(), items.end());
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace lovesim
