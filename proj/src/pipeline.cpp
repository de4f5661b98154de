#include "lovesim/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <set>

#include "lovesim/error.hpp"
#include "lovesim/rng.hpp"

namespace lovesim {

namespace fs = std::filesystem;

void save_ensemble(const fs::path& dir, const CvResult& result) {
  const fs::path sub = dir / to_string(result.condition);
  fs::create_directories(sub);
  for (std::size_t i = 0; i < result.ensemble.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "fold_%02zu.model", result.folds[i].fold);
    save_classifier(sub / name, result.ensemble[i]);
  }
}

std::vector<Classifier> load_ensemble(const fs::path& dir, AblationCondition condition) {
  const fs::path sub = dir / to_string(condition);
  if (!fs::is_directory(sub)) {
    throw ValidationError("no " + to_string(condition) + " models under " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(sub)) {
    if (entry.path().extension() == ".model") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ValidationError("no model files in " + sub.string());
  std::vector<Classifier> out;
  for (const auto& f : files) {
    out.push_back(load_classifier(f));
    if (out.back().condition != condition) {
      throw ValidationError(f.string() + " was trained under '" +
                            to_string(out.back().condition) + "'");
    }
  }
  return out;
}

const DialogueRecord& find_pair(std::span<const DialogueRecord> corpus, const std::string& key) {
  for (const auto& d : corpus) {
    if (d.pair_id == key) return d;
  }
  std::size_t index = 0;
  const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), index);
  if (ec == std::errc() && ptr == key.data() + key.size() && index < corpus.size()) {
    return corpus[index];
  }
  throw ValidationError("no pair '" + key + "' in the corpus (" + std::to_string(corpus.size()) +
                        " pairs)");
}

SimConfig sim_config_for(const DialogueRecord& pair, std::uint64_t seed) {
  SimConfig cfg;
  cfg.profile_x = pair.profile_x;
  cfg.profile_y = pair.profile_y;
  auto gen = std::make_shared<const TemplateGenerator>();
  cfg.generator_x = gen;
  cfg.generator_y = gen;
  cfg.seed = seed;
  return cfg;
}

std::vector<SelectionMethod> make_methods(std::span<const MethodKind> kinds, const Ensembles& e) {
  std::vector<SelectionMethod> out;
  for (auto k : kinds) {
    switch (k) {
      case MethodKind::Baseline: out.push_back(baseline_method()); break;
      case MethodKind::VotePD: out.push_back(vote_method(k, e.pd)); break;
      case MethodKind::VoteD: out.push_back(vote_method(k, e.d)); break;
    }
  }
  return out;
}

void oracle_choices(std::vector<ABItem>& items,
                    std::span<const std::vector<SimulatedDialogue>> simulations,
                    std::span<const DialogueRecord> pairs, std::size_t common_turns,
                    const SynthConfig& synth) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < pairs.size(); ++i) index[pairs[i].pair_id] = i;
  for (auto& item : items) {
    auto it = index.find(item.participant_id);
    if (it == index.end()) throw ValidationError("unknown participant " + item.participant_id);
    const auto& sims = simulations[it->second];
    auto count = [&](const std::string& method) {
      for (const auto& d : sims) {
        if (d.method == method) {
          return ground_truth_increases(d, pairs[it->second].profile_x, common_turns, synth);
        }
      }
      throw ValidationError("participant " + item.participant_id + " has no " + method +
                            " dialogue");
    };
    item.choice = scripted_choice(count(item.first.method), count(item.second.method));
  }
}

std::vector<std::string> report_method_order(std::span<const ABItem> items) {
  std::set<std::string> seen;
  for (const auto& it : items) {
    seen.insert(it.first.method);
    seen.insert(it.second.method);
  }
  std::vector<std::string> out;
  for (const char* m : {"vote-pd", "vote-d", "baseline"}) {
    if (seen.erase(m)) out.emplace_back(m);
  }
  out.insert(out.end(), seen.begin(), seen.end());
  return out;
}

ABRun run_scripted_ab(std::span<const DialogueRecord> corpus, std::size_t participants,
                      const Ensembles& ensembles, const CohesionScorer& scorer,
                      const SynthConfig& synth, std::uint64_t seed, bool optimize_y_only) {
  if (participants == 0 || participants > corpus.size()) {
    throw ValidationError("abtest: need between 1 and " + std::to_string(corpus.size()) +
                          " participants");
  }
  const std::vector<MethodKind> kinds = {MethodKind::Baseline, MethodKind::VotePD,
                                         MethodKind::VoteD};
  const auto methods = make_methods(kinds, ensembles);
  ABRun run;
  std::vector<ParticipantDialogues> parts;
  std::size_t common_turns = 0;
  for (std::size_t p = 0; p < participants; ++p) {
    const auto& pair = corpus[p];
    auto cfg = sim_config_for(pair, derive_seed(seed, {p}));
    cfg.optimize_y_only = optimize_y_only;
    common_turns = cfg.common_turns;
    run.simulations.push_back(run_simulation(cfg, methods, scorer));
    ParticipantDialogues pd;
    pd.participant_id = pair.pair_id;
    for (const auto& d : run.simulations.back()) {
      pd.dialogues.push_back({d.method, pair.pair_id + "/" + d.method});
    }
    parts.push_back(std::move(pd));
  }
  run.items = build_ab_items(parts, derive_seed(seed, {participants, 1}));
  oracle_choices(run.items, run.simulations, corpus.first(participants), common_turns, synth);
  const auto order = report_method_order(run.items);
  run.matrix = tally(run.items, order);
  return run;
}

}  // namespace lovesim
