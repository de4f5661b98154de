#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lovesim/ablation.hpp"
#include "lovesim/abtest.hpp"
#include "lovesim/config.hpp"
#include "lovesim/corpus_io.hpp"
#include "lovesim/error.hpp"
#include "lovesim/manifest.hpp"
#include "lovesim/pipeline.hpp"
#include "lovesim/report.hpp"
#include "lovesim/rng.hpp"
#include "lovesim/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lovesim;

namespace {

struct Globals {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::size_t threads = 1;
  json config = json::object();

  json section(const std::string& name) const {
    if (!config.contains(name)) return json::object();
    const auto& s = config.at(name);
    if (!s.is_object()) throw ValidationError("config: section '" + name + "' must be an object");
    return s;
  }
  fs::path out(const std::string& name) const { return fs::path(out_dir) / name; }
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Run {
 public:
  Run(const Globals& g, std::string command) : g_(g), start_(std::chrono::steady_clock::now()) {
    manifest_.command = std::move(command);
    manifest_.config_path = g.config_path;
    manifest_.seeds["seed"] = g.seed;
  }
  RunManifest& manifest() { return manifest_; }
  void input(const fs::path& p) { manifest_.add_input(p); }
  void output(const fs::path& p, const std::string& text) {
    write_text_file(p, text);
    manifest_.add_output(p);
    std::cout << "wrote " << p.string() << "\n";
  }
  void finish() {
    manifest_.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const auto path = g_.out("manifest_" + manifest_.command + ".json");
    write_text_file(path, json(manifest_).dump(2) + "\n");
  }

 private:
  const Globals& g_;
  RunManifest manifest_;
  std::chrono::steady_clock::time_point start_;
};

CvSettings model_settings(const Globals& g, CLI::App* sub) {
  CvSettings s;
  apply_json(g.section("model"), s);
  if (sub->get_option("--threads")->count() || !g.section("model").contains("threads")) {
    s.threads = g.threads;
  }
  return s;
}

int cmd_synth(const Globals& g, const std::string& out_path) {
  Run run(g, "synth");
  SynthConfig cfg = g.section("synth").get<SynthConfig>();
  cfg.validate();
  const auto corpus = synth_corpus(cfg, g.seed);
  const fs::path out = out_path.empty() ? g.out("corpus.jsonl") : fs::path(out_path);
  write_corpus_jsonl(out, corpus);
  run.manifest().add_output(out);
  std::cout << "wrote " << out.string() << " (" << corpus.size() << " pairs)\n";
  run.finish();
  return 0;
}

int cmd_annotate(const Globals& g, const std::string& corpus_path) {
  Run run(g, "annotate");
  const auto sec = g.section("annotate");
  const std::size_t history_len = sec.value("history_len", kDefaultHistoryLen);
  const double initial = sec.value("initial_score", kDefaultInitialScore);
  const auto corpus = read_corpus_jsonl(corpus_path);
  run.input(corpus_path);
  const auto examples = build_examples(corpus, history_len, initial);
  const auto folds = make_folds(pair_ids_of(corpus), g.seed);
  write_examples_jsonl(g.out("examples.jsonl"), examples);
  run.manifest().add_output(g.out("examples.jsonl"));
  write_folds_json(g.out("folds.json"), folds);
  run.manifest().add_output(g.out("folds.json"));
  std::size_t pos = 0;
  for (const auto& e : examples) pos += e.label ? 1 : 0;
  std::cout << examples.size() << " examples (" << pos << " increase), " << folds.size()
            << " folds\n";
  run.finish();
  return 0;
}

int cmd_train(const Globals& g, CLI::App* sub, const std::string& corpus_path,
              const std::string& condition, std::size_t fold_index, const std::string& out_path) {
  Run run(g, "train");
  const auto settings = model_settings(g, sub);
  const auto cond = parse_condition(condition);
  const auto corpus = read_corpus_jsonl(corpus_path);
  run.input(corpus_path);
  const auto examples = build_examples(corpus, settings.history_len, settings.initial_score);
  const auto folds = make_folds(pair_ids_of(corpus), g.seed);
  if (fold_index >= folds.size()) {
    throw ValidationError("--fold " + std::to_string(fold_index) + " out of range (" +
                          std::to_string(folds.size()) + " folds)");
  }
  auto fr = run_fold(examples, folds[fold_index], fold_index, cond, settings, g.seed);
  if (!fr.result) throw ValidationError(fr.warning);
  const fs::path model_path = out_path.empty() ? g.out("model.model") : fs::path(out_path);
  save_classifier(model_path, *fr.model);
  run.manifest().add_output(model_path);
  json summary = *fr.result;
  summary["condition"] = to_string(cond);
  run.output(g.out("train_metrics.json"), summary.dump(2) + "\n");
  const auto& m = fr.result->metrics;
  std::printf("fold %zu %s: acc %.3f precision %.3f recall %.3f f1 %.3f (best epoch %zu)\n",
              fold_index, to_string(cond).c_str(), m.accuracy, m.precision, m.recall, m.f1,
              fr.result->best_epoch);
  run.finish();
  return 0;
}

int cmd_ablate(const Globals& g, CLI::App* sub, const std::string& corpus_path,
               const std::string& conditions, const std::string& models_dir) {
  Run run(g, "ablate");
  const auto settings = model_settings(g, sub);
  std::vector<AblationCondition> conds;
  for (const auto& c : split_list(conditions)) conds.push_back(parse_condition(c));
  if (conds.empty()) throw ValidationError("--conditions is empty");
  const auto corpus = read_corpus_jsonl(corpus_path);
  run.input(corpus_path);
  const auto results = run_ablation(corpus, conds, settings, g.seed);
  for (const auto& r : results) {
    for (const auto& w : r.warnings) std::cerr << "warning (" << to_string(r.condition) << "): " << w << "\n";
  }
  const auto report = render_ablation_report(results, g.seed);
  write_ablation_results(g.out("ablation_results.json"), results);
  run.manifest().add_output(g.out("ablation_results.json"));
  run.output(g.out("ablation_report.md"), report.markdown);
  run.output(g.out("ablation.csv"), report.csv);
  const fs::path mdir = models_dir.empty() ? g.out("models") : fs::path(models_dir);
  for (const auto& r : results) save_ensemble(mdir, r);
  std::cout << report.markdown;
  run.finish();
  return 0;
}

struct SimOptions {
  std::string corpus;
  std::string pair = "0";
  std::string methods = "baseline,vote-pd,vote-d";
  std::string models;
  std::string optimize = "both";
  bool transcript = false;
  std::string out;
};

EncoderCohesionScorer scorer_for(const Globals& g, std::span<const DialogueRecord> corpus) {
  const auto sec = g.section("scorer");
  EncoderConfig enc;
  if (sec.contains("encoder")) apply_json(sec.at("encoder"), enc);
  const std::uint64_t seed = sec.value("seed", derive_seed(g.seed, {0x5c0e}));
  return make_default_scorer(corpus, enc, seed);
}

bool parse_optimize(const std::string& s) {
  if (s == "both") return false;
  if (s == "y-only") return true;
  throw ValidationError("--optimize must be 'both' or 'y-only', got '" + s + "'");
}

Ensembles ensembles_for(const std::vector<MethodKind>& kinds, const fs::path& dir) {
  Ensembles e;
  for (auto k : kinds) {
    if (k == MethodKind::VotePD && e.pd.empty()) e.pd = load_ensemble(dir, AblationCondition::PD);
    if (k == MethodKind::VoteD && e.d.empty()) e.d = load_ensemble(dir, AblationCondition::D_only);
  }
  return e;
}

json simulation_json(const DialogueRecord& pair, const SimConfig& cfg,
                     const std::vector<SimulatedDialogue>& dialogues) {
  return {{"pair_id", pair.pair_id},
          {"seed", cfg.seed},
          {"candidates_per_turn", cfg.candidates_per_turn},
          {"common_turns", cfg.common_turns},
          {"condition_turns", cfg.condition_turns},
          {"initial_utterance", cfg.initial_utterance},
          {"optimize", cfg.optimize_y_only ? "y-only" : "both"},
          {"dialogues", dialogues}};
}

void apply_sim_section(const json& sec, SimConfig& cfg) {
  cfg.candidates_per_turn = sec.value("candidates_per_turn", cfg.candidates_per_turn);
  cfg.common_turns = sec.value("common_turns", cfg.common_turns);
  cfg.condition_turns = sec.value("condition_turns", cfg.condition_turns);
  cfg.initial_utterance = sec.value("initial_utterance", cfg.initial_utterance);
}

int cmd_simulate(const Globals& g, CLI::App* sub, const SimOptions& o) {
  Run run(g, "simulate");
  const auto sec = g.section("simulate");
  const auto corpus = read_corpus_jsonl(o.corpus);
  run.input(o.corpus);
  const auto& pair = find_pair(corpus, o.pair);
  std::vector<MethodKind> kinds;
  for (const auto& m : split_list(o.methods)) kinds.push_back(parse_method(m));
  if (kinds.empty()) throw ValidationError("--methods is empty");
  const fs::path mdir = o.models.empty() ? g.out("models") : fs::path(o.models);
  const auto methods = make_methods(kinds, ensembles_for(kinds, mdir));
  auto cfg = sim_config_for(pair, g.seed);
  apply_sim_section(sec, cfg);
  std::string optimize = o.optimize;
  if (!sub->get_option("--optimize")->count()) optimize = sec.value("optimize", optimize);
  cfg.optimize_y_only = parse_optimize(optimize);
  const auto scorer = scorer_for(g, corpus);
  const auto dialogues = run_simulation(cfg, methods, scorer);
  const fs::path out = o.out.empty() ? g.out("simulation.json") : fs::path(o.out);
  run.output(out, simulation_json(pair, cfg, dialogues).dump(2) + "\n");
  if (o.transcript || sec.value("transcript", false)) {
    run.output(g.out("transcript.md"), render_transcript(dialogues, cfg.common_turns));
  }
  run.finish();
  return 0;
}

struct ABOptions {
  std::string corpus;
  std::string models;
  std::size_t participants = 20;
  std::string items;
  std::string choices;
  bool scripted = false;
  bool prompt = false;
  std::string optimize = "both";
};

// Dialogue text for a "pair/method" reference, from <dir>/<pair>.json.
SimulatedDialogue load_dialogue(const fs::path& dir, const DialogueRef& ref) {
  const auto slash = ref.ref.rfind('/');
  if (slash == std::string::npos) throw ValidationError("bad dialogue reference " + ref.ref);
  const auto file = dir / (ref.ref.substr(0, slash) + ".json");
  const auto j = json::parse(read_text_file(file));
  for (const auto& d : j.at("dialogues")) {
    if (d.at("method").get<std::string>() == ref.method) return d.get<SimulatedDialogue>();
  }
  throw ValidationError(file.string() + " has no " + ref.method + " dialogue");
}

void print_dialogue(const SimulatedDialogue& d) {
  for (const auto& u : d.utterances) {
    std::cout << "  " << (u.speaker_id == d.speaker_x ? "X" : "Y") << ": " << u.text << "\n";
  }
}

int cmd_abtest(const Globals& g, CLI::App* sub, const ABOptions& o) {
  Run run(g, "abtest");
  const auto sec = g.section("abtest");
  const fs::path sim_dir = g.out("simulations");
  std::vector<ABItem> items;
  std::string optimize = o.optimize;
  if (!sub->get_option("--optimize")->count()) optimize = sec.value("optimize", optimize);
  std::size_t participants = o.participants;
  if (!sub->get_option("--participants")->count()) {
    participants = sec.value("participants", participants);
  }
  const bool scripted = o.scripted || sec.value("scripted", false);

  if (!o.items.empty()) {
    if (scripted) throw ValidationError("--scripted needs fresh simulations; drop --items");
    items = read_ab_items_json(o.items);
    run.input(o.items);
  } else {
    if (o.corpus.empty()) throw ValidationError("--corpus is required unless --items is given");
    const auto corpus = read_corpus_jsonl(o.corpus);
    run.input(o.corpus);
    const fs::path mdir = o.models.empty() ? g.out("models") : fs::path(o.models);
    const std::vector<MethodKind> kinds = {MethodKind::Baseline, MethodKind::VotePD,
                                           MethodKind::VoteD};
    const auto ensembles = ensembles_for(kinds, mdir);
    const auto scorer = scorer_for(g, corpus);
    const SynthConfig synth = g.section("synth").get<SynthConfig>();
    const auto ab = run_scripted_ab(corpus, participants, ensembles, scorer, synth, g.seed,
                                    parse_optimize(optimize));
    for (std::size_t p = 0; p < ab.simulations.size(); ++p) {
      auto cfg = sim_config_for(corpus[p], derive_seed(g.seed, {p}));
      cfg.optimize_y_only = parse_optimize(optimize);
      run.output(sim_dir / (corpus[p].pair_id + ".json"),
                 simulation_json(corpus[p], cfg, ab.simulations[p]).dump(2) + "\n");
    }
    items = ab.items;
    if (!scripted) {
      for (auto& it : items) it.choice = Choice::Absent;
    }
    run.output(g.out("ab_items.json"), [&] {
      std::vector<ABItem> blank = items;
      for (auto& it : blank) it.choice = Choice::Absent;
      json j;
      j["seed"] = g.seed;
      j["items"] = blank;
      return j.dump(2) + "\n";
    }());
  }

  if (!o.choices.empty()) {
    apply_choices(items, read_choices_csv(o.choices));
    run.input(o.choices);
  } else if (o.prompt) {
    for (auto& it : items) {
      std::cout << "\nItem " << it.item_id << " (participant " << it.participant_id
                << "): which dialogue leaves a better impression of Y?\n[1]\n";
      print_dialogue(load_dialogue(sim_dir, it.first));
      std::cout << "[2]\n";
      print_dialogue(load_dialogue(sim_dir, it.second));
      std::string answer;
      while (true) {
        std::cout << "choice (1/2): " << std::flush;
        if (!std::getline(std::cin, answer)) throw ValidationError("input ended before all items were answered");
        if (answer == "1" || answer == "2") break;
      }
      it.choice = answer == "1" ? Choice::First : Choice::Second;
    }
  }

  std::vector<ChoiceRecord> records;
  bool complete = true;
  for (const auto& it : items) {
    records.push_back({it.participant_id, it.item_id, it.choice});
    complete = complete && it.choice != Choice::Absent;
  }
  if (o.choices.empty()) run.output(g.out("choices.csv"), format_choices_csv(records));
  if (!complete) {
    std::cout << "choices incomplete; fill in choices.csv and rerun with --items ab_items.json "
                 "--choices choices.csv\n";
    run.finish();
    return 0;
  }
  const auto matrix = tally(items, report_method_order(items));
  const auto report = render_ab_report(matrix);
  run.output(g.out("ab_report.md"), report);
  std::cout << report;
  run.finish();
  return 0;
}

int cmd_report(const Globals& g, const std::string& ablation, const std::string& items_path,
               const std::string& choices) {
  if (ablation.empty() && items_path.empty()) {
    throw ValidationError("report: give --ablation and/or --items with --choices");
  }
  Run run(g, "report");
  // Render everything before writing anything.
  std::vector<std::pair<fs::path, std::string>> outputs;
  if (!ablation.empty()) {
    const auto results = read_ablation_results(ablation);
    run.input(ablation);
    const auto report = render_ablation_report(results, g.seed);
    outputs.emplace_back(g.out("ablation_report.md"), report.markdown);
    outputs.emplace_back(g.out("ablation.csv"), report.csv);
  }
  if (!items_path.empty()) {
    if (choices.empty()) throw ValidationError("report: --items needs --choices");
    auto items = read_ab_items_json(items_path);
    run.input(items_path);
    apply_choices(items, read_choices_csv(choices));
    run.input(choices);
    if (items.empty()) throw ValidationError("report: no A/B items");
    outputs.emplace_back(g.out("ab_report.md"), render_ab_report(tally(items, report_method_order(items))));
  }
  for (const auto& [p, text] : outputs) run.output(p, text);
  run.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lovesim: personality-conditioned impression-change prediction and dialogue simulation"};
  app.require_subcommand(1);
  Globals g;
  auto add_globals = [&](CLI::App* a) {
    a->add_option("--config", g.config_path, "JSON config with per-subcommand sections");
    a->add_option("--seed", g.seed, "Base random seed");
    a->add_option("--out-dir", g.out_dir, "Directory for artifacts");
    a->add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  };

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  add_globals(synth);
  std::string synth_out;
  synth->add_option("-o,--out", synth_out, "Corpus path (default <out-dir>/corpus.jsonl)");

  auto* annotate = app.add_subcommand("annotate", "Label utterances and build folds");
  add_globals(annotate);
  std::string annotate_corpus;
  annotate->add_option("--corpus", annotate_corpus)->required();

  auto* train = app.add_subcommand("train", "Train one classifier on one fold");
  add_globals(train);
  std::string train_corpus, train_cond = "pd", train_out;
  std::size_t train_fold = 0;
  train->add_option("--corpus", train_corpus)->required();
  train->add_option("--condition", train_cond, "pd, p, d or none");
  train->add_option("--fold", train_fold, "Fold index");
  train->add_option("-o,--out", train_out, "Model path (default <out-dir>/model.model)");

  auto* ablate = app.add_subcommand("ablate", "Cross-validated ablation over conditions");
  add_globals(ablate);
  std::string ablate_corpus, ablate_conds = "pd,p,d,none", ablate_models;
  ablate->add_option("--corpus", ablate_corpus)->required();
  ablate->add_option("--conditions", ablate_conds, "Comma list of pd, p, d, none");
  ablate->add_option("--models-dir", ablate_models, "Where fold models go (default <out-dir>/models)");

  auto* simulate = app.add_subcommand("simulate", "Simulate one pair under several selection methods");
  add_globals(simulate);
  SimOptions so;
  simulate->add_option("--corpus", so.corpus)->required();
  simulate->add_option("--pair", so.pair, "Pair id or 0-based index");
  simulate->add_option("--methods", so.methods, "Comma list of baseline, vote-pd, vote-d");
  simulate->add_option("--models", so.models, "Fold models from ablate (default <out-dir>/models)");
  simulate->add_option("--optimize", so.optimize, "both or y-only");
  simulate->add_flag("--transcript", so.transcript, "Also write transcript.md");
  simulate->add_option("-o,--out", so.out, "Output path (default <out-dir>/simulation.json)");

  auto* abtest = app.add_subcommand("abtest", "Build A/B items, collect choices and tally");
  add_globals(abtest);
  ABOptions ao;
  abtest->add_option("--corpus", ao.corpus);
  abtest->add_option("--models", ao.models, "Fold models from ablate (default <out-dir>/models)");
  abtest->add_option("--participants", ao.participants, "Pairs to simulate, one participant each");
  abtest->add_option("--items", ao.items, "Existing ab_items.json instead of new simulations");
  abtest->add_option("--choices", ao.choices, "choices.csv with participant_id,item_id,choice");
  abtest->add_flag("--scripted", ao.scripted, "Answer with the ground-truth oracle chooser");
  abtest->add_flag("--prompt", ao.prompt, "Ask for each choice on stdin");
  abtest->add_option("--optimize", ao.optimize, "both or y-only");

  auto* report = app.add_subcommand("report", "Render ablation and A/B reports from saved results");
  add_globals(report);
  std::string rep_ablation, rep_items, rep_choices;
  report->add_option("--ablation", rep_ablation, "ablation_results.json");
  report->add_option("--items", rep_items, "ab_items.json");
  report->add_option("--choices", rep_choices, "choices.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (!g.config_path.empty()) {
      try {
        g.config = json::parse(read_text_file(g.config_path));
      } catch (const json::parse_error& e) {
        throw ValidationError("config " + g.config_path + ": " + e.what());
      }
      if (!g.config.is_object()) throw ValidationError("config must be a JSON object");
    }
    CLI::App* sub = app.get_subcommands().front();
    // Config-file globals apply unless the flag was given.
    if (!sub->get_option("--seed")->count() && g.config.contains("seed")) {
      g.seed = g.config.at("seed").get<std::uint64_t>();
    }
    if (!sub->get_option("--out-dir")->count() && g.config.contains("out_dir")) {
      g.out_dir = g.config.at("out_dir").get<std::string>();
    }
    if (!sub->get_option("--threads")->count() && g.config.contains("threads")) {
      g.threads = g.config.at("threads").get<std::size_t>();
    }
    fs::create_directories(g.out_dir);

    if (sub == synth) return cmd_synth(g, synth_out);
    if (sub == annotate) return cmd_annotate(g, annotate_corpus);
    if (sub == train) return cmd_train(g, sub, train_corpus, train_cond, train_fold, train_out);
    if (sub == ablate) return cmd_ablate(g, sub, ablate_corpus, ablate_conds, ablate_models);
    if (sub == simulate) return cmd_simulate(g, sub, so);
    if (sub == abtest) return cmd_abtest(g, sub, ao);
    if (sub == report) return cmd_report(g, rep_ablation, rep_items, rep_choices);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
