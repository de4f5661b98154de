#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lovesim/ablation.hpp"
#include "lovesim/abtest.hpp"
#include "lovesim/simulator.hpp"
#include "lovesim/synth.hpp"

namespace lovesim {

// <dir>/<condition>/fold_NN.model, one file per evaluated fold.
void save_ensemble(const std::filesystem::path& dir, const CvResult& result);
std::vector<Classifier> load_ensemble(const std::filesystem::path& dir, AblationCondition condition);

// Looks a pair up by id, falling back to a 0-based index into the corpus.
const DialogueRecord& find_pair(std::span<const DialogueRecord> corpus, const std::string& key);

// Template generators for both speakers of a recorded pair.
SimConfig sim_config_for(const DialogueRecord& pair, std::uint64_t seed);

struct Ensembles {
  std::vector<Classifier> pd;
  std::vector<Classifier> d;
};

std::vector<SelectionMethod> make_methods(std::span<const MethodKind> kinds, const Ensembles& e);

struct ABRun {
  std::vector<std::vector<SimulatedDialogue>> simulations;  // per participant
  std::vector<ABItem> items;                                // choices filled by the oracle
  WinMatrix matrix;
};

// Simulates the first `participants` pairs of the corpus with every method
// (each pair's X plays the participant), builds the A/B items and answers
// them with the ground-truth oracle chooser.
ABRun run_scripted_ab(std::span<const DialogueRecord> corpus, std::size_t participants,
                      const Ensembles& ensembles, const CohesionScorer& scorer,
                      const SynthConfig& synth, std::uint64_t seed, bool optimize_y_only = false);

// Fills every item's choice with scripted_choice over the two dialogues.
void oracle_choices(std::vector<ABItem>& items,
                    std::span<const std::vector<SimulatedDialogue>> simulations,
                    std::span<const DialogueRecord> pairs, std::size_t common_turns,
                    const SynthConfig& synth);

// Method order of the report: vote-pd, vote-d, baseline.
std::vector<std::string> report_method_order(std::span<const ABItem> items);

}  // namespace lovesim
