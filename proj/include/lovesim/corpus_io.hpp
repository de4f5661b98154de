#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lovesim/corpus.hpp"
#include "lovesim/synth.hpp"

namespace lovesim {

void to_json(nlohmann::json& j, const PersonalityProfile& p);
void from_json(const nlohmann::json& j, PersonalityProfile& p);
void to_json(nlohmann::json& j, const Utterance& u);
void from_json(const nlohmann::json& j, Utterance& u);
void to_json(nlohmann::json& j, const LoveScaleEvent& e);
void from_json(const nlohmann::json& j, LoveScaleEvent& e);
void to_json(nlohmann::json& j, const DialogueRecord& d);
void from_json(const nlohmann::json& j, DialogueRecord& d);
void to_json(nlohmann::json& j, const TrainingExample& e);
void from_json(const nlohmann::json& j, TrainingExample& e);
void to_json(nlohmann::json& j, const Fold& f);
void from_json(const nlohmann::json& j, Fold& f);
void to_json(nlohmann::json& j, const SynthConfig& c);
void from_json(const nlohmann::json& j, SynthConfig& c);

// Reads one record per line; blank lines are skipped. Records are validated.
std::vector<DialogueRecord> read_corpus_jsonl(const std::filesystem::path& path);
void write_corpus_jsonl(const std::filesystem::path& path, const std::vector<DialogueRecord>& corpus);

std::vector<TrainingExample> read_examples_jsonl(const std::filesystem::path& path);
void write_examples_jsonl(const std::filesystem::path& path,
                          const std::vector<TrainingExample>& examples);

std::vector<Fold> read_folds_json(const std::filesystem::path& path);
void write_folds_json(const std::filesystem::path& path, const std::vector<Fold>& folds);

// Whole-file helpers shared by the other writers.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace lovesim
