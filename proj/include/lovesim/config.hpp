#pragma once

#include <nlohmann/json.hpp>

#include "lovesim/ablation.hpp"
#include "lovesim/adamw.hpp"
#include "lovesim/model.hpp"

namespace lovesim {

// Overlay the keys present in `j` onto an existing config. Unknown keys are
// validation errors so typos do not pass silently.
void apply_json(const nlohmann::json& j, EncoderConfig& c);
void apply_json(const nlohmann::json& j, TrainConfig& c);
// Keys: encoder, train, balance_pos, balance_neg (null = minority class
// count), vocab_max_size, history_len, initial_score, threads.
void apply_json(const nlohmann::json& j, CvSettings& s);

nlohmann::json encoder_config_json(const EncoderConfig& c);
nlohmann::json train_config_json(const TrainConfig& c);
nlohmann::json cv_settings_json(const CvSettings& s);

}  // namespace lovesim
