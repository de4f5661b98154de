#include "lovesim/config.hpp"

#include <set>

#include "lovesim/error.hpp"

namespace lovesim {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ValidationError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void take(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(out);
  } catch (const json::exception& e) {
    throw ValidationError(where + "." + key + ": " + e.what());
  }
}

}  // namespace

void apply_json(const json& j, EncoderConfig& c) {
  check_keys(j, {"vocab_size", "d_model", "n_layers", "n_heads", "d_ff", "max_len", "dropout",
                 "seed", "threshold"},
             "encoder");
  take(j, "vocab_size", c.vocab_size, "encoder");
  take(j, "d_model", c.d_model, "encoder");
  take(j, "n_layers", c.n_layers, "encoder");
  take(j, "n_heads", c.n_heads, "encoder");
  take(j, "d_ff", c.d_ff, "encoder");
  take(j, "max_len", c.max_len, "encoder");
  take(j, "dropout", c.dropout, "encoder");
  take(j, "seed", c.seed, "encoder");
  take(j, "threshold", c.threshold, "encoder");
}

void apply_json(const json& j, TrainConfig& c) {
  check_keys(j, {"epochs", "batch_size", "learning_rate", "beta1", "beta2", "epsilon",
                 "weight_decay", "bias_correction", "seed"},
             "train");
  take(j, "epochs", c.epochs, "train");
  take(j, "batch_size", c.batch_size, "train");
  take(j, "learning_rate", c.learning_rate, "train");
  take(j, "beta1", c.beta1, "train");
  take(j, "beta2", c.beta2, "train");
  take(j, "epsilon", c.epsilon, "train");
  take(j, "weight_decay", c.weight_decay, "train");
  take(j, "bias_correction", c.bias_correction, "train");
  take(j, "seed", c.seed, "train");
}

void apply_json(const json& j, CvSettings& s) {
  check_keys(j, {"encoder", "train", "balance_pos", "balance_neg", "vocab_max_size",
                 "history_len", "initial_score", "threads"},
             "ablate");
  if (j.contains("encoder")) apply_json(j.at("encoder"), s.encoder);
  if (j.contains("train")) apply_json(j.at("train"), s.train);
  for (auto [key, slot] : {std::pair{"balance_pos", &s.balance_pos},
                           std::pair{"balance_neg", &s.balance_neg}}) {
    if (!j.contains(key)) continue;
    if (j.at(key).is_null()) {
      slot->reset();
    } else {
      std::size_t v = 0;
      take(j, key, v, "ablate");
      *slot = v;
    }
  }
  take(j, "vocab_max_size", s.vocab_max_size, "ablate");
  take(j, "history_len", s.history_len, "ablate");
  take(j, "initial_score", s.initial_score, "ablate");
  take(j, "threads", s.threads, "ablate");
}

json encoder_config_json(const EncoderConfig& c) {
  return {{"vocab_size", c.vocab_size}, {"d_model", c.d_model}, {"n_layers", c.n_layers},
          {"n_heads", c.n_heads},       {"d_ff", c.d_ff},       {"max_len", c.max_len},
          {"dropout", c.dropout},       {"seed", c.seed},       {"threshold", c.threshold}};
}

json train_config_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"epsilon", c.epsilon},
          {"weight_decay", c.weight_decay},
          {"bias_correction", c.bias_correction},
          {"seed", c.seed}};
}

json cv_settings_json(const CvSettings& s) {
  json j = {{"encoder", encoder_config_json(s.encoder)},
            {"train", train_config_json(s.train)},
            {"vocab_max_size", s.vocab_max_size},
            {"history_len", s.history_len},
            {"initial_score", s.initial_score},
            {"threads", s.threads}};
  j["balance_pos"] = s.balance_pos ? json(*s.balance_pos) : json(nullptr);
  j["balance_neg"] = s.balance_neg ? json(*s.balance_neg) : json(nullptr);
  return j;
}

}  // namespace lovesim
